/**
 * @file solver.hpp
 * @brief Closed-form optimal zero-cost claims.
 *
 * Optimality (necessary and sufficient, the problem being a convex QP with
 * equality constraints only):
 *
 *     2a M x + B lambda = 2a c + d,    B^T x = 0,
 *
 * and summing the price rows (resp. weather rows) forces lambda = (1, 1).
 * The system M x = c + (d - b) / 2a has one redundant price row and one
 * redundant weather row, because the all-ones vectors on each block span the
 * null space of M. Dropping the last row of each block and appending B^T
 * gives a square system that is nonsingular for generic measures.
 */

#pragma once

#include "hedge/moments.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace hedge
{

inline constexpr double kSingularityThreshold = 1e-12;
inline constexpr double kFocTolerance = 1e-8;

struct HedgeSolution
{
    VectorXd pricePayoff;   ///< claim value per price level
    VectorXd weatherPayoff; ///< claim value per weather level
    double lambdaPrice = 0.0;
    double lambdaWeather = 0.0;
    double riskAversion = 0.0;
    double focResidual = 0.0; ///< max-norm of the stationarity residual on the active blocks
    double costResidualPrice = 0.0;
    double costResidualWeather = 0.0;

    VectorXd stacked() const { return HedgeSystem::stack(pricePayoff, weatherPayoff); }
};

/// x^a = riskMinimizing + profitTilt / (2a) for every a > 0.
struct TwoFundBasis
{
    VectorXd profitTilt;     ///< solves the system with right-hand side d - b
    VectorXd riskMinimizing; ///< solves the system with right-hand side c
    Index priceCount = 0;

    VectorXd combine(double riskAversion) const { return riskMinimizing + profitTilt / (2.0 * riskAversion); }
};

struct FocReport
{
    double stationarity = 0.0; ///< ||2aMx + B lambda - (2ac + d)||_max
    double feasibility = 0.0;  ///< ||B^T x||_max
    double scale = 1.0;        ///< max(1, ||2ac + d||_max)

    bool satisfied(double tolerance = kFocTolerance) const
    {
        return stationarity <= tolerance * scale && feasibility <= tolerance;
    }
};

enum class HedgeRestriction
{
    PriceOnly,
    WeatherOnly
};

namespace detail
{

inline void requirePositiveRiskAversion(double a)
{
    if (!(a > 0.0)) throw InvalidInput("risk aversion must be positive");
}

/**
 * Square KKT system [M-hat; B^T] for a list of covariance blocks. Rows to drop
 * are the last row of every block; the constraint rows are the pricing
 * marginals of each block.
 */
class StackedSystem
{
public:
    StackedSystem(const MatrixXd& covariance, const std::vector<Index>& blockSizes,
                  const std::vector<const VectorXd*>& pricing)
        : blockSizes_(blockSizes)
    {
        const Index dim = covariance.rows();
        MatrixXd stacked(dim, dim);
        Index row = 0;
        Index start = 0;
        for (Index size : blockSizes_)
        {
            for (Index r = start; r < start + size - 1; ++r)
                stacked.row(row++) = covariance.row(r);
            start += size;
        }
        start = 0;
        for (std::size_t b = 0; b < blockSizes_.size(); ++b)
        {
            stacked.row(row).setZero();
            stacked.row(row).segment(start, blockSizes_[b]) = pricing[b]->transpose();
            ++row;
            start += blockSizes_[b];
        }

        qr_.compute(stacked);
        const double norm = stacked.cwiseAbs().maxCoeff();
        const double minPivot = qr_.matrixQR().diagonal().cwiseAbs().minCoeff();
        if (!(minPivot > kSingularityThreshold * norm))
            throw NumericalFailure("non-generic instance: stacked system singular");
    }

    /// Solve with the full-length top right-hand side; redundant entries are dropped.
    VectorXd solve(const VectorXd& top) const
    {
        VectorXd rhs = VectorXd::Zero(top.size());
        Index row = 0;
        Index start = 0;
        for (Index size : blockSizes_)
        {
            for (Index r = start; r < start + size - 1; ++r)
                rhs[row++] = top[r];
            start += size;
        }
        return qr_.solve(rhs);
    }

private:
    std::vector<Index> blockSizes_;
    Eigen::ColPivHouseholderQR<MatrixXd> qr_;
};

inline StackedSystem fullSystem(const HedgeSystem& sys)
{
    return StackedSystem(sys.covariance(), {sys.priceCount(), sys.weatherCount()},
                         {&sys.pricePricing, &sys.weatherPricing});
}

inline VectorXd topRhs(const VectorXd& loading, const VectorXd& real, const VectorXd& pricing, double a)
{
    return loading + (real - pricing) / (2.0 * a);
}

/// lambda from the summed block rows, residual of the blocks flagged active.
inline HedgeSolution finalize(const HedgeSystem& sys, VectorXd pricePayoff, VectorXd weatherPayoff, double a,
                              bool priceActive, bool weatherActive)
{
    HedgeSolution sol;
    sol.pricePayoff = std::move(pricePayoff);
    sol.weatherPayoff = std::move(weatherPayoff);
    sol.riskAversion = a;

    const Index n = sys.priceCount();
    const Index m = sys.weatherCount();
    const VectorXd x = sol.stacked();
    const VectorXd target = sys.realWorldMarginals() + 2.0 * a * sys.riskLoading();
    const VectorXd partial = target - 2.0 * a * (sys.covariance() * x);
    sol.lambdaPrice = partial.head(n).sum() / sys.pricePricing.sum();
    sol.lambdaWeather = partial.tail(m).sum() / sys.weatherPricing.sum();

    VectorXd residual = -partial;
    residual.head(n) += sol.lambdaPrice * sys.pricePricing;
    residual.tail(m) += sol.lambdaWeather * sys.weatherPricing;
    double worst = 0.0;
    if (priceActive) worst = std::max(worst, residual.head(n).cwiseAbs().maxCoeff());
    if (weatherActive) worst = std::max(worst, residual.tail(m).cwiseAbs().maxCoeff());
    sol.focResidual = worst;
    sol.costResidualPrice = std::abs(sys.pricePricing.dot(sol.pricePayoff));
    sol.costResidualWeather = std::abs(sys.weatherPricing.dot(sol.weatherPayoff));
    return sol;
}

} // namespace detail

/**
 * @brief Optimal price and weather claims for risk aversion a > 0.
 * @throws InvalidInput for a <= 0, NumericalFailure when [M-hat; B^T] is
 *         numerically singular.
 */
inline HedgeSolution solveGeneral(const HedgeSystem& sys, double riskAversion)
{
    detail::requirePositiveRiskAversion(riskAversion);
    const detail::StackedSystem kkt = detail::fullSystem(sys);
    const VectorXd x = kkt.solve(
        detail::topRhs(sys.riskLoading(), sys.realWorldMarginals(), sys.pricingMarginals(), riskAversion));
    return detail::finalize(sys, x.head(sys.priceCount()), x.tail(sys.weatherCount()), riskAversion, true, true);
}

inline TwoFundBasis twoFundBasis(const HedgeSystem& sys)
{
    const detail::StackedSystem kkt = detail::fullSystem(sys);
    TwoFundBasis basis;
    basis.profitTilt = kkt.solve(sys.realWorldMarginals() - sys.pricingMarginals());
    basis.riskMinimizing = kkt.solve(sys.riskLoading());
    basis.priceCount = sys.priceCount();
    return basis;
}

/// Wrap an arbitrary claim pair (e.g. a perturbed or foreign solution) with diagnostics.
inline HedgeSolution makeSolution(const HedgeSystem& sys, VectorXd pricePayoff, VectorXd weatherPayoff,
                                  double riskAversion)
{
    if (pricePayoff.size() != sys.priceCount() || weatherPayoff.size() != sys.weatherCount())
        throw InvalidInput("claim dimensions do not match the system");
    return detail::finalize(sys, std::move(pricePayoff), std::move(weatherPayoff), riskAversion, true, true);
}

inline HedgeSolution solutionFromBasis(const HedgeSystem& sys, const TwoFundBasis& basis, double riskAversion)
{
    detail::requirePositiveRiskAversion(riskAversion);
    const VectorXd x = basis.combine(riskAversion);
    return makeSolution(sys, x.head(sys.priceCount()), x.tail(sys.weatherCount()), riskAversion);
}

/**
 * Residuals of the optimality conditions using the solution's multipliers.
 * Reports, never throws on a bad solution.
 */
inline FocReport verifyFOC(const HedgeSystem& sys, const HedgeSolution& sol, double riskAversion)
{
    if (sol.pricePayoff.size() != sys.priceCount() || sol.weatherPayoff.size() != sys.weatherCount())
        throw InvalidInput("claim dimensions do not match the system");
    const Index n = sys.priceCount();
    const Index m = sys.weatherCount();
    const VectorXd x = sol.stacked();
    const VectorXd target = 2.0 * riskAversion * sys.riskLoading() + sys.realWorldMarginals();

    VectorXd residual = 2.0 * riskAversion * (sys.covariance() * x) - target;
    residual.head(n) += sol.lambdaPrice * sys.pricePricing;
    residual.tail(m) += sol.lambdaWeather * sys.weatherPricing;

    FocReport report;
    report.stationarity = residual.cwiseAbs().maxCoeff();
    report.feasibility = std::max(std::abs(sys.pricePricing.dot(sol.pricePayoff)),
                                  std::abs(sys.weatherPricing.dot(sol.weatherPayoff)));
    report.scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    return report;
}

namespace detail
{

inline VectorXd solveBlock(const MatrixXd& cov, const VectorXd& loading, const VectorXd& real,
                           const VectorXd& pricing, double a)
{
    const StackedSystem kkt(cov, {cov.rows()}, {&pricing});
    return kkt.solve(topRhs(loading, real, pricing, a));
}

} // namespace detail

/**
 * @brief Decoupled solve for psi-independent price and weather.
 * @throws InvalidInput "measure not independent" if ||crossCov||_max > 1e-10.
 */
inline HedgeSolution solveIndependent(const HedgeSystem& sys, double riskAversion)
{
    detail::requirePositiveRiskAversion(riskAversion);
    if (sys.crossCov.size() > 0 && sys.crossCov.cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidInput("measure not independent: price/weather cross-covariance is nonzero");
    VectorXd xP = detail::solveBlock(sys.priceCov, sys.priceRiskLoading, sys.priceProb, sys.pricePricing,
                                     riskAversion);
    VectorXd xW = detail::solveBlock(sys.weatherCov, sys.weatherRiskLoading, sys.weatherProb,
                                     sys.weatherPricing, riskAversion);
    return detail::finalize(sys, std::move(xP), std::move(xW), riskAversion, true, true);
}

/// Best claim on one index only; the other claim is fixed at zero.
inline HedgeSolution solveRestricted(const HedgeSystem& sys, double riskAversion, HedgeRestriction which)
{
    detail::requirePositiveRiskAversion(riskAversion);
    if (which == HedgeRestriction::PriceOnly)
    {
        VectorXd xP = detail::solveBlock(sys.priceCov, sys.priceRiskLoading, sys.priceProb, sys.pricePricing,
                                         riskAversion);
        return detail::finalize(sys, std::move(xP), VectorXd::Zero(sys.weatherCount()), riskAversion, true,
                                false);
    }
    VectorXd xW = detail::solveBlock(sys.weatherCov, sys.weatherRiskLoading, sys.weatherProb, sys.weatherPricing,
                                     riskAversion);
    return detail::finalize(sys, VectorXd::Zero(sys.priceCount()), std::move(xW), riskAversion, false, true);
}

} // namespace hedge
