/**
 * @file distributions.hpp
 * @brief Discrete scenario supports and the two probability measures of the
 *        hedging model.
 *
 * A RealWorldMeasure is a joint probability table on prices x quantities x
 * weather values. A RiskNeutralMeasure only needs the price and weather
 * marginals, since zero-cost constraints are expectations of a claim written
 * on one index at a time.
 *
 * Measures can be built from user tables (validated) or by discretizing a
 * Gaussian parameter set in (log price, log quantity, weather) coordinates on
 * an equally spaced mean +/- 3 sd grid.
 */

#pragma once

#include "hedge/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hedge
{

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Total-mass tolerance for measures produced by discretization.
inline constexpr double kConstructionTolerance = 1e-12;
/// Total-mass tolerance for user-supplied tables (rounded data).
inline constexpr double kUserTolerance = 1e-9;

struct ScenarioGrid
{
    VectorXd prices;     ///< currency / MWh
    VectorXd quantities; ///< MWh
    VectorXd weather;    ///< index units, may be negative

    Index priceCount() const { return prices.size(); }
    Index quantityCount() const { return quantities.size(); }
    Index weatherCount() const { return weather.size(); }
};

struct ValidationReport
{
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }

    std::string summary() const
    {
        std::ostringstream out;
        for (std::size_t i = 0; i < violations.size(); ++i)
        {
            if (i) out << "; ";
            out << violations[i];
        }
        return out.str();
    }
};

namespace detail
{

inline void checkAxis(const VectorXd& axis, const char* name, bool nonnegative, ValidationReport& report,
                      Index minPoints = 2)
{
    if (axis.size() < minPoints)
    {
        report.violations.push_back(std::string(name) + ": support needs at least " + std::to_string(minPoints) +
                                    " point" + (minPoints == 1 ? "" : "s"));
        return;
    }
    for (Index i = 0; i < axis.size(); ++i)
    {
        if (!std::isfinite(axis[i]))
        {
            report.violations.push_back(std::string(name) + ": non-finite support value");
            return;
        }
    }
    for (Index i = 1; i < axis.size(); ++i)
    {
        if (!(axis[i] > axis[i - 1]))
        {
            report.violations.push_back(std::string(name) + ": support not strictly increasing");
            break;
        }
    }
    if (nonnegative && axis.minCoeff() < 0.0)
        report.violations.push_back(std::string(name) + ": negative support value");
}

inline void checkProbabilities(std::span<const double> values, double tolerance, ValidationReport& report,
                               const std::string& what)
{
    double total = 0.0;
    bool negative = false;
    bool finite = true;
    for (double v : values)
    {
        if (!std::isfinite(v)) finite = false;
        if (v < 0.0) negative = true;
        total += v;
    }
    if (!finite) report.violations.push_back(what + ": non-finite probability");
    if (negative) report.violations.push_back(what + ": negative probability");
    if (!(std::abs(total - 1.0) <= tolerance))
    {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": total != 1 (sum = " << total << ")";
        report.violations.push_back(msg.str());
    }
}

} // namespace detail

inline ValidationReport validateGrid(const ScenarioGrid& grid)
{
    ValidationReport report;
    detail::checkAxis(grid.prices, "prices", true, report);
    // claims are written on price and weather only; a single demand level is allowed
    detail::checkAxis(grid.quantities, "quantities", true, report, 1);
    detail::checkAxis(grid.weather, "weather", false, report);
    return report;
}

/// Flat row-major (price, quantity, weather) table of n * l * m entries.
class ProbabilityTable
{
public:
    ProbabilityTable() = default;

    ProbabilityTable(Index prices, Index quantities, Index weather, std::vector<double> values)
        : prices_(prices), quantities_(quantities), weather_(weather), values_(std::move(values))
    {
        if (prices < 0 || quantities < 0 || weather < 0 ||
            static_cast<std::size_t>(prices * quantities * weather) != values_.size())
            throw InvalidInput("probability table: expected " + std::to_string(prices * quantities * weather) +
                               " entries, got " + std::to_string(values_.size()));
    }

    ProbabilityTable(Index prices, Index quantities, Index weather)
        : ProbabilityTable(prices, quantities, weather,
                           std::vector<double>(static_cast<std::size_t>(prices * quantities * weather), 0.0))
    {
    }

    Index priceCount() const { return prices_; }
    Index quantityCount() const { return quantities_; }
    Index weatherCount() const { return weather_; }

    std::size_t offset(Index i, Index j, Index k) const
    {
        return static_cast<std::size_t>((i * quantities_ + j) * weather_ + k);
    }

    double operator()(Index i, Index j, Index k) const { return values_[offset(i, j, k)]; }
    double& operator()(Index i, Index j, Index k) { return values_[offset(i, j, k)]; }

    std::span<const double> values() const { return values_; }

private:
    Index prices_ = 0;
    Index quantities_ = 0;
    Index weather_ = 0;
    std::vector<double> values_;
};

inline ValidationReport validateMeasure(const ScenarioGrid& grid, const ProbabilityTable& probs,
                                        double tolerance = kUserTolerance)
{
    ValidationReport report = validateGrid(grid);
    if (probs.priceCount() != grid.priceCount() || probs.quantityCount() != grid.quantityCount() ||
        probs.weatherCount() != grid.weatherCount())
    {
        report.violations.push_back("probability table shape does not match grid");
        return report;
    }
    detail::checkProbabilities(probs.values(), tolerance, report, "probabilities");
    return report;
}

inline ValidationReport validateMeasure(const VectorXd& prices, const VectorXd& weather,
                                        const VectorXd& priceMarginal, const VectorXd& weatherMarginal,
                                        double tolerance = kUserTolerance)
{
    ValidationReport report;
    detail::checkAxis(prices, "prices", true, report);
    detail::checkAxis(weather, "weather", false, report);
    if (priceMarginal.size() != prices.size())
        report.violations.push_back("price marginal length does not match price support");
    else
        detail::checkProbabilities({priceMarginal.data(), static_cast<std::size_t>(priceMarginal.size())},
                                   tolerance, report, "price marginal");
    if (weatherMarginal.size() != weather.size())
        report.violations.push_back("weather marginal length does not match weather support");
    else
        detail::checkProbabilities({weatherMarginal.data(), static_cast<std::size_t>(weatherMarginal.size())},
                                   tolerance, report, "weather marginal");
    return report;
}

/**
 * @brief The retailer's joint belief on P x Q x W.
 *
 * Immutable after construction. Marginals are computed once, each by direct
 * summation of the table in (price, quantity, weather) order.
 */
class RealWorldMeasure
{
public:
    RealWorldMeasure(ScenarioGrid grid, ProbabilityTable probs, double tolerance = kUserTolerance)
        : grid_(std::move(grid)), probs_(std::move(probs))
    {
        const ValidationReport report = validateMeasure(grid_, probs_, tolerance);
        if (!report.valid()) throw InvalidInput("invalid real-world measure: " + report.summary());

        const Index n = grid_.priceCount();
        const Index l = grid_.quantityCount();
        const Index m = grid_.weatherCount();
        priceMarginal_ = VectorXd::Zero(n);
        quantityMarginal_ = VectorXd::Zero(l);
        weatherMarginal_ = VectorXd::Zero(m);
        priceWeather_ = MatrixXd::Zero(n, m);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < l; ++j)
                for (Index k = 0; k < m; ++k)
                {
                    const double v = probs_(i, j, k);
                    priceMarginal_[i] += v;
                    quantityMarginal_[j] += v;
                    weatherMarginal_[k] += v;
                    priceWeather_(i, k) += v;
                }
    }

    const ScenarioGrid& grid() const { return grid_; }
    const ProbabilityTable& table() const { return probs_; }
    double prob(Index i, Index j, Index k) const { return probs_(i, j, k); }

    const VectorXd& priceMarginal() const { return priceMarginal_; }
    const VectorXd& quantityMarginal() const { return quantityMarginal_; }
    const VectorXd& weatherMarginal() const { return weatherMarginal_; }
    /// 2-marginal on P x W (n x m).
    const MatrixXd& priceWeatherMarginal() const { return priceWeather_; }

private:
    ScenarioGrid grid_;
    ProbabilityTable probs_;
    VectorXd priceMarginal_;
    VectorXd quantityMarginal_;
    VectorXd weatherMarginal_;
    MatrixXd priceWeather_;
};

/// Pricing measure: marginals on the price and weather supports.
class RiskNeutralMeasure
{
public:
    RiskNeutralMeasure(VectorXd prices, VectorXd weather, VectorXd priceMarginal, VectorXd weatherMarginal,
                       double tolerance = kUserTolerance)
        : prices_(std::move(prices)), weather_(std::move(weather)), priceMarginal_(std::move(priceMarginal)),
          weatherMarginal_(std::move(weatherMarginal))
    {
        const ValidationReport report =
            validateMeasure(prices_, weather_, priceMarginal_, weatherMarginal_, tolerance);
        if (!report.valid()) throw InvalidInput("invalid risk-neutral measure: " + report.summary());
    }

    const VectorXd& prices() const { return prices_; }
    const VectorXd& weather() const { return weather_; }
    const VectorXd& priceMarginal() const { return priceMarginal_; }
    const VectorXd& weatherMarginal() const { return weatherMarginal_; }

private:
    VectorXd prices_;
    VectorXd weather_;
    VectorXd priceMarginal_;
    VectorXd weatherMarginal_;
};

/// phi := psi marginals. Mostly useful for the phi = psi special case.
inline RiskNeutralMeasure riskNeutralFromRealWorld(const RealWorldMeasure& psi)
{
    return RiskNeutralMeasure(psi.grid().prices, psi.grid().weather, psi.priceMarginal(), psi.weatherMarginal());
}

/**
 * Parametric input: log price and log quantity are normal, the weather index
 * is normal in levels. A risk-neutral spec only reads the price/weather fields
 * and rhoWP.
 */
struct GaussianSpec
{
    double meanLogPrice = 0.0;
    double sdLogPrice = 1.0;
    double meanLogQuantity = 0.0;
    double sdLogQuantity = 1.0;
    double meanWeather = 0.0;
    double sdWeather = 1.0;
    double rhoPQ = 0.0; ///< Cor(log p, log q)
    double rhoWQ = 0.0; ///< Cor(w, log q)
    double rhoWP = 0.0; ///< Cor(w, log p)
    int gridPoints = 100;
};

namespace presets
{

/// Real-world parameters of the reference study; rhoWP = 0 is the independence case.
inline GaussianSpec realWorld(double rhoWP = 0.0, int gridPoints = 100)
{
    GaussianSpec s;
    s.meanLogPrice = 4.15;
    s.sdLogPrice = 0.65;
    s.meanLogQuantity = 7.99;
    s.sdLogQuantity = 0.20;
    s.meanWeather = 50.5;
    s.sdWeather = 43.5;
    s.rhoPQ = 0.40;
    s.rhoWQ = 0.65;
    s.rhoWP = rhoWP;
    s.gridPoints = gridPoints;
    return s;
}

inline GaussianSpec riskNeutral(double rhoWP = 0.0, int gridPoints = 100)
{
    GaussianSpec s;
    s.meanLogPrice = 4.40;
    s.sdLogPrice = 0.65;
    s.meanLogQuantity = 7.99;
    s.sdLogQuantity = 0.20;
    s.meanWeather = 54.6;
    s.sdWeather = 43.5;
    s.rhoWP = rhoWP;
    s.gridPoints = gridPoints;
    return s;
}

inline constexpr double kRetailRate = 120.0;
inline constexpr double kRiskAversion = 1.0;

} // namespace presets

/// Equally spaced nodes from mean - 3 sd to mean + 3 sd; both endpoints exact.
inline VectorXd discretizationAxis(double mean, double sd, int points)
{
    VectorXd axis(points);
    const double lo = mean - 3.0 * sd;
    const double hi = mean + 3.0 * sd;
    for (int i = 0; i < points; ++i)
        axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    axis[0] = lo;
    axis[points - 1] = hi;
    return axis;
}

namespace detail
{

inline void requirePositiveSd(double sd, const char* name)
{
    if (!(sd > 0.0) || !std::isfinite(sd))
        throw InvalidInput(std::string("degenerate grid: ") + name +
                           " must be positive (support would not be strictly increasing)");
}

inline void requireCorrelation(double rho, const char* name)
{
    if (!(std::abs(rho) <= 1.0))
        throw InvalidInput(std::string("invalid correlation structure: |") + name + "| > 1");
}

inline void requirePositiveDefinite(const MatrixXd& corr)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 1e-12))
        throw InvalidInput("invalid correlation structure: correlation matrix is not positive definite");
}

inline void requireGridPoints(int points)
{
    if (points < 2) throw InvalidInput("grid_points must be at least 2");
}

inline VectorXd exponentiate(const VectorXd& v)
{
    return v.array().exp().matrix();
}

inline void requireStrictlyIncreasing(const VectorXd& axis, const char* name)
{
    for (Index i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw InvalidInput(std::string("degenerate grid: ") + name + " support not strictly increasing");
}

} // namespace detail

namespace detail
{

inline MatrixXd bivariateNodeTable(const GaussianSpec& spec, const VectorXd& logPrices, const VectorXd& weather)
{
    detail::requirePositiveSd(spec.sdLogPrice, "sd_log_price");
    detail::requirePositiveSd(spec.sdWeather, "sd_weather");
    detail::requireCorrelation(spec.rhoWP, "rho_wp");
    MatrixXd corr(2, 2);
    corr << 1.0, spec.rhoWP, spec.rhoWP, 1.0;
    detail::requirePositiveDefinite(corr);

    const double rho = spec.rhoWP;
    const double oneMinus = 1.0 - rho * rho;
    MatrixXd table(logPrices.size(), weather.size());
    for (Index i = 0; i < logPrices.size(); ++i)
    {
        const double zp = (logPrices[i] - spec.meanLogPrice) / spec.sdLogPrice;
        for (Index k = 0; k < weather.size(); ++k)
        {
            const double zw = (weather[k] - spec.meanWeather) / spec.sdWeather;
            table(i, k) = -(zp * zp - 2.0 * rho * zp * zw + zw * zw) / (2.0 * oneMinus);
        }
    }
    table = (table.array() - table.maxCoeff()).exp().matrix();
    table /= table.sum();
    return table;
}

} // namespace detail

/**
 * @brief Normalized node-density table of the bivariate normal of
 *        (log price, weather) on its own mean +/- 3 sd grid (n x n).
 */
inline MatrixXd discretizePriceWeatherTable(const GaussianSpec& spec)
{
    detail::requireGridPoints(spec.gridPoints);
    detail::requirePositiveSd(spec.sdLogPrice, "sd_log_price");
    detail::requirePositiveSd(spec.sdWeather, "sd_weather");
    const int n = spec.gridPoints;
    return detail::bivariateNodeTable(spec, discretizationAxis(spec.meanLogPrice, spec.sdLogPrice, n),
                                      discretizationAxis(spec.meanWeather, spec.sdWeather, n));
}

/**
 * @brief Discretize the trivariate Gaussian coupling onto an n^3 grid.
 *
 * psi(i,j,k) = psi_pw(i,k) * g(j | i,k): psi_pw is the node-density bivariate
 * normal of (log p, w) and g the node-density conditional normal of log q
 * given (log p, w), normalized over the quantity axis. The (p,w) 2-marginal
 * is therefore exactly the discretized bivariate normal, so rhoWP = 0 gives
 * exact price/weather independence regardless of the quantity couplings.
 */
inline RealWorldMeasure discretizeRealWorld(const GaussianSpec& spec)
{
    detail::requirePositiveSd(spec.sdLogQuantity, "sd_log_quantity");
    detail::requireCorrelation(spec.rhoPQ, "rho_pq");
    detail::requireCorrelation(spec.rhoWQ, "rho_wq");
    detail::requireCorrelation(spec.rhoWP, "rho_wp");
    MatrixXd corr(3, 3);
    corr << 1.0, spec.rhoPQ, spec.rhoWP, //
        spec.rhoPQ, 1.0, spec.rhoWQ,     //
        spec.rhoWP, spec.rhoWQ, 1.0;
    detail::requireGridPoints(spec.gridPoints);
    detail::requirePositiveDefinite(corr);

    const int n = spec.gridPoints;
    const VectorXd lp = discretizationAxis(spec.meanLogPrice, spec.sdLogPrice, n);
    const VectorXd lq = discretizationAxis(spec.meanLogQuantity, spec.sdLogQuantity, n);
    const VectorXd w = discretizationAxis(spec.meanWeather, spec.sdWeather, n);
    const MatrixXd priceWeather = detail::bivariateNodeTable(spec, lp, w);

    // regression of z_q on (z_p, z_w)
    const double det = 1.0 - spec.rhoWP * spec.rhoWP;
    const double betaP = (spec.rhoPQ - spec.rhoWP * spec.rhoWQ) / det;
    const double betaW = (spec.rhoWQ - spec.rhoWP * spec.rhoPQ) / det;
    const double condVar = 1.0 - (spec.rhoPQ * betaP + spec.rhoWQ * betaW);

    ProbabilityTable table(n, n, n);
    VectorXd logWeight(n);
    for (int i = 0; i < n; ++i)
    {
        const double zp = (lp[i] - spec.meanLogPrice) / spec.sdLogPrice;
        for (int k = 0; k < n; ++k)
        {
            const double zw = (w[k] - spec.meanWeather) / spec.sdWeather;
            const double condMean = betaP * zp + betaW * zw;
            for (int j = 0; j < n; ++j)
            {
                const double zq = (lq[j] - spec.meanLogQuantity) / spec.sdLogQuantity;
                logWeight[j] = -(zq - condMean) * (zq - condMean) / (2.0 * condVar);
            }
            const VectorXd weight = (logWeight.array() - logWeight.maxCoeff()).exp().matrix();
            const double mass = priceWeather(i, k) / weight.sum();
            for (int j = 0; j < n; ++j)
                table(i, j, k) = mass * weight[j];
        }
    }

    ScenarioGrid grid{detail::exponentiate(lp), detail::exponentiate(lq), w};
    detail::requireStrictlyIncreasing(grid.prices, "price");
    detail::requireStrictlyIncreasing(grid.quantities, "quantity");
    detail::requireStrictlyIncreasing(grid.weather, "weather");
    return RealWorldMeasure(std::move(grid), std::move(table), kConstructionTolerance);
}

inline RiskNeutralMeasure discretizeRiskNeutral(const GaussianSpec& spec)
{
    const MatrixXd table = discretizePriceWeatherTable(spec);
    const int n = spec.gridPoints;
    VectorXd prices = detail::exponentiate(discretizationAxis(spec.meanLogPrice, spec.sdLogPrice, n));
    VectorXd weather = discretizationAxis(spec.meanWeather, spec.sdWeather, n);
    detail::requireStrictlyIncreasing(prices, "price");
    detail::requireStrictlyIncreasing(weather, "weather");
    return RiskNeutralMeasure(std::move(prices), std::move(weather), table.rowwise().sum(),
                              table.colwise().sum().transpose(), kConstructionTolerance);
}

/**
 * Discretize the pricing measure on an existing support, normally the
 * real-world grid, so that both measures live on the same P x W. The GaussianSpec's
 * gridPoints is ignored; prices must be positive.
 */
inline RiskNeutralMeasure discretizeRiskNeutral(const GaussianSpec& spec, const ScenarioGrid& support)
{
    const ValidationReport report = validateGrid(support);
    if (!report.valid()) throw InvalidInput("invalid support: " + report.summary());
    if (!(support.prices.minCoeff() > 0.0))
        throw InvalidInput("risk-neutral discretization needs strictly positive prices");
    const MatrixXd table =
        detail::bivariateNodeTable(spec, support.prices.array().log().matrix(), support.weather);
    return RiskNeutralMeasure(support.prices, support.weather, table.rowwise().sum(),
                              table.colwise().sum().transpose(), kConstructionTolerance);
}

} // namespace hedge
