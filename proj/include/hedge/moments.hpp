/**
 * @file moments.hpp
 * @brief Moment assembly for the quadratic form of the hedging objective.
 *
 * With price and weather claims written as payoff vectors over the supports,
 * the mean-variance objective of the hedged profit becomes
 *
 *     U(x) = mu - a s2 + (d + 2a c)^T x - a x^T M x,   x = [x_price; x_weather]
 *
 * where M is the covariance of the stacked one-hot indicators of the realized
 * price and weather levels, c is minus their covariance with the unhedged
 * profit, and d holds the real-world marginals. Zero-cost constraints read
 * B^T x = 0 with B = blockdiag(phi_p, phi_w).
 */

#pragma once

#include "hedge/distributions.hpp"

#include <string>

namespace hedge
{

/// Unhedged retailer profit: buy at spot p, sell q at retail rate r.
inline double profit(double price, double quantity, double retailRate)
{
    return (retailRate - price) * quantity;
}

struct HedgeSystem
{
    double retailRate = 0.0;
    double profitMean = 0.0;     ///< E[y]
    double profitVariance = 0.0; ///< Var[y]
    VectorXd profitMeanGivenPrice;   ///< E[y | p], n
    VectorXd profitMeanGivenWeather; ///< E[y | w], m

    /// mu_y psi_p - E[y|p] o psi_p  (= -Cov(price indicator, y))
    VectorXd priceRiskLoading;
    VectorXd weatherRiskLoading;

    MatrixXd priceCov;   ///< Diag(psi_p) - psi_p psi_p^T
    MatrixXd weatherCov; ///< Diag(psi_w) - psi_w psi_w^T
    MatrixXd crossCov;   ///< psi_pw - psi_p psi_w^T

    VectorXd priceProb;      ///< real-world marginal psi_p
    VectorXd weatherProb;    ///< real-world marginal psi_w
    VectorXd pricePricing;   ///< risk-neutral marginal phi_p
    VectorXd weatherPricing; ///< risk-neutral marginal phi_w

    Index priceCount() const { return priceProb.size(); }
    Index weatherCount() const { return weatherProb.size(); }
    Index size() const { return priceCount() + weatherCount(); }

    MatrixXd covariance() const
    {
        const Index n = priceCount();
        const Index m = weatherCount();
        MatrixXd full(n + m, n + m);
        full.topLeftCorner(n, n) = priceCov;
        full.topRightCorner(n, m) = crossCov;
        full.bottomLeftCorner(m, n) = crossCov.transpose();
        full.bottomRightCorner(m, m) = weatherCov;
        return full;
    }

    VectorXd riskLoading() const { return stack(priceRiskLoading, weatherRiskLoading); }
    VectorXd realWorldMarginals() const { return stack(priceProb, weatherProb); }
    VectorXd pricingMarginals() const { return stack(pricePricing, weatherPricing); }

    /// (n+m) x 2 constraint matrix blockdiag(phi_p, phi_w).
    MatrixXd constraintMatrix() const
    {
        MatrixXd b = MatrixXd::Zero(size(), 2);
        b.col(0).head(priceCount()) = pricePricing;
        b.col(1).tail(weatherCount()) = weatherPricing;
        return b;
    }

    static VectorXd stack(const VectorXd& top, const VectorXd& bottom)
    {
        VectorXd out(top.size() + bottom.size());
        out << top, bottom;
        return out;
    }
};

/**
 * @brief Build the quadratic-form data from psi, phi and the retail rate.
 * @throws InvalidInput "incompatible supports" when phi does not live on
 *         psi's price/weather grids, "degenerate marginal" when a price or
 *         weather level has zero real-world probability.
 */
inline HedgeSystem assembleSystem(const RealWorldMeasure& psi, const RiskNeutralMeasure& phi, double retailRate)
{
    const ScenarioGrid& grid = psi.grid();
    if (phi.prices().size() != grid.priceCount() || phi.weather().size() != grid.weatherCount() ||
        phi.prices() != grid.prices || phi.weather() != grid.weather)
        throw InvalidInput("incompatible supports: risk-neutral measure must use the real-world price and weather grids");

    const Index n = grid.priceCount();
    const Index l = grid.quantityCount();
    const Index m = grid.weatherCount();
    const VectorXd& psiP = psi.priceMarginal();
    const VectorXd& psiW = psi.weatherMarginal();
    for (Index i = 0; i < n; ++i)
        if (!(psiP[i] > 0.0))
            throw InvalidInput("degenerate marginal: price level " + std::to_string(i) + " has zero probability");
    for (Index k = 0; k < m; ++k)
        if (!(psiW[k] > 0.0))
            throw InvalidInput("degenerate marginal: weather level " + std::to_string(k) + " has zero probability");

    HedgeSystem sys;
    sys.retailRate = retailRate;

    // sums of psi * y by price and weather level
    VectorXd byPrice = VectorXd::Zero(n);
    VectorXd byWeather = VectorXd::Zero(m);
    double mean = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < l; ++j)
        {
            const double y = profit(grid.prices[i], grid.quantities[j], retailRate);
            for (Index k = 0; k < m; ++k)
            {
                const double py = psi.prob(i, j, k) * y;
                byPrice[i] += py;
                byWeather[k] += py;
                mean += py;
            }
        }

    double variance = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < l; ++j)
        {
            const double dev = profit(grid.prices[i], grid.quantities[j], retailRate) - mean;
            double mass = 0.0;
            for (Index k = 0; k < m; ++k)
                mass += psi.prob(i, j, k);
            variance += mass * dev * dev;
        }

    sys.profitMean = mean;
    sys.profitVariance = variance;
    sys.profitMeanGivenPrice = byPrice.cwiseQuotient(psiP);
    sys.profitMeanGivenWeather = byWeather.cwiseQuotient(psiW);
    sys.priceRiskLoading = mean * psiP - sys.profitMeanGivenPrice.cwiseProduct(psiP);
    sys.weatherRiskLoading = mean * psiW - sys.profitMeanGivenWeather.cwiseProduct(psiW);

    sys.priceCov = MatrixXd(psiP.asDiagonal()) - psiP * psiP.transpose();
    sys.weatherCov = MatrixXd(psiW.asDiagonal()) - psiW * psiW.transpose();
    sys.crossCov = psi.priceWeatherMarginal() - psiP * psiW.transpose();

    sys.priceProb = psiP;
    sys.weatherProb = psiW;
    sys.pricePricing = phi.priceMarginal();
    sys.weatherPricing = phi.weatherMarginal();
    return sys;
}

/// Same system with the price/weather cross-covariance forced to zero.
inline HedgeSystem independenceProxy(const HedgeSystem& sys)
{
    HedgeSystem proxy = sys;
    proxy.crossCov.setZero();
    return proxy;
}

struct ProfitMoments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of y + x_P(p) + x_W(w) under psi.
inline ProfitMoments hedgedMoments(const HedgeSystem& sys, const VectorXd& pricePayoff, const VectorXd& weatherPayoff)
{
    const VectorXd x = HedgeSystem::stack(pricePayoff, weatherPayoff);
    const double quad = x.dot(sys.covariance() * x);
    return {sys.profitMean + sys.realWorldMarginals().dot(x),
            sys.profitVariance - 2.0 * sys.riskLoading().dot(x) + quad};
}

/// Mean-variance utility E[Y] - a Var[Y] of the hedged profit.
inline double utilityValue(const HedgeSystem& sys, const VectorXd& pricePayoff, const VectorXd& weatherPayoff,
                           double riskAversion)
{
    if (pricePayoff.size() != sys.priceCount() || weatherPayoff.size() != sys.weatherCount())
        throw InvalidInput("claim dimensions do not match the system");
    const VectorXd x = HedgeSystem::stack(pricePayoff, weatherPayoff);
    const VectorXd linear = sys.realWorldMarginals() + 2.0 * riskAversion * sys.riskLoading();
    return sys.profitMean - riskAversion * sys.profitVariance + linear.dot(x) -
           riskAversion * x.dot(sys.covariance() * x);
}

} // namespace hedge
