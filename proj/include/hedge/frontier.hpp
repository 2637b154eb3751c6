#pragma once

#include "hedge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace hedge
{

struct FrontierPoint
{
    double riskAversion = 0.0;
    double mean = 0.0;
    double variance = 0.0;

    double stdev() const { return std::sqrt(std::max(variance, 0.0)); }
};

/**
 * Mean and variance of the optimally hedged profit at risk aversion a, in
 * closed form from the two funds (t = 1/2a):
 *
 *   mean = mu + d'x_inf + t d'x_o
 *   var  = s2 - c'x_inf + t ((d-b)'x_inf - c'x_o) + t^2 (d-b)'x_o
 *
 * Expanding s2 - 2c'x + x'Mx with M x_inf = c and M x_o = d - b gives the
 * linear coefficient (d-b)'x_inf - c'x_o, which vanishes: x_inf is the
 * variance minimizer, so the variance is flat in t at t = 0.
 */
inline FrontierPoint frontierPoint(const HedgeSystem& sys, const TwoFundBasis& basis, double riskAversion)
{
    detail::requirePositiveRiskAversion(riskAversion);
    const VectorXd d = sys.realWorldMarginals();
    const VectorXd c = sys.riskLoading();
    const VectorXd tilt = d - sys.pricingMarginals();
    const double t = 1.0 / (2.0 * riskAversion);

    FrontierPoint point;
    point.riskAversion = riskAversion;
    point.mean = sys.profitMean + d.dot(basis.riskMinimizing) + t * d.dot(basis.profitTilt);
    point.variance = sys.profitVariance - c.dot(basis.riskMinimizing) +
                     t * (tilt.dot(basis.riskMinimizing) - c.dot(basis.profitTilt)) +
                     t * t * tilt.dot(basis.profitTilt);
    return point;
}

namespace detail
{

inline void requireIncreasingPositive(std::span<const double> aValues)
{
    for (std::size_t i = 0; i < aValues.size(); ++i)
    {
        requirePositiveRiskAversion(aValues[i]);
        if (i > 0 && !(aValues[i] > aValues[i - 1]))
            throw InvalidInput("risk aversion sweep must be strictly increasing");
    }
}

} // namespace detail

/// One frontier point per a, all from a single factorization.
inline std::vector<FrontierPoint> frontierSweep(const HedgeSystem& sys, std::span<const double> aValues)
{
    detail::requireIncreasingPositive(aValues);
    const TwoFundBasis basis = twoFundBasis(sys);
    std::vector<FrontierPoint> points;
    points.reserve(aValues.size());
    for (double a : aValues)
        points.push_back(frontierPoint(sys, basis, a));
    return points;
}

/**
 * Claims optimal for `solving` (e.g. the independence proxy), evaluated
 * under the true moments of `evaluation`.
 */
inline std::vector<FrontierPoint> frontierSweep(const HedgeSystem& evaluation, const HedgeSystem& solving,
                                                std::span<const double> aValues)
{
    detail::requireIncreasingPositive(aValues);
    const TwoFundBasis basis = twoFundBasis(solving);
    std::vector<FrontierPoint> points;
    points.reserve(aValues.size());
    for (double a : aValues)
    {
        const VectorXd x = basis.combine(a);
        const ProfitMoments mom =
            hedgedMoments(evaluation, x.head(evaluation.priceCount()), x.tail(evaluation.weatherCount()));
        points.push_back({a, mom.mean, mom.variance});
    }
    return points;
}

struct DominanceReport
{
    bool dominates = true;
    int comparedPoints = 0;
    /// min over compared points of (upper mean - other mean); >= -tolerance when dominating
    double worstMargin = std::numeric_limits<double>::infinity();
};

/**
 * Does `upper` weakly dominate `other`? Each point of `other` is compared with
 * `upper`'s mean at the same variance, linearly interpolated between sampled
 * points. Beyond `upper`'s largest sampled variance the comparison uses that
 * largest-variance point (an efficient frontier's mean does not decrease with
 * variance, so this is plain Pareto dominance). Points below `upper`'s
 * smallest sampled variance are skipped; no comparable point means no
 * dominance.
 */
inline DominanceReport compareFrontiers(std::vector<FrontierPoint> upper, const std::vector<FrontierPoint>& other,
                                        double tolerance)
{
    std::sort(upper.begin(), upper.end(),
              [](const FrontierPoint& l, const FrontierPoint& r) { return l.variance < r.variance; });
    DominanceReport report;
    if (upper.empty()) return {false, 0, 0.0};
    for (const FrontierPoint& p : other)
    {
        if (p.variance < upper.front().variance) continue;
        if (p.variance >= upper.back().variance)
        {
            const double margin = upper.back().mean - p.mean;
            report.worstMargin = std::min(report.worstMargin, margin);
            ++report.comparedPoints;
            if (margin < -tolerance) report.dominates = false;
            continue;
        }
        auto hi = std::lower_bound(upper.begin(), upper.end(), p.variance,
                                   [](const FrontierPoint& f, double v) { return f.variance < v; });
        double mean = hi->mean;
        if (hi != upper.begin() && hi->variance != p.variance)
        {
            const auto lo = std::prev(hi);
            const double w = (p.variance - lo->variance) / (hi->variance - lo->variance);
            mean = lo->mean + w * (hi->mean - lo->mean);
        }
        const double margin = mean - p.mean;
        report.worstMargin = std::min(report.worstMargin, margin);
        ++report.comparedPoints;
        if (margin < -tolerance) report.dominates = false;
    }
    if (report.comparedPoints == 0) report.dominates = false;
    return report;
}

} // namespace hedge
