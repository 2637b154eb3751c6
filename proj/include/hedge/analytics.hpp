/**
 * @file analytics.hpp
 * @brief Hedged-profit distributions, quantile tables and parameter sweeps.
 */

#pragma once

#include "hedge/frontier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hedge
{

enum class Strategy
{
    NoHedge,
    PriceOnly,
    WeatherOnly,
    PriceAndWeather,
    IndependenceProxy
};

inline constexpr std::array<Strategy, 5> kAllStrategies = {Strategy::NoHedge, Strategy::PriceOnly,
                                                           Strategy::WeatherOnly, Strategy::PriceAndWeather,
                                                           Strategy::IndependenceProxy};

inline std::string_view strategyName(Strategy s)
{
    switch (s)
    {
    case Strategy::NoHedge: return "NoHedge";
    case Strategy::PriceOnly: return "PriceOnly";
    case Strategy::WeatherOnly: return "WeatherOnly";
    case Strategy::PriceAndWeather: return "PriceAndWeather";
    case Strategy::IndependenceProxy: return "IndependenceProxy";
    }
    return "Unknown";
}

/// Case-insensitive; '-' and '_' are ignored ("price-only" == "PriceOnly").
inline std::optional<Strategy> parseStrategy(std::string_view text)
{
    auto normalize = [](std::string_view s) {
        std::string out;
        for (char ch : s)
            if (ch != '-' && ch != '_') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        return out;
    };
    const std::string key = normalize(text);
    for (Strategy s : kAllStrategies)
        if (normalize(strategyName(s)) == key) return s;
    return std::nullopt;
}

/// Claims for one strategy; NoHedge yields zero claims.
inline HedgeSolution solveStrategy(const HedgeSystem& sys, Strategy strategy, double riskAversion)
{
    switch (strategy)
    {
    case Strategy::NoHedge:
        detail::requirePositiveRiskAversion(riskAversion);
        return makeSolution(sys, VectorXd::Zero(sys.priceCount()), VectorXd::Zero(sys.weatherCount()),
                            riskAversion);
    case Strategy::PriceOnly: return solveRestricted(sys, riskAversion, HedgeRestriction::PriceOnly);
    case Strategy::WeatherOnly: return solveRestricted(sys, riskAversion, HedgeRestriction::WeatherOnly);
    case Strategy::PriceAndWeather: return solveGeneral(sys, riskAversion);
    case Strategy::IndependenceProxy:
    {
        const HedgeSolution proxy = solveGeneral(independenceProxy(sys), riskAversion);
        // diagnostics against the true system
        return makeSolution(sys, proxy.pricePayoff, proxy.weatherPayoff, riskAversion);
    }
    }
    throw InvalidInput("unknown strategy");
}

struct ProfitOutcome
{
    double profit = 0.0;
    double probability = 0.0;
};

struct ProfitDistribution
{
    Strategy strategy = Strategy::NoHedge;
    std::vector<ProfitOutcome> outcomes; ///< ascending profit, distinct values

    double mean() const
    {
        double m = 0.0;
        for (const auto& o : outcomes)
            m += o.probability * o.profit;
        return m;
    }

    double variance() const
    {
        const double m = mean();
        double v = 0.0;
        for (const auto& o : outcomes)
            v += o.probability * (o.profit - m) * (o.profit - m);
        return v;
    }
};

namespace detail
{

inline ProfitDistribution aggregate(std::vector<ProfitOutcome> raw, Strategy label)
{
    std::sort(raw.begin(), raw.end(),
              [](const ProfitOutcome& l, const ProfitOutcome& r) { return l.profit < r.profit; });
    ProfitDistribution dist;
    dist.strategy = label;
    for (const ProfitOutcome& o : raw)
    {
        if (!dist.outcomes.empty())
        {
            ProfitOutcome& last = dist.outcomes.back();
            const double scale = std::max(std::abs(last.profit), std::abs(o.profit));
            if (std::abs(o.profit - last.profit) <= 1e-9 * scale)
            {
                last.probability += o.probability;
                continue;
            }
        }
        dist.outcomes.push_back(o);
    }
    return dist;
}

inline ProfitDistribution enumerateProfits(const RealWorldMeasure& psi, double retailRate, const VectorXd* pricePayoff,
                                           const VectorXd* weatherPayoff, Strategy label)
{
    const ScenarioGrid& grid = psi.grid();
    const Index n = grid.priceCount();
    const Index l = grid.quantityCount();
    const Index m = grid.weatherCount();
    std::vector<ProfitOutcome> raw;
    raw.reserve(static_cast<std::size_t>(n * l * m));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < l; ++j)
        {
            const double base = profit(grid.prices[i], grid.quantities[j], retailRate) +
                                (pricePayoff ? (*pricePayoff)[i] : 0.0);
            for (Index k = 0; k < m; ++k)
            {
                const double p = psi.prob(i, j, k);
                if (p == 0.0) continue;
                raw.push_back({base + (weatherPayoff ? (*weatherPayoff)[k] : 0.0), p});
            }
        }
    return aggregate(std::move(raw), label);
}

} // namespace detail

/// Unhedged profit distribution.
inline ProfitDistribution hedgedProfitDistribution(const RealWorldMeasure& psi, double retailRate)
{
    return detail::enumerateProfits(psi, retailRate, nullptr, nullptr, Strategy::NoHedge);
}

/// Distribution of (r - p) q + x_P(p) + x_W(w) over all scenarios.
inline ProfitDistribution hedgedProfitDistribution(const RealWorldMeasure& psi, double retailRate,
                                                   const HedgeSolution& claims, Strategy label)
{
    if (claims.pricePayoff.size() != psi.grid().priceCount() ||
        claims.weatherPayoff.size() != psi.grid().weatherCount())
        throw InvalidInput("claim dimensions do not match the scenario grid");
    return detail::enumerateProfits(psi, retailRate, &claims.pricePayoff, &claims.weatherPayoff, label);
}

/// Left-continuous inverse CDF: smallest profit whose cumulative probability reaches the level.
inline std::vector<double> quantile(const ProfitDistribution& dist, std::span<const double> levels)
{
    if (dist.outcomes.empty()) throw InvalidInput("quantile of an empty distribution");
    for (std::size_t i = 0; i < levels.size(); ++i)
    {
        if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw InvalidInput("quantile levels must lie in (0, 1)");
        if (i > 0 && !(levels[i] > levels[i - 1])) throw InvalidInput("quantile levels must be strictly increasing");
    }
    // absorbs rounding in the running sum
    constexpr double slack = 1e-12;
    std::vector<double> out;
    out.reserve(levels.size());
    std::size_t idx = 0;
    double cumulative = dist.outcomes.front().probability;
    for (double level : levels)
    {
        while (cumulative < level - slack && idx + 1 < dist.outcomes.size())
            cumulative += dist.outcomes[++idx].probability;
        out.push_back(dist.outcomes[idx].profit);
    }
    return out;
}

struct QuantileTable
{
    std::vector<double> levels;
    std::vector<Strategy> strategies;
    MatrixXd values; ///< levels x strategies
};

inline QuantileTable quantileTable(const std::vector<ProfitDistribution>& dists, std::span<const double> levels)
{
    QuantileTable table;
    table.levels.assign(levels.begin(), levels.end());
    table.values.resize(static_cast<Index>(levels.size()), static_cast<Index>(dists.size()));
    for (std::size_t s = 0; s < dists.size(); ++s)
    {
        table.strategies.push_back(dists[s].strategy);
        const std::vector<double> q = quantile(dists[s], levels);
        for (std::size_t i = 0; i < q.size(); ++i)
            table.values(static_cast<Index>(i), static_cast<Index>(s)) = q[i];
    }
    return table;
}

/// A claim as a function of its index, sampled at increasing abscissae.
struct ClaimCurve
{
    VectorXd abscissa;
    VectorXd payoff;
};

/// Piecewise-linear interpolation; constant beyond the end points.
inline double interpolateLinear(const ClaimCurve& curve, double t)
{
    const VectorXd& x = curve.abscissa;
    const Index n = x.size();
    if (t <= x[0]) return curve.payoff[0];
    if (t >= x[n - 1]) return curve.payoff[n - 1];
    const auto* begin = x.data();
    const Index hi = std::upper_bound(begin, begin + n, t) - begin;
    const double w = (t - x[hi - 1]) / (x[hi] - x[hi - 1]);
    return curve.payoff[hi - 1] + w * (curve.payoff[hi] - curve.payoff[hi - 1]);
}

/// Sup-norm distance between consecutive curves, both resampled on `common`.
inline std::vector<double> successiveDistances(const std::vector<ClaimCurve>& curves, const VectorXd& common)
{
    std::vector<double> out;
    for (std::size_t c = 0; c + 1 < curves.size(); ++c)
    {
        double worst = 0.0;
        for (Index k = 0; k < common.size(); ++k)
            worst = std::max(worst, std::abs(interpolateLinear(curves[c], common[k]) -
                                             interpolateLinear(curves[c + 1], common[k])));
        out.push_back(worst);
    }
    return out;
}

/// Real-world and risk-neutral Gaussian parameters of one study.
struct ScenarioSpecs
{
    GaussianSpec realWorld;
    GaussianSpec riskNeutral;

    static ScenarioSpecs reference(double rhoWP, int gridPoints)
    {
        return {presets::realWorld(rhoWP, gridPoints), presets::riskNeutral(rhoWP, gridPoints)};
    }
};

/// A discretized study: psi, phi on psi's support, and the assembled system.
struct Instance
{
    RealWorldMeasure psi;
    RiskNeutralMeasure phi;
    HedgeSystem system;
};

inline Instance buildInstance(const ScenarioSpecs& specs, double retailRate)
{
    RealWorldMeasure psi = discretizeRealWorld(specs.realWorld);
    RiskNeutralMeasure phi = discretizeRiskNeutral(specs.riskNeutral, psi.grid());
    HedgeSystem sys = assembleSystem(psi, phi, retailRate);
    return {std::move(psi), std::move(phi), std::move(sys)};
}

struct CorrelationRecord
{
    double rho = 0.0;
    VectorXd prices;
    VectorXd weather;
    HedgeSolution general;
    HedgeSolution proxy;
    double generalUtility = 0.0;
    double proxyUtility = 0.0;
    ProfitMoments generalMoments;
    ProfitMoments proxyMoments;

    double utilityGap() const { return generalUtility - proxyUtility; }
};

/**
 * For each rho, sets Cor(w, log p) = rho under both measures, solves the
 * general model and the independence proxy, and scores both under the true
 * system.
 */
inline std::vector<CorrelationRecord> correlationSweep(const ScenarioSpecs& base, std::span<const double> rhoValues,
                                                       double riskAversion, double retailRate)
{
    detail::requirePositiveRiskAversion(riskAversion);
    std::vector<CorrelationRecord> records;
    for (double rho : rhoValues)
    {
        if (!(std::abs(rho) < 1.0)) throw InvalidInput("invalid correlation structure: |rho| must be < 1");
        ScenarioSpecs specs = base;
        specs.realWorld.rhoWP = rho;
        specs.riskNeutral.rhoWP = rho;
        const Instance inst = buildInstance(specs, retailRate);

        CorrelationRecord rec;
        rec.rho = rho;
        rec.prices = inst.psi.grid().prices;
        rec.weather = inst.psi.grid().weather;
        rec.general = solveGeneral(inst.system, riskAversion);
        rec.proxy = solveStrategy(inst.system, Strategy::IndependenceProxy, riskAversion);
        rec.generalUtility =
            utilityValue(inst.system, rec.general.pricePayoff, rec.general.weatherPayoff, riskAversion);
        rec.proxyUtility = utilityValue(inst.system, rec.proxy.pricePayoff, rec.proxy.weatherPayoff, riskAversion);
        rec.generalMoments = hedgedMoments(inst.system, rec.general.pricePayoff, rec.general.weatherPayoff);
        rec.proxyMoments = hedgedMoments(inst.system, rec.proxy.pricePayoff, rec.proxy.weatherPayoff);
        records.push_back(std::move(rec));
    }
    return records;
}

enum class SweepAxis
{
    Price,
    Weather
};

struct VolatilityRecord
{
    double sigma = 0.0;
    VectorXd prices;
    VectorXd weather;
    HedgeSolution solution;
    double utility = 0.0;
    ProfitMoments moments;

    double priceClaimRange() const { return solution.pricePayoff.maxCoeff() - solution.pricePayoff.minCoeff(); }
    double weatherClaimRange() const
    {
        return solution.weatherPayoff.maxCoeff() - solution.weatherPayoff.minCoeff();
    }
};

inline constexpr double kVolatilitySweepRho = 0.75;

/**
 * Replaces the sd of one axis (sd of log price, or sd of the weather index)
 * under both measures, fixes Cor(w, log p) = rho, and solves the general model.
 */
inline std::vector<VolatilityRecord> volatilitySweep(const ScenarioSpecs& base, std::span<const double> sigmaValues,
                                                     SweepAxis axis, double riskAversion, double retailRate,
                                                     double rho = kVolatilitySweepRho)
{
    detail::requirePositiveRiskAversion(riskAversion);
    std::vector<VolatilityRecord> records;
    for (double sigma : sigmaValues)
    {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("volatility sweep: sigma must be positive");
        ScenarioSpecs specs = base;
        specs.realWorld.rhoWP = rho;
        specs.riskNeutral.rhoWP = rho;
        if (axis == SweepAxis::Price)
        {
            specs.realWorld.sdLogPrice = sigma;
            specs.riskNeutral.sdLogPrice = sigma;
        }
        else
        {
            specs.realWorld.sdWeather = sigma;
            specs.riskNeutral.sdWeather = sigma;
        }
        const Instance inst = buildInstance(specs, retailRate);

        VolatilityRecord rec;
        rec.sigma = sigma;
        rec.prices = inst.psi.grid().prices;
        rec.weather = inst.psi.grid().weather;
        rec.solution = solveGeneral(inst.system, riskAversion);
        rec.utility = utilityValue(inst.system, rec.solution.pricePayoff, rec.solution.weatherPayoff, riskAversion);
        rec.moments = hedgedMoments(inst.system, rec.solution.pricePayoff, rec.solution.weatherPayoff);
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace hedge
