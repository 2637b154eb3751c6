/**
 * @file pipeline.hpp
 * @brief End-to-end runs behind the command-line tool.
 *
 * Every run writes its artifacts under one output directory together with
 * manifest.sha256 (sha256sum format, sorted by path). Nothing in a run is
 * random, so identical configs give identical manifests.
 */

#pragma once

#include "hedge/io.hpp"

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hedge::cli
{

namespace fs = std::filesystem;
using io::json;
using io::ordered_json;

/// Bad configuration: missing files, malformed or out-of-range settings.
class ConfigError : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

enum class RunMode
{
    Solve,
    Frontier,
    Quantiles,
    SweepRho,
    SweepSigma,
    ReproducePaper
};

inline std::string_view modeName(RunMode mode)
{
    switch (mode)
    {
    case RunMode::Solve: return "solve";
    case RunMode::Frontier: return "frontier";
    case RunMode::Quantiles: return "quantiles";
    case RunMode::SweepRho: return "sweep-rho";
    case RunMode::SweepSigma: return "sweep-sigma";
    case RunMode::ReproducePaper: return "reproduce-paper";
    }
    return "unknown";
}

/// Either a Gaussian spec to discretize or an explicit measure table.
struct MeasureSource
{
    std::optional<GaussianSpec> spec;
    std::optional<json> measure;
};

inline const std::vector<double> kQuantileLevels = {0.01, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2};

struct RunConfig
{
    RunMode mode = RunMode::Solve;
    MeasureSource psi{presets::realWorld(0.33), std::nullopt};
    MeasureSource phi{presets::riskNeutral(0.33), std::nullopt};
    double retailRate = presets::kRetailRate;
    double riskAversion = presets::kRiskAversion;
    std::optional<int> gridPoints;
    std::vector<Strategy> strategies; ///< empty: the mode's default set
    fs::path outputDir = "hedge-output";
    std::vector<double> aSweep = {0.2, 0.5, 1.0, 2.0, 5.0};
    std::vector<double> quantileLevels = kQuantileLevels;
    std::vector<double> rhoValues = {0.0, 0.13, 0.33, 0.75};
    std::vector<double> sigmaValues = {0.1, 0.25, 0.5, 0.72};
    SweepAxis sigmaAxis = SweepAxis::Price;
    double sweepRho = kVolatilitySweepRho;
    bool dumpMatrices = false;
};

namespace detail
{

inline MeasureSource readSource(const json& node, const fs::path& baseDir, bool realWorld)
{
    MeasureSource src;
    if (node.is_string())
    {
        fs::path file = node.get<std::string>();
        if (file.is_relative()) file = baseDir / file;
        if (!fs::exists(file)) throw ConfigError("referenced file not found: " + file.string());
        const json content = io::readJsonFile(file);
        if (content.contains("grid"))
            src.measure = content;
        else
            src.spec = io::specFromJson(content, realWorld);
    }
    else if (node.is_object())
    {
        src.spec = io::specFromJson(node, realWorld);
    }
    else
    {
        throw ConfigError(std::string(realWorld ? "psi" : "phi") + ": expected an object or a file path");
    }
    return src;
}

} // namespace detail

/**
 * Config file (JSON). Every key is optional:
 *
 *   psi, phi        inline Gaussian spec object, or path to a spec / measure file
 *   retail_rate, risk_aversion, grid_points, output_dir, strategies,
 *   a_sweep, quantile_levels, rho_values, sigma_values, sigma_axis, sweep_rho
 */
inline RunConfig loadConfig(const fs::path& path, RunConfig config = {})
{
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    json j;
    try
    {
        j = io::readJsonFile(path);
    }
    catch (const InvalidInput& e)
    {
        throw ConfigError(e.what());
    }
    const fs::path baseDir = path.parent_path();
    try
    {
        if (j.contains("psi")) config.psi = detail::readSource(j["psi"], baseDir, true);
        if (j.contains("phi")) config.phi = detail::readSource(j["phi"], baseDir, false);
        config.retailRate = j.value("retail_rate", config.retailRate);
        config.riskAversion = j.value("risk_aversion", config.riskAversion);
        if (j.contains("grid_points")) config.gridPoints = j["grid_points"].get<int>();
        if (j.contains("output_dir"))
        {
            fs::path out = j["output_dir"].get<std::string>();
            config.outputDir = out.is_relative() ? baseDir / out : out;
        }
        if (j.contains("strategies"))
        {
            config.strategies.clear();
            for (const auto& s : j["strategies"])
            {
                const auto parsed = parseStrategy(s.get<std::string>());
                if (!parsed) throw ConfigError("unknown strategy: " + s.get<std::string>());
                config.strategies.push_back(*parsed);
            }
        }
        config.aSweep = j.value("a_sweep", config.aSweep);
        config.quantileLevels = j.value("quantile_levels", config.quantileLevels);
        config.rhoValues = j.value("rho_values", config.rhoValues);
        config.sigmaValues = j.value("sigma_values", config.sigmaValues);
        config.sweepRho = j.value("sweep_rho", config.sweepRho);
        if (j.contains("sigma_axis"))
        {
            const std::string axis = j["sigma_axis"].get<std::string>();
            if (axis == "price")
                config.sigmaAxis = SweepAxis::Price;
            else if (axis == "weather")
                config.sigmaAxis = SweepAxis::Weather;
            else
                throw ConfigError("sigma_axis must be 'price' or 'weather'");
        }
    }
    catch (const json::exception& e)
    {
        throw ConfigError("invalid config " + path.string() + ": " + e.what());
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const InvalidInput& e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config;
}

inline void validateConfig(const RunConfig& config)
{
    if (!(config.retailRate > 0.0)) throw ConfigError("retail rate must be positive");
    if (config.mode != RunMode::ReproducePaper && !(config.riskAversion > 0.0))
        throw ConfigError("risk aversion must be positive");
    if (config.gridPoints && *config.gridPoints < 2) throw ConfigError("grid points must be at least 2");
}

inline std::string sha256Hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i)
    {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

/// Writes files under a root directory and remembers their checksums.
class ArtifactWriter
{
public:
    explicit ArtifactWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    void write(const fs::path& relative, const std::string& content)
    {
        const fs::path target = root_ / relative;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + target.string());
        out << content;
        if (!out) throw ConfigError("cannot write " + target.string());
        entries_.emplace_back(relative.generic_string(), sha256Hex(content));
        spdlog::debug("wrote {}", target.string());
    }

    void writeJson(const fs::path& relative, const ordered_json& value) { write(relative, value.dump(2) + "\n"); }

    /// manifest.sha256, sorted by path; returns its content.
    std::string writeManifest()
    {
        auto sorted = entries_;
        std::sort(sorted.begin(), sorted.end());
        std::string content;
        for (const auto& [path, digest] : sorted)
            content += digest + "  " + path + "\n";
        std::ofstream out(root_ / "manifest.sha256", std::ios::binary | std::ios::trunc);
        out << content;
        return content;
    }

    std::vector<fs::path> artifacts() const
    {
        std::vector<fs::path> out;
        for (const auto& e : entries_)
            out.push_back(root_ / e.first);
        return out;
    }

private:
    fs::path root_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct RunResult
{
    fs::path outputDir;
    std::vector<fs::path> artifacts;
    std::string manifest;
    ordered_json summary;
};

namespace detail
{

inline std::vector<Strategy> strategiesOr(const RunConfig& config, std::vector<Strategy> fallback)
{
    return config.strategies.empty() ? fallback : config.strategies;
}

inline Instance buildFromConfig(const RunConfig& config)
{
    std::optional<RealWorldMeasure> psi;
    if (config.psi.measure)
    {
        psi.emplace(io::realWorldFromJson(*config.psi.measure));
    }
    else
    {
        GaussianSpec spec = *config.psi.spec;
        if (config.gridPoints) spec.gridPoints = *config.gridPoints;
        psi.emplace(discretizeRealWorld(spec));
    }
    std::optional<RiskNeutralMeasure> phi;
    if (config.phi.measure)
        phi.emplace(io::riskNeutralFromJson(*config.phi.measure));
    else
        phi.emplace(discretizeRiskNeutral(*config.phi.spec, psi->grid()));
    HedgeSystem sys = assembleSystem(*psi, *phi, config.retailRate);
    return {std::move(*psi), std::move(*phi), std::move(sys)};
}

inline ScenarioSpecs specsFromConfig(const RunConfig& config)
{
    if (!config.psi.spec || !config.phi.spec)
        throw ConfigError(std::string(modeName(config.mode)) + " needs Gaussian specs for psi and phi, not measure tables");
    ScenarioSpecs specs{*config.psi.spec, *config.phi.spec};
    if (config.gridPoints)
    {
        specs.realWorld.gridPoints = *config.gridPoints;
        specs.riskNeutral.gridPoints = *config.gridPoints;
    }
    return specs;
}

inline std::string strategySummaryCsv(const HedgeSystem& sys, const std::vector<HedgeSolution>& sols,
                                      const std::vector<Strategy>& strategies, double a)
{
    io::CsvBuilder csv({"strategy", "utility", "mean", "variance", "stdev", "foc_residual"});
    for (std::size_t s = 0; s < sols.size(); ++s)
    {
        const ProfitMoments mom = hedgedMoments(sys, sols[s].pricePayoff, sols[s].weatherPayoff);
        csv.row({std::string(strategyName(strategies[s])),
                 io::formatMoney(utilityValue(sys, sols[s].pricePayoff, sols[s].weatherPayoff, a)),
                 io::formatMoney(mom.mean), io::formatMoney(mom.variance),
                 io::formatMoney(std::sqrt(std::max(mom.variance, 0.0))), io::formatExact(sols[s].focResidual)});
    }
    return csv.str();
}

inline void writeClaims(ArtifactWriter& out, const fs::path& dir, const std::string& stem, const RealWorldMeasure& psi,
                        const HedgeSolution& sol)
{
    out.write(dir / (stem + "_price.csv"), io::claimsCsv(psi.grid().prices, sol.pricePayoff));
    out.write(dir / (stem + "_weather.csv"), io::claimsCsv(psi.grid().weather, sol.weatherPayoff));
}

inline void dumpMatrices(ArtifactWriter& out, const HedgeSystem& sys)
{
    out.write("matrix_M.csv", io::matrixCsv(sys.covariance()));
    out.write("vector_c.csv", io::matrixCsv(sys.riskLoading()));
    out.write("vector_d.csv", io::matrixCsv(sys.realWorldMarginals()));
    out.write("vector_b.csv", io::matrixCsv(sys.pricingMarginals()));
}

inline ordered_json runSolve(const RunConfig& config, ArtifactWriter& out)
{
    const Instance inst = buildFromConfig(config);
    if (config.dumpMatrices) dumpMatrices(out, inst.system);
    const auto strategies = strategiesOr(config, {Strategy::PriceAndWeather});
    std::vector<HedgeSolution> sols;
    ordered_json summary = ordered_json::object();
    for (Strategy s : strategies)
    {
        HedgeSolution sol = solveStrategy(inst.system, s, config.riskAversion);
        const std::string name(strategyName(s));
        out.writeJson("solution_" + name + ".json", io::solutionToJson(sol));
        writeClaims(out, "", "claims_" + name, inst.psi, sol);
        summary[name] = {{"utility", utilityValue(inst.system, sol.pricePayoff, sol.weatherPayoff, config.riskAversion)},
                         {"focResidual", sol.focResidual}};
        spdlog::info("{}: foc residual {:.3e}", name, sol.focResidual);
        sols.push_back(std::move(sol));
    }
    out.write("summary.csv", strategySummaryCsv(inst.system, sols, strategies, config.riskAversion));
    return summary;
}

inline ordered_json runFrontier(const RunConfig& config, ArtifactWriter& out)
{
    const Instance inst = buildFromConfig(config);
    if (config.dumpMatrices) dumpMatrices(out, inst.system);
    const auto general = frontierSweep(inst.system, config.aSweep);
    const auto proxy = frontierSweep(inst.system, independenceProxy(inst.system), config.aSweep);
    out.write("frontier.csv", io::frontierCsv(general));
    out.write("frontier_IndependenceProxy.csv", io::frontierCsv(proxy));
    const DominanceReport dom = compareFrontiers(general, proxy, 1e-9 * std::max(1.0, std::abs(general.front().mean)));
    ordered_json summary;
    summary["dominates"] = dom.dominates;
    summary["compared_points"] = dom.comparedPoints;
    summary["worst_margin"] = dom.worstMargin;
    out.writeJson("frontier_summary.json", summary);
    return summary;
}

inline ordered_json runQuantiles(const RunConfig& config, ArtifactWriter& out)
{
    const Instance inst = buildFromConfig(config);
    if (config.dumpMatrices) dumpMatrices(out, inst.system);
    const std::vector<Strategy> all(kAllStrategies.begin(), kAllStrategies.end());
    const auto strategies = strategiesOr(config, all);
    std::vector<ProfitDistribution> dists;
    std::vector<HedgeSolution> sols;
    for (Strategy s : strategies)
    {
        sols.push_back(solveStrategy(inst.system, s, config.riskAversion));
        dists.push_back(hedgedProfitDistribution(inst.psi, config.retailRate, sols.back(), s));
    }
    const QuantileTable table = quantileTable(dists, config.quantileLevels);
    out.write("quantiles.csv", io::quantileCsv(table));
    out.write("summary.csv", strategySummaryCsv(inst.system, sols, strategies, config.riskAversion));
    ordered_json summary;
    for (std::size_t s = 0; s < strategies.size(); ++s)
        summary[std::string(strategyName(strategies[s]))] = table.values(0, static_cast<Index>(s));
    return summary;
}

inline ordered_json runRhoSweep(const RunConfig& config, ArtifactWriter& out)
{
    const auto records = correlationSweep(specsFromConfig(config), config.rhoValues, config.riskAversion,
                                          config.retailRate);
    io::CsvBuilder summaryCsv({"rho", "general_utility", "proxy_utility", "utility_gap", "general_mean",
                               "general_variance", "proxy_mean", "proxy_variance"});
    ordered_json summary = ordered_json::array();
    for (const CorrelationRecord& rec : records)
    {
        const std::string tag = "rho_" + io::formatLabel(rec.rho);
        io::CsvBuilder price({"level", "general", "proxy"});
        for (Index i = 0; i < rec.prices.size(); ++i)
            price.row({io::formatExact(rec.prices[i]), io::formatMoney(rec.general.pricePayoff[i]),
                       io::formatMoney(rec.proxy.pricePayoff[i])});
        io::CsvBuilder weather({"level", "general", "proxy"});
        for (Index k = 0; k < rec.weather.size(); ++k)
            weather.row({io::formatExact(rec.weather[k]), io::formatMoney(rec.general.weatherPayoff[k]),
                         io::formatMoney(rec.proxy.weatherPayoff[k])});
        out.write(tag + "_price.csv", price.str());
        out.write(tag + "_weather.csv", weather.str());
        summaryCsv.row({io::formatExact(rec.rho), io::formatMoney(rec.generalUtility), io::formatMoney(rec.proxyUtility),
                        io::formatMoney(rec.utilityGap()), io::formatMoney(rec.generalMoments.mean),
                        io::formatMoney(rec.generalMoments.variance), io::formatMoney(rec.proxyMoments.mean),
                        io::formatMoney(rec.proxyMoments.variance)});
        summary.push_back({{"rho", rec.rho}, {"utility_gap", rec.utilityGap()}});
    }
    out.write("rho_sweep_summary.csv", summaryCsv.str());
    return summary;
}

inline ordered_json runSigmaSweep(const RunConfig& config, ArtifactWriter& out)
{
    const auto records = volatilitySweep(specsFromConfig(config), config.sigmaValues, config.sigmaAxis,
                                         config.riskAversion, config.retailRate, config.sweepRho);
    const std::string axis = config.sigmaAxis == SweepAxis::Price ? "price" : "weather";
    io::CsvBuilder summaryCsv(
        {"sigma", "axis", "utility", "mean", "variance", "price_claim_range", "weather_claim_range"});
    ordered_json summary = ordered_json::array();
    for (const VolatilityRecord& rec : records)
    {
        const std::string tag = "sigma_" + axis + "_" + io::formatLabel(rec.sigma);
        out.write(tag + "_price.csv", io::claimsCsv(rec.prices, rec.solution.pricePayoff));
        out.write(tag + "_weather.csv", io::claimsCsv(rec.weather, rec.solution.weatherPayoff));
        summaryCsv.row({io::formatExact(rec.sigma), axis, io::formatMoney(rec.utility), io::formatMoney(rec.moments.mean),
                        io::formatMoney(rec.moments.variance), io::formatMoney(rec.priceClaimRange()),
                        io::formatMoney(rec.weatherClaimRange())});
        summary.push_back({{"sigma", rec.sigma}, {"price_claim_range", rec.priceClaimRange()},
                           {"weather_claim_range", rec.weatherClaimRange()}});
    }
    out.write("sigma_sweep_summary.csv", summaryCsv.str());
    return summary;
}

} // namespace detail

RunResult reproducePaper(const fs::path& outputDir);

/// Dispatch on config.mode. Throws ConfigError / InvalidInput / NumericalFailure.
inline RunResult run(const RunConfig& config)
{
    validateConfig(config);
    if (config.mode == RunMode::ReproducePaper) return reproducePaper(config.outputDir);

    spdlog::info("{}: writing to {}", modeName(config.mode), config.outputDir.string());
    ArtifactWriter out(config.outputDir);
    RunResult result;
    switch (config.mode)
    {
    case RunMode::Solve: result.summary = detail::runSolve(config, out); break;
    case RunMode::Frontier: result.summary = detail::runFrontier(config, out); break;
    case RunMode::Quantiles: result.summary = detail::runQuantiles(config, out); break;
    case RunMode::SweepRho: result.summary = detail::runRhoSweep(config, out); break;
    case RunMode::SweepSigma: result.summary = detail::runSigmaSweep(config, out); break;
    case RunMode::ReproducePaper: break;
    }
    result.outputDir = config.outputDir;
    result.artifacts = out.artifacts();
    result.manifest = out.writeManifest();
    return result;
}

/// Resolutions of the convergence study (N = n^3 = 512, 1000, 2197, 4913).
inline const std::vector<int> kConvergenceGrid = {8, 10, 13, 17};
inline constexpr int kReferenceGrid = 10;
inline constexpr double kGeneralRho = 0.33;

/**
 * Runs the reference study end to end: independence case (convergence and
 * quantile table), general-case strategy comparison and frontiers,
 * correlation sweep and volatility sweeps. summary.json carries one boolean
 * per checked property.
 */
inline RunResult reproducePaper(const fs::path& outputDir)
{
    const double r = presets::kRetailRate;
    const double a = presets::kRiskAversion;
    ArtifactWriter out(outputDir);
    ordered_json checks;
    ordered_json details;
    bool focOk = true;
    double worstFoc = 0.0;
    auto track = [&](const HedgeSystem& sys, const HedgeSolution& sol) {
        const FocReport rep = verifyFOC(sys, sol, sol.riskAversion);
        focOk = focOk && rep.satisfied();
        worstFoc = std::max(worstFoc, rep.stationarity / rep.scale);
    };

    // Independence case: convergence across resolutions.
    spdlog::info("independence case");
    std::vector<ClaimCurve> curves;
    io::CsvBuilder convergence({"from_n", "to_n", "sup_distance"});
    for (int n : kConvergenceGrid)
    {
        const Instance inst = buildInstance(ScenarioSpecs::reference(0.0, n), r);
        const HedgeSolution sol = solveIndependent(inst.system, a);
        track(inst.system, sol);
        detail::writeClaims(out, "independence", "claims_n" + std::to_string(n), inst.psi, sol);
        curves.push_back({inst.psi.grid().prices.array().log().matrix(), sol.pricePayoff});
    }
    const GaussianSpec base = presets::realWorld(0.0);
    const std::vector<double> distances =
        successiveDistances(curves, discretizationAxis(base.meanLogPrice, base.sdLogPrice, 201));
    bool monotone = true;
    for (std::size_t i = 0; i < distances.size(); ++i)
    {
        convergence.row({std::to_string(kConvergenceGrid[i]), std::to_string(kConvergenceGrid[i + 1]),
                         io::formatMoney(distances[i])});
        if (i > 0 && !(distances[i] < distances[i - 1])) monotone = false;
    }
    out.write("independence/convergence.csv", convergence.str());
    checks["convergence_monotone"] = monotone;
    details["convergence_distances"] = distances;

    // Independence case: strategy comparison and quantile table.
    {
        const Instance inst = buildInstance(ScenarioSpecs::reference(0.0, kReferenceGrid), r);
        const std::vector<Strategy> strategies = {Strategy::NoHedge, Strategy::PriceOnly, Strategy::PriceAndWeather};
        std::vector<ProfitDistribution> dists;
        std::vector<HedgeSolution> sols;
        for (Strategy s : strategies)
        {
            sols.push_back(s == Strategy::PriceAndWeather ? solveIndependent(inst.system, a)
                                                          : solveStrategy(inst.system, s, a));
            if (s == Strategy::PriceAndWeather) track(inst.system, sols.back());
            dists.push_back(hedgedProfitDistribution(inst.psi, r, sols.back(), s));
            out.write("independence/distribution_" + std::string(strategyName(s)) + ".csv",
                      io::distributionCsv(dists.back()));
        }
        out.writeJson("independence/solution_PriceAndWeather.json", io::solutionToJson(sols.back()));
        const QuantileTable table = quantileTable(dists, kQuantileLevels);
        out.write("independence/quantiles.csv", io::quantileCsv(table));
        out.write("independence/strategy_summary.csv", detail::strategySummaryCsv(inst.system, sols, strategies, a));
        bool ordered = true;
        for (std::size_t i = 0; i + 1 < table.levels.size(); ++i) // 20% row excluded
        {
            const Index row = static_cast<Index>(i);
            ordered = ordered && table.values(row, 0) < table.values(row, 1) && table.values(row, 1) < table.values(row, 2);
        }
        checks["quantile_ordering"] = ordered;
        checks["quantile_signs_at_1pct"] = table.values(0, 0) < 0.0 && table.values(0, 2) > 0.0;
    }

    // General case.
    spdlog::info("general case");
    {
        const Instance inst = buildInstance(ScenarioSpecs::reference(kGeneralRho, kReferenceGrid), r);
        const std::vector<Strategy> strategies(kAllStrategies.begin(), kAllStrategies.end());
        std::vector<ProfitDistribution> dists;
        std::vector<HedgeSolution> sols;
        for (Strategy s : strategies)
        {
            sols.push_back(solveStrategy(inst.system, s, a));
            if (s == Strategy::PriceAndWeather) track(inst.system, sols.back());
            dists.push_back(hedgedProfitDistribution(inst.psi, r, sols.back(), s));
            const std::string name(strategyName(s));
            out.write("general/distribution_" + name + ".csv", io::distributionCsv(dists.back()));
            detail::writeClaims(out, "general", "claims_" + name, inst.psi, sols.back());
        }
        out.write("general/quantiles.csv", io::quantileCsv(quantileTable(dists, kQuantileLevels)));
        out.write("general/strategy_summary.csv", detail::strategySummaryCsv(inst.system, sols, strategies, a));

        const auto& general = sols[3];
        const auto& proxy = sols[4];
        checks["general_beats_proxy"] =
            utilityValue(inst.system, general.pricePayoff, general.weatherPayoff, a) >
            utilityValue(inst.system, proxy.pricePayoff, proxy.weatherPayoff, a);

        const std::vector<double> aSweep = {0.2, 0.5, 1.0, 2.0, 5.0};
        const auto gf = frontierSweep(inst.system, aSweep);
        const auto pf = frontierSweep(inst.system, independenceProxy(inst.system), aSweep);
        out.write("general/frontier.csv", io::frontierCsv(gf));
        out.write("general/frontier_IndependenceProxy.csv", io::frontierCsv(pf));
        const DominanceReport dom = compareFrontiers(gf, pf, 1e-9 * std::max(1.0, std::abs(gf.front().mean)));
        checks["frontier_dominance"] = dom.dominates;
        details["frontier_worst_margin"] = dom.worstMargin;
    }

    // Correlation sweep.
    spdlog::info("correlation sweep");
    {
        const std::vector<double> rhos = {0.0, 0.13, 0.33, 0.75};
        const auto records = correlationSweep(ScenarioSpecs::reference(0.0, kReferenceGrid), rhos, a, r);
        io::CsvBuilder summary({"rho", "general_utility", "proxy_utility", "utility_gap", "general_mean",
                                "general_variance", "proxy_mean", "proxy_variance"});
        bool gapMonotone = true;
        std::vector<double> gaps;
        for (std::size_t i = 0; i < records.size(); ++i)
        {
            const CorrelationRecord& rec = records[i];
            const std::string tag = "rho_" + io::formatLabel(rec.rho);
            io::CsvBuilder price({"level", "general", "proxy"});
            for (Index p = 0; p < rec.prices.size(); ++p)
                price.row({io::formatExact(rec.prices[p]), io::formatMoney(rec.general.pricePayoff[p]),
                           io::formatMoney(rec.proxy.pricePayoff[p])});
            io::CsvBuilder weather({"level", "general", "proxy"});
            for (Index k = 0; k < rec.weather.size(); ++k)
                weather.row({io::formatExact(rec.weather[k]), io::formatMoney(rec.general.weatherPayoff[k]),
                             io::formatMoney(rec.proxy.weatherPayoff[k])});
            out.write("rho_sweep/" + tag + "_price.csv", price.str());
            out.write("rho_sweep/" + tag + "_weather.csv", weather.str());
            summary.row({io::formatExact(rec.rho), io::formatMoney(rec.generalUtility), io::formatMoney(rec.proxyUtility),
                         io::formatMoney(rec.utilityGap()), io::formatMoney(rec.generalMoments.mean),
                         io::formatMoney(rec.generalMoments.variance), io::formatMoney(rec.proxyMoments.mean),
                         io::formatMoney(rec.proxyMoments.variance)});
            gaps.push_back(rec.utilityGap());
            if (i > 0 && rec.utilityGap() < records[i - 1].utilityGap()) gapMonotone = false;
        }
        out.write("rho_sweep/summary.csv", summary.str());
        checks["utility_gap_monotone"] = gapMonotone;
        details["utility_gaps"] = gaps;

        for (double rho : {0.13, 0.75})
        {
            const Instance inst = buildInstance(ScenarioSpecs::reference(rho, kReferenceGrid), r);
            const HedgeSolution sol = solveGeneral(inst.system, a);
            track(inst.system, sol);
            out.write("rho_sweep/distribution_rho_" + io::formatLabel(rho) + ".csv",
                      io::distributionCsv(hedgedProfitDistribution(inst.psi, r, sol, Strategy::PriceAndWeather)));
        }
    }

    // Volatility sweeps. Weather sd is taken as sigma times the weather mean.
    spdlog::info("volatility sweep");
    {
        const std::vector<double> sigmas = {0.1, 0.25, 0.5, 0.72};
        const ScenarioSpecs specs = ScenarioSpecs::reference(0.0, kReferenceGrid);
        std::vector<double> weatherSds;
        for (double s : sigmas)
            weatherSds.push_back(s * specs.realWorld.meanWeather);
        io::CsvBuilder summary({"sigma", "axis", "utility", "mean", "variance", "price_claim_range", "weather_claim_range"});
        bool rangeGrows = true;
        for (SweepAxis axis : {SweepAxis::Price, SweepAxis::Weather})
        {
            const bool price = axis == SweepAxis::Price;
            const auto records = volatilitySweep(specs, price ? sigmas : weatherSds, axis, a, r);
            for (std::size_t i = 0; i < records.size(); ++i)
            {
                const VolatilityRecord& rec = records[i];
                const std::string axisName = price ? "price" : "weather";
                const std::string tag = "sigma_" + axisName + "_" + io::formatLabel(sigmas[i]);
                out.write("sigma_sweep/" + tag + "_price.csv", io::claimsCsv(rec.prices, rec.solution.pricePayoff));
                out.write("sigma_sweep/" + tag + "_weather.csv", io::claimsCsv(rec.weather, rec.solution.weatherPayoff));
                summary.row({io::formatExact(rec.sigma), axisName, io::formatMoney(rec.utility),
                             io::formatMoney(rec.moments.mean), io::formatMoney(rec.moments.variance),
                             io::formatMoney(rec.priceClaimRange()), io::formatMoney(rec.weatherClaimRange())});
            }
            if (price) rangeGrows = records.back().priceClaimRange() > records.front().priceClaimRange();
        }
        out.write("sigma_sweep/summary.csv", summary.str());
        checks["price_claim_range_grows_with_sigma"] = rangeGrows;
    }

    checks["foc_all_pass"] = focOk;
    details["worst_relative_foc_residual"] = worstFoc;

    ordered_json report;
    report["checks"] = checks;
    report["details"] = details;
    out.writeJson("summary.json", report);
    std::string text;
    for (const auto& [name, value] : checks.items())
        text += std::string(value.get<bool>() ? "PASS " : "FAIL ") + name + "\n";
    out.write("summary.txt", text);

    RunResult result;
    result.outputDir = outputDir;
    result.artifacts = out.artifacts();
    result.manifest = out.writeManifest();
    result.summary = report;
    return result;
}

} // namespace hedge::cli
