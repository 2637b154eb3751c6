// hedge: optimal zero-cost price and weather claims for an energy retailer.
//
//   hedge solve           --config run.json [--strategy PriceOnly ...]
//   hedge frontier        --config run.json
//   hedge quantiles       --config run.json
//   hedge sweep-rho       --config run.json
//   hedge sweep-sigma     --config run.json
//   hedge reproduce-paper --output-dir out/
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include "hedge/hedge.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void configureLogging()
{
    auto logger = spdlog::stderr_color_mt("hedge");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("HEDGE_LOG_LEVEL"))
    {
        const std::string level = env;
        if (level == "error")
            spdlog::set_level(spdlog::level::err);
        else if (level == "warn")
            spdlog::set_level(spdlog::level::warn);
        else if (level == "info")
            spdlog::set_level(spdlog::level::info);
        else if (level == "debug")
            spdlog::set_level(spdlog::level::debug);
        else
            spdlog::warn("ignoring HEDGE_LOG_LEVEL={} (expected error, warn, info or debug)", level);
    }
}

} // namespace

int main(int argc, char** argv)
{
    configureLogging();

    CLI::App app{"Optimal zero-cost price and weather claims under mean-variance utility"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string configPath;
    std::optional<double> riskAversion;
    std::optional<int> gridPoints;
    std::vector<std::string> strategyNames;
    std::string outputDir;
    bool dumpMatrices = false;

    app.add_option("--config", configPath, "JSON run configuration");
    app.add_option("--risk-aversion", riskAversion, "risk aversion a > 0 (overrides config)");
    app.add_option("--grid-points", gridPoints, "discretization points per axis (overrides config)");
    app.add_option("--strategy", strategyNames, "strategy label, repeatable");
    app.add_option("--output-dir", outputDir, "artifact directory (overrides config)");
    app.add_flag("--dump-matrices", dumpMatrices, "also write M, c, d, b as CSV");

    using hedge::cli::RunMode;
    const std::vector<std::pair<RunMode, std::string>> commands = {
        {RunMode::Solve, "optimal claims for each requested strategy"},
        {RunMode::Frontier, "efficient frontier of the general solution and the independence proxy"},
        {RunMode::Quantiles, "hedged-profit quantile table"},
        {RunMode::SweepRho, "general vs proxy claims across price-weather correlations"},
        {RunMode::SweepSigma, "optimal claims across price or weather volatilities"},
        {RunMode::ReproducePaper, "full reference study with pass/fail summary"},
    };
    for (const auto& [mode, help] : commands)
        app.add_subcommand(std::string(hedge::cli::modeName(mode)), help);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    RunMode mode = RunMode::Solve;
    for (const auto& [m, help] : commands)
        if (app.got_subcommand(std::string(hedge::cli::modeName(m)))) mode = m;

    try
    {
        hedge::cli::RunConfig config;
        if (!configPath.empty()) config = hedge::cli::loadConfig(configPath);
        config.mode = mode;
        if (riskAversion) config.riskAversion = *riskAversion;
        if (gridPoints) config.gridPoints = *gridPoints;
        if (!outputDir.empty()) config.outputDir = outputDir;
        if (dumpMatrices) config.dumpMatrices = true;
        if (!strategyNames.empty())
        {
            config.strategies.clear();
            for (const std::string& name : strategyNames)
            {
                const auto parsed = hedge::parseStrategy(name);
                if (!parsed) throw hedge::cli::ConfigError("unknown strategy: " + name);
                config.strategies.push_back(*parsed);
            }
        }

        const hedge::cli::RunResult result = hedge::cli::run(config);
        spdlog::info("{} artifacts in {}", result.artifacts.size(), result.outputDir.string());
        if (mode == RunMode::ReproducePaper)
        {
            for (const auto& [name, value] : result.summary["checks"].items())
                std::cout << (value.get<bool>() ? "PASS " : "FAIL ") << name << "\n";
        }
        return EXIT_SUCCESS;
    }
    catch (const hedge::NumericalFailure& e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    catch (const hedge::InvalidInput& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::filesystem::filesystem_error& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_FAILURE;
    }
}
