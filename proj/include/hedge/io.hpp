/**
 * @file io.hpp
 * @brief File formats: Gaussian specs, measure tables, solutions (JSON) and
 *        CSV artifacts.
 *
 * CSV: comma separated, header row, LF endings. Monetary columns are plain
 * decimals rounded to 6 significant digits; probabilities and matrices keep
 * full precision. JSON keeps full precision everywhere.
 */

#pragma once

#include "hedge/analytics.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hedge::io
{

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Plain decimal (no exponent) rounded to 6 significant digits.
inline std::string formatMoney(double value)
{
    if (!std::isfinite(value)) return value != value ? "nan" : (value > 0 ? "inf" : "-inf");
    if (value == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5e", value);
    const double rounded = std::strtod(buf, nullptr);
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(rounded))));
    const int decimals = exponent >= 5 ? 0 : 5 - exponent;
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
    return buf;
}

/// Shortest representation that round-trips; used for non-monetary columns.
inline std::string formatExact(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

/// Short label for file names, e.g. 0.33 -> "0.33".
inline std::string formatLabel(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

class CsvBuilder
{
public:
    explicit CsvBuilder(const std::vector<std::string>& header) { row(header); }

    CsvBuilder& row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

inline std::string claimsCsv(const VectorXd& levels, const VectorXd& payoff)
{
    CsvBuilder csv({"level", "payoff"});
    for (Index i = 0; i < levels.size(); ++i)
        csv.row({formatExact(levels[i]), formatMoney(payoff[i])});
    return csv.str();
}

inline std::string frontierCsv(const std::vector<FrontierPoint>& points)
{
    CsvBuilder csv({"a", "mean", "variance", "stdev"});
    for (const FrontierPoint& p : points)
        csv.row({formatExact(p.riskAversion), formatMoney(p.mean), formatMoney(p.variance), formatMoney(p.stdev())});
    return csv.str();
}

/// Rows = levels, columns = strategies.
inline std::string quantileCsv(const QuantileTable& table)
{
    std::vector<std::string> header{"level"};
    for (Strategy s : table.strategies)
        header.emplace_back(strategyName(s));
    CsvBuilder csv(header);
    for (std::size_t i = 0; i < table.levels.size(); ++i)
    {
        std::vector<std::string> cells{formatExact(table.levels[i])};
        for (std::size_t s = 0; s < table.strategies.size(); ++s)
            cells.push_back(formatMoney(table.values(static_cast<Index>(i), static_cast<Index>(s))));
        csv.row(cells);
    }
    return csv.str();
}

inline std::string distributionCsv(const ProfitDistribution& dist)
{
    CsvBuilder csv({"profit", "probability"});
    for (const ProfitOutcome& o : dist.outcomes)
        csv.row({formatMoney(o.profit), formatExact(o.probability)});
    return csv.str();
}

inline std::string matrixCsv(const MatrixXd& m)
{
    std::vector<std::string> header;
    for (Index c = 0; c < m.cols(); ++c)
        header.push_back("c" + std::to_string(c));
    CsvBuilder csv(header);
    for (Index r = 0; r < m.rows(); ++r)
    {
        std::vector<std::string> cells;
        for (Index c = 0; c < m.cols(); ++c)
            cells.push_back(formatExact(m(r, c)));
        csv.row(cells);
    }
    return csv.str();
}

inline std::vector<double> toStd(const VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

inline VectorXd toEigen(const std::vector<double>& v)
{
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

inline ordered_json solutionToJson(const HedgeSolution& sol)
{
    ordered_json j;
    j["a"] = sol.riskAversion;
    j["xP"] = toStd(sol.pricePayoff);
    j["xW"] = toStd(sol.weatherPayoff);
    j["lambdaP"] = sol.lambdaPrice;
    j["lambdaW"] = sol.lambdaWeather;
    j["focResidual"] = sol.focResidual;
    j["costResidualP"] = sol.costResidualPrice;
    j["costResidualW"] = sol.costResidualWeather;
    return j;
}

inline HedgeSolution solutionFromJson(const json& j)
{
    try
    {
        HedgeSolution sol;
        sol.riskAversion = j.at("a").get<double>();
        sol.pricePayoff = toEigen(j.at("xP").get<std::vector<double>>());
        sol.weatherPayoff = toEigen(j.at("xW").get<std::vector<double>>());
        sol.lambdaPrice = j.at("lambdaP").get<double>();
        sol.lambdaWeather = j.at("lambdaW").get<double>();
        sol.focResidual = j.at("focResidual").get<double>();
        sol.costResidualPrice = j.value("costResidualP", 0.0);
        sol.costResidualWeather = j.value("costResidualW", 0.0);
        return sol;
    }
    catch (const json::exception& e)
    {
        throw InvalidInput(std::string("malformed solution record: ") + e.what());
    }
}

inline ordered_json specToJson(const GaussianSpec& s)
{
    ordered_json j;
    j["mean_log_price"] = s.meanLogPrice;
    j["sd_log_price"] = s.sdLogPrice;
    j["mean_log_quantity"] = s.meanLogQuantity;
    j["sd_log_quantity"] = s.sdLogQuantity;
    j["mean_weather"] = s.meanWeather;
    j["sd_weather"] = s.sdWeather;
    j["rho_pq"] = s.rhoPQ;
    j["rho_wq"] = s.rhoWQ;
    j["rho_wp"] = s.rhoWP;
    j["grid_points"] = s.gridPoints;
    return j;
}

/**
 * Quantity fields are only required for a real-world spec; correlations
 * default to 0 and grid_points to 100.
 */
inline GaussianSpec specFromJson(const json& j, bool realWorld)
{
    try
    {
        GaussianSpec s;
        s.meanLogPrice = j.at("mean_log_price").get<double>();
        s.sdLogPrice = j.at("sd_log_price").get<double>();
        s.meanWeather = j.at("mean_weather").get<double>();
        s.sdWeather = j.at("sd_weather").get<double>();
        if (realWorld)
        {
            s.meanLogQuantity = j.at("mean_log_quantity").get<double>();
            s.sdLogQuantity = j.at("sd_log_quantity").get<double>();
        }
        else
        {
            s.meanLogQuantity = j.value("mean_log_quantity", s.meanLogQuantity);
            s.sdLogQuantity = j.value("sd_log_quantity", s.sdLogQuantity);
        }
        s.rhoPQ = j.value("rho_pq", 0.0);
        s.rhoWQ = j.value("rho_wq", 0.0);
        s.rhoWP = j.value("rho_wp", 0.0);
        s.gridPoints = j.value("grid_points", 100);
        return s;
    }
    catch (const json::exception& e)
    {
        throw InvalidInput(std::string("malformed Gaussian spec: ") + e.what());
    }
}

inline ordered_json measureToJson(const RealWorldMeasure& psi)
{
    ordered_json j;
    j["grid"]["prices"] = toStd(psi.grid().prices);
    j["grid"]["quantities"] = toStd(psi.grid().quantities);
    j["grid"]["weather"] = toStd(psi.grid().weather);
    const auto values = psi.table().values();
    j["probs"] = std::vector<double>(values.begin(), values.end());
    return j;
}

inline RealWorldMeasure realWorldFromJson(const json& j, double tolerance = kUserTolerance)
{
    try
    {
        ScenarioGrid grid{toEigen(j.at("grid").at("prices").get<std::vector<double>>()),
                          toEigen(j.at("grid").at("quantities").get<std::vector<double>>()),
                          toEigen(j.at("grid").at("weather").get<std::vector<double>>())};
        ProbabilityTable table(grid.priceCount(), grid.quantityCount(), grid.weatherCount(),
                               j.at("probs").get<std::vector<double>>());
        return RealWorldMeasure(std::move(grid), std::move(table), tolerance);
    }
    catch (const json::exception& e)
    {
        throw InvalidInput(std::string("malformed real-world measure: ") + e.what());
    }
}

inline ordered_json measureToJson(const RiskNeutralMeasure& phi)
{
    ordered_json j;
    j["grid"]["prices"] = toStd(phi.prices());
    j["grid"]["weather"] = toStd(phi.weather());
    j["price_marginal"] = toStd(phi.priceMarginal());
    j["weather_marginal"] = toStd(phi.weatherMarginal());
    return j;
}

inline RiskNeutralMeasure riskNeutralFromJson(const json& j, double tolerance = kUserTolerance)
{
    try
    {
        return RiskNeutralMeasure(toEigen(j.at("grid").at("prices").get<std::vector<double>>()),
                                  toEigen(j.at("grid").at("weather").get<std::vector<double>>()),
                                  toEigen(j.at("price_marginal").get<std::vector<double>>()),
                                  toEigen(j.at("weather_marginal").get<std::vector<double>>()), tolerance);
    }
    catch (const json::exception& e)
    {
        throw InvalidInput(std::string("malformed risk-neutral measure: ") + e.what());
    }
}

inline json readJsonFile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::exception& e)
    {
        throw InvalidInput("cannot parse JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace hedge::io
