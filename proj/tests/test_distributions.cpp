#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hedge;

namespace
{

ScenarioGrid smallGrid()
{
    ScenarioGrid g;
    g.prices = Eigen::Vector2d(100.0, 140.0);
    g.quantities = Eigen::Vector2d(10.0, 20.0);
    g.weather = Eigen::Vector2d(-5.0, 30.0);
    return g;
}

double logPriceMean(const VectorXd& prices, const VectorXd& marginal)
{
    return marginal.dot(prices.array().log().matrix());
}

} // namespace

TEST(ValidateMeasure, UniformTableIsValid)
{
    const ScenarioGrid g = smallGrid();
    ProbabilityTable t(2, 2, 2, std::vector<double>(8, 0.125));
    EXPECT_TRUE(validateMeasure(g, t).valid());
    const RealWorldMeasure psi(g, t);
    EXPECT_NEAR(psi.priceMarginal()[0], 0.5, 1e-15);
    EXPECT_NEAR(psi.priceMarginal()[1], 0.5, 1e-15);
    EXPECT_NEAR(psi.weatherMarginal()[1], 0.5, 1e-15);
}

TEST(ValidateMeasure, NegativeEntryReported)
{
    std::vector<double> v(8, 0.125);
    v[0] = -0.1;
    v[1] = 0.35;
    const ValidationReport r = validateMeasure(smallGrid(), ProbabilityTable(2, 2, 2, v));
    ASSERT_FALSE(r.valid());
    EXPECT_NE(r.summary().find("negative probability"), std::string::npos);
}

TEST(ValidateMeasure, WrongTotalReported)
{
    std::vector<double> v(8, 0.98 / 8.0);
    const ValidationReport r = validateMeasure(smallGrid(), ProbabilityTable(2, 2, 2, v));
    ASSERT_FALSE(r.valid());
    EXPECT_NE(r.summary().find("total"), std::string::npos);
}

TEST(ValidateMeasure, GridDefectsReported)
{
    ScenarioGrid g = smallGrid();
    g.prices = Eigen::Vector2d(140.0, 100.0);
    EXPECT_FALSE(validateGrid(g).valid());
    g = smallGrid();
    g.prices = Eigen::Vector2d(-1.0, 100.0);
    EXPECT_FALSE(validateGrid(g).valid());
    g = smallGrid();
    g.weather = Eigen::Vector2d(-40.0, -10.0); // weather may be negative
    EXPECT_TRUE(validateGrid(g).valid());
}

TEST(ValidateMeasure, AxisMinimumSizes)
{
    ScenarioGrid g = smallGrid();
    g.quantities = VectorXd::Constant(1, 10.0);
    EXPECT_TRUE(validateGrid(g).valid());
    g.prices = VectorXd::Constant(1, 100.0);
    const ValidationReport r = validateGrid(g);
    ASSERT_FALSE(r.valid());
    EXPECT_NE(r.summary().find("prices: support needs at least 2 points"), std::string::npos);
}

TEST(ValidateMeasure, ToleranceIsRespected)
{
    std::vector<double> v(8, 0.125);
    v[0] += 1e-10;
    EXPECT_TRUE(validateMeasure(smallGrid(), ProbabilityTable(2, 2, 2, v)).valid());
    EXPECT_FALSE(validateMeasure(smallGrid(), ProbabilityTable(2, 2, 2, v), 1e-12).valid());
}

TEST(RealWorldMeasure, RejectsInvalidTable)
{
    std::vector<double> v(8, 0.1);
    EXPECT_THROW(RealWorldMeasure(smallGrid(), ProbabilityTable(2, 2, 2, v)), InvalidInput);
    EXPECT_THROW(ProbabilityTable(2, 2, 2, std::vector<double>(7, 0.1)), InvalidInput);
}

TEST(RiskNeutralMeasure, ValidatesMarginals)
{
    const ScenarioGrid g = smallGrid();
    EXPECT_NO_THROW(RiskNeutralMeasure(g.prices, g.weather, Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.5, 0.5)));
    EXPECT_THROW(RiskNeutralMeasure(g.prices, g.weather, Eigen::Vector2d(0.3, 0.6), Eigen::Vector2d(0.5, 0.5)),
                 InvalidInput);
    EXPECT_THROW(RiskNeutralMeasure(g.prices, g.weather, Eigen::Vector3d(0.3, 0.3, 0.4), Eigen::Vector2d(0.5, 0.5)),
                 InvalidInput);
}

TEST(DiscretizeRealWorld, ReferenceLogPriceMean)
{
    const RealWorldMeasure psi = discretizeRealWorld(presets::realWorld(0.0, 100));
    EXPECT_NEAR(logPriceMean(psi.grid().prices, psi.priceMarginal()), 4.15, 0.01);
    EXPECT_EQ(psi.table().values().size(), 1000000u);
}

TEST(DiscretizeRealWorld, FactorizesWithoutCorrelation)
{
    GaussianSpec s = presets::realWorld(0.0, 10);
    s.rhoPQ = s.rhoWQ = 0.0;
    const RealWorldMeasure psi = discretizeRealWorld(s);
    double worst = 0.0;
    for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 10; ++j)
            for (Index k = 0; k < 10; ++k)
                worst = std::max(worst, std::abs(psi.prob(i, j, k) - psi.priceMarginal()[i] *
                                                                          psi.quantityMarginal()[j] *
                                                                          psi.weatherMarginal()[k]));
    EXPECT_LE(worst, 1e-12);
}

TEST(DiscretizeRealWorld, ThreePointStandardNormalMatchesHandDensity)
{
    GaussianSpec s;
    s.meanLogPrice = s.meanLogQuantity = s.meanWeather = 0.0;
    s.sdLogPrice = s.sdLogQuantity = s.sdWeather = 1.0;
    s.gridPoints = 3;
    const RealWorldMeasure psi = discretizeRealWorld(s);

    // nodes -3, 0, 3 on each axis; weight exp(-(z1^2+z2^2+z3^2)/2)
    const double z[3] = {-3.0, 0.0, 3.0};
    double total = 0.0;
    double w[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                total += w[i][j][k] = std::exp(-0.5 * (z[i] * z[i] + z[j] * z[j] + z[k] * z[k]));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
            {
                EXPECT_NEAR(psi.prob(i, j, k), w[i][j][k] / total, 1e-14);
                if (i != 1 || j != 1 || k != 1)
                {
                    EXPECT_LT(psi.prob(i, j, k), psi.prob(1, 1, 1));
                }
            }
    EXPECT_DOUBLE_EQ(psi.grid().weather[0], -3.0);
    EXPECT_DOUBLE_EQ(psi.grid().prices[2], std::exp(3.0));
}

TEST(DiscretizeRealWorld, ZeroPriceWeatherCorrelationIsExactIndependence)
{
    const RealWorldMeasure psi = discretizeRealWorld(presets::realWorld(0.0, 12));
    const MatrixXd cross =
        psi.priceWeatherMarginal() - psi.priceMarginal() * psi.weatherMarginal().transpose();
    EXPECT_LE(cross.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DiscretizeRealWorld, PositiveCorrelationShowsUp)
{
    const RealWorldMeasure psi = discretizeRealWorld(presets::realWorld(0.5, 15));
    const auto& g = psi.grid();
    const VectorXd lp = g.prices.array().log().matrix();
    const double mp = psi.priceMarginal().dot(lp);
    const double mw = psi.weatherMarginal().dot(g.weather);
    double cov = 0.0;
    for (Index i = 0; i < lp.size(); ++i)
        for (Index k = 0; k < g.weather.size(); ++k)
            cov += psi.priceWeatherMarginal()(i, k) * (lp[i] - mp) * (g.weather[k] - mw);
    EXPECT_GT(cov, 0.0);
}

TEST(DiscretizeRealWorld, RejectsBadSpecs)
{
    GaussianSpec s = presets::realWorld(0.0, 5);
    s.sdLogPrice = 0.0;
    EXPECT_THROW(discretizeRealWorld(s), InvalidInput);
    s = presets::realWorld(1.2, 5);
    EXPECT_THROW(discretizeRealWorld(s), InvalidInput);
    s = presets::realWorld(-0.9, 5); // with rho_pq 0.4, rho_wq 0.65 not positive definite
    EXPECT_THROW(discretizeRealWorld(s), InvalidInput);
    s = presets::realWorld(0.0, 1);
    EXPECT_THROW(discretizeRealWorld(s), InvalidInput);
}

TEST(DiscretizeRiskNeutral, ReferenceLogPriceMean)
{
    const RiskNeutralMeasure phi = discretizeRiskNeutral(presets::riskNeutral(0.0, 100));
    EXPECT_NEAR(logPriceMean(phi.prices(), phi.priceMarginal()), 4.40, 0.01);
}

TEST(DiscretizeRiskNeutral, DegenerateSdRejected)
{
    GaussianSpec s = presets::riskNeutral(0.0, 10);
    s.sdWeather = 0.0;
    try
    {
        discretizeRiskNeutral(s);
        FAIL() << "expected InvalidInput";
    }
    catch (const InvalidInput& e)
    {
        EXPECT_NE(std::string(e.what()).find("degenerate grid"), std::string::npos);
    }
}

TEST(DiscretizeRiskNeutral, TableFactorizesWithoutCorrelation)
{
    const MatrixXd t = discretizePriceWeatherTable(presets::riskNeutral(0.0, 10));
    const VectorXd rows = t.rowwise().sum();
    const VectorXd cols = t.colwise().sum().transpose();
    EXPECT_LE((t - rows * cols.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DiscretizeRiskNeutral, SupportOverloadUsesGivenGrid)
{
    const RealWorldMeasure psi = discretizeRealWorld(presets::realWorld(0.33, 9));
    const RiskNeutralMeasure phi = discretizeRiskNeutral(presets::riskNeutral(0.33), psi.grid());
    EXPECT_EQ(phi.prices(), psi.grid().prices);
    EXPECT_EQ(phi.weather(), psi.grid().weather);
    EXPECT_NEAR(phi.priceMarginal().sum(), 1.0, 1e-12);
    // pricing measure puts more weight on high prices than psi
    EXPECT_GT(logPriceMean(phi.prices(), phi.priceMarginal()),
              logPriceMean(psi.grid().prices, psi.priceMarginal()));
}

TEST(DiscretizationAxis, EndpointsExact)
{
    const VectorXd a = discretizationAxis(4.15, 0.65, 7);
    EXPECT_DOUBLE_EQ(a[0], 4.15 - 3 * 0.65);
    EXPECT_DOUBLE_EQ(a[6], 4.15 + 3 * 0.65);
    EXPECT_NEAR(a[3], 4.15, 1e-14);
}
