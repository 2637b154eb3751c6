#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hedge;

TEST(Strategy, NamesRoundTrip)
{
    for (Strategy s : kAllStrategies)
        EXPECT_EQ(parseStrategy(strategyName(s)), s);
    EXPECT_EQ(parseStrategy("price-and-weather"), Strategy::PriceAndWeather);
    EXPECT_EQ(parseStrategy("NOHEDGE"), Strategy::NoHedge);
    EXPECT_FALSE(parseStrategy("everything").has_value());
}

TEST(ProfitDistribution, SymmetricUnhedgedHasZeroMean)
{
    ScenarioGrid g;
    g.prices = Eigen::Vector2d(100.0, 140.0);
    g.quantities = Eigen::Vector2d(10.0, 20.0);
    g.weather = Eigen::Vector2d(0.0, 10.0);
    const RealWorldMeasure psi(g, ProbabilityTable(2, 2, 2, std::vector<double>(8, 0.125)));
    const ProfitDistribution d = hedgedProfitDistribution(psi, 120.0);
    EXPECT_NEAR(d.mean(), 0.0, 1e-12);
    // outcomes -400, -200, 200, 400 with mass 1/4 each after merging weather
    ASSERT_EQ(d.outcomes.size(), 4u);
    EXPECT_DOUBLE_EQ(d.outcomes.front().profit, -400.0);
    EXPECT_DOUBLE_EQ(d.outcomes.front().probability, 0.25);
}

TEST(ProfitDistribution, MomentsMatchSystem)
{
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep)
    {
        const RealWorldMeasure psi = oracle::randomRealWorld(3, 2, 3, rng);
        const HedgeSystem sys = assembleSystem(psi, oracle::randomRiskNeutral(psi, rng), 120.0);
        const double a = 0.01;
        const HedgeSolution sol = solveGeneral(sys, a);
        const ProfitDistribution d = hedgedProfitDistribution(psi, 120.0, sol, Strategy::PriceAndWeather);
        const FrontierPoint pt = frontierPoint(sys, twoFundBasis(sys), a);
        EXPECT_LE(oracle::relativeError(d.mean(), pt.mean), 1e-9);
        const ProfitMoments mom = hedgedMoments(sys, sol.pricePayoff, sol.weatherPayoff);
        EXPECT_LE(std::abs(d.variance() - mom.variance) / mom.variance, 1e-9);
        double total = 0.0;
        for (const ProfitOutcome& o : d.outcomes)
            total += o.probability;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(ProfitDistribution, RejectsMismatchedClaims)
{
    std::mt19937_64 rng(32);
    const RealWorldMeasure psi = oracle::randomRealWorld(3, 2, 3, rng);
    HedgeSolution bad;
    bad.pricePayoff = VectorXd::Zero(2);
    bad.weatherPayoff = VectorXd::Zero(3);
    EXPECT_THROW(hedgedProfitDistribution(psi, 120.0, bad, Strategy::PriceOnly), InvalidInput);
}

TEST(Quantile, LeftContinuousInverse)
{
    ProfitDistribution d;
    d.outcomes = {{-100.0, 0.5}, {100.0, 0.5}};
    const std::vector<double> levels = {0.25, 0.5, 0.75, 0.999};
    const std::vector<double> q = quantile(d, levels);
    EXPECT_EQ(q[0], -100.0);
    EXPECT_EQ(q[1], -100.0);
    EXPECT_EQ(q[2], 100.0);
    EXPECT_EQ(q[3], 100.0);
}

TEST(Quantile, RejectsBadLevels)
{
    ProfitDistribution d;
    d.outcomes = {{1.0, 1.0}};
    const std::vector<double> zero = {0.0};
    const std::vector<double> unsorted = {0.5, 0.2};
    EXPECT_THROW(quantile(d, zero), InvalidInput);
    EXPECT_THROW(quantile(d, unsorted), InvalidInput);
    EXPECT_THROW(quantile(ProfitDistribution{}, std::vector<double>{0.5}), InvalidInput);
}

TEST(QuantileTable, ReferenceCaseCutsMostOfTheLeftTail)
{
    // Table layout and the unhedged/hedged gap; the full strict ordering is an acceptance criterion.
    const Instance inst = buildInstance(ScenarioSpecs::reference(0.0, 10), 120.0);
    std::vector<ProfitDistribution> dists;
    for (Strategy s : {Strategy::NoHedge, Strategy::PriceOnly, Strategy::PriceAndWeather})
        dists.push_back(hedgedProfitDistribution(inst.psi, 120.0, solveStrategy(inst.system, s, 1.0), s));
    const std::vector<double> levels = {0.01, 0.05, 0.1, 0.2};
    const QuantileTable t = quantileTable(dists, levels);
    ASSERT_EQ(t.values.rows(), 4);
    ASSERT_EQ(t.values.cols(), 3);
    EXPECT_LT(t.values(0, 0), 0.0);
    for (Index r = 0; r < 4; ++r)
    {
        EXPECT_LT(t.values(r, 0), t.values(r, 1));
        EXPECT_LT(t.values(r, 0), t.values(r, 2));
    }
}

TEST(InterpolateLinear, ClampsAndInterpolates)
{
    ClaimCurve c{Eigen::Vector3d(0.0, 1.0, 3.0), Eigen::Vector3d(0.0, 10.0, 30.0)};
    EXPECT_DOUBLE_EQ(interpolateLinear(c, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(interpolateLinear(c, 0.5), 5.0);
    EXPECT_DOUBLE_EQ(interpolateLinear(c, 2.0), 20.0);
    EXPECT_DOUBLE_EQ(interpolateLinear(c, 9.0), 30.0);
}

TEST(CorrelationSweep, ZeroCorrelationMakesProxyExact)
{
    const std::vector<double> rhos = {0.0};
    const auto rec = correlationSweep(ScenarioSpecs::reference(0.0, 8), rhos, 1.0, 120.0).front();
    EXPECT_LE(oracle::relativeError(rec.general.stacked(), rec.proxy.stacked()), 1e-8);
}

TEST(CorrelationSweep, GeneralBeatsProxyAndGapGrows)
{
    const std::vector<double> rhos = {0.0, 0.13, 0.33, 0.75};
    const auto recs = correlationSweep(ScenarioSpecs::reference(0.0, 10), rhos, 1.0, 120.0);
    for (std::size_t i = 0; i < recs.size(); ++i)
    {
        EXPECT_GE(recs[i].generalUtility, recs[i].proxyUtility);
        if (i > 0)
        {
            EXPECT_GE(recs[i].utilityGap(), recs[i - 1].utilityGap());
        }
    }
    EXPECT_GT(recs[2].generalUtility, recs[2].proxyUtility);
}

TEST(CorrelationSweep, RejectsInvalidRho)
{
    const std::vector<double> rhos = {1.0};
    EXPECT_THROW(correlationSweep(ScenarioSpecs::reference(0.0, 5), rhos, 1.0, 120.0), InvalidInput);
}

TEST(VolatilitySweep, BaseSigmaReproducesBaseRun)
{
    const ScenarioSpecs specs = ScenarioSpecs::reference(kVolatilitySweepRho, 8);
    const std::vector<double> sigmas = {specs.realWorld.sdLogPrice};
    const auto rec = volatilitySweep(specs, sigmas, SweepAxis::Price, 1.0, 120.0).front();
    const Instance inst = buildInstance(specs, 120.0);
    EXPECT_EQ(rec.solution.stacked(), solveGeneral(inst.system, 1.0).stacked());
}

TEST(VolatilitySweep, PriceClaimRangeGrowsWithSigma)
{
    const std::vector<double> sigmas = {0.1, 0.72};
    const auto recs = volatilitySweep(ScenarioSpecs::reference(0.0, 10), sigmas, SweepAxis::Price, 1.0, 120.0);
    EXPECT_GT(recs[1].priceClaimRange(), recs[0].priceClaimRange());
}

TEST(VolatilitySweep, RejectsNonPositiveSigma)
{
    const std::vector<double> sigmas = {-0.1};
    EXPECT_THROW(volatilitySweep(ScenarioSpecs::reference(0.0, 5), sigmas, SweepAxis::Weather, 1.0, 120.0),
                 InvalidInput);
}
