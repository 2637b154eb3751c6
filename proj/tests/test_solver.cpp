#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hedge;

namespace
{

struct Case
{
    RealWorldMeasure psi;
    RiskNeutralMeasure phi;
    HedgeSystem sys;
};

Case randomCase(Index n, Index l, Index m, std::mt19937_64& rng, bool phiIsPsi = false)
{
    RealWorldMeasure psi = oracle::randomRealWorld(n, l, m, rng);
    RiskNeutralMeasure phi = phiIsPsi ? riskNeutralFromRealWorld(psi) : oracle::randomRiskNeutral(psi, rng);
    HedgeSystem sys = assembleSystem(psi, phi, 120.0);
    return {std::move(psi), std::move(phi), std::move(sys)};
}

Case independentCase(Index n, Index l, Index m, std::mt19937_64& rng, bool phiIsPsi)
{
    RealWorldMeasure psi = oracle::randomIndependent(n, l, m, rng);
    RiskNeutralMeasure phi = phiIsPsi ? riskNeutralFromRealWorld(psi) : oracle::randomRiskNeutral(psi, rng);
    HedgeSystem sys = assembleSystem(psi, phi, 120.0);
    return {std::move(psi), std::move(phi), std::move(sys)};
}

} // namespace

TEST(SolveGeneral, MatchesNullSpaceBruteForce)
{
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep)
    {
        const Case c = randomCase(3, 2, 3, rng);
        const double a = 0.01;
        const HedgeSolution sol = solveGeneral(c.sys, a);
        const VectorXd want = oracle::bruteForceMaximizer(c.psi, c.phi, 120.0, a);
        EXPECT_LE(oracle::relativeError(sol.stacked(), want), 1e-6);
    }
}

TEST(SolveGeneral, SatisfiesOptimalityConditions)
{
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 20; ++rep)
    {
        const Case c = randomCase(2 + rep % 4, 2 + rep % 3, 2 + rep % 4, rng);
        const HedgeSolution sol = solveGeneral(c.sys, 0.3);
        const FocReport foc = verifyFOC(c.sys, sol, 0.3);
        EXPECT_TRUE(foc.satisfied()) << foc.stationarity << " " << foc.scale;
        EXPECT_LE(sol.costResidualPrice, 1e-8);
        EXPECT_LE(sol.costResidualWeather, 1e-8);
        EXPECT_NEAR(sol.lambdaPrice, 1.0, 1e-9);
        EXPECT_NEAR(sol.lambdaWeather, 1.0, 1e-9);
    }
}

TEST(SolveGeneral, PhiEqualsPsiGivesRiskMinimizer)
{
    std::mt19937_64 rng(3);
    const Case c = randomCase(4, 3, 3, rng, true);
    const TwoFundBasis basis = twoFundBasis(c.sys);
    EXPECT_LE(basis.profitTilt.cwiseAbs().maxCoeff(), 1e-9);
    for (double a : {0.1, 1.0, 10.0})
        EXPECT_LE(oracle::relativeError(solveGeneral(c.sys, a).stacked(), basis.riskMinimizing), 1e-9);
}

TEST(SolveGeneral, UniformIndependentPhiEqualsPsiClosedForm)
{
    ScenarioGrid g;
    g.prices = Eigen::Vector2d(100.0, 140.0);
    g.quantities = Eigen::Vector2d(10.0, 20.0);
    g.weather = Eigen::Vector2d(0.0, 10.0);
    const RealWorldMeasure psi(g, ProbabilityTable(2, 2, 2, std::vector<double>(8, 0.125)));
    const HedgeSystem sys = assembleSystem(psi, riskNeutralFromRealWorld(psi), 120.0);
    const HedgeSolution sol = solveGeneral(sys, 1.0);
    const oracle::ScenarioStats s = oracle::scenarioStats(psi, 120.0);
    // mid price: E[y | p] = +-300, E[y] = 0
    EXPECT_NEAR(sol.pricePayoff[0], -300.0, 1e-9);
    EXPECT_NEAR(sol.pricePayoff[1], 300.0, 1e-9);
    EXPECT_LE(oracle::relativeError(sol.pricePayoff, (s.mean - s.meanGivenPrice.array()).matrix()), 1e-12);
    EXPECT_LE(sol.weatherPayoff.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveGeneral, RejectsNonPositiveRiskAversion)
{
    std::mt19937_64 rng(4);
    const Case c = randomCase(3, 2, 3, rng);
    EXPECT_THROW(solveGeneral(c.sys, 0.0), InvalidInput);
    EXPECT_THROW(solveGeneral(c.sys, -1.0), InvalidInput);
}

TEST(SolveGeneral, PerfectlyDependentIndicesAreSingular)
{
    // weather level k occurs exactly with price level k: x_P and x_W are not identifiable
    ScenarioGrid g;
    g.prices = Eigen::Vector3d(80.0, 120.0, 160.0);
    g.quantities = Eigen::Vector2d(10.0, 20.0);
    g.weather = Eigen::Vector3d(0.0, 10.0, 20.0);
    ProbabilityTable t(3, 2, 3);
    const double mass[3] = {0.2, 0.5, 0.3};
    for (Index i = 0; i < 3; ++i)
    {
        t(i, 0, i) = mass[i] * 0.4;
        t(i, 1, i) = mass[i] * 0.6;
    }
    const RealWorldMeasure psi(g, t);
    const HedgeSystem sys = assembleSystem(psi, riskNeutralFromRealWorld(psi), 120.0);
    EXPECT_THROW(solveGeneral(sys, 1.0), NumericalFailure);
}

TEST(VerifyFOC, PerturbationIsReportedNotThrown)
{
    std::mt19937_64 rng(5);
    const Case c = randomCase(3, 2, 3, rng);
    HedgeSolution sol = solveGeneral(c.sys, 1.0);
    sol.pricePayoff[1] += 0.1;
    FocReport foc;
    EXPECT_NO_THROW(foc = verifyFOC(c.sys, sol, 1.0));
    EXPECT_GT(foc.stationarity, 0.0);
    EXPECT_GT(foc.feasibility, 0.0);
}

TEST(VerifyFOC, ZeroClaimsWithPhiEqualPsi)
{
    std::mt19937_64 rng(6);
    const Case c = randomCase(3, 2, 3, rng, true);
    HedgeSolution zero;
    zero.pricePayoff = VectorXd::Zero(3);
    zero.weatherPayoff = VectorXd::Zero(3);
    zero.lambdaPrice = zero.lambdaWeather = 1.0;
    const double a = 0.7;
    const FocReport foc = verifyFOC(c.sys, zero, a);
    // residual = lambda b - (2ac + d) = -2ac when b = d
    EXPECT_NEAR(foc.stationarity, (2.0 * a * c.sys.riskLoading()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GT(foc.stationarity, 0.0);
}

TEST(TwoFundBasis, CombinesToGeneralSolution)
{
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep)
    {
        const Case c = randomCase(2 + rep % 4, 2 + rep % 3, 2 + rep % 4, rng);
        const TwoFundBasis basis = twoFundBasis(c.sys);
        for (double a : {0.1, 0.5, 1.0, 5.0, 50.0})
            EXPECT_LE(oracle::relativeError(solveGeneral(c.sys, a).stacked(), basis.combine(a)), 1e-9);
    }
}

TEST(TwoFundBasis, RiskMinimizerBeatsRandomFeasibleClaims)
{
    std::mt19937_64 rng(8);
    const Case c = randomCase(4, 2, 3, rng);
    const TwoFundBasis basis = twoFundBasis(c.sys);
    const double best = oracle::enumerate(c.psi, 120.0, basis.riskMinimizing.head(4), basis.riskMinimizing.tail(3)).variance;
    const double scale = basis.riskMinimizing.cwiseAbs().maxCoeff();
    for (int k = 0; k < 100; ++k)
    {
        const VectorXd x = basis.riskMinimizing + oracle::randomFeasible(c.phi, scale, rng);
        EXPECT_GE(oracle::enumerate(c.psi, 120.0, x.head(4), x.tail(3)).variance, best * (1.0 - 1e-12));
    }
}

TEST(SolveIndependent, EqualsGeneralOnIndependentMeasures)
{
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 10; ++rep)
    {
        const Case c = independentCase(2 + rep % 4, 2 + rep % 3, 2 + rep % 4, rng, false);
        EXPECT_LE(oracle::relativeError(solveIndependent(c.sys, 0.2).stacked(), solveGeneral(c.sys, 0.2).stacked()),
                  1e-9);
    }
}

TEST(SolveIndependent, ClosedFormWhenPhiEqualsPsi)
{
    std::mt19937_64 rng(10);
    const Case c = independentCase(4, 3, 5, rng, true);
    const oracle::ScenarioStats s = oracle::scenarioStats(c.psi, 120.0);
    const HedgeSolution sol = solveIndependent(c.sys, 1.0);
    EXPECT_LE(oracle::relativeError(sol.pricePayoff, (s.mean - s.meanGivenPrice.array()).matrix()), 1e-9);
    EXPECT_LE(oracle::relativeError(sol.weatherPayoff, (s.mean - s.meanGivenWeather.array()).matrix()), 1e-9);
}

TEST(SolveIndependent, RefusesDependentMeasure)
{
    std::mt19937_64 rng(11);
    const Case c = randomCase(3, 2, 3, rng);
    EXPECT_THROW(solveIndependent(c.sys, 1.0), InvalidInput);
}

TEST(SolveRestricted, PriceOnlyMatchesIndependentPriceBlock)
{
    std::mt19937_64 rng(12);
    const Case c = independentCase(4, 2, 3, rng, false);
    const HedgeSolution restricted = solveRestricted(c.sys, 1.0, HedgeRestriction::PriceOnly);
    EXPECT_LE(oracle::relativeError(restricted.pricePayoff, solveIndependent(c.sys, 1.0).pricePayoff), 1e-9);
    EXPECT_EQ(restricted.weatherPayoff.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveRestricted, NeverBeatsGeneral)
{
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep)
    {
        const Case c = randomCase(3, 2, 4, rng);
        const double a = 0.05;
        const HedgeSolution general = solveGeneral(c.sys, a);
        const double best = utilityValue(c.sys, general.pricePayoff, general.weatherPayoff, a);
        for (HedgeRestriction which : {HedgeRestriction::PriceOnly, HedgeRestriction::WeatherOnly})
        {
            const HedgeSolution r = solveRestricted(c.sys, a, which);
            EXPECT_LE(utilityValue(c.sys, r.pricePayoff, r.weatherPayoff, a), best + 1e-9 * std::abs(best));
        }
    }
}

TEST(SolveRestricted, MatchesRestrictedBruteForce)
{
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 10; ++rep)
    {
        const Case c = randomCase(3, 2, 3, rng);
        const double a = 0.02;
        const VectorXd wantP = oracle::bruteForceMaximizer(c.psi, c.phi, 120.0, a, true, false);
        const VectorXd wantW = oracle::bruteForceMaximizer(c.psi, c.phi, 120.0, a, false, true);
        EXPECT_LE(oracle::relativeError(solveRestricted(c.sys, a, HedgeRestriction::PriceOnly).stacked(), wantP), 1e-6);
        EXPECT_LE(oracle::relativeError(solveRestricted(c.sys, a, HedgeRestriction::WeatherOnly).stacked(), wantW),
                  1e-6);
        const HedgeSolution r = solveRestricted(c.sys, a, HedgeRestriction::PriceOnly);
        EXPECT_LE(r.focResidual, kFocTolerance * verifyFOC(c.sys, r, a).scale);
    }
}
