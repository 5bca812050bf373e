#include "surfsub/analysis.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "surfsub/error.hpp"

namespace surfsub::analysis {
namespace {

using std::numbers::pi;

// Explicitly assembled P1 column matrix M + dt A on nodes 0..M, with node 0
// (bottom) removed. Index M-1 of the result is the interface node.
Eigen::MatrixXd assembled_column(double c, double K, double dt, int M, double dz) {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(M + 1, M + 1);
    Eigen::Matrix2d mass;
    mass << 2.0, 1.0, 1.0, 2.0;
    mass *= c * dz / 6.0;
    Eigen::Matrix2d stiff;
    stiff << 1.0, -1.0, -1.0, 1.0;
    stiff *= K / dz;
    for (int e = 0; e < M; ++e) full.block<2, 2>(e, e) += mass + dt * stiff;
    return full.bottomRightCorner(M, M);
}

double dense_schur_S(double c, double K, double dt, int M, double dz) {
    const Eigen::MatrixXd sys = assembled_column(c, K, dt, M, dz);
    const int n = M - 1;
    const Eigen::MatrixXd interior = sys.topLeftCorner(n, n);
    const Eigen::VectorXd coupling = sys.topRightCorner(n, 1);
    const double gamma = sys(n, n);
    return coupling.dot(interior.partialPivLu().solve(coupling)) - gamma;
}

TEST(Toeplitz, CoefficientsByHand) {
    const auto p2 = LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 2);
    const auto t2 = toeplitz_coeffs(p2);
    EXPECT_NEAR(t2.a, 1.0 / 3.0 + 0.4, 1e-15);
    EXPECT_NEAR(t2.b, 1.0 / 12.0 - 0.2, 1e-15);
    const auto t20 = toeplitz_coeffs(LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 20));
    EXPECT_NEAR(t20.a, 0.05 * 2.0 / 3.0 + 4.0, 1e-14);
    EXPECT_NEAR(t20.b, 0.05 / 6.0 - 2.0, 1e-14);
}

TEST(Toeplitz, MatchesAssembledInteriorMatrix) {
    const auto p = LinearModelParams::uniform(0.3, 7.0, 2.0, 0.05, 6);
    const auto t = toeplitz_coeffs(p);
    const Eigen::MatrixXd sys = assembled_column(p.c, p.K, p.dt, p.M, p.dz);
    EXPECT_NEAR(sys(2, 2), t.a, 1e-13);
    EXPECT_NEAR(sys(2, 3), t.b, 1e-13);
    EXPECT_NEAR(sys(p.M - 1, p.M - 1), t.a / 2.0, 1e-13);
}

TEST(LinearModelParams, RejectsInvalid) {
    EXPECT_THROW(LinearModelParams::uniform(1.0, 0.0, 1.0, 0.1, 2), ConfigError);
    EXPECT_THROW(LinearModelParams::uniform(0.0, 1.0, 1.0, 0.1, 2), ConfigError);
    EXPECT_THROW(LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 1), ConfigError);
    EXPECT_THROW(LinearModelParams::uniform(1.0, 1.0, 1.0, -0.1, 4), ConfigError);
    EXPECT_THROW(LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 4, 1.5), ConfigError);
    LinearModelParams p = LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 4);
    p.dz = 0.3;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(AlphaSum, TwoElementsByHand) {
    const double a = 1.0 / 3.0 + 0.4;
    const double b = 1.0 / 12.0 - 0.2;
    EXPECT_NEAR(alpha_sum(a, b, 2, 0.5, 1.0), 1.0 / a, 1e-15);
}

TEST(AlphaSum, RejectsIndefiniteMatrix) {
    EXPECT_THROW(alpha_sum(1.0, 0.6, 10, 0.1, 1.0), SolverError);
    EXPECT_THROW(alpha_sum(-1.0, 0.0, 4, 0.25, 1.0), SolverError);
}

TEST(AlphaSum, MatchesDenseInverseCorner) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> log_coef(-3.0, 3.0);
    std::uniform_real_distribution<double> step(1e-3, 1.0);
    std::uniform_int_distribution<int> elements(2, 64);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = LinearModelParams::uniform(std::pow(10.0, log_coef(rng)), std::pow(10.0, log_coef(rng)), 1.0,
                                                  step(rng), elements(rng));
        const auto t = toeplitz_coeffs(p);
        const Eigen::MatrixXd sys = assembled_column(p.c, p.K, p.dt, p.M, p.dz);
        const int n = p.M - 1;
        const double corner = sys.topLeftCorner(n, n).inverse()(n - 1, n - 1);
        EXPECT_NEAR(alpha_sum(t.a, t.b, p.M, p.dz, p.L), corner, 1e-12 * corner);
    }
}

TEST(AlphaSum, EigenvaluesMatchDenseEigensolver) {
    const double a = 2.5;
    const double b = -0.7;
    for (int M : {3, 7, 16}) {
        const int n = M - 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            T(i, i) = a;
            if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
        std::vector<double> closed;
        for (int j = 1; j < M; ++j) closed.push_back(a - 2.0 * b * std::cos(j * pi / M));
        std::sort(closed.begin(), closed.end());
        for (int j = 0; j < n; ++j) EXPECT_NEAR(eig.eigenvalues()[j], closed[static_cast<std::size_t>(j)], 1e-12);
    }
}

TEST(AlphaSum, SineIdentities) {
    for (int M = 2; M <= 200; ++M) {
        double total = 0.0;
        for (int j = 1; j < M; ++j) {
            const double s = std::sin(j * pi / M);
            const double s_mirror = std::sin((M - 1) * j * pi / M);
            EXPECT_NEAR(s_mirror * s_mirror, s * s, 1e-12);
            total += s * s;
        }
        EXPECT_NEAR(total, M / 2.0, 1e-12);
    }
}

TEST(DiscreteS, TwoElementGolden) {
    const auto r = discrete_S(LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 2));
    EXPECT_NEAR(r.alpha_sum, 1.363636363636363636, 1e-15);
    EXPECT_NEAR(r.S, -0.348106060606060606, 1e-15);
    EXPECT_NEAR(r.omega_opt, 0.741781399269457713, 1e-15);
    EXPECT_NEAR(r.S, r.b * r.b / r.a - r.a / 2.0, 1e-15);
}

TEST(DiscreteS, TwentyElementGolden) {
    const auto r = discrete_S(LinearModelParams::uniform(1.0, 1.0, 1.0, 0.1, 20));
    EXPECT_NEAR(r.alpha_sum, 0.428306973483146770871, 1e-15);
    EXPECT_NEAR(r.S, -0.317685928310359257019, 1e-14);
    EXPECT_NEAR(r.omega_opt, 0.758906184330494300068, 1e-14);
}

TEST(DiscreteSProperty, MatchesDenseSchurComplement) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> log_coef(-3.0, 3.0);
    std::uniform_real_distribution<double> step(1e-3, 1.0);
    std::uniform_int_distribution<int> elements(2, 64);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = LinearModelParams::uniform(std::pow(10.0, log_coef(rng)), std::pow(10.0, log_coef(rng)), 1.0,
                                                  step(rng), elements(rng));
        const auto r = discrete_S(p);
        const double oracle = dense_schur_S(p.c, p.K, p.dt, p.M, p.dz);
        EXPECT_NEAR(r.S, oracle, 1e-11 * std::abs(oracle)) << "c=" << p.c << " K=" << p.K << " M=" << p.M;
        EXPECT_GT(r.alpha_sum, 0.0);
        EXPECT_EQ(r.omega_opt, 1.0 / (1.0 - r.S));
    }
}

TEST(DiscreteSProperty, NegativeOnHeatmapGrid) {
    const auto values = log_space(1e-3, 1e3, 25);
    for (double c : values) {
        for (double K : values) {
            const auto r = discrete_S(LinearModelParams::uniform(c, K, 1.0, 0.1, 20));
            ASSERT_LT(r.S, 0.0);
            EXPECT_GT(r.omega_opt, 0.0);
            EXPECT_LT(r.omega_opt, 1.0);
        }
    }
}

TEST(DiscreteSProperty, ApproachesContinuousFactorUnderRefinement) {
    double prev_gap = INFINITY;
    for (int k = 0; k < 4; ++k) {
        const int M = 10 << k;
        const double dt = 1.0 / M;
        const double S = discrete_S(LinearModelParams::uniform(1.0, 1.0, 1.0, dt, M)).S;
        const double target = std::abs(rho_continuous(Complex(1.0 / dt, 0.0), 1.0, 1.0, 1.0, 1.0));
        const double gap = std::abs(std::abs(S) - target);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
}

TEST(Sigma, Identities) {
    EXPECT_EQ(sigma(1.0, -0.3), -0.3);
    EXPECT_EQ(sigma(0.0, -0.3), 1.0);
    const double S = -0.348106060606060606;
    EXPECT_NEAR(sigma(1.0 / (1.0 - S), S), 0.0, 1e-16);
}

TEST(Continuous, HandValuesAtUnitS) {
    const Complex one(1.0, 0.0);
    EXPECT_NEAR(rho_continuous(one, 1.0, 1.0, 1.0, 1.0).real(), -1.31303528549933130364, 1e-15);
    EXPECT_NEAR(omega_opt_continuous(one, 1.0, 1.0, 1.0).real(), 0.432332358381693654053, 1e-15);
    EXPECT_NEAR(laplace_height(one, 1.0, 1.0, 1.0).real(), -0.432332358381693654053, 1e-15);
    EXPECT_NEAR(omega_opt_continuous(one, 1.0, 1.0, 1.0).imag(), 0.0, 1e-16);
}

TEST(Continuous, LimitsAndErrors) {
    EXPECT_LT(std::abs(rho_continuous(Complex(1e8, 0.0), 1.0, 1.0, 1.0, 1.0)), 1e-3);
    EXPECT_NEAR(std::abs(omega_opt_continuous(Complex(1e12, 0.0), 1.0, 1.0, 1.0) - 1.0), 0.0, 1e-5);
    EXPECT_LT(std::abs(laplace_height(Complex(2.0, 1.0), 1.0, 1e-12, 1.0)), 1e-10);
    EXPECT_THROW(rho_continuous(Complex(0.0, 1.0), 1.0, 1.0, 1.0, 1.0), ConfigError);
    EXPECT_THROW(omega_opt_continuous(Complex(-1.0, 0.0), 1.0, 1.0, 1.0), ConfigError);
    EXPECT_THROW(laplace_height(Complex(-1.0, 3.0), 1.0, 1.0, 1.0), ConfigError);
}

TEST(Continuous, CothSaturatesForLargeArguments) {
    EXPECT_EQ(coth(Complex(400.0, 3.0)), Complex(1.0, 0.0));
    EXPECT_EQ(coth(Complex(-400.0, 3.0)), Complex(-1.0, 0.0));
    EXPECT_NEAR(coth(Complex(1.0, 0.0)).real(), 1.31303528549933130364, 1e-15);
    const Complex z(0.3, 0.8);
    EXPECT_NEAR(std::abs(coth(z) - std::cosh(z) / std::sinh(z)), 0.0, 1e-14);
}

TEST(ContinuousProperty, OptimalRelaxationAnnihilatesFactor) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> log_re(-3.0, 3.0);
    std::uniform_real_distribution<double> im(-100.0, 100.0);
    std::uniform_real_distribution<double> log_coef(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Complex s(std::pow(10.0, log_re(rng)), im(rng));
        const double c = std::pow(10.0, log_coef(rng));
        const double K = std::pow(10.0, log_coef(rng));
        const double L = std::pow(10.0, log_coef(rng) / 2.0);
        const Complex w = omega_opt_continuous(s, c, K, L);
        // rho is affine in omega; evaluate it with a complex omega directly.
        const Complex symbol = 1.0 / w - 1.0;
        EXPECT_LT(std::abs(1.0 - w - w * symbol), 1e-13);
        const Complex h = laplace_height(s, c, K, L);
        EXPECT_LT(std::abs(h * (s + symbol) + K), 1e-13 * std::max(1.0, K));
    }
}

TEST(ContinuousProperty, OmegaOptSymmetry) {
    // Depends on c and K only through sqrt(cK) and L sqrt(c/K).
    const Complex s(0.7, 0.2);
    const double c1 = 4.0, K1 = 1.0, L1 = 1.0;
    const double c2 = 1.0, K2 = 4.0, L2 = 4.0;
    EXPECT_NEAR(std::abs(omega_opt_continuous(s, c1, K1, L1) - omega_opt_continuous(s, c2, K2, L2)), 0.0, 1e-14);
}

TEST(LogSpace, EndpointsAndSpacing) {
    const auto v = log_space(1e-3, 1e3, 25);
    ASSERT_EQ(v.size(), 25u);
    EXPECT_EQ(v.front(), 1e-3);
    EXPECT_EQ(v.back(), 1e3);
    EXPECT_NEAR(v[12], 1.0, 1e-14);
    EXPECT_THROW(log_space(0.0, 1.0, 3), ConfigError);
    EXPECT_TRUE(log_space(1.0, 2.0, 0).empty());
}

TEST(Sweep, ConcurrentMatchesSerialBitForBit) {
    SweepSpec spec;
    spec.c_values = log_space(1e-3, 1e3, 25);
    spec.K_values = log_space(1e-3, 1e3, 25);
    spec.dt_values = {0.1};
    spec.dz_values = {0.05};
    const auto serial = sweep(spec, 1);
    const auto parallel = sweep(spec, 4);
    ASSERT_EQ(serial.size(), 625u);
    ASSERT_EQ(parallel.size(), serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].c, parallel[i].c);
        EXPECT_EQ(serial[i].K, parallel[i].K);
        EXPECT_EQ(serial[i].result.S, parallel[i].result.S);
        EXPECT_EQ(serial[i].result.omega_opt, parallel[i].result.omega_opt);
    }
    EXPECT_EQ(serial[1].c, spec.c_values[0]);
    EXPECT_EQ(serial[1].K, spec.K_values[1]);
}

TEST(Sweep, WorkerErrorsPropagate) {
    SweepSpec spec;
    spec.c_values = {1.0, -1.0};
    EXPECT_THROW(sweep(spec, 2), ConfigError);
}

}  // namespace
}  // namespace surfsub::analysis
