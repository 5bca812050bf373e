/**
 * @file analysis.hpp
 * @brief Convergence analysis of the relaxed surface-subsurface coupling
 *        iteration for the linear 1D column / 0D reservoir model.
 *
 * Fully discrete (P1 elements, implicit Euler):
 *
 *   a = 2/3 c dz + 2 K dt / dz,        b = 1/6 c dz - K dt / dz
 *   alpha = dz/L * sum_{j=1}^{M-1} sin^2(j pi dz/L) / (a/2 - b cos(j pi dz/L))
 *   S = b^2 alpha - a/2,   Sigma(omega) = omega S + 1 - omega,   omega_opt = 1/(1-S)
 *
 * Continuous (Laplace variable s):
 *
 *   rho(s, omega) = 1 - omega - omega sqrt(cK/s) coth(sqrt(cs/K) L)
 */
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace surfsub::analysis {

using Complex = std::complex<double>;

struct LinearModelParams {
    double c = 1.0;      ///< hydraulic capacity [1/m]
    double K = 1.0;      ///< conductivity [m/s]
    double L = 1.0;      ///< column depth [m]
    double dt = 0.1;     ///< time step [s]
    double dz = 0.5;     ///< element size [m]
    int M = 2;           ///< element count, M dz = L
    double omega = 1.0;  ///< relaxation parameter in (0, 1]

    /// Parameters on a uniform grid with dz = L / M.
    static LinearModelParams uniform(double c, double K, double L, double dt, int M, double omega = 1.0);

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

struct ToeplitzCoefficients {
    double a = 0.0;  ///< diagonal of M_II + dt A_II
    double b = 0.0;  ///< off-diagonal of M_II + dt A_II
};

struct AnalysisResult {
    double a = 0.0;
    double b = 0.0;
    double alpha_sum = 0.0;
    double S = 0.0;
    double omega_opt = 0.0;
};

ToeplitzCoefficients toeplitz_coeffs(const LinearModelParams& p);

/// Corner entry of (M_II + dt A_II)^{-1} via the closed-form eigen sum.
/// Throws SolverError if some eigenvalue a - 2b cos(j pi / M) is not positive.
double alpha_sum(double a, double b, int M, double dz, double L);

AnalysisResult discrete_S(const LinearModelParams& p);

/// Iteration factor with relaxation.
double sigma(double omega, double S);

/// Principal-branch coth that saturates to +-1 for |Re z| > 350.
Complex coth(Complex z);

/// Throws ConfigError unless Re(s) > 0.
Complex rho_continuous(Complex s, double omega, double c, double K, double L);
Complex omega_opt_continuous(Complex s, double c, double K, double L);
Complex laplace_height(Complex s, double c, double K, double L);

/// n points log-uniformly spaced over [lo, hi], endpoints included.
std::vector<double> log_space(double lo, double hi, std::size_t n);

struct SweepRow {
    double c = 0.0;
    double K = 0.0;
    double dt = 0.0;
    double dz = 0.0;
    AnalysisResult result;
};

/// Cartesian sweep. Rows are ordered row-major over (first axis, second axis)
/// where the axes are either (c, K) or (dt, dz); unused axes hold a single value.
struct SweepSpec {
    std::vector<double> c_values{1.0};
    std::vector<double> K_values{1.0};
    std::vector<double> dt_values{0.1};
    std::vector<double> dz_values{0.05};
    double L = 1.0;
};

/// Evaluates every grid point of spec; concurrent evaluation with `workers`
/// threads produces the same rows in the same order as serial evaluation.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned workers = 1);

}  // namespace surfsub::analysis
