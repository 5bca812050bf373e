/**
 * @file linear1d.hpp
 * @brief Fully discrete linear 1D column coupled to a 0D water reservoir.
 *
 * The column occupies z in [-L, 0] with homogeneous Dirichlet data at the
 * bottom and the interface node psi_Gamma = h at z = 0. One time step runs
 * the relaxed Dirichlet-flux iteration
 *
 *   (M_II + dt A_II) psi_I^{n,k} = -(M_IG + dt A_IG) psi_G^{n,k-1} + M_II psi_I^{n-1} + M_IG psi_G^{n-1}
 *   psi~_G^{n,k} = -(M_GI + dt A_GI) psi_I^{n,k} - (M_GG + dt A_GG) psi_G^{n,k-1}
 *                  + M_GI psi_I^{n-1} + (1 + M_GG) psi_G^{n-1} - dt K
 *   psi_G^{n,k}  = omega psi~_G^{n,k} + (1 - omega) psi_G^{n,k-1}
 *
 * until |psi~_G^{n,k} - psi_G^{n,k-1}| < tol.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "surfsub/analysis.hpp"

namespace surfsub::linear1d {

/// Mean of consecutive residual ratios res[k]/res[k-1] for k = 2..K-1 (1-based),
/// where K = residuals.size(). Undefined (nullopt) for K < 3.
std::optional<double> observed_cr(std::span<const double> residuals);

/// Solves the symmetric tridiagonal Toeplitz system tridiag(b, a, b) x = rhs.
/// Throws SolverError on a zero pivot.
std::vector<double> solve_toeplitz_tridiagonal(double a, double b, std::span<const double> rhs);

struct StepTrace {
    int n = 0;
    std::vector<double> iterates;   ///< psi_G^{n,k}, k = 1..K_n (after relaxation)
    std::vector<double> residuals;  ///< |psi~_G^{n,k} - psi_G^{n,k-1}|
    int iterations = 0;             ///< K_n
    std::optional<double> cr;       ///< observed CR_n
    bool converged = false;
};

class Linear1DSystem {
public:
    /// Initial data psi_0(z) = 1 - z/L at the interior nodes, h_0 = 0.
    explicit Linear1DSystem(const analysis::LinearModelParams& params);
    Linear1DSystem(const analysis::LinearModelParams& params, std::vector<double> psi_interior,
                   double psi_gamma);

    const analysis::LinearModelParams& params() const noexcept { return params_; }
    double a() const noexcept { return coeffs_.a; }
    double b() const noexcept { return coeffs_.b; }

    const std::vector<double>& psi_interior() const noexcept { return psi_interior_; }
    double psi_gamma() const noexcept { return psi_gamma_; }
    int step_index() const noexcept { return step_; }

    /// Interior heads for a given interface iterate psi_G^{n,k-1}.
    std::vector<double> subsurface_solve(double psi_gamma_iter) const;

    /// Unrelaxed interface update psi~_G^{n,k}.
    double surface_update(std::span<const double> psi_interior_new, double psi_gamma_iter) const;

    /// psi~_G as a function of psi_G^{n,k-1}: one subsurface solve plus one surface update.
    double interface_map(double psi_gamma_iter) const;

    /// Runs Algorithm-style coupling iterations for the next time step. On
    /// convergence the last relaxed iterate and its interior solution become the
    /// new previous-step state; on divergence the state is left untouched.
    StepTrace run_time_step(double omega, double tol = 1e-8, int max_iters = 200);

private:
    analysis::LinearModelParams params_;
    analysis::ToeplitzCoefficients coeffs_;
    std::vector<double> psi_interior_;
    double psi_gamma_ = 0.0;
    int step_ = 0;
};

}  // namespace surfsub::linear1d
