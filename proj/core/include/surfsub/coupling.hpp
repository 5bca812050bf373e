/**
 * @file coupling.hpp
 * @brief Sequential Dirichlet-to-source coupling of subsurface and surface flow.
 *
 * Per time step n and iteration k:
 *   1. Richards step with top data psi_G = map_height_to_head(h^{n,k-1})
 *   2. interface flux integrals -> per-cell source s = flux / dx
 *   3. surface step with source s + rain -> h~^{n,k}
 *   4. h^{n,k} = omega h~^{n,k} + (1 - omega) h^{n,k-1}
 *   5. stop once |h~^{n,k} - h^{n,k-1}|_2 < tol
 * starting from h^{n,0} = h^{n-1}. Only the depth is relaxed; the shallow
 * water discharge is taken from the latest surface solve.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "surfsub/richards2d.hpp"
#include "surfsub/surface1d.hpp"

namespace surfsub::coupling {

/// Nodal top values from cell depths: interior nodes average their two
/// neighbouring cells, end nodes copy the adjacent cell.
std::vector<double> map_height_to_head(std::span<const double> h);

/// Per-cell source [m/s] from per-cell flux integrals [m^2/s].
std::vector<double> map_flux_to_source(std::span<const double> flux_integrals, double dx);

std::vector<double> relax(std::span<const double> h_tilde, std::span<const double> h_prev, double omega);

/// Euclidean norm of h_tilde - h_prev.
double residual_norm(std::span<const double> h_tilde, std::span<const double> h_prev);

enum class FluxEvaluation {
    Pointwise,   ///< v.n at each top-edge midpoint times dx
    Consistent,  ///< top-node reactions of the weak residual
};

struct CouplingConfig {
    double omega = 1.0;
    double tol = 1e-8;  ///< [m]
    int max_iters = 100;
    double dt = 1.0;    ///< [s]
    int n_steps = 1;
    int output_every = 10;
    FluxEvaluation flux = FluxEvaluation::Pointwise;

    double final_time() const noexcept { return dt * n_steps; }
    void validate() const;
};

/// Convergence factor expected from the linear column model, using domain
/// means of c(psi) and K(psi).
struct Prediction {
    double c_bar = 0.0;
    double k_bar = 0.0;
    double abs_S = 0.0;
    double omega_opt = 1.0;
    bool capacity_guarded = false;  ///< c_bar was raised to a tiny positive value
};

Prediction predict_S(const richards::RichardsProblem& problem, std::span<const double> psi, double dt);

/// Piecewise-constant rainfall: rate while t <= cutoff, zero afterwards.
struct Rainfall {
    double rate = 0.0;    ///< [m/s]
    double cutoff = 0.0;  ///< [s]

    double at(double t) const noexcept { return t <= cutoff ? rate : 0.0; }
};

struct StepRecord {
    int n = 0;
    double t = 0.0;
    std::vector<double> residuals;  ///< res^{n,k}, k = 1..K_n
    int iterations = 0;             ///< K_n
    std::optional<double> cr;       ///< CR_n, defined for K_n >= 3
    Prediction prediction;          ///< from the committed state psi^n
    int newton_iterations = 0;      ///< subsurface Newton iterations summed over k
    double clamped_mass = 0.0;      ///< surface depth-floor additions in the committed solve [m^2]
};

struct TimeAverage {
    std::optional<double> cr;
    int defined = 0;
    int undefined = 0;
    int excluded = 0;  ///< defined entries dropped by the threshold
};

/// Mean of the defined CR_n, optionally dropping entries above exclude_above.
TimeAverage time_averaged_cr(std::span<const StepRecord> records, std::optional<double> exclude_above = {});

struct CoupledState {
    richards::SubsurfaceState subsurface;
    surface::SurfaceState surface;
    int step = 0;
};

class CoupledSimulation {
public:
    CoupledSimulation(richards::RichardsProblem problem, surface::SurfaceSolver surface, Rainfall rain,
                      CouplingConfig config, CoupledState initial, richards::NewtonSettings newton = {});

    const CoupledState& state() const noexcept { return state_; }
    const richards::RichardsProblem& problem() const noexcept { return problem_; }
    const surface::SurfaceSolver& surface_solver() const noexcept { return surface_; }
    const CouplingConfig& config() const noexcept { return config_; }
    bool finished() const noexcept { return state_.step >= config_.n_steps; }

    /// Advances one time step. Throws DivergenceError when the coupling budget
    /// runs out and SolverError (with step context) for sub-solver failures.
    /// The state is only updated on success.
    StepRecord step();

private:
    std::vector<double> interface_fluxes(std::span<const double> candidate) const;

    richards::RichardsProblem problem_;
    surface::SurfaceSolver surface_;
    Rainfall rain_;
    CouplingConfig config_;
    richards::NewtonSettings newton_;
    CoupledState state_;
};

}  // namespace surfsub::coupling
