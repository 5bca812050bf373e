/**
 * @file richards2d.hpp
 * @brief Mixed-form Richards equation on a Cartesian (x, z) grid.
 *
 * Bilinear continuous elements with 2x2 Gauss quadrature, implicit Euler in
 * time and a damped Newton method. The discrete residual at a free node i is
 *
 *   R_i = <theta(psi^n) - theta(psi^{n-1}), phi_i> + dt <K(psi^n) (grad psi^n + e_z), grad phi_i>
 *
 * with theta and K evaluated at quadrature points from the interpolated head.
 * The top boundary z = L_z is always Dirichlet (interface data); further fixed
 * heads may be prescribed at arbitrary nodes. All remaining boundaries are
 * no-flux.
 */
#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <span>
#include <vector>

#include "surfsub/material.hpp"

namespace surfsub::richards {

struct Grid2D {
    double lx = 1.0;
    double lz = 1.0;
    int mx = 1;
    int mz = 1;

    double dx() const noexcept { return lx / mx; }
    double dz() const noexcept { return lz / mz; }
    int nodes_x() const noexcept { return mx + 1; }
    int nodes_z() const noexcept { return mz + 1; }
    int node_count() const noexcept { return nodes_x() * nodes_z(); }
    /// Node numbering is row-major in x, rows ordered bottom to top.
    int node(int i, int j) const noexcept { return j * nodes_x() + i; }
    double x(int i) const noexcept { return i * dx(); }
    double z(int j) const noexcept { return j * dz(); }
    int top_node(int i) const noexcept { return node(i, mz); }

    void validate() const;
};

struct SubsurfaceState {
    std::vector<double> psi;  ///< nodal capillary head [m]
    double time = 0.0;        ///< [s]
};

struct NewtonSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_iters = 50;
    int damping = 10;  ///< maximum number of step halvings

    void validate() const;
};

struct FixedHead {
    int node = 0;
    double value = 0.0;
};

struct RichardsProblem {
    Grid2D grid;
    material::MaterialField material;
    std::vector<FixedHead> fixed_heads;  ///< Dirichlet nodes besides the top boundary
};

struct NewtonReport {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    bool converged = false;
};

struct StepSolution {
    SubsurfaceState state;
    NewtonReport report;
};

/// Nodal field psi(x, z) sampled on the grid.
std::vector<double> sample(const Grid2D& grid, const std::function<double(double, double)>& f);

/// Residual with Dirichlet rows replaced by psi_node - prescribed.
/// top_values holds one value per top node (mx + 1).
Eigen::VectorXd assemble_residual(const RichardsProblem& problem, std::span<const double> psi_new,
                                  std::span<const double> psi_old, double dt,
                                  std::span<const double> top_values);

/// Weak-form residual before any Dirichlet treatment.
Eigen::VectorXd assemble_weak_residual(const RichardsProblem& problem, std::span<const double> psi_new,
                                       std::span<const double> psi_old, double dt);

/// Newton Jacobian of assemble_residual; Dirichlet rows are identity rows.
Eigen::SparseMatrix<double> assemble_jacobian(const RichardsProblem& problem, std::span<const double> psi_new,
                                              double dt);

/// One implicit Euler step. Throws ConfigError on invalid input and
/// SolverError when Newton does not converge.
StepSolution newton_step_solve(const RichardsProblem& problem, const SubsurfaceState& old, double dt,
                               std::span<const double> top_values, const NewtonSettings& settings = {});

/// Per top cell integral of v.n (outward normal e_z), evaluated at the cell's
/// top-edge midpoint: -K(psi) (d psi/dz + 1) dx  [m^2/s].
std::vector<double> interface_flux(const RichardsProblem& problem, const SubsurfaceState& state);

/// Variationally consistent alternative: top-node reactions -R_i/dt of the
/// weak residual, lumped onto the adjacent cells. Reproduces the Green's
/// identity flux of the linear column model.
std::vector<double> consistent_interface_flux(const RichardsProblem& problem, std::span<const double> psi_new,
                                              std::span<const double> psi_old, double dt);

}  // namespace surfsub::richards
