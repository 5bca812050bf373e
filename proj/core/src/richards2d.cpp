#include "surfsub/richards2d.hpp"

#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <string>

#include "surfsub/error.hpp"

namespace surfsub::richards {

namespace {

constexpr int kQuad = 4;
constexpr int kNodes = 4;

// Bilinear shape data on a dx x dz rectangle at the 2x2 Gauss points.
// Local node order: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
struct ElementBasis {
    std::array<std::array<double, kNodes>, kQuad> N{};
    std::array<std::array<double, kNodes>, kQuad> dNx{};
    std::array<std::array<double, kNodes>, kQuad> dNz{};
    std::array<double, kQuad> xi{};  // reference x-coordinate of each point
    double weight = 0.0;             // quadrature weight times element area

    ElementBasis(double dx, double dz) {
        const double g = 0.5 / std::sqrt(3.0);
        const std::array<double, 2> pts{0.5 - g, 0.5 + g};
        int q = 0;
        for (double eta : pts) {
            for (double x : pts) {
                xi[q] = x;
                N[q] = {(1 - x) * (1 - eta), x * (1 - eta), x * eta, (1 - x) * eta};
                dNx[q] = {-(1 - eta) / dx, (1 - eta) / dx, eta / dx, -eta / dx};
                dNz[q] = {-(1 - x) / dz, -x / dz, x / dz, (1 - x) / dz};
                ++q;
            }
        }
        weight = 0.25 * dx * dz;
    }
};

std::array<int, kNodes> element_nodes(const Grid2D& g, int ex, int ez) {
    return {g.node(ex, ez), g.node(ex + 1, ez), g.node(ex + 1, ez + 1), g.node(ex, ez + 1)};
}

void check_sizes(const Grid2D& g, std::span<const double> psi, const char* what) {
    if (psi.size() != static_cast<std::size_t>(g.node_count())) {
        throw ConfigError(std::string(what) + " has " + std::to_string(psi.size()) + " values, grid has " +
                          std::to_string(g.node_count()) + " nodes");
    }
}

std::vector<char> dirichlet_mask(const RichardsProblem& problem) {
    const Grid2D& g = problem.grid;
    std::vector<char> mask(static_cast<std::size_t>(g.node_count()), 0);
    for (int i = 0; i < g.nodes_x(); ++i) mask[static_cast<std::size_t>(g.top_node(i))] = 1;
    for (const FixedHead& f : problem.fixed_heads) mask[static_cast<std::size_t>(f.node)] = 1;
    return mask;
}

void impose_dirichlet(const RichardsProblem& problem, std::span<double> psi, std::span<const double> top) {
    const Grid2D& g = problem.grid;
    for (const FixedHead& f : problem.fixed_heads) psi[static_cast<std::size_t>(f.node)] = f.value;
    for (int i = 0; i < g.nodes_x(); ++i) psi[static_cast<std::size_t>(g.top_node(i))] = top[static_cast<std::size_t>(i)];
}

void throw_non_finite(int ex, int ez) {
    throw SolverError("non-finite material evaluation in element (" + std::to_string(ex) + ", " +
                      std::to_string(ez) + ")");
}

}  // namespace

void Grid2D::validate() const {
    if (mx < 1 || mz < 1) throw ConfigError("grid needs at least one element in each direction");
    if (!(lx > 0.0) || !(lz > 0.0)) throw ConfigError("grid lengths must be positive");
}

void NewtonSettings::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("Newton tolerances must be positive");
    if (max_iters < 1) throw ConfigError("Newton max_iters must be >= 1");
    if (damping < 0) throw ConfigError("Newton damping limit must be >= 0");
}

std::vector<double> sample(const Grid2D& grid, const std::function<double(double, double)>& f) {
    std::vector<double> out(static_cast<std::size_t>(grid.node_count()));
    for (int j = 0; j < grid.nodes_z(); ++j)
        for (int i = 0; i < grid.nodes_x(); ++i)
            out[static_cast<std::size_t>(grid.node(i, j))] = f(grid.x(i), grid.z(j));
    return out;
}

Eigen::VectorXd assemble_weak_residual(const RichardsProblem& problem, std::span<const double> psi_new,
                                       std::span<const double> psi_old, double dt) {
    const Grid2D& g = problem.grid;
    check_sizes(g, psi_new, "new state");
    check_sizes(g, psi_old, "old state");
    const ElementBasis basis(g.dx(), g.dz());

    Eigen::VectorXd r = Eigen::VectorXd::Zero(g.node_count());
    for (int ez = 0; ez < g.mz; ++ez) {
        for (int ex = 0; ex < g.mx; ++ex) {
            const auto nodes = element_nodes(g, ex, ez);
            for (int q = 0; q < kQuad; ++q) {
                double p = 0.0, p_old = 0.0, gx = 0.0, gz = 0.0;
                for (int a = 0; a < kNodes; ++a) {
                    const double v = psi_new[static_cast<std::size_t>(nodes[a])];
                    p += basis.N[q][a] * v;
                    p_old += basis.N[q][a] * psi_old[static_cast<std::size_t>(nodes[a])];
                    gx += basis.dNx[q][a] * v;
                    gz += basis.dNz[q][a] * v;
                }
                const double xq = (ex + basis.xi[q]) * g.dx();
                const double th = problem.material.theta(p, xq);
                const double th_old = problem.material.theta(p_old, xq);
                const double k = problem.material.conductivity(p, xq);
                if (!std::isfinite(th) || !std::isfinite(th_old) || !std::isfinite(k)) throw_non_finite(ex, ez);
                for (int a = 0; a < kNodes; ++a) {
                    r[nodes[a]] += basis.weight * ((th - th_old) * basis.N[q][a] +
                                                   dt * k * (gx * basis.dNx[q][a] + (gz + 1.0) * basis.dNz[q][a]));
                }
            }
        }
    }
    return r;
}

Eigen::VectorXd assemble_residual(const RichardsProblem& problem, std::span<const double> psi_new,
                                  std::span<const double> psi_old, double dt, std::span<const double> top_values) {
    const Grid2D& g = problem.grid;
    if (top_values.size() != static_cast<std::size_t>(g.nodes_x())) {
        throw ConfigError("top boundary data needs one value per top node");
    }
    Eigen::VectorXd r = assemble_weak_residual(problem, psi_new, psi_old, dt);
    for (const FixedHead& f : problem.fixed_heads) r[f.node] = psi_new[static_cast<std::size_t>(f.node)] - f.value;
    for (int i = 0; i < g.nodes_x(); ++i) {
        const int n = g.top_node(i);
        r[n] = psi_new[static_cast<std::size_t>(n)] - top_values[static_cast<std::size_t>(i)];
    }
    return r;
}

Eigen::SparseMatrix<double> assemble_jacobian(const RichardsProblem& problem, std::span<const double> psi_new,
                                              double dt) {
    const Grid2D& g = problem.grid;
    check_sizes(g, psi_new, "state");
    const ElementBasis basis(g.dx(), g.dz());
    const std::vector<char> fixed = dirichlet_mask(problem);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(g.mx * g.mz) * kNodes * kNodes * kQuad);
    for (int ez = 0; ez < g.mz; ++ez) {
        for (int ex = 0; ex < g.mx; ++ex) {
            const auto nodes = element_nodes(g, ex, ez);
            for (int q = 0; q < kQuad; ++q) {
                double p = 0.0, gx = 0.0, gz = 0.0;
                for (int a = 0; a < kNodes; ++a) {
                    const double v = psi_new[static_cast<std::size_t>(nodes[a])];
                    p += basis.N[q][a] * v;
                    gx += basis.dNx[q][a] * v;
                    gz += basis.dNz[q][a] * v;
                }
                const double xq = (ex + basis.xi[q]) * g.dx();
                const material::Coefficients co = problem.material.evaluate(p, xq);
                if (!std::isfinite(co.capacity) || !std::isfinite(co.conductivity) ||
                    !std::isfinite(co.conductivity_derivative)) {
                    throw_non_finite(ex, ez);
                }
                for (int a = 0; a < kNodes; ++a) {
                    if (fixed[static_cast<std::size_t>(nodes[a])]) continue;
                    const double flux_dot = gx * basis.dNx[q][a] + (gz + 1.0) * basis.dNz[q][a];
                    for (int b = 0; b < kNodes; ++b) {
                        const double grad_dot = basis.dNx[q][b] * basis.dNx[q][a] + basis.dNz[q][b] * basis.dNz[q][a];
                        const double v = basis.weight *
                                         (co.capacity * basis.N[q][b] * basis.N[q][a] +
                                          dt * (co.conductivity_derivative * basis.N[q][b] * flux_dot +
                                                co.conductivity * grad_dot));
                        triplets.emplace_back(nodes[a], nodes[b], v);
                    }
                }
            }
        }
    }
    for (int n = 0; n < g.node_count(); ++n) {
        if (fixed[static_cast<std::size_t>(n)]) triplets.emplace_back(n, n, 1.0);
    }
    Eigen::SparseMatrix<double> jac(g.node_count(), g.node_count());
    jac.setFromTriplets(triplets.begin(), triplets.end());
    return jac;
}

StepSolution newton_step_solve(const RichardsProblem& problem, const SubsurfaceState& old, double dt,
                               std::span<const double> top_values, const NewtonSettings& settings) {
    const Grid2D& g = problem.grid;
    g.validate();
    settings.validate();
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    check_sizes(g, old.psi, "old state");
    if (top_values.size() != static_cast<std::size_t>(g.nodes_x())) {
        throw ConfigError("top boundary data needs one value per top node");
    }
    for (double v : top_values)
        if (!std::isfinite(v)) throw ConfigError("top boundary data must be finite");
    for (const FixedHead& f : problem.fixed_heads) {
        if (f.node < 0 || f.node >= g.node_count() || !std::isfinite(f.value)) {
            throw ConfigError("fixed head must reference a grid node and hold a finite value");
        }
    }

    std::vector<double> psi = old.psi;
    impose_dirichlet(problem, psi, top_values);

    Eigen::VectorXd r = assemble_residual(problem, psi, old.psi, dt, top_values);
    double norm = r.lpNorm<Eigen::Infinity>();
    NewtonReport report;
    report.initial_residual = norm;
    const double target = std::max(settings.abs_tol, settings.rel_tol * norm);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool pattern_ready = false;
    std::vector<double> trial(psi.size());

    while (!(norm <= settings.abs_tol || (report.iterations > 0 && norm <= target))) {
        if (report.iterations >= settings.max_iters) {
            report.final_residual = norm;
            throw SolverError("Newton did not converge in " + std::to_string(settings.max_iters) +
                              " iterations (residual " + std::to_string(norm) + ")");
        }
        ++report.iterations;

        const Eigen::SparseMatrix<double> jac = assemble_jacobian(problem, psi, dt);
        if (!pattern_ready) {
            lu.analyzePattern(jac);
            pattern_ready = true;
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) throw SolverError("Newton: singular Jacobian");
        const Eigen::VectorXd delta = lu.solve(-r);

        // Halve the step until the residual norm decreases; keep the best trial.
        double lambda = 1.0;
        double best_norm = std::numeric_limits<double>::infinity();
        std::vector<double> best = psi;
        Eigen::VectorXd best_r = r;
        for (int h = 0; h <= settings.damping; ++h, lambda *= 0.5) {
            for (std::size_t i = 0; i < psi.size(); ++i) trial[i] = psi[i] + lambda * delta[static_cast<Eigen::Index>(i)];
            Eigen::VectorXd tr = assemble_residual(problem, trial, old.psi, dt, top_values);
            const double tn = tr.lpNorm<Eigen::Infinity>();
            if (std::isfinite(tn) && tn < best_norm) {
                best_norm = tn;
                best = trial;
                best_r = std::move(tr);
            }
            if (tn < norm) break;
        }
        if (!std::isfinite(best_norm)) throw SolverError("Newton: residual became non-finite");
        psi = std::move(best);
        r = std::move(best_r);
        norm = best_norm;
    }

    report.final_residual = norm;
    report.converged = true;
    return {{std::move(psi), old.time + dt}, report};
}

std::vector<double> interface_flux(const RichardsProblem& problem, const SubsurfaceState& state) {
    const Grid2D& g = problem.grid;
    check_sizes(g, state.psi, "state");
    std::vector<double> flux(static_cast<std::size_t>(g.mx));
    const auto at = [&](int i, int j) { return state.psi[static_cast<std::size_t>(g.node(i, j))]; };
    for (int l = 0; l < g.mx; ++l) {
        const double top_mid = 0.5 * (at(l, g.mz) + at(l + 1, g.mz));
        const double dpsi_dz =
            0.5 * ((at(l, g.mz) - at(l, g.mz - 1)) + (at(l + 1, g.mz) - at(l + 1, g.mz - 1))) / g.dz();
        const double k = problem.material.conductivity(top_mid, (l + 0.5) * g.dx());
        flux[static_cast<std::size_t>(l)] = -k * (dpsi_dz + 1.0) * g.dx();
    }
    return flux;
}

std::vector<double> consistent_interface_flux(const RichardsProblem& problem, std::span<const double> psi_new,
                                              std::span<const double> psi_old, double dt) {
    const Grid2D& g = problem.grid;
    const Eigen::VectorXd r = assemble_weak_residual(problem, psi_new, psi_old, dt);
    std::vector<double> flux(static_cast<std::size_t>(g.mx), 0.0);
    for (int i = 0; i < g.nodes_x(); ++i) {
        const double reaction = -r[g.top_node(i)] / dt;
        if (i == 0) {
            flux.front() += reaction;
        } else if (i == g.mx) {
            flux.back() += reaction;
        } else {
            flux[static_cast<std::size_t>(i - 1)] += 0.5 * reaction;
            flux[static_cast<std::size_t>(i)] += 0.5 * reaction;
        }
    }
    return flux;
}

}  // namespace surfsub::richards
