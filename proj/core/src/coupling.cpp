#include "surfsub/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surfsub/analysis.hpp"
#include "surfsub/error.hpp"
#include "surfsub/linear1d.hpp"

namespace surfsub::coupling {

namespace {

constexpr double kCapacityGuard = 1e-30;

void require_same_size(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("interface fields differ in length");
}

}  // namespace

std::vector<double> map_height_to_head(std::span<const double> h) {
    if (h.empty()) throw ConfigError("surface needs at least one cell");
    const std::size_t m = h.size();
    std::vector<double> nodes(m + 1);
    nodes.front() = h.front();
    nodes.back() = h.back();
    for (std::size_t l = 1; l < m; ++l) nodes[l] = 0.5 * (h[l - 1] + h[l]);
    return nodes;
}

std::vector<double> map_flux_to_source(std::span<const double> flux_integrals, double dx) {
    if (!(dx > 0.0)) throw ConfigError("cell width must be positive");
    std::vector<double> s(flux_integrals.size());
    std::transform(flux_integrals.begin(), flux_integrals.end(), s.begin(), [dx](double f) { return f / dx; });
    return s;
}

std::vector<double> relax(std::span<const double> h_tilde, std::span<const double> h_prev, double omega) {
    require_same_size(h_tilde, h_prev);
    if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("relaxation parameter must lie in (0, 1]");
    std::vector<double> out(h_tilde.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = omega * h_tilde[i] + (1.0 - omega) * h_prev[i];
    return out;
}

double residual_norm(std::span<const double> h_tilde, std::span<const double> h_prev) {
    require_same_size(h_tilde, h_prev);
    double sum = 0.0;
    for (std::size_t i = 0; i < h_tilde.size(); ++i) {
        const double d = h_tilde[i] - h_prev[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void CouplingConfig::validate() const {
    if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("relaxation parameter must lie in (0, 1]");
    if (!(tol > 0.0)) throw ConfigError("coupling tolerance must be positive");
    if (max_iters < 1) throw ConfigError("coupling max_iters must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (n_steps < 1) throw ConfigError("number of time steps must be >= 1");
    if (output_every < 1) throw ConfigError("output cadence must be >= 1");
}

Prediction predict_S(const richards::RichardsProblem& problem, std::span<const double> psi, double dt) {
    const richards::Grid2D& g = problem.grid;
    if (psi.size() != static_cast<std::size_t>(g.node_count())) throw ConfigError("state does not match the grid");
    if (g.mz < 2) throw ConfigError("prediction needs at least two vertical elements");
    double c_sum = 0.0;
    double k_sum = 0.0;
    for (int j = 0; j < g.nodes_z(); ++j) {
        for (int i = 0; i < g.nodes_x(); ++i) {
            const auto co = problem.material.evaluate(psi[static_cast<std::size_t>(g.node(i, j))], g.x(i));
            c_sum += co.capacity;
            k_sum += co.conductivity;
        }
    }
    Prediction p;
    p.c_bar = c_sum / g.node_count();
    p.k_bar = k_sum / g.node_count();
    double c = p.c_bar;
    if (!(c > kCapacityGuard)) {
        c = kCapacityGuard;
        p.capacity_guarded = true;
    }
    const auto params = analysis::LinearModelParams::uniform(c, p.k_bar, g.lz, dt, g.mz);
    const analysis::AnalysisResult r = analysis::discrete_S(params);
    p.abs_S = std::abs(r.S);
    p.omega_opt = r.omega_opt;
    return p;
}

TimeAverage time_averaged_cr(std::span<const StepRecord> records, std::optional<double> exclude_above) {
    TimeAverage avg;
    double sum = 0.0;
    for (const StepRecord& r : records) {
        if (!r.cr) {
            ++avg.undefined;
            continue;
        }
        if (exclude_above && *r.cr > *exclude_above) {
            ++avg.excluded;
            continue;
        }
        ++avg.defined;
        sum += *r.cr;
    }
    if (avg.defined > 0) avg.cr = sum / avg.defined;
    return avg;
}

CoupledSimulation::CoupledSimulation(richards::RichardsProblem problem, surface::SurfaceSolver surface,
                                     Rainfall rain, CouplingConfig config, CoupledState initial,
                                     richards::NewtonSettings newton)
    : problem_(std::move(problem)),
      surface_(std::move(surface)),
      rain_(rain),
      config_(config),
      newton_(newton),
      state_(std::move(initial)) {
    problem_.grid.validate();
    config_.validate();
    newton_.validate();
    const auto& g = problem_.grid;
    if (std::abs(surface_.dx() - g.dx()) > 1e-12 * g.dx()) {
        throw ConfigError("surface and subsurface grids must share dx");
    }
    if (state_.surface.cells() != static_cast<std::size_t>(g.mx)) {
        throw ConfigError("surface state needs one cell per subsurface column");
    }
    if (state_.subsurface.psi.size() != static_cast<std::size_t>(g.node_count())) {
        throw ConfigError("subsurface state does not match the grid");
    }
    for (double v : state_.subsurface.psi)
        if (!std::isfinite(v)) throw ConfigError("initial head must be finite");
}

std::vector<double> CoupledSimulation::interface_fluxes(std::span<const double> candidate) const {
    if (config_.flux == FluxEvaluation::Consistent) {
        return richards::consistent_interface_flux(problem_, candidate, state_.subsurface.psi, config_.dt);
    }
    return richards::interface_flux(problem_, {std::vector<double>(candidate.begin(), candidate.end()), 0.0});
}

StepRecord CoupledSimulation::step() {
    if (finished()) throw ConfigError("simulation already reached its final time");
    StepRecord rec;
    rec.n = state_.step + 1;
    rec.t = rec.n * config_.dt;
    const double rain = rain_.at(rec.t);

    std::vector<double> h_prev = state_.surface.h;
    for (int k = 1; k <= config_.max_iters; ++k) {
        richards::StepSolution sub;
        surface::FvStepResult surf;
        try {
            const std::vector<double> top = map_height_to_head(h_prev);
            sub = richards::newton_step_solve(problem_, state_.subsurface, config_.dt, top, newton_);
            const std::vector<double> source =
                map_flux_to_source(interface_fluxes(sub.state.psi), problem_.grid.dx());
            surf = surface_.step(state_.surface, source, rain, config_.dt);
        } catch (const SolverError& e) {
            throw SolverError("time step " + std::to_string(rec.n) + ", coupling iteration " + std::to_string(k) +
                              ": " + e.what());
        }
        rec.newton_iterations += sub.report.iterations;

        const double res = residual_norm(surf.state.h, h_prev);
        rec.residuals.push_back(res);
        rec.iterations = k;
        if (!std::isfinite(res)) break;
        std::vector<double> h_next = relax(surf.state.h, h_prev, config_.omega);
        if (res < config_.tol) {
            rec.cr = linear1d::observed_cr(rec.residuals);
            rec.clamped_mass = surf.clamped_mass;
            // The committed interface head equals the committed water height.
            const std::vector<double> top = map_height_to_head(h_next);
            for (int i = 0; i < problem_.grid.nodes_x(); ++i) {
                sub.state.psi[static_cast<std::size_t>(problem_.grid.top_node(i))] = top[static_cast<std::size_t>(i)];
            }
            state_.subsurface = std::move(sub.state);
            state_.surface = std::move(surf.state);
            state_.surface.h = std::move(h_next);
            ++state_.step;
            rec.prediction = predict_S(problem_, state_.subsurface.psi, config_.dt);
            return rec;
        }
        h_prev = std::move(h_next);
    }
    throw DivergenceError("coupling did not converge in time step " + std::to_string(rec.n) + " after " +
                              std::to_string(rec.iterations) + " iterations",
                          rec.residuals);
}

}  // namespace surfsub::coupling
