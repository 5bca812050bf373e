#include "surfsub/surface1d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "surfsub/error.hpp"

namespace surfsub::surface {

namespace {

// Below this depth a shallow-water cell carries no velocity.
constexpr double kDryDepth = 1e-12;

// Flux for any real h; negative depths count as dry. Newton trial states may
// dip below zero before the final depth check.
Flux extended_flux(const Conserved& q, const SurfaceModel& model) {
    const double h = std::max(q.h, 0.0);
    if (model.kind == FlowModel::KinematicWave) {
        return {model.kinematic.velocity_scale() * std::pow(h, 5.0 / 3.0), 0.0};
    }
    const double u = h > kDryDepth ? q.discharge / h : 0.0;
    return {q.discharge, q.discharge * u + 0.5 * model.gravity * h * h};
}

double extended_speed(const Conserved& q, const SurfaceModel& model) {
    const double h = std::max(q.h, 0.0);
    if (model.kind == FlowModel::KinematicWave) {
        return 5.0 / 3.0 * std::abs(model.kinematic.velocity_scale()) * std::pow(h, 2.0 / 3.0);
    }
    const double u = h > kDryDepth ? q.discharge / h : 0.0;
    return std::abs(u) + std::sqrt(model.gravity * h);
}

Flux extended_llf(const Conserved& l, const Conserved& r, const SurfaceModel& model) {
    const Flux fl = extended_flux(l, model);
    const Flux fr = extended_flux(r, model);
    const double lambda = std::max(extended_speed(l, model), extended_speed(r, model));
    return {0.5 * (fl[0] + fr[0]) - 0.5 * lambda * (r.h - l.h),
            0.5 * (fl[1] + fr[1]) - 0.5 * lambda * (r.discharge - l.discharge)};
}

void require_depth(const Conserved& q) {
    if (!(q.h >= 0.0)) throw ConfigError("water depth must be non-negative, got " + std::to_string(q.h));
}

}  // namespace

double KinematicParams::velocity_scale() const noexcept { return direction * std::sqrt(bed_slope) / manning; }

void SurfaceModel::validate() const {
    if (kind == FlowModel::ShallowWater) {
        if (!(gravity > 0.0)) throw ConfigError("gravity must be positive");
        return;
    }
    if (!(kinematic.bed_slope > 0.0) || !(kinematic.manning > 0.0)) {
        throw ConfigError("kinematic wave needs a positive bed slope and Manning coefficient");
    }
    if (kinematic.direction != 1.0 && kinematic.direction != -1.0) {
        throw ConfigError("kinematic flow direction must be +1 or -1");
    }
}

void FvSettings::validate() const {
    if (!(h_floor >= 0.0)) throw ConfigError("depth floor must be non-negative");
    if (max_iters < 1) throw ConfigError("surface Newton max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw ConfigError("surface Newton tolerance must be positive");
}

SurfaceState SurfaceState::uniform(const SurfaceModel& model, int cells, double h0) {
    if (cells < 1) throw ConfigError("surface grid needs at least one cell");
    SurfaceState s;
    s.h.assign(static_cast<std::size_t>(cells), h0);
    if (model.kind == FlowModel::ShallowWater) s.discharge.assign(static_cast<std::size_t>(cells), 0.0);
    return s;
}

Flux physical_flux(const Conserved& q, const SurfaceModel& model) {
    require_depth(q);
    return extended_flux(q, model);
}

double velocity(const Conserved& q, const SurfaceModel& model) {
    require_depth(q);
    if (model.kind == FlowModel::KinematicWave) return model.kinematic.velocity_scale() * std::pow(q.h, 2.0 / 3.0);
    return q.h > kDryDepth ? q.discharge / q.h : 0.0;
}

double wave_speed(const Conserved& q, const SurfaceModel& model) {
    require_depth(q);
    return extended_speed(q, model);
}

Flux llf_flux(const Conserved& left, const Conserved& right, const SurfaceModel& model) {
    require_depth(left);
    require_depth(right);
    return extended_llf(left, right, model);
}

SurfaceSolver::SurfaceSolver(SurfaceModel model, double dx, BoundarySpec boundaries, FvSettings settings)
    : model_(model), dx_(dx), boundaries_(boundaries), settings_(settings) {
    model_.validate();
    settings_.validate();
    if (!(dx_ > 0.0)) throw ConfigError("surface cell width must be positive");
}

Flux SurfaceSolver::boundary_flux(const Conserved& inner, BoundaryKind kind, bool left_side) const {
    Conserved outer = inner;
    if (kind == BoundaryKind::Wall) {
        if (model_.kind == FlowModel::KinematicWave) return {0.0, 0.0};
        outer.discharge = -inner.discharge;
    }
    return left_side ? extended_llf(outer, inner, model_) : extended_llf(inner, outer, model_);
}

std::vector<Flux> SurfaceSolver::interface_fluxes(const SurfaceState& state) const {
    const std::size_t m = state.cells();
    std::vector<Flux> f(m + 1);
    f[0] = boundary_flux(state.cell(0), boundaries_.left, true);
    for (std::size_t l = 1; l < m; ++l) f[l] = extended_llf(state.cell(l - 1), state.cell(l), model_);
    f[m] = boundary_flux(state.cell(m - 1), boundaries_.right, false);
    return f;
}

std::array<double, 2> SurfaceSolver::outflow(const SurfaceState& state) const {
    const std::size_t m = state.cells();
    if (m == 0) throw ConfigError("surface state is empty");
    return {-boundary_flux(state.cell(0), boundaries_.left, true)[0],
            boundary_flux(state.cell(m - 1), boundaries_.right, false)[0]};
}

std::vector<double> SurfaceSolver::residual(const SurfaceState& trial, const SurfaceState& old,
                                            std::span<const double> source, double rain, double dt) const {
    const std::size_t m = trial.cells();
    const std::size_t comps = static_cast<std::size_t>(model_.components());
    const std::vector<Flux> f = interface_fluxes(trial);
    const double ratio = dt / dx_;
    std::vector<double> r(comps * m);
    for (std::size_t l = 0; l < m; ++l) {
        r[comps * l] = trial.h[l] - old.h[l] + ratio * (f[l + 1][0] - f[l][0]) - dt * (source[l] + rain);
        if (comps == 2) {
            r[comps * l + 1] = trial.discharge[l] - old.discharge[l] + ratio * (f[l + 1][1] - f[l][1]);
        }
    }
    return r;
}

FvStepResult SurfaceSolver::step(const SurfaceState& old, std::span<const double> source, double rain,
                                 double dt) const {
    const std::size_t m = old.cells();
    const std::size_t comps = static_cast<std::size_t>(model_.components());
    if (m == 0) throw ConfigError("surface state is empty");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (source.size() != m) throw ConfigError("surface source needs one value per cell");
    if ((comps == 2) != (old.discharge.size() == m)) throw ConfigError("surface state does not match the flow model");
    for (double v : source)
        if (!std::isfinite(v)) throw SolverError("non-finite surface source");
    if (!std::isfinite(rain)) throw SolverError("non-finite rainfall");

    const auto pack = [&](const SurfaceState& s) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(comps * m));
        for (std::size_t l = 0; l < m; ++l) {
            x[static_cast<Eigen::Index>(comps * l)] = s.h[l];
            if (comps == 2) x[static_cast<Eigen::Index>(comps * l + 1)] = s.discharge[l];
        }
        return x;
    };
    const auto unpack = [&](const Eigen::VectorXd& x) {
        SurfaceState s;
        s.h.resize(m);
        if (comps == 2) s.discharge.resize(m);
        for (std::size_t l = 0; l < m; ++l) {
            s.h[l] = x[static_cast<Eigen::Index>(comps * l)];
            if (comps == 2) s.discharge[l] = x[static_cast<Eigen::Index>(comps * l + 1)];
        }
        return s;
    };
    const auto eval = [&](const Eigen::VectorXd& x) {
        const std::vector<double> r = residual(unpack(x), old, source, rain, dt);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    };

    const Eigen::Index n = static_cast<Eigen::Index>(comps * m);
    Eigen::VectorXd x = pack(old);
    Eigen::VectorXd g = eval(x);
    double norm = g.lpNorm<Eigen::Infinity>();
    int iters = 0;
    const auto converged = [&] { return norm <= settings_.rel_tol * std::max(1.0, x.lpNorm<Eigen::Infinity>()); };

    Eigen::MatrixXd jac(n, n);
    while (!converged()) {
        if (iters >= settings_.max_iters) {
            throw SolverError("surface Newton did not converge in " + std::to_string(settings_.max_iters) +
                              " iterations (residual " + std::to_string(norm) + ")");
        }
        ++iters;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double eps = 1e-8 * std::max(1.0, std::abs(x[j]));
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += eps;
            xm[j] -= eps;
            jac.col(j) = (eval(xp) - eval(xm)) / (2.0 * eps);
        }
        const Eigen::VectorXd delta = jac.partialPivLu().solve(-g);
        if (!delta.allFinite()) throw SolverError("surface Newton: singular Jacobian");

        double lambda = 1.0;
        Eigen::VectorXd best_x = x + delta;
        Eigen::VectorXd best_g = eval(best_x);
        double best = best_g.lpNorm<Eigen::Infinity>();
        for (int h = 0; h < 10 && !(best < norm); ++h) {
            lambda *= 0.5;
            const Eigen::VectorXd tx = x + lambda * delta;
            Eigen::VectorXd tg = eval(tx);
            const double tn = tg.lpNorm<Eigen::Infinity>();
            if (tn < best) {
                best = tn;
                best_x = tx;
                best_g = std::move(tg);
            }
        }
        if (!std::isfinite(best)) throw SolverError("surface Newton: residual became non-finite");
        x = std::move(best_x);
        g = std::move(best_g);
        norm = best;
    }

    FvStepResult out{unpack(x), iters, 0.0};
    for (std::size_t l = 0; l < m; ++l) {
        double& h = out.state.h[l];
        if (h >= settings_.h_floor) continue;
        if (settings_.policy == DepthPolicy::Strict) {
            throw SolverError("negative water depth " + std::to_string(h) + " in cell " + std::to_string(l));
        }
        out.clamped_mass += (settings_.h_floor - h) * dx_;
        h = settings_.h_floor;
    }
    return out;
}

}  // namespace surfsub::surface
