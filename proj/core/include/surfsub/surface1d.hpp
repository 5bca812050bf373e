/**
 * @file surface1d.hpp
 * @brief Cell-centred finite volumes for 1D overland flow.
 *
 * Two flow models share one solver: the shallow water equations with
 * conserved state (h, hu), and the kinematic wave with state h and Manning
 * velocity. Interfaces use the local Lax-Friedrichs flux and time stepping is
 * implicit Euler, solved by Newton with a finite-difference Jacobian.
 *
 * Everything is SI: metres and seconds.
 */
#pragma once

#include <array>
#include <span>
#include <vector>

namespace surfsub::surface {

enum class FlowModel { ShallowWater, KinematicWave };

/// Manning data for the kinematic wave. direction = +1 sends water towards
/// increasing x, -1 towards x = 0.
struct KinematicParams {
    double bed_slope = 5e-4;   ///< S_f, dimensionless
    double manning = 0.1986;   ///< n_M [s m^{-1/3}]
    double direction = -1.0;

    double velocity_scale() const noexcept;  ///< direction * sqrt(S_f) / n_M
};

struct SurfaceModel {
    FlowModel kind = FlowModel::ShallowWater;
    double gravity = 9.81;
    KinematicParams kinematic;

    int components() const noexcept { return kind == FlowModel::ShallowWater ? 2 : 1; }
    void validate() const;
};

/// Conserved values of one cell. discharge is unused by the kinematic wave.
struct Conserved {
    double h = 0.0;
    double discharge = 0.0;  ///< hu [m^2/s]
};

using Flux = std::array<double, 2>;

/// Physical flux; throws ConfigError for h < 0.
Flux physical_flux(const Conserved& q, const SurfaceModel& model);

/// Velocity u [m/s]; zero for a dry cell.
double velocity(const Conserved& q, const SurfaceModel& model);

/// Largest absolute characteristic speed of one state.
double wave_speed(const Conserved& q, const SurfaceModel& model);

/// Local Lax-Friedrichs interface flux.
Flux llf_flux(const Conserved& left, const Conserved& right, const SurfaceModel& model);

/// ZeroGradient copies the boundary cell into the ghost. Wall mirrors h and
/// negates hu for the shallow water equations and blocks the kinematic mass
/// flux outright.
enum class BoundaryKind { ZeroGradient, Wall };

struct BoundarySpec {
    BoundaryKind left = BoundaryKind::ZeroGradient;
    BoundaryKind right = BoundaryKind::ZeroGradient;
};

/// Clamp raises depths below the floor and records the added water; Strict
/// reports them as a SolverError.
enum class DepthPolicy { Clamp, Strict };

struct FvSettings {
    double h_floor = 1e-12;
    DepthPolicy policy = DepthPolicy::Clamp;
    int max_iters = 50;
    double rel_tol = 1e-12;  ///< on the inf-norm relative to max(1, |q|_inf)

    void validate() const;
};

struct SurfaceState {
    std::vector<double> h;
    std::vector<double> discharge;  ///< empty for the kinematic wave

    static SurfaceState uniform(const SurfaceModel& model, int cells, double h0);
    std::size_t cells() const noexcept { return h.size(); }
    Conserved cell(std::size_t l) const noexcept { return {h[l], discharge.empty() ? 0.0 : discharge[l]}; }
};

struct FvStepResult {
    SurfaceState state;
    int newton_iterations = 0;
    double clamped_mass = 0.0;  ///< water added by the depth floor [m^2]
};

class SurfaceSolver {
public:
    SurfaceSolver(SurfaceModel model, double dx, BoundarySpec boundaries, FvSettings settings = {});

    const SurfaceModel& model() const noexcept { return model_; }
    double dx() const noexcept { return dx_; }
    const BoundarySpec& boundaries() const noexcept { return boundaries_; }
    const FvSettings& settings() const noexcept { return settings_; }

    /// Interface fluxes F_0..F_M for a state of M cells, ghosts included.
    std::vector<Flux> interface_fluxes(const SurfaceState& state) const;

    /// Outward mass discharge [m^2/s] through the left and right ends.
    std::array<double, 2> outflow(const SurfaceState& state) const;

    /// Implicit Euler residual q - q_old + dt/dx (F_l - F_{l-1}) - dt b, with
    /// b = source + rain entering the height equation only.
    std::vector<double> residual(const SurfaceState& trial, const SurfaceState& old, std::span<const double> source,
                                 double rain, double dt) const;

    /// One implicit Euler step. source is per cell [m/s], rain [m/s].
    FvStepResult step(const SurfaceState& old, std::span<const double> source, double rain, double dt) const;

private:
    Flux boundary_flux(const Conserved& inner, BoundaryKind kind, bool left_side) const;

    SurfaceModel model_;
    double dx_;
    BoundarySpec boundaries_;
    FvSettings settings_;
};

}  // namespace surfsub::surface
