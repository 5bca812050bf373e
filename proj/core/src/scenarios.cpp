#include "surfsub/scenarios.hpp"

#include <cmath>

#include "surfsub/error.hpp"

namespace surfsub::scenarios {

namespace {

using config::Quantity;

constexpr double kHour = 3600.0;
constexpr double kMinute = 60.0;

ScenarioConfig trench(std::string name, material::MaterialField field) {
    ScenarioConfig c;
    c.name = std::move(name);
    c.grid = {2.0, 3.0, 5, 8};
    c.material = std::move(field);
    c.initial_head = {1.0, 0.0};
    c.h0 = 1e-6;
    c.dirichlet_height = 1.0;
    c.surface_model.kind = surface::FlowModel::ShallowWater;
    c.surface_boundaries = {surface::BoundaryKind::ZeroGradient, surface::BoundaryKind::ZeroGradient};
    c.rain = {0.1 / kHour, 2.0 * kHour};
    c.coupling.dt = 36.0;
    c.coupling.n_steps = 300;
    return c;
}

ScenarioConfig hillslope(std::string name, const material::VanGenuchtenParams& soil, double dt,
                         double rain_m_per_min) {
    ScenarioConfig c;
    c.name = std::move(name);
    c.grid = {400.0, 5.0, 5, 25};
    c.material = material::MaterialField::homogeneous(soil);
    c.initial_head = {4.0, 0.2 / 400.0};
    c.h0 = 0.0;
    c.surface_model.kind = surface::FlowModel::KinematicWave;
    c.surface_model.kinematic = {5e-4, config::to_si(3.31e-3, Quantity::Manning, config::TimeUnit::Minute), -1.0};
    c.surface_boundaries = {surface::BoundaryKind::ZeroGradient, surface::BoundaryKind::Wall};
    c.rain = {config::to_si(rain_m_per_min, Quantity::Velocity, config::TimeUnit::Minute), 200.0 * kMinute};
    c.coupling.dt = dt;
    c.coupling.n_steps = static_cast<int>(std::lround(300.0 * kMinute / dt));
    return c;
}

surface::BoundaryKind parse_boundary(const std::string& s) {
    if (s == "zero-gradient") return surface::BoundaryKind::ZeroGradient;
    if (s == "wall") return surface::BoundaryKind::Wall;
    throw ConfigError("unknown surface boundary '" + s + "' (expected zero-gradient or wall)");
}

material::VanGenuchtenParams read_soil(const config::Document& doc, const std::string& section,
                                       material::VanGenuchtenParams p, config::TimeUnit unit) {
    p.alpha_vg = doc.number(section, "alpha_vg", p.alpha_vg);
    p.n_g = doc.number(section, "n_g", p.n_g);
    p.theta_r = doc.number(section, "theta_r", p.theta_r);
    p.theta_s = doc.number(section, "theta_s", p.theta_s);
    if (const auto v = doc.get(section, "k_s")) {
        p.k_s = config::to_si(config::parse_number(*v, section + ".k_s"), Quantity::Velocity, unit);
    }
    return p;
}

void read_material(const config::Document& doc, ScenarioConfig& c, config::TimeUnit unit) {
    const material::ConductivityForm form = c.material.conductivity_form();
    const auto kind = doc.get("material", "kind");
    const auto soil = doc.get("material", "soil");
    const std::string k = kind.value_or(std::holds_alternative<material::Blended>(c.material.kind()) ? "blended"
                                        : c.material.is_linear()                                    ? "linear"
                                                                                                     : "homogeneous");
    if (soil && k != "homogeneous") throw ConfigError("material.soil applies to homogeneous materials only");
    if (k == "homogeneous") {
        material::VanGenuchtenParams base;
        if (soil) {
            base = material::preset(*soil);
        } else if (const auto* h = std::get_if<material::Homogeneous>(&c.material.kind())) {
            base = h->params;
        } else {
            throw ConfigError("material.kind = homogeneous needs material.soil");
        }
        c.material = material::MaterialField::homogeneous(read_soil(doc, "material", base, unit));
    } else if (k == "blended") {
        material::Blended b{material::preset("silt-loam"), material::preset("beit-netofa-clay"), c.grid.lx / 2, 4.0};
        if (const auto* cur = std::get_if<material::Blended>(&c.material.kind())) b = *cur;
        if (const auto v = doc.get("material", "left")) b.left = material::preset(*v);
        if (const auto v = doc.get("material", "right")) b.right = material::preset(*v);
        b.center_x = doc.number("material", "center_x", b.center_x);
        b.steepness = doc.number("material", "steepness", b.steepness);
        c.material = material::MaterialField::blended(b.left, b.right, b.center_x, b.steepness);
    } else if (k == "linear") {
        const double cap = doc.number("material", "capacity", 0.0);
        const auto kv = doc.get("material", "conductivity");
        if (!kv) throw ConfigError("material.kind = linear needs material.conductivity");
        const double cond = config::to_si(config::parse_number(*kv, "material.conductivity"), Quantity::Velocity, unit);
        c.material = material::MaterialField::linear(cap, cond, doc.number("material", "theta_ref", 0.0));
    } else {
        throw ConfigError("unknown material.kind '" + k + "'");
    }
    material::ConductivityForm next = form;
    if (const auto v = doc.get("material", "conductivity_form")) {
        if (*v == "water-content") {
            next = material::ConductivityForm::WaterContent;
        } else if (*v == "effective-saturation") {
            next = material::ConductivityForm::EffectiveSaturation;
        } else {
            throw ConfigError("material.conductivity_form must be water-content or effective-saturation, got '" + *v +
                              "'");
        }
    }
    c.material = c.material.with_conductivity_form(next);
}

}  // namespace

void ScenarioConfig::validate() const {
    grid.validate();
    surface_model.validate();
    surface_settings.validate();
    coupling.validate();
    newton.validate();
    if (!(h0 >= 0.0)) throw ConfigError("initial water depth must be non-negative");
    if (!(rain.rate >= 0.0) || !(rain.cutoff >= 0.0)) throw ConfigError("rainfall rate and cutoff must be >= 0");
    if (rain.cutoff > coupling.final_time() * (1.0 + 1e-12)) {
        throw ConfigError("rainfall cutoff must not exceed the final time");
    }
    if (dirichlet_height && !(*dirichlet_height >= 0.0)) throw ConfigError("groundwater height must be >= 0");
    if (const auto* h = std::get_if<material::Homogeneous>(&material.kind())) h->params.validate();
    if (const auto* b = std::get_if<material::Blended>(&material.kind())) {
        b->left.validate();
        b->right.validate();
        if (!(b->steepness > 0.0)) throw ConfigError("blend steepness must be positive");
    }
}

std::vector<std::string> preset_names() {
    return {"trench-loam", "trench-clay", "trench-mixed", "hillslope-sandy", "hillslope-silt", "hillslope-silt-lowrain"};
}

ScenarioConfig preset(std::string_view name) {
    using material::MaterialField;
    const auto loam = material::preset("silt-loam");
    const auto clay = material::preset("beit-netofa-clay");
    if (name == "trench-loam") return trench("trench-loam", MaterialField::homogeneous(loam));
    if (name == "trench-clay") return trench("trench-clay", MaterialField::homogeneous(clay));
    if (name == "trench-mixed") return trench("trench-mixed", MaterialField::blended(loam, clay, 1.0, 4.0));
    if (name == "hillslope-sandy") return hillslope("hillslope-sandy", material::preset("sandy-loam"), 60.0, 3.30e-4);
    if (name == "hillslope-silt") return hillslope("hillslope-silt", loam, 1.0, 3.30e-4);
    if (name == "hillslope-silt-lowrain") return hillslope("hillslope-silt-lowrain", loam, 1.0, 3.30e-5);
    throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
}

ScenarioConfig from_document(const config::Document& doc) {
    const auto unit = config::parse_time_unit(doc.text("units", "time", "s"));
    ScenarioConfig c = preset(doc.text("scenario", "preset", "trench-loam"));
    c.name = doc.text("scenario", "name", c.name);
    const auto time = [&](const std::string& s, const std::string& k, double fallback_si) {
        const auto v = doc.get(s, k);
        return v ? config::to_si(config::parse_number(*v, s + "." + k), Quantity::Time, unit) : fallback_si;
    };
    const auto rate = [&](const std::string& s, const std::string& k, double fallback_si) {
        const auto v = doc.get(s, k);
        return v ? config::to_si(config::parse_number(*v, s + "." + k), Quantity::Velocity, unit) : fallback_si;
    };

    c.grid.lx = doc.number("geometry", "lx", c.grid.lx);
    c.grid.lz = doc.number("geometry", "lz", c.grid.lz);
    c.grid.mx = doc.integer("geometry", "mx", c.grid.mx);
    c.grid.mz = doc.integer("geometry", "mz", c.grid.mz);
    if (const auto v = doc.get("geometry", "dx")) {
        c.grid.mx = static_cast<int>(std::lround(c.grid.lx / config::parse_number(*v, "geometry.dx")));
    }
    if (const auto v = doc.get("geometry", "dz")) {
        c.grid.mz = static_cast<int>(std::lround(c.grid.lz / config::parse_number(*v, "geometry.dz")));
    }
    read_material(doc, c, unit);

    c.initial_head.offset = doc.number("initial", "psi_offset", c.initial_head.offset);
    c.initial_head.tilt = doc.number("initial", "psi_tilt", c.initial_head.tilt);
    c.h0 = doc.number("initial", "h0", c.h0);
    if (const auto v = doc.get("boundary", "groundwater_height")) {
        if (*v == "none") {
            c.dirichlet_height.reset();
        } else {
            c.dirichlet_height = config::parse_number(*v, "boundary.groundwater_height");
        }
    }
    if (const auto v = doc.get("boundary", "surface_left")) c.surface_boundaries.left = parse_boundary(*v);
    if (const auto v = doc.get("boundary", "surface_right")) c.surface_boundaries.right = parse_boundary(*v);

    if (const auto v = doc.get("surface", "model")) {
        if (*v == "swe") {
            c.surface_model.kind = surface::FlowModel::ShallowWater;
        } else if (*v == "kinematic") {
            c.surface_model.kind = surface::FlowModel::KinematicWave;
        } else {
            throw ConfigError("unknown surface.model '" + *v + "' (expected swe or kinematic)");
        }
    }
    c.surface_model.gravity = doc.number("surface", "gravity", c.surface_model.gravity);
    c.surface_model.kinematic.bed_slope = doc.number("surface", "bed_slope", c.surface_model.kinematic.bed_slope);
    c.surface_model.kinematic.manning = time("surface", "manning", c.surface_model.kinematic.manning);
    c.surface_model.kinematic.direction = doc.number("surface", "direction", c.surface_model.kinematic.direction);
    c.surface_settings.h_floor = doc.number("surface", "h_floor", c.surface_settings.h_floor);
    if (const auto v = doc.get("surface", "depth_policy")) {
        if (*v == "clamp") {
            c.surface_settings.policy = surface::DepthPolicy::Clamp;
        } else if (*v == "strict") {
            c.surface_settings.policy = surface::DepthPolicy::Strict;
        } else {
            throw ConfigError("unknown surface.depth_policy '" + *v + "' (expected clamp or strict)");
        }
    }

    c.rain.rate = rate("rain", "rate", c.rain.rate);
    c.rain.cutoff = time("rain", "cutoff", c.rain.cutoff);

    const double old_t_end = c.coupling.final_time();
    c.coupling.omega = doc.number("coupling", "omega", c.coupling.omega);
    c.coupling.tol = doc.number("coupling", "tol", c.coupling.tol);
    c.coupling.max_iters = doc.integer("coupling", "max_iters", c.coupling.max_iters);
    c.coupling.output_every = doc.integer("coupling", "output_every", c.coupling.output_every);
    c.coupling.dt = time("coupling", "dt", c.coupling.dt);
    const double t_end = time("coupling", "t_end", old_t_end);
    const auto steps = doc.get("coupling", "n_steps");
    if (steps) {
        c.coupling.n_steps = config::parse_integer(*steps, "coupling.n_steps");
    } else {
        const double n = t_end / c.coupling.dt;
        c.coupling.n_steps = static_cast<int>(std::lround(n));
        if (std::abs(n - c.coupling.n_steps) > 1e-9 * std::max(1.0, n)) {
            throw ConfigError("final time must be an integer multiple of the time step");
        }
    }
    if (const auto v = doc.get("coupling", "flux")) {
        if (*v == "pointwise") {
            c.coupling.flux = coupling::FluxEvaluation::Pointwise;
        } else if (*v == "consistent") {
            c.coupling.flux = coupling::FluxEvaluation::Consistent;
        } else {
            throw ConfigError("unknown coupling.flux '" + *v + "' (expected pointwise or consistent)");
        }
    }

    c.newton.abs_tol = doc.number("newton", "abs_tol", c.newton.abs_tol);
    c.newton.rel_tol = doc.number("newton", "rel_tol", c.newton.rel_tol);
    c.newton.max_iters = doc.integer("newton", "max_iters", c.newton.max_iters);
    c.newton.damping = doc.integer("newton", "damping", c.newton.damping);

    c.validate();
    return c;
}

std::vector<richards::FixedHead> fixed_heads(const ScenarioConfig& cfg) {
    std::vector<richards::FixedHead> out;
    if (!cfg.dirichlet_height) return out;
    const auto& g = cfg.grid;
    const double limit = *cfg.dirichlet_height + 1e-12 * g.lz;
    for (int j = 0; j < g.mz; ++j) {
        if (g.z(j) > limit) break;
        for (int i : {0, g.mx}) out.push_back({g.node(i, j), cfg.initial_head(g.x(i), g.z(j))});
    }
    return out;
}

coupling::CoupledState initial_state(const ScenarioConfig& cfg) {
    coupling::CoupledState s;
    s.subsurface.psi = richards::sample(cfg.grid, [&](double x, double z) { return cfg.initial_head(x, z); });
    s.surface = surface::SurfaceState::uniform(cfg.surface_model, cfg.grid.mx, cfg.h0);
    return s;
}

coupling::CoupledSimulation build(const ScenarioConfig& cfg) {
    cfg.validate();
    richards::RichardsProblem problem{cfg.grid, cfg.material, fixed_heads(cfg)};
    surface::SurfaceSolver surf(cfg.surface_model, cfg.grid.dx(), cfg.surface_boundaries, cfg.surface_settings);
    return {std::move(problem), std::move(surf), cfg.rain, cfg.coupling, initial_state(cfg), cfg.newton};
}

}  // namespace surfsub::scenarios
