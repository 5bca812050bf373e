/**
 * @file scenarios.hpp
 * @brief Named coupled-flow setups and their construction from configuration.
 *
 * Two families:
 *  - trench-*: 2 m x 3 m soil column under a flat water film, shallow water
 *    surface flow, fixed groundwater head on both sides below 1 m;
 *  - hillslope-*: 400 m x 5 m tilted plane, kinematic wave draining towards
 *    x = 0, wall at x = L_x.
 *
 * The initial head is psi_0(x, z) = offset - (z - tilt x) in both cases.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surfsub/config.hpp"
#include "surfsub/coupling.hpp"

namespace surfsub::scenarios {

struct InitialHead {
    double offset = 1.0;  ///< [m]
    double tilt = 0.0;    ///< [-]

    double operator()(double x, double z) const noexcept { return offset - (z - tilt * x); }
};

struct ScenarioConfig {
    std::string name;
    richards::Grid2D grid;
    material::MaterialField material;
    InitialHead initial_head;
    double h0 = 0.0;  ///< initial water depth [m]
    /// Nodes on x = 0 and x = L_x with z <= this height keep their initial head.
    std::optional<double> dirichlet_height;
    surface::SurfaceModel surface_model;
    surface::BoundarySpec surface_boundaries;
    surface::FvSettings surface_settings;
    coupling::Rainfall rain;
    coupling::CouplingConfig coupling;
    richards::NewtonSettings newton;

    void validate() const;
};

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
ScenarioConfig preset(std::string_view name);

/// Starts from `[scenario] preset` (trench-loam when absent) and applies every
/// other key, converting time-bearing inputs from `[units] time`.
ScenarioConfig from_document(const config::Document& doc);

/// Dirichlet nodes for the configured groundwater boundary.
std::vector<richards::FixedHead> fixed_heads(const ScenarioConfig& cfg);

coupling::CoupledState initial_state(const ScenarioConfig& cfg);

coupling::CoupledSimulation build(const ScenarioConfig& cfg);

}  // namespace surfsub::scenarios
