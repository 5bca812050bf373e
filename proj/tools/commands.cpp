#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <iostream>
#include <sstream>

#include "surfsub/analysis.hpp"
#include "surfsub/csv.hpp"
#include "surfsub/error.hpp"
#include "surfsub/linear1d.hpp"
#include "surfsub/material.hpp"
#include "surfsub/scenarios.hpp"

namespace surfsub::cli {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw ConfigError("empty value list '" + text + "'");
    return out;
}

std::vector<double> number_list(const config::Document& doc, const std::string& section, const std::string& key,
                                 const std::string& fallback) {
    std::vector<double> out;
    for (const auto& item : split_list(doc.text(section, key, fallback))) {
        out.push_back(config::parse_number(item, section + "." + key));
    }
    return out;
}

std::vector<double> axis(const config::Document& doc, const std::string& name, double lo, double hi, int points) {
    const double a = doc.number("analysis", name + "_min", lo);
    const double b = doc.number("analysis", name + "_max", hi);
    const int n = doc.integer("analysis", name + "_points", points);
    if (n < 1) throw ConfigError("analysis." + name + "_points must be >= 1");
    if (!(a > 0.0) || !(b >= a)) throw ConfigError("analysis." + name + " range must satisfy 0 < min <= max");
    return analysis::log_space(a, b, static_cast<std::size_t>(n));
}

}  // namespace

config::Document load_document(const CommonOptions& opts) {
    config::Document doc = opts.config ? config::Document::parse_file(*opts.config) : config::Document{};
    for (const auto& o : opts.overrides) doc.apply_override(o);
    return doc;
}

int cmd_presets() {
    std::cout << "scenarios:\n";
    for (const auto& name : scenarios::preset_names()) {
        const auto c = scenarios::preset(name);
        std::cout << fmt::format("  {:<24} {} x {} m, {} x {} elements, dt = {} s, {} steps\n", name, c.grid.lx,
                                 c.grid.lz, c.grid.mx, c.grid.mz, c.coupling.dt, c.coupling.n_steps);
    }
    std::cout << "soils:\n";
    for (const auto& name : material::preset_names()) {
        const auto p = material::preset(name);
        std::cout << fmt::format("  {:<24} alpha = {}, n = {}, theta_r = {}, theta_s = {}, K_s = {}\n", name,
                                 p.alpha_vg, p.n_g, p.theta_r, p.theta_s, p.k_s);
    }
    return 0;
}

int cmd_analyze(const CommonOptions& opts) {
    const config::Document doc = load_document(opts);
    const std::string axes = doc.text("analysis", "axes", "c-K");
    analysis::SweepSpec spec;
    spec.L = doc.number("analysis", "L", 1.0);
    if (axes == "c-K") {
        spec.c_values = axis(doc, "c", 1e-3, 1e3, 25);
        spec.K_values = axis(doc, "K", 1e-3, 1e3, 25);
        spec.dt_values = {doc.number("analysis", "dt", 0.1)};
        spec.dz_values = {doc.number("analysis", "dz", 1.0 / 20.0)};
    } else if (axes == "dt-dz") {
        spec.c_values = {doc.number("analysis", "c", 1.0)};
        spec.K_values = {doc.number("analysis", "K", 1.0)};
        spec.dt_values = axis(doc, "dt", 1e-3, 1.0, 25);
        spec.dz_values = axis(doc, "dz", 1e-3, 0.5, 25);
    } else {
        throw ConfigError("analysis.axes must be c-K or dt-dz");
    }
    doc.require_all_consumed();

    const auto rows = analysis::sweep(spec, opts.workers);
    csv::Writer out(opts.out / "sweep.csv", {"c", "K", "dt", "dz", "a", "b", "alpha", "S", "abs_S", "omega_opt"});
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int non_negative = 0;
    for (const auto& r : rows) {
        const auto& s = r.result;
        out.row({r.c, r.K, r.dt, r.dz, s.a, s.b, s.alpha_sum, s.S, std::abs(s.S), s.omega_opt});
        lo = std::min(lo, std::abs(s.S));
        hi = std::max(hi, std::abs(s.S));
        if (s.S >= 0.0) ++non_negative;
    }
    std::cout << fmt::format("{} points, |S| in [{:.3e}, {:.3e}], {} with S >= 0 -> {}\n", rows.size(), lo, hi,
                             non_negative, out.path().string());
    return 0;
}

int cmd_linrun(const CommonOptions& opts) {
    const config::Document doc = load_document(opts);
    const double c = doc.number("linear", "c", 1.0);
    const double K = doc.number("linear", "K", 1.0);
    const double L = doc.number("linear", "L", 1.0);
    const auto dz_values = number_list(doc, "linear", "dz", "0.05");
    const auto dt_values = number_list(doc, "linear", "dt", "0.1");
    const auto omega_items = split_list(doc.text("linear", "omega", "1"));
    const double tol = doc.number("linear", "tol", 1e-8);
    const int max_iters = doc.integer("linear", "max_iters", 200);
    const int steps = doc.integer("linear", "steps", 1);
    if (steps < 1) throw ConfigError("linear.steps must be >= 1");
    doc.require_all_consumed();

    csv::Writer trace(opts.out / "trace.csv", {"dt", "dz", "omega", "n", "k", "psi_gamma", "residual"});
    csv::Writer summary(opts.out / "summary.csv",
                        {"dt", "dz", "omega", "n", "K_n", "CR_n", "S", "sigma_omega", "cr_minus_abs_sigma"});
    int diverged = 0;
    for (double dz : dz_values) {
        const int M = static_cast<int>(std::lround(L / dz));
        for (double dt : dt_values) {
            const auto base = analysis::LinearModelParams::uniform(c, K, L, dt, M);
            const auto result = analysis::discrete_S(base);
            for (const auto& item : omega_items) {
                const double omega = item == "opt" ? result.omega_opt : config::parse_number(item, "linear.omega");
                const double sig = analysis::sigma(omega, result.S);
                linear1d::Linear1DSystem sys(base);
                for (int n = 1; n <= steps; ++n) {
                    const auto tr = sys.run_time_step(omega, tol, max_iters);
                    for (std::size_t k = 0; k < tr.residuals.size(); ++k) {
                        trace.row({dt, base.dz, omega, static_cast<long long>(n), static_cast<long long>(k + 1),
                                   tr.iterates[k], tr.residuals[k]});
                    }
                    const std::optional<double> diff =
                        tr.cr ? std::optional<double>(*tr.cr - std::abs(sig)) : std::nullopt;
                    summary.row({dt, base.dz, omega, static_cast<long long>(n),
                                 static_cast<long long>(tr.iterations), tr.cr, result.S, sig, diff});
                    if (!tr.converged) {
                        ++diverged;
                        break;
                    }
                }
            }
        }
    }
    std::cout << fmt::format("{} runs written to {}", dz_values.size() * dt_values.size() * omega_items.size(),
                             opts.out.string());
    if (diverged > 0) {
        std::cout << fmt::format(", {} diverged\n", diverged);
        return 3;
    }
    std::cout << '\n';
    return 0;
}

int cmd_simulate(const CommonOptions& opts, const std::optional<std::string>& preset,
                 std::optional<double> cr_exclude_threshold) {
    config::Document doc = load_document(opts);
    if (preset) doc.apply_override("scenario.preset=" + *preset);
    const scenarios::ScenarioConfig cfg = scenarios::from_document(doc);
    doc.require_all_consumed();

    auto sim = scenarios::build(cfg);
    const auto& grid = cfg.grid;
    const auto& material = cfg.material;
    const auto& model = cfg.surface_model;

    const auto snapshot = [&](int step) {
        csv::Writer f(opts.out / "fields" / fmt::format("field_{:06d}.csv", step), {"x", "z", "psi", "theta", "K"});
        const auto& psi = sim.state().subsurface.psi;
        for (int j = 0; j < grid.nodes_z(); ++j) {
            for (int i = 0; i < grid.nodes_x(); ++i) {
                const double p = psi[static_cast<std::size_t>(grid.node(i, j))];
                f.row({grid.x(i), grid.z(j), p, material.theta(p, grid.x(i)), material.conductivity(p, grid.x(i))});
            }
        }
    };

    csv::Writer trace(opts.out / "trace.csv", {"n", "t", "K_n", "res_first", "res_last", "CR_n", "c_bar", "K_bar",
                                               "abs_S_pred", "omega_opt_pred"});
    csv::Writer probe(opts.out / "probe.csv", {"t", "h0", "u0", "q_out"});
    std::vector<coupling::StepRecord> records;
    snapshot(0);
    while (!sim.finished()) {
        const auto rec = sim.step();
        const auto& p = rec.prediction;
        trace.row({static_cast<long long>(rec.n), rec.t, static_cast<long long>(rec.iterations),
                   rec.residuals.front(), rec.residuals.back(), rec.cr, p.c_bar, p.k_bar, p.abs_S, p.omega_opt});
        const auto cell = sim.state().surface.cell(0);
        const double u0 = surface::velocity(cell, model);
        probe.row({rec.t, cell.h, u0, sim.surface_solver().outflow(sim.state().surface)[0]});
        if (rec.n % cfg.coupling.output_every == 0) snapshot(rec.n);
        records.push_back(rec);
    }

    const auto avg = coupling::time_averaged_cr(records, cr_exclude_threshold);
    csv::Writer summary(opts.out / "summary.csv", {"scenario", "CR", "undefined_count", "excluded_count"});
    summary.row({cfg.name, avg.cr, static_cast<long long>(avg.undefined), static_cast<long long>(avg.excluded)});
    std::cout << fmt::format("{}: {} steps, CR = {}, undefined CR_n: {}, excluded: {} -> {}\n", cfg.name,
                             records.size(), csv::format_cell(avg.cr), avg.undefined, avg.excluded,
                             opts.out.string());
    return 0;
}

}  // namespace surfsub::cli
