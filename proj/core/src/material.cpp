#include "surfsub/material.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "surfsub/error.hpp"

namespace surfsub::material {

namespace {

// van Genuchten parameters of the benchmark soils.
const std::map<std::string, VanGenuchtenParams, std::less<>>& preset_table() {
    static const std::map<std::string, VanGenuchtenParams, std::less<>> table = {
        {"beit-netofa-clay", {0.152, 1.17, 0.0, 0.446, 9.49e-9}},
        {"silt-loam", {0.423, 2.06, 0.131, 0.396, 5.74e-7}},
        {"sandy-loam", {100.0, 2.0, 0.2, 1.0, 1.16e-5}},
    };
    return table;
}

double mix(double left, double right, double w) { return (1.0 - w) * left + w * right; }

}  // namespace

void VanGenuchtenParams::validate() const {
    if (!(n_g > 1.0)) throw ConfigError("van Genuchten n_G must be > 1");
    if (!(alpha_vg > 0.0)) throw ConfigError("van Genuchten alpha must be > 0");
    if (!(k_s > 0.0)) throw ConfigError("saturated conductivity K_s must be > 0");
    if (!(theta_r >= 0.0 && theta_r < theta_s && theta_s <= 1.0)) {
        throw ConfigError("water contents must satisfy 0 <= theta_R < theta_S <= 1");
    }
}

double theta(double psi, const VanGenuchtenParams& p) {
    if (psi > 0.0) return p.theta_s;
    const double m = (p.n_g - 1.0) / p.n_g;
    const double y = std::pow(p.alpha_vg * std::abs(psi), p.n_g);
    return p.theta_r + (p.theta_s - p.theta_r) * std::pow(1.0 / (1.0 + y), m);
}

namespace {

// Argument of the Mualem bracket and its derivative with respect to theta.
std::pair<double, double> mualem_argument(double psi, const VanGenuchtenParams& p, ConductivityForm form) {
    const double th = theta(psi, p);
    if (form == ConductivityForm::WaterContent) return {th, 1.0};
    const double span = p.theta_s - p.theta_r;
    return {(th - p.theta_r) / span, 1.0 / span};
}

// 1 - (1 - x)^m without cancellation for small x.
double mualem_bracket(double x, double m) { return -std::expm1(m * std::log1p(-x)); }

}  // namespace

double hydraulic_conductivity(double psi, const VanGenuchtenParams& p, ConductivityForm form) {
    if (psi > 0.0) return p.k_s;
    const double m = (p.n_g - 1.0) / p.n_g;
    const double s = mualem_argument(psi, p, form).first;
    const double bracket = mualem_bracket(std::pow(s, 1.0 / m), m);
    return p.k_s * std::sqrt(s) * bracket * bracket;
}

double capacity(double psi, const VanGenuchtenParams& p) {
    if (psi > 0.0) return 0.0;
    const double y = p.alpha_vg * std::abs(psi);
    return p.alpha_vg * (p.theta_s - p.theta_r) * (p.n_g - 1.0) * std::pow(y, p.n_g - 1.0) *
           std::pow(1.0 + std::pow(y, p.n_g), 1.0 / p.n_g - 2.0);
}

double conductivity_derivative(double psi, const VanGenuchtenParams& p, ConductivityForm form) {
    if (psi >= 0.0) return 0.0;
    const double m = (p.n_g - 1.0) / p.n_g;
    const auto [s, ds_dtheta] = mualem_argument(psi, p, form);
    if (s <= 0.0) return 0.0;
    const double s_pow = std::pow(s, 1.0 / m);
    const double inner = 1.0 - s_pow;
    if (inner <= 0.0) return 0.0;
    const double bracket = mualem_bracket(s_pow, m);
    // d bracket / d s = (1 - s^(1/m))^(m-1) s^(1/m - 1)
    const double dbracket = std::pow(inner, m - 1.0) * s_pow / s;
    const double dk_ds = p.k_s * (0.5 / std::sqrt(s) * bracket * bracket + std::sqrt(s) * 2.0 * bracket * dbracket);
    const double d = dk_ds * ds_dtheta * capacity(psi, p);
    return std::isfinite(d) ? d : 0.0;
}

VanGenuchtenParams preset(std::string_view name) {
    const auto& table = preset_table();
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown material preset '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : preset_table()) names.push_back(name);
    return names;
}

double Blended::weight(double x) const { return 0.5 * (std::tanh(steepness * (x - center_x)) + 1.0); }

MaterialField::MaterialField(Kind kind) : kind_(std::move(kind)) {}

MaterialField MaterialField::homogeneous(const VanGenuchtenParams& p) {
    p.validate();
    return MaterialField(Homogeneous{p});
}

MaterialField MaterialField::blended(const VanGenuchtenParams& left, const VanGenuchtenParams& right,
                                     double center_x, double steepness) {
    left.validate();
    right.validate();
    if (!(steepness > 0.0)) throw ConfigError("blend steepness must be > 0");
    return MaterialField(Blended{left, right, center_x, steepness});
}

MaterialField MaterialField::linear(double capacity, double conductivity, double theta_ref) {
    if (!(capacity >= 0.0) || !(conductivity > 0.0)) {
        throw ConfigError("linear material needs capacity >= 0 and conductivity > 0");
    }
    return MaterialField(LinearResponse{capacity, conductivity, theta_ref});
}

MaterialField MaterialField::with_conductivity_form(ConductivityForm form) const {
    MaterialField out = *this;
    out.form_ = form;
    return out;
}

VanGenuchtenParams MaterialField::params_at(double x) const {
    if (const auto* h = std::get_if<Homogeneous>(&kind_)) return h->params;
    if (const auto* b = std::get_if<Blended>(&kind_)) {
        const double w = b->weight(x);
        return {mix(b->left.alpha_vg, b->right.alpha_vg, w), mix(b->left.n_g, b->right.n_g, w),
                mix(b->left.theta_r, b->right.theta_r, w), mix(b->left.theta_s, b->right.theta_s, w),
                mix(b->left.k_s, b->right.k_s, w)};
    }
    throw ConfigError("linear material field has no van Genuchten parameters");
}

Coefficients MaterialField::evaluate(double psi, double x) const {
    if (const auto* lin = std::get_if<LinearResponse>(&kind_)) {
        return {lin->theta_ref + lin->capacity * psi, lin->conductivity, lin->capacity, 0.0};
    }
    const VanGenuchtenParams p = params_at(x);
    return {material::theta(psi, p), hydraulic_conductivity(psi, p, form_), material::capacity(psi, p),
            material::conductivity_derivative(psi, p, form_)};
}

double MaterialField::theta(double psi, double x) const {
    if (const auto* lin = std::get_if<LinearResponse>(&kind_)) return lin->theta_ref + lin->capacity * psi;
    return material::theta(psi, params_at(x));
}

double MaterialField::conductivity(double psi, double x) const {
    if (const auto* lin = std::get_if<LinearResponse>(&kind_)) return lin->conductivity;
    return hydraulic_conductivity(psi, params_at(x), form_);
}

double MaterialField::capacity(double psi, double x) const {
    if (const auto* lin = std::get_if<LinearResponse>(&kind_)) return lin->capacity;
    return material::capacity(psi, params_at(x));
}

VanGenuchtenParams params_at(double x, const MaterialField& field) { return field.params_at(x); }

}  // namespace surfsub::material
