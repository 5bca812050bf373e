/**
 * @file material.hpp
 * @brief Van Genuchten-Mualem soil hydraulics and spatial material fields.
 *
 * Constitutive relations in terms of the capillary head psi [m]:
 *
 *   theta(psi) = theta_R + (theta_S - theta_R) (1 + (alpha |psi|)^n)^(-(n-1)/n),  psi <= 0
 *              = theta_S,                                                    psi >  0
 *   K(psi)     = K_s sqrt(theta) [1 - (1 - theta^(n/(n-1)))^((n-1)/n)]^2,       psi <= 0
 *              = K_s,                                                        psi >  0
 *   c(psi)     = d theta / d psi
 *
 * The Mualem bracket is evaluated with the volumetric content theta itself,
 * not the effective saturation. For theta_S < 1 this makes K jump at psi = 0.
 */
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace surfsub::material {

struct VanGenuchtenParams {
    double alpha_vg = 0.0;  ///< inverse air-entry suction [1/m]
    double n_g = 0.0;       ///< pore-size distribution index [-], > 1
    double theta_r = 0.0;   ///< residual water content [-]
    double theta_s = 0.0;   ///< saturated water content [-]
    double k_s = 0.0;       ///< saturated conductivity [m/s]

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool operator==(const VanGenuchtenParams&) const = default;
};

/// Argument of the Mualem conductivity. WaterContent feeds the water content
/// itself; EffectiveSaturation feeds (theta - theta_R) / (theta_S - theta_R),
/// which reaches K_s at saturation.
enum class ConductivityForm { WaterContent, EffectiveSaturation };

double theta(double psi, const VanGenuchtenParams& p);
double hydraulic_conductivity(double psi, const VanGenuchtenParams& p,
                              ConductivityForm form = ConductivityForm::WaterContent);
double capacity(double psi, const VanGenuchtenParams& p);

/// dK/dpsi on the unsaturated branch; zero for psi >= 0.
double conductivity_derivative(double psi, const VanGenuchtenParams& p,
                               ConductivityForm form = ConductivityForm::WaterContent);

/// Named presets: "beit-netofa-clay", "silt-loam", "sandy-loam".
VanGenuchtenParams preset(std::string_view name);
std::vector<std::string> preset_names();

struct Homogeneous {
    VanGenuchtenParams params;
};

/// Two soils joined by a tanh transition centred at center_x.
struct Blended {
    VanGenuchtenParams left;
    VanGenuchtenParams right;
    double center_x = 0.0;   ///< [m]
    double steepness = 1.0;  ///< [1/m]

    /// Weight of the right-hand soil, (tanh(steepness (x - center_x)) + 1) / 2.
    double weight(double x) const;
};

/// theta = theta_ref + capacity * psi with constant K everywhere.
/// Used to run the nonlinear solvers in the linear regime.
struct LinearResponse {
    double capacity = 0.0;      ///< [1/m]
    double conductivity = 0.0;  ///< [m/s]
    double theta_ref = 0.0;
};

/// Point evaluation of all constitutive quantities at once.
struct Coefficients {
    double theta = 0.0;
    double conductivity = 0.0;
    double capacity = 0.0;
    double conductivity_derivative = 0.0;
};

class MaterialField {
public:
    using Kind = std::variant<Homogeneous, Blended, LinearResponse>;

    MaterialField() = default;
    MaterialField(Kind kind);  // NOLINT(google-explicit-constructor)

    static MaterialField homogeneous(const VanGenuchtenParams& p);
    static MaterialField blended(const VanGenuchtenParams& left, const VanGenuchtenParams& right,
                                 double center_x, double steepness);
    static MaterialField linear(double capacity, double conductivity, double theta_ref = 0.0);

    /// Copy using a different conductivity form. Ignored by linear fields.
    MaterialField with_conductivity_form(ConductivityForm form) const;

    const Kind& kind() const noexcept { return kind_; }
    ConductivityForm conductivity_form() const noexcept { return form_; }
    bool is_linear() const noexcept { return std::holds_alternative<LinearResponse>(kind_); }

    /// Van Genuchten parameters at horizontal position x. Throws for linear fields.
    VanGenuchtenParams params_at(double x) const;

    Coefficients evaluate(double psi, double x) const;
    double theta(double psi, double x) const;
    double conductivity(double psi, double x) const;
    double capacity(double psi, double x) const;

private:
    Kind kind_ = Homogeneous{};
    ConductivityForm form_ = ConductivityForm::WaterContent;
};

/// Free-function form of MaterialField::params_at.
VanGenuchtenParams params_at(double x, const MaterialField& field);

}  // namespace surfsub::material
