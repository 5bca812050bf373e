#include "surfsub/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "surfsub/error.hpp"

namespace surfsub::analysis {

namespace {

void require_right_half_plane(Complex s) {
    if (!(s.real() > 0.0)) throw ConfigError("Laplace variable must satisfy Re(s) > 0");
}

// sqrt(cK/s) coth(sqrt(cs/K) L), the Dirichlet-to-flux symbol of the column.
Complex column_symbol(Complex s, double c, double K, double L) {
    const Complex lambda = std::sqrt(c * s / K) * L;
    return std::sqrt(c * K / s) * coth(lambda);
}

}  // namespace

LinearModelParams LinearModelParams::uniform(double c, double K, double L, double dt, int M, double omega) {
    LinearModelParams p{c, K, L, dt, L / M, M, omega};
    p.validate();
    return p;
}

void LinearModelParams::validate() const {
    if (!(c > 0.0) || !(K > 0.0)) throw ConfigError("linear model needs c > 0 and K > 0");
    if (!(L > 0.0) || !(dt > 0.0) || !(dz > 0.0)) throw ConfigError("linear model needs L, dt, dz > 0");
    if (M < 2) throw ConfigError("linear model needs M >= 2 elements");
    if (std::abs(dz * M - L) > 1e-12 * L) throw ConfigError("linear model needs M dz = L");
    if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("relaxation parameter must lie in (0, 1]");
}

ToeplitzCoefficients toeplitz_coeffs(const LinearModelParams& p) {
    p.validate();
    return {2.0 / 3.0 * p.c * p.dz + 2.0 * p.K * p.dt / p.dz, p.c * p.dz / 6.0 - p.K * p.dt / p.dz};
}

double alpha_sum(double a, double b, int M, double dz, double L) {
    if (M < 2) throw ConfigError("alpha_sum needs M >= 2");
    const double h = dz / L;
    double sum = 0.0;
    for (int j = 1; j < M; ++j) {
        const double angle = j * std::numbers::pi * h;
        const double denom = 0.5 * a - b * std::cos(angle);
        if (!(denom > 0.0)) throw SolverError("interior matrix is not positive definite");
        const double s = std::sin(angle);
        sum += s * s / denom;
    }
    return h * sum;
}

AnalysisResult discrete_S(const LinearModelParams& p) {
    const auto [a, b] = toeplitz_coeffs(p);
    const double alpha = alpha_sum(a, b, p.M, p.dz, p.L);
    const double S = b * b * alpha - 0.5 * a;
    return {a, b, alpha, S, 1.0 / (1.0 - S)};
}

double sigma(double omega, double S) { return omega * S + (1.0 - omega); }

Complex coth(Complex z) {
    if (std::abs(z) > 350.0) return {z.real() >= 0.0 ? 1.0 : -1.0, 0.0};
    return std::cosh(z) / std::sinh(z);
}

Complex rho_continuous(Complex s, double omega, double c, double K, double L) {
    require_right_half_plane(s);
    return 1.0 - omega - omega * column_symbol(s, c, K, L);
}

Complex omega_opt_continuous(Complex s, double c, double K, double L) {
    require_right_half_plane(s);
    return 1.0 / (1.0 + column_symbol(s, c, K, L));
}

Complex laplace_height(Complex s, double c, double K, double L) {
    require_right_half_plane(s);
    return -K / (s + column_symbol(s, c, K, L));
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError("log_space bounds must be positive");
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double l0 = std::log10(lo);
    const double step = (std::log10(hi) - l0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(10.0, l0 + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned workers) {
    struct Point {
        double c, K, dt;
        int M;
    };
    std::vector<Point> points;
    for (double c : spec.c_values)
        for (double K : spec.K_values)
            for (double dt : spec.dt_values)
                for (double dz : spec.dz_values) {
                    const int M = static_cast<int>(std::lround(spec.L / dz));
                    points.push_back({c, K, dt, M});
                }

    std::vector<SweepRow> rows(points.size());
    auto evaluate = [&](std::size_t i) {
        const Point& pt = points[i];
        const auto p = LinearModelParams::uniform(pt.c, pt.K, spec.L, pt.dt, pt.M);
        rows[i] = {pt.c, pt.K, pt.dt, p.dz, discrete_S(p)};
    };

    // Validate every point up front so errors surface deterministically.
    for (const Point& pt : points) LinearModelParams::uniform(pt.c, pt.K, spec.L, pt.dt, pt.M);

    workers = std::max(1u, workers);
    if (workers == 1 || points.size() < 2) {
        for (std::size_t i = 0; i < points.size(); ++i) evaluate(i);
        return rows;
    }
    // Each worker keeps its first failure; the lowest failing index wins so the
    // reported error does not depend on scheduling.
    std::vector<std::pair<std::size_t, std::exception_ptr>> failures(workers, {points.size(), nullptr});
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < points.size(); i += workers) {
                    try {
                        evaluate(i);
                    } catch (...) {
                        failures[w] = {i, std::current_exception()};
                        return;
                    }
                }
            });
        }
    }
    const auto first = std::min_element(failures.begin(), failures.end(),
                                        [](const auto& a, const auto& b) { return a.first < b.first; });
    if (first->second) std::rethrow_exception(first->second);
    return rows;
}

}  // namespace surfsub::analysis
