#include "surfsub/linear1d.hpp"

#include <cmath>
#include <numbers>

#include "surfsub/error.hpp"

namespace surfsub::linear1d {

std::optional<double> observed_cr(std::span<const double> residuals) {
    const std::size_t K = residuals.size();
    if (K < 3) return std::nullopt;
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < K; ++k) sum += residuals[k] / residuals[k - 1];
    return sum / static_cast<double>(K - 2);
}

std::vector<double> solve_toeplitz_tridiagonal(double a, double b, std::span<const double> rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> x(rhs.begin(), rhs.end());
    if (n == 0) return x;
    std::vector<double> upper(n, 0.0);
    double pivot = a;
    if (pivot == 0.0) throw SolverError("tridiagonal solve: zero pivot");
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        upper[i - 1] = b / pivot;
        pivot = a - b * upper[i - 1];
        if (pivot == 0.0) throw SolverError("tridiagonal solve: zero pivot");
        x[i] = (x[i] - b * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper[i] * x[i + 1];
    return x;
}

namespace {

std::vector<double> initial_interior(const analysis::LinearModelParams& p) {
    std::vector<double> psi(static_cast<std::size_t>(p.M - 1));
    for (int j = 1; j < p.M; ++j) {
        const double z = -p.L + j * p.dz;
        psi[static_cast<std::size_t>(j - 1)] = 1.0 - z / p.L;
    }
    return psi;
}

}  // namespace

Linear1DSystem::Linear1DSystem(const analysis::LinearModelParams& params)
    : Linear1DSystem(params, initial_interior(params), 0.0) {}

Linear1DSystem::Linear1DSystem(const analysis::LinearModelParams& params, std::vector<double> psi_interior,
                               double psi_gamma)
    : params_(params),
      coeffs_(analysis::toeplitz_coeffs(params)),
      psi_interior_(std::move(psi_interior)),
      psi_gamma_(psi_gamma) {
    if (psi_interior_.size() != static_cast<std::size_t>(params_.M - 1)) {
        throw ConfigError("interior state must have M - 1 entries");
    }
    for (int j = 1; j < params_.M; ++j) {
        // positive definiteness of the interior matrix
        if (!(coeffs_.a - 2.0 * coeffs_.b * std::cos(j * std::numbers::pi / params_.M) > 0.0)) {
            throw SolverError("interior matrix is not positive definite");
        }
    }
}

std::vector<double> Linear1DSystem::subsurface_solve(double psi_gamma_iter) const {
    const std::size_t n = psi_interior_.size();
    const double mass_diag = 2.0 / 3.0 * params_.c * params_.dz;
    const double mass_off = params_.c * params_.dz / 6.0;

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = mass_diag * psi_interior_[i];
        if (i > 0) v += mass_off * psi_interior_[i - 1];
        if (i + 1 < n) v += mass_off * psi_interior_[i + 1];
        rhs[i] = v;
    }
    rhs[n - 1] += -coeffs_.b * psi_gamma_iter + mass_off * psi_gamma_;
    return solve_toeplitz_tridiagonal(coeffs_.a, coeffs_.b, rhs);
}

double Linear1DSystem::surface_update(std::span<const double> psi_interior_new, double psi_gamma_iter) const {
    const double mass_off = params_.c * params_.dz / 6.0;
    const double mass_corner = params_.c * params_.dz / 3.0;
    const double stiff = params_.K * params_.dt / params_.dz;
    // Stiffness acts on the head difference across the top element; expanding
    // it into b and a/2 cancels badly when K dt / dz is large.
    return stiff * (psi_interior_new.back() - psi_gamma_iter) +
           mass_off * (psi_interior_.back() - psi_interior_new.back()) +
           mass_corner * (psi_gamma_ - psi_gamma_iter) + psi_gamma_ - params_.dt * params_.K;
}

double Linear1DSystem::interface_map(double psi_gamma_iter) const {
    return surface_update(subsurface_solve(psi_gamma_iter), psi_gamma_iter);
}

StepTrace Linear1DSystem::run_time_step(double omega, double tol, int max_iters) {
    if (!(omega > 0.0 && omega <= 1.0)) throw ConfigError("relaxation parameter must lie in (0, 1]");
    if (!(tol > 0.0)) throw ConfigError("coupling tolerance must be > 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");

    StepTrace trace;
    trace.n = step_ + 1;
    double prev = psi_gamma_;
    for (int k = 1; k <= max_iters; ++k) {
        std::vector<double> interior = subsurface_solve(prev);
        const double tilde = surface_update(interior, prev);
        const double res = std::abs(tilde - prev);
        const double next = omega * tilde + (1.0 - omega) * prev;
        trace.iterates.push_back(next);
        trace.residuals.push_back(res);
        trace.iterations = k;
        if (!std::isfinite(res)) break;
        if (res < tol) {
            trace.converged = true;
            psi_interior_ = std::move(interior);
            psi_gamma_ = next;
            ++step_;
            break;
        }
        prev = next;
    }
    trace.cr = observed_cr(trace.residuals);
    return trace;
}

}  // namespace surfsub::linear1d
