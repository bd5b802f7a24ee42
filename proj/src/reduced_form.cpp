#include "cleanspread/reduced_form.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cleanspread/errors.hpp"

namespace cleanspread {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::structural: return "structural";
        case Variant::gbm_allowance: return "gbm_allowance";
        case Variant::gbm_emissions: return "gbm_emissions";
        case Variant::tax: return "tax";
    }
    return "?";
}

Variant variant_from_string(std::string_view name) {
    for (Variant v : {Variant::structural, Variant::gbm_allowance, Variant::gbm_emissions, Variant::tax}) {
        if (name == to_string(v)) return v;
    }
    throw ConfigError("unknown variant '" + std::string(name) +
                      "' (expected structural|gbm_allowance|gbm_emissions|tax)");
}

std::array<double, 3> CorrelationFactor::apply(const std::array<double, 3>& w) const {
    std::array<double, 3> z{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c <= r; ++c) z[r] += lower[r][c] * w[c];
    return z;
}

CorrelationFactor correlation_factor(double rho_cg, double rho_xc, double rho_xg) {
    const double m[3][3] = {{1.0, rho_cg, rho_xc}, {rho_cg, 1.0, rho_xg}, {rho_xc, rho_xg, 1.0}};
    for (double r : {rho_cg, rho_xc, rho_xg}) {
        if (!(std::abs(r) <= 1.0)) throw ConfigError("correlations must lie in [-1, 1]");
    }
    CorrelationFactor f;
    constexpr double tol = 1e-12;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c <= r; ++c) {
            double s = m[r][c];
            for (int k = 0; k < c; ++k) s -= f.lower[r][k] * f.lower[c][k];
            if (r == c) {
                if (s < -tol) throw ConfigError("correlation matrix is not positive semidefinite");
                f.lower[r][r] = std::sqrt(std::max(s, 0.0));
            } else {
                f.lower[r][c] = f.lower[c][c] > 0.0 ? s / f.lower[c][c] : 0.0;
            }
        }
    }
    return f;
}

double gbm_allowance_step(double a, double rate, double sigma, double dt, double z) {
    return a * std::exp((rate - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z);
}

double gbm_emissions_step(double e, double drift, double sigma, double dt, double z) {
    return e * std::exp((drift - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gbm_emissions_allowance(double e_proxy, double t, double drift, double sigma_e, const CapParams& cap) {
    const double tau = cap.horizon - t;
    if (tau <= 0.0) return e_proxy >= cap.cap ? cap.penalty : 0.0;
    if (!(e_proxy > 0.0)) return 0.0;
    const double z = (std::log(e_proxy / cap.cap) + (drift - 0.5 * sigma_e * sigma_e) * tau) / (sigma_e * std::sqrt(tau));
    return cap.upper_bound(t) * normal_cdf(z);
}

double calibrate_emissions_drift(double e_initial, double sigma_e, const CapParams& cap, double target) {
    const double top = cap.upper_bound(0.0);
    if (!(target > 0.0 && target < top)) {
        throw CalibrationError("target A0 " + std::to_string(target) + " outside the attainable range (0, " +
                               std::to_string(top) + ")");
    }
    auto price = [&](double mu) { return gbm_emissions_allowance(e_initial, 0.0, mu, sigma_e, cap); };
    double lo = -1.0, hi = 1.0;
    for (int k = 0; k < 60 && price(lo) > target; ++k) lo *= 2.0;
    for (int k = 0; k < 60 && price(hi) < target; ++k) hi *= 2.0;
    if (!(price(lo) <= target && price(hi) >= target)) {
        throw CalibrationError("could not bracket the emissions drift for target A0 " + std::to_string(target));
    }
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (price(mid) < target ? lo : hi) = mid;
    }
    const double mu = std::abs(price(lo) - target) <= std::abs(price(hi) - target) ? lo : hi;
    if (std::abs(price(mu) - target) > 1e-10 * cap.penalty) {
        throw CalibrationError("emissions drift calibration residual above tolerance");
    }
    return mu;
}

double carbon_tax_path(double a0, double rate, double t) { return a0 * std::exp(rate * t); }

}  // namespace cleanspread
