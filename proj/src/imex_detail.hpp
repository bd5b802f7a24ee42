#pragma once

// Coefficient helpers shared by the reference and optimized IMEX kernels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cleanspread/allowance_solver.hpp"
#include "cleanspread/dynamics.hpp"
#include "cleanspread/market_stack.hpp"

namespace cleanspread::detail {

// Fuel prices on the s = 0 face are lifted to this floor before evaluating the stack; the
// emissions rate is continuous there and base bids must stay positive.
inline constexpr double kPriceFloor = 1e-9;

inline double node_emissions_rate(const ModelParams& model, double d, double a, double coal, double gas) {
    // NaN is passed through so the slice check reports it; throwing here would escape an omp region
    if (!std::isfinite(a)) return std::numeric_limits<double>::quiet_NaN();
    return emissions_rate(model.stack, d, {std::max(a, 0.0), std::max(coal, kPriceFloor), std::max(gas, kPriceFloor)});
}

inline double fuel_drift_at(const FuelProcess& p, double s) {
    if (s <= 0.0) return 0.0;
    return -p.mean_reversion * (std::log(s) - p.log_level - p.vol * p.vol / (2.0 * p.mean_reversion)) * s;
}

inline double fuel_variance_at(const FuelProcess& p, double s) { return p.vol * p.vol * s * s; }

/// Rows of (I − Δt L_axis): sub, diag, super per node.
struct Tridiagonal {
    std::vector<double> sub, diag, super;
};

// Central second difference plus sign-switching upwind first difference on a possibly
// non-uniform axis. At the ends only the inward neighbour is used.
inline void fill_row(Tridiagonal& t, const std::vector<double>& x, std::size_t m, double half_var, double drift,
                     double dt) {
    const std::size_t n = x.size();
    double lo = 0.0, up = 0.0;
    const double hm = m > 0 ? x[m] - x[m - 1] : 0.0;
    const double hp = m + 1 < n ? x[m + 1] - x[m] : 0.0;
    if (m > 0 && m + 1 < n) {
        lo = 2.0 * half_var / (hm * (hm + hp));
        up = 2.0 * half_var / (hp * (hm + hp));
    }
    if (drift > 0.0 && m + 1 < n) up += drift / hp;
    if (drift < 0.0 && m > 0) lo += -drift / hm;
    t.sub[m] = -dt * lo;
    t.super[m] = -dt * up;
    t.diag[m] = 1.0 + dt * (lo + up);
}

inline Tridiagonal demand_operator(const Grid4& grid, const ModelParams& model, double t) {
    const auto& x = grid.d.nodes;
    Tridiagonal op{std::vector<double>(x.size()), std::vector<double>(x.size()), std::vector<double>(x.size())};
    const double cap = model.capacity();
    for (std::size_t m = 0; m < x.size(); ++m) {
        const Coefficients c = demand_coefficients(model.demand, cap, t, x[m]);
        fill_row(op, x, m, 0.5 * c.vol * c.vol, c.drift, grid.dt);
    }
    return op;
}

/// Fuel axis operator; the last row imposes ∂α/∂s = 0 at s^max.
inline Tridiagonal fuel_operator(const Axis& axis, const FuelProcess& p, double dt) {
    const auto& x = axis.nodes;
    const std::size_t n = x.size();
    Tridiagonal op{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t m = 0; m + 1 < n; ++m) {
        fill_row(op, x, m, 0.5 * fuel_variance_at(p, x[m]), fuel_drift_at(p, x[m]), dt);
    }
    op.sub[n - 1] = -1.0;
    op.diag[n - 1] = 1.0;
    op.super[n - 1] = 0.0;
    return op;
}

/// Thomas factors: modified super-diagonal and pivots.
struct ThomasFactors {
    std::vector<double> sub, cprime, pivot;
};

inline ThomasFactors factor(const Tridiagonal& t) {
    const std::size_t n = t.diag.size();
    ThomasFactors f{t.sub, std::vector<double>(n), std::vector<double>(n)};
    f.pivot[0] = t.diag[0];
    f.cprime[0] = t.super[0] / f.pivot[0];
    for (std::size_t m = 1; m < n; ++m) {
        f.pivot[m] = t.diag[m] - t.sub[m] * f.cprime[m - 1];
        f.cprime[m] = t.super[m] / f.pivot[m];
    }
    return f;
}

/// Fuel-axis right-hand side: the Neumann row has zero data.
inline double neumann_rhs(std::size_t m, std::size_t n, double value) { return m + 1 == n ? 0.0 : value; }

inline double cross_coefficient(const ModelParams& model, double coal, double gas) {
    return model.fuels.correlation * model.fuels.coal.vol * model.fuels.gas.vol * coal * gas;
}

/// Clamp to [0, bound] and enforce non-decreasing values along one e-line.
inline double limit_line(double* line, std::size_t n, double bound) {
    double correction = 0.0;
    double running = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = std::max(std::clamp(line[k], 0.0, bound), running);
        correction = std::max(correction, std::abs(v - line[k]));
        line[k] = v;
        running = v;
    }
    return correction;
}

}  // namespace cleanspread::detail
