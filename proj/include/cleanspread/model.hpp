#pragma once

#include <cmath>

#include "cleanspread/dynamics.hpp"
#include "cleanspread/market_stack.hpp"

namespace cleanspread {

/// Single-period cap-and-trade scheme: penalty π per uncovered ton above the cap Γ at T.
struct CapParams {
    double penalty = 100.0;     // EUR/tCO2
    double cap = 1.4e8;         // tCO2
    double horizon = 1.0;       // yr
    double rate = 0.05;         // 1/yr
    double smoothing = 0.0;     // tCO2, half-width of an optional linear ramp replacing the jump at Γ

    double discount(double t) const { return std::exp(-rate * (horizon - t)); }
    /// π e^{-r(T-t)}, the largest attainable allowance price at time t.
    double upper_bound(double t) const { return penalty * discount(t); }

    bool operator==(const CapParams&) const = default;
};

/// φ(e): π on [Γ, ∞), 0 below; a linear ramp over [Γ−δ, Γ+δ] when smoothing δ > 0.
double terminal_condition(const CapParams& cap, double e);

struct ModelParams {
    StackParams stack = default_stack();
    DemandParams demand = default_demand();
    FuelParams fuels = default_fuels();
    CapParams cap;
    double hours_per_year = 8760.0;

    double capacity() const { return stack.market_capacity(); }
    /// ē over the compliance horizon.
    double max_emissions() const { return max_cumulative_emissions(stack, hours_per_year, cap.horizon); }

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

}  // namespace cleanspread
