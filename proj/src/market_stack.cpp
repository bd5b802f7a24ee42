#include "cleanspread/market_stack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cleanspread/errors.hpp"

namespace cleanspread {

std::string_view to_string(Fuel f) { return f == Fuel::coal ? "coal" : "gas"; }

Fuel fuel_from_string(std::string_view name) {
    if (name == "coal") return Fuel::coal;
    if (name == "gas") return Fuel::gas;
    throw ConfigError("unknown fuel '" + std::string(name) + "' (expected coal|gas)");
}

void StackParams::validate() const {
    for (Fuel f : kFuels) {
        const FuelStack& s = at(f);
        if (!(s.base_heat_rate > 0 && s.base_emissions_rate > 0 && s.slope > 0 && s.capacity > 0)) {
            throw ConfigError("stack." + std::string(to_string(f)) +
                              ": heat rate, emissions rate, slope and capacity must be > 0");
        }
    }
}

StackParams default_stack() {
    return StackParams{
        .coal = {.base_heat_rate = 3.0, .base_emissions_rate = 0.9, .slope = 5e-5, .capacity = 12000.0},
        .gas = {.base_heat_rate = 7.0, .base_emissions_rate = 0.4, .slope = 3e-5, .capacity = 18000.0},
    };
}

namespace {

void check_fuel_supply(const FuelStack& s, Fuel fuel, double x) {
    if (!(x >= 0.0 && x <= s.capacity)) {
        throw DomainError("supply " + std::to_string(x) + " outside [0, " + std::to_string(s.capacity) +
                          "] for " + std::string(to_string(fuel)));
    }
}

double checked_base_bid(const StackParams& params, Fuel fuel, double allowance, double fuel_price) {
    const double k = base_bid(params, fuel, allowance, fuel_price);
    if (!(k > 0.0)) {
        throw DomainError("non-positive base bid for " + std::string(to_string(fuel)));
    }
    return k;
}

// Cumulative cost ∫_0^q b_i(x) dx of the first q MWh of fuel i.
double fuel_cost(const FuelStack& s, double k, double q) {
    return k / s.slope * std::expm1(s.slope * q);
}

}  // namespace

double base_bid(const StackParams& params, Fuel fuel, double allowance, double fuel_price) {
    const FuelStack& s = params.at(fuel);
    return s.base_emissions_rate * allowance + s.base_heat_rate * fuel_price;
}

double fuel_bid(const StackParams& params, Fuel fuel, double x, double allowance, double fuel_price) {
    const FuelStack& s = params.at(fuel);
    check_fuel_supply(s, fuel, x);
    return base_bid(params, fuel, allowance, fuel_price) * std::exp(s.slope * x);
}

MarginalRates marginal_rates(const StackParams& params, Fuel fuel, double x) {
    const FuelStack& s = params.at(fuel);
    check_fuel_supply(s, fuel, x);
    const double g = std::exp(s.slope * x);
    return {s.base_emissions_rate * g, s.base_heat_rate * g};
}

double stack_inverse_fuel(const StackParams& params, Fuel fuel, double price, double allowance,
                          double fuel_price) {
    const FuelStack& s = params.at(fuel);
    const double k = checked_base_bid(params, fuel, allowance, fuel_price);
    if (price <= k) return 0.0;
    return std::min(s.capacity, std::log(price / k) / s.slope);
}

Dispatch dispatch(const StackParams& params, double x, const PricePoint& point) {
    const double cap = params.market_capacity();
    if (!(x >= 0.0 && x <= cap)) {
        throw DomainError("total supply " + std::to_string(x) + " outside [0, " + std::to_string(cap) + "]");
    }
    std::array<double, 2> k{};
    std::array<double, 2> top{};
    for (Fuel f : kFuels) {
        const auto i = static_cast<int>(f);
        k[i] = checked_base_bid(params, f, point.allowance, point.fuel(f));
        top[i] = k[i] * std::exp(params.at(f).slope * params.at(f).capacity);
    }

    // Every single-fuel-marginal regime that is self-consistent is a solution of
    // q_c(p) + q_g(p) = x. Several can be consistent when the two curves do not
    // overlap; the stack price is the smallest of them.
    Dispatch best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    auto consider = [&](double p, double qc, double qg) {
        if (p < best.price) best = {p, qc, qg};
    };
    for (Fuel f : kFuels) {
        const auto i = static_cast<int>(f);
        const auto j = 1 - i;
        const FuelStack& si = params.at(f);
        const FuelStack& sj = params.at(other(f));
        // Only fuel i runs; fuel j is not yet in the money.
        if (x <= si.capacity) {
            const double p = k[i] * std::exp(si.slope * x);
            if (p <= k[j]) {
                f == Fuel::coal ? consider(p, x, 0.0) : consider(p, 0.0, x);
            }
        }
        // Fuel j fully dispatched below fuel i's marginal unit.
        if (x >= sj.capacity) {
            const double qi = x - sj.capacity;
            const double p = k[i] * std::exp(si.slope * qi);
            if (p >= top[j]) {
                f == Fuel::coal ? consider(p, qi, sj.capacity) : consider(p, sj.capacity, qi);
            }
        }
    }
    if (best.price < std::numeric_limits<double>::infinity()) return best;

    // Both fuels marginal: equal bids, quantities solving q_c + q_g = x.
    const double log_p = params.gamma() * x + params.beta(Fuel::coal) * std::log(k[0]) +
                         params.beta(Fuel::gas) * std::log(k[1]);
    const double qc = std::clamp((log_p - std::log(k[0])) / params.coal.slope, 0.0, params.coal.capacity);
    return {std::exp(log_p), qc, x - qc};
}

double market_bid(const StackParams& params, double x, const PricePoint& point) {
    return dispatch(params, x, point).price;
}

double market_bid_oracle(const StackParams& params, double x, const PricePoint& point) {
    const double cap = params.market_capacity();
    if (!(x >= 0.0 && x <= cap)) {
        throw DomainError("total supply outside [0, market capacity]");
    }
    auto supplied = [&](double p) {
        return stack_inverse_fuel(params, Fuel::coal, p, point.allowance, point.coal) +
               stack_inverse_fuel(params, Fuel::gas, p, point.allowance, point.gas);
    };
    double lo = std::min(base_bid(params, Fuel::coal, point.allowance, point.coal),
                         base_bid(params, Fuel::gas, point.allowance, point.gas));
    double hi = std::max(fuel_bid(params, Fuel::coal, params.coal.capacity, point.allowance, point.coal),
                         fuel_bid(params, Fuel::gas, params.gas.capacity, point.allowance, point.gas));
    if (!(lo > 0.0) || !(supplied(hi) >= x * (1.0 - 1e-15))) {
        throw std::logic_error("market_bid_oracle: bracket does not contain the clearing price");
    }
    if (supplied(lo) >= x) return lo;
    // Invariant: supplied(lo) < x <= supplied(hi).
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (supplied(mid) >= x ? hi : lo) = mid;
    }
    return hi;
}

double emissions_rate(const StackParams& params, double x, const PricePoint& point) {
    const Dispatch dsp = dispatch(params, x, point);
    double rate = 0.0;
    for (Fuel f : kFuels) {
        const FuelStack& s = params.at(f);
        rate += s.base_emissions_rate / s.slope * std::expm1(s.slope * dsp.quantity(f));
    }
    return rate;
}

double max_emissions_rate(const StackParams& params) {
    double rate = 0.0;
    for (Fuel f : kFuels) {
        const FuelStack& s = params.at(f);
        rate += s.base_emissions_rate / s.slope * std::expm1(s.slope * s.capacity);
    }
    return rate;
}

double max_cumulative_emissions(const StackParams& params, double hours_per_year, double horizon_years) {
    return max_emissions_rate(params) * hours_per_year * horizon_years;
}

double sector_profit_rate(const StackParams& params, double price, const PricePoint& point) {
    double profit = 0.0;
    for (Fuel f : kFuels) {
        const FuelStack& s = params.at(f);
        const double k = checked_base_bid(params, f, point.allowance, point.fuel(f));
        const double q = stack_inverse_fuel(params, f, price, point.allowance, point.fuel(f));
        if (q > 0.0) profit += price * q - fuel_cost(s, k, q);
    }
    return profit;
}

}  // namespace cleanspread
