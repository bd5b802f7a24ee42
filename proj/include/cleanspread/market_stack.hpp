#pragma once

#include <array>
#include <string_view>

namespace cleanspread {

enum class Fuel { coal = 0, gas = 1 };

constexpr Fuel other(Fuel f) { return f == Fuel::coal ? Fuel::gas : Fuel::coal; }
constexpr std::array<Fuel, 2> kFuels{Fuel::coal, Fuel::gas};
std::string_view to_string(Fuel f);
Fuel fuel_from_string(std::string_view name);

/// Bid curve constants of one technology. Bids are (ê a + ĥ s) exp(m x) on [0, capacity].
struct FuelStack {
    double base_heat_rate = 0.0;       // MMBtu/MWh
    double base_emissions_rate = 0.0;  // tCO2/MWh
    double slope = 0.0;                // 1/MWh
    double capacity = 0.0;             // MWh

    bool operator==(const FuelStack&) const = default;
};

struct StackParams {
    FuelStack coal;
    FuelStack gas;

    const FuelStack& at(Fuel f) const { return f == Fuel::coal ? coal : gas; }
    double market_capacity() const { return coal.capacity + gas.capacity; }
    /// Exponent of fuel f's base bid in the blended regime, m_other / (m_c + m_g).
    double beta(Fuel f) const { return at(other(f)).slope / (coal.slope + gas.slope); }
    double gamma() const { return coal.slope * gas.slope / (coal.slope + gas.slope); }

    /// Throws ConfigError unless every constant is strictly positive.
    void validate() const;

    bool operator==(const StackParams&) const = default;
};

/// Base-case stack: gas-dominated 30 GW market.
StackParams default_stack();

struct PricePoint {
    double allowance = 0.0;  // EUR/tCO2
    double coal = 0.0;       // EUR/MMBtu
    double gas = 0.0;        // EUR/MMBtu

    double fuel(Fuel f) const { return f == Fuel::coal ? coal : gas; }
};

struct MarginalRates {
    double emissions;  // tCO2/MWh
    double heat;       // MMBtu/MWh
};

/// Merit-order outcome for a given total supply: clearing price and per-fuel quantities.
struct Dispatch {
    double price;  // EUR/MWh
    double coal;   // MWh
    double gas;    // MWh

    double quantity(Fuel f) const { return f == Fuel::coal ? coal : gas; }
};

/// ê_i a + ĥ_i s_i, the bid of the cheapest unit of fuel i.
double base_bid(const StackParams& params, Fuel fuel, double allowance, double fuel_price);

double fuel_bid(const StackParams& params, Fuel fuel, double x, double allowance, double fuel_price);
MarginalRates marginal_rates(const StackParams& params, Fuel fuel, double x);

/// Quantity of fuel-i generation bidding at or below `price`, clamped to [0, capacity].
double stack_inverse_fuel(const StackParams& params, Fuel fuel, double price, double allowance,
                          double fuel_price);

/// Closed-form market bid stack (merit-order aggregate of the two fuel curves).
double market_bid(const StackParams& params, double x, const PricePoint& point);
Dispatch dispatch(const StackParams& params, double x, const PricePoint& point);

/// Smallest price whose total offered quantity reaches x, found by bisection.
double market_bid_oracle(const StackParams& params, double x, const PricePoint& point);

/// Market emissions rate in tCO2 per hour at supply x.
double emissions_rate(const StackParams& params, double x, const PricePoint& point);
/// Upper bound of the emissions rate, reached at full dispatch.
double max_emissions_rate(const StackParams& params);
/// ē: cumulative emissions with the whole fleet running over the horizon.
double max_cumulative_emissions(const StackParams& params, double hours_per_year,
                                double horizon_years = 1.0);

/// ∫_0^x̄ (p − b(x))⁺ dx in EUR per hour: the inframarginal rent of the whole fleet.
double sector_profit_rate(const StackParams& params, double price, const PricePoint& point);

}  // namespace cleanspread
