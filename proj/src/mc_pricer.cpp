#include "cleanspread/mc_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cleanspread/errors.hpp"

namespace cleanspread {

void PlantSpec::validate() const {
    if (!(heat_rate > 0 && emissions_rate > 0)) throw ConfigError("plant " + id + ": heat and emissions rates must be > 0");
    if (!(fixed_cost >= 0)) throw ConfigError("plant " + id + ": fixed cost must be >= 0");
}

std::vector<PlantSpec> default_plants() {
    return {
        {"coal_high", Fuel::coal, 3.5, 1.05, 0.0},
        {"coal_low", Fuel::coal, 5.0, 1.5, 0.0},
        {"gas_high", Fuel::gas, 7.5, 0.43, 0.0},
        {"gas_low", Fuel::gas, 11.5, 0.66, 0.0},
    };
}

std::size_t PathSet::nearest_record(double t) const {
    std::size_t best = 0;
    for (std::size_t r = 1; r < steps.size(); ++r) {
        if (std::abs(time(r) - t) < std::abs(time(best) - t)) best = r;
    }
    return best;
}

double electricity_price(const StackParams& stack, const MarketState& state) {
    return market_bid(stack, state.demand, {state.allowance, state.coal, state.gas});
}

namespace {

struct Prepared {
    CorrelationFactor factor;
    double emissions_cap;
    std::vector<int> steps;
    std::vector<int> slot_of_step;  // -1 when not recorded
};

Prepared prepare(const ModelParams& model, const AllowanceModel& am, const SimulationConfig& cfg) {
    if (cfg.n_paths < 1 || cfg.n_steps < 1) throw ConfigError("mc: n_paths and n_steps must be >= 1");
    if (cfg.record_stride < 1) throw ConfigError("mc: record_stride must be >= 1");
    if (am.variant == Variant::structural && am.surface == nullptr) {
        throw ConfigError("structural variant requires a solved allowance surface");
    }
    if (am.variant == Variant::gbm_emissions && !(am.emissions_initial > 0)) {
        throw ConfigError("gbm_emissions variant requires a positive initial emissions proxy");
    }
    const double rho = model.fuels.correlation;
    Prepared p;
    switch (am.variant) {
        case Variant::gbm_allowance:
            p.factor = correlation_factor(rho, am.reduced.rho_ac, am.reduced.rho_ag);
            break;
        case Variant::gbm_emissions:
            p.factor = correlation_factor(rho, am.reduced.rho_ec, am.reduced.rho_eg);
            break;
        default:
            p.factor = correlation_factor(rho, 0.0, 0.0);
    }
    p.emissions_cap = model.max_emissions();
    p.slot_of_step.assign(static_cast<std::size_t>(cfg.n_steps) + 1, -1);
    for (int k = 0; k <= cfg.n_steps; ++k) {
        if (k % cfg.record_stride == 0 || k == cfg.n_steps) {
            p.slot_of_step[k] = static_cast<int>(p.steps.size());
            p.steps.push_back(k);
        }
    }
    return p;
}

PathSet allocate(const SimulationConfig& cfg, const Prepared& p, const ModelParams& model, Variant v) {
    PathSet ps;
    ps.n_paths = cfg.n_paths;
    ps.n_steps = cfg.n_steps;
    ps.dt = model.cap.horizon / cfg.n_steps;
    ps.seed = cfg.seed;
    ps.variant = v;
    ps.steps = p.steps;
    const std::size_t n = p.steps.size() * static_cast<std::size_t>(cfg.n_paths);
    for (auto* field : {&ps.demand, &ps.coal, &ps.gas, &ps.emissions, &ps.allowance, &ps.price}) field->assign(n, 0.0);
    if (v == Variant::gbm_emissions) ps.proxy.assign(n, 0.0);
    return ps;
}

// Simulates one path and writes its recorded states; returns the number of demand reflections.
std::size_t simulate_path(const ModelParams& model, const AllowanceModel& am, const SimulationConfig& cfg,
                          const Prepared& prep, std::size_t path, PathSet& out) {
    PathRng rng(cfg.seed, path);
    const double dt = out.dt;
    const double cap = model.capacity();
    const CapParams& cp = model.cap;

    MarketState s{0.0, model.demand.initial, model.fuels.coal.initial, model.fuels.gas.initial, 0.0, 0.0};
    double gbm_a = am.initial_allowance;
    double proxy = am.emissions_initial;
    std::size_t hits = 0;

    for (int k = 0; k <= cfg.n_steps; ++k) {
        s.t = k * dt;
        switch (am.variant) {
            case Variant::structural: s.allowance = am.surface->interpolate(s.t, s.demand, s.coal, s.gas, s.emissions); break;
            case Variant::gbm_allowance: s.allowance = gbm_a; break;
            case Variant::gbm_emissions:
                s.allowance = gbm_emissions_allowance(proxy, s.t, am.emissions_drift, am.reduced.sigma_e, cp);
                break;
            case Variant::tax: s.allowance = carbon_tax_path(am.initial_allowance, cp.rate, s.t); break;
        }
        const PricePoint point{s.allowance, s.coal, s.gas};
        const Dispatch dsp = dispatch(model.stack, s.demand, point);

        if (const int slot = prep.slot_of_step[k]; slot >= 0) {
            const std::size_t q = out.at(static_cast<std::size_t>(slot), path);
            out.demand[q] = s.demand;
            out.coal[q] = s.coal;
            out.gas[q] = s.gas;
            out.emissions[q] = s.emissions;
            out.allowance[q] = s.allowance;
            out.price[q] = dsp.price;
            if (!out.proxy.empty()) out.proxy[q] = proxy;
        }
        if (k == cfg.n_steps) break;

        double rate = 0.0;
        for (Fuel f : kFuels) {
            const FuelStack& st = model.stack.at(f);
            rate += st.base_emissions_rate / st.slope * std::expm1(st.slope * dsp.quantity(f));
        }
        const double e_next = std::min(prep.emissions_cap, s.emissions + rate * model.hours_per_year * dt);

        // Four draws per step for every variant so exogenous paths coincide across variants.
        const double z_demand = rng.normal();
        const std::array<double, 3> w{rng.normal(), rng.normal(), rng.normal()};
        const std::array<double, 3> z = prep.factor.apply(w);
        bool reflected = false;
        s = euler_step(s, dt, {z_demand, z[0], z[1]}, model.demand, cap, model.fuels, &reflected);
        hits += reflected ? 1 : 0;
        s.emissions = e_next;
        if (am.variant == Variant::gbm_allowance) gbm_a = gbm_allowance_step(gbm_a, cp.rate, am.reduced.sigma_a, dt, z[2]);
        if (am.variant == Variant::gbm_emissions) {
            proxy = gbm_emissions_step(proxy, am.emissions_drift, am.reduced.sigma_e, dt, z[2]);
        }
    }
    return hits;
}

}  // namespace

PathSet simulate(const ModelParams& model, const AllowanceModel& allowance, const SimulationConfig& config) {
    const Prepared prep = prepare(model, allowance, config);
    PathSet out = allocate(config, prep, model, allowance.variant);
    std::size_t hits = 0;
    const auto n = static_cast<long>(config.n_paths);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : hits)
    for (long p = 0; p < n; ++p) hits += simulate_path(model, allowance, config, prep, static_cast<std::size_t>(p), out);
    out.pre_reflection_hits = hits;
    return out;
}

PathSet simulate_reference(const ModelParams& model, const AllowanceModel& allowance, const SimulationConfig& config) {
    const Prepared prep = prepare(model, allowance, config);
    PathSet out = allocate(config, prep, model, allowance.variant);
    for (std::size_t p = 0; p < static_cast<std::size_t>(config.n_paths); ++p) {
        out.pre_reflection_hits += simulate_path(model, allowance, config, prep, p, out);
    }
    return out;
}

Estimate mean_and_standard_error(std::span<const double> samples) {
    Estimate est;
    const auto n = static_cast<double>(samples.size());
    if (samples.empty()) return est;
    est.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (samples.size() >= 2) {
        double ss = 0.0;
        for (double v : samples) ss += (v - est.mean) * (v - est.mean);
        est.standard_error = std::sqrt(ss / (n * (n - 1.0)));
    }
    return est;
}

std::vector<double> discounted_payoffs(const PathSet& paths, const PlantSpec& plant, double rate, double tau, double t) {
    const std::size_t rec = paths.nearest_record(tau);
    const double disc = std::exp(-rate * (paths.time(rec) - t));
    std::vector<double> v(static_cast<std::size_t>(paths.n_paths));
    for (std::size_t p = 0; p < v.size(); ++p) {
        const std::size_t q = paths.at(rec, p);
        const double spread = paths.price[q] - plant.heat_rate * paths.fuel(plant.fuel, rec, p) -
                              plant.emissions_rate * paths.allowance[q] - plant.fixed_cost;
        v[p] = disc * std::max(spread, 0.0);
    }
    return v;
}

SpreadQuote spread_option(const PathSet& paths, const PlantSpec& plant, double rate, double tau, double t) {
    const std::size_t rec = paths.nearest_record(tau);
    const Estimate est = mean_and_standard_error(discounted_payoffs(paths, plant, rate, tau, t));
    return {plant.id, paths.time(rec), paths.time(rec) - tau, est.mean, est.standard_error};
}

SpreadQuote plant_value(const PathSet& paths, const PlantSpec& plant, double rate, std::span<const double> maturities) {
    std::vector<double> sums(static_cast<std::size_t>(paths.n_paths), 0.0);
    for (double tau : maturities) {
        const std::vector<double> v = discounted_payoffs(paths, plant, rate, tau);
        for (std::size_t p = 0; p < sums.size(); ++p) sums[p] += v[p];
    }
    const Estimate est = mean_and_standard_error(sums);
    return {plant.id, maturities.empty() ? 0.0 : maturities.back(), 0.0, est.mean, est.standard_error};
}

std::vector<double> maturity_strip(const PathSet& paths) {
    std::vector<double> taus;
    for (std::size_t r = 0; r < paths.records(); ++r)
        if (paths.steps[r] > 0) taus.push_back(paths.time(r));
    return taus;
}

ProfitSeries sector_profits(const PathSet& paths, const ModelParams& model) {
    ProfitSeries out;
    std::vector<double> v(static_cast<std::size_t>(paths.n_paths));
    for (std::size_t r = 0; r < paths.records(); ++r) {
        for (std::size_t p = 0; p < v.size(); ++p) {
            const std::size_t q = paths.at(r, p);
            v[p] = sector_profit_rate(model.stack, paths.price[q], {paths.allowance[q], paths.coal[q], paths.gas[q]});
        }
        const Estimate est = mean_and_standard_error(v);
        out.time.push_back(paths.time(r));
        out.mean.push_back(est.mean);
        out.standard_error.push_back(est.standard_error.value_or(0.0));
        out.total += est.mean;
        out.discounted_total += std::exp(-model.cap.rate * paths.time(r)) * est.mean;
    }
    return out;
}

double revenue_minus_cost(const StackParams& stack, double demand, const PricePoint& point) {
    const Dispatch dsp = dispatch(stack, demand, point);
    double cost = 0.0;
    for (Fuel f : kFuels) {
        const FuelStack& s = stack.at(f);
        cost += base_bid(stack, f, point.allowance, point.fuel(f)) / s.slope * std::expm1(s.slope * dsp.quantity(f));
    }
    return dsp.price * demand - cost;
}

MartingaleCheck terminal_digital(const PathSet& paths, const CapParams& cap, const Axis& e_axis) {
    const std::size_t last = paths.records() - 1;
    std::vector<double> v(static_cast<std::size_t>(paths.n_paths));
    std::size_t near = 0;
    double sampled = 0.0;
    const double disc = cap.discount(0.0);
    for (std::size_t p = 0; p < v.size(); ++p) {
        const double e = paths.emissions[paths.at(last, p)];
        v[p] = disc * terminal_condition(cap, e);
        const auto [lo, w] = e_axis.locate(e);
        const double de = e_axis.nodes[lo + 1] - e_axis.nodes[lo];
        near += std::abs(e - cap.cap) < de ? 1 : 0;
        sampled += (1.0 - w) * terminal_condition(cap, e_axis.nodes[lo]) + w * terminal_condition(cap, e_axis.nodes[lo + 1]);
    }
    const Estimate est = mean_and_standard_error(v);
    const double n = static_cast<double>(v.size());
    return {est.mean, est.standard_error.value_or(0.0), static_cast<double>(near) / n, disc * sampled / n};
}

}  // namespace cleanspread
