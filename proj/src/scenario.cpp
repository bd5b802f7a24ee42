#include "cleanspread/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cleanspread/errors.hpp"

namespace cleanspread {

SweepAxes::SweepAxes() {
    for (int i = 0; i < 20; ++i) case4_caps.push_back(1.0e8 + 0.05e8 * i);
}

namespace {

using nlohmann::json;

json fuel_stack_json(const FuelStack& s) {
    return {{"base_heat_rate", s.base_heat_rate}, {"base_emissions_rate", s.base_emissions_rate},
            {"slope", s.slope}, {"capacity", s.capacity}};
}

json fuel_process_json(const FuelProcess& p) {
    return {{"mean_reversion", p.mean_reversion}, {"log_level", p.log_level}, {"vol", p.vol}, {"initial", p.initial}};
}

json plant_json(const PlantSpec& p) {
    return {{"id", p.id}, {"fuel", std::string(to_string(p.fuel))}, {"heat_rate", p.heat_rate},
            {"emissions_rate", p.emissions_rate}, {"fixed_cost", p.fixed_cost}};
}

std::string precision_name(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

// Keys present in `given` but not in `known` are errors; arrays are replaced wholesale.
void check_keys(const json& given, const json& known, const std::string& where) {
    if (!given.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = given.begin(); it != given.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!known.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
        const json& k = known.at(it.key());
        if (k.is_object()) check_keys(it.value(), k, path);
    }
}

template <class T>
T read(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + where + "." + key + "': " + e.what());
    }
}

double num(const json& j, const char* key, const std::string& where) { return read<double>(j, key, where); }

FuelStack fuel_stack_from(const json& j, const std::string& w) {
    return {num(j, "base_heat_rate", w), num(j, "base_emissions_rate", w), num(j, "slope", w), num(j, "capacity", w)};
}

FuelProcess fuel_process_from(const json& j, const std::string& w) {
    return {num(j, "mean_reversion", w), num(j, "log_level", w), num(j, "vol", w), num(j, "initial", w)};
}

PlantSpec plant_from(const json& j, const std::string& w) {
    static const json known = plant_json(PlantSpec{});
    check_keys(j, known, w);
    PlantSpec p;
    p.id = read<std::string>(j, "id", w);
    p.fuel = fuel_from_string(read<std::string>(j, "fuel", w));
    p.heat_rate = num(j, "heat_rate", w);
    p.emissions_rate = num(j, "emissions_rate", w);
    p.fixed_cost = j.contains("fixed_cost") ? num(j, "fixed_cost", w) : 0.0;
    return p;
}

}  // namespace

nlohmann::json to_json(const ScenarioConfig& c) {
    const ModelParams& m = c.model;
    json harmonics = json::array();
    for (const Harmonic& h : m.demand.harmonics) harmonics.push_back({{"amplitude", h.amplitude}, {"frequency", h.frequency}});
    json plants = json::array();
    for (const PlantSpec& p : c.plants) plants.push_back(plant_json(p));
    return {
        {"stack", {{"coal", fuel_stack_json(m.stack.coal)}, {"gas", fuel_stack_json(m.stack.gas)}}},
        {"demand",
         {{"mean_reversion", m.demand.mean_reversion}, {"seasonal_level", m.demand.seasonal_level},
          {"seasonal_amplitude", m.demand.seasonal_amplitude}, {"seasonal_frequency", m.demand.seasonal_frequency},
          {"vol_scale", m.demand.vol_scale}, {"initial", m.demand.initial}, {"harmonics", harmonics}}},
        {"fuels", {{"coal", fuel_process_json(m.fuels.coal)}, {"gas", fuel_process_json(m.fuels.gas)},
                   {"correlation", m.fuels.correlation}}},
        {"cap", {{"penalty", m.cap.penalty}, {"cap", m.cap.cap}, {"horizon", m.cap.horizon}, {"rate", m.cap.rate},
                 {"smoothing", m.cap.smoothing}}},
        {"hours_per_year", m.hours_per_year},
        {"grid", {{"n_d", c.grid.n_d}, {"n_c", c.grid.n_c}, {"n_g", c.grid.n_g}, {"n_e", c.grid.n_e},
                  {"n_t", c.grid.n_t}, {"coal_max", c.grid.coal_max}, {"gas_max", c.grid.gas_max},
                  {"mixed_term", c.grid.mixed_term}, {"retain_stride", c.grid.retain_stride},
                  {"precision", precision_name(c.grid.precision)}}},
        {"mc", {{"n_paths", c.mc.n_paths}, {"n_steps", c.mc.n_steps}, {"seed", c.mc.seed},
                {"record_stride", c.mc.record_stride}}},
        {"variant", std::string(to_string(c.variant))},
        {"reduced", {{"sigma_a", c.reduced.sigma_a}, {"rho_ac", c.reduced.rho_ac}, {"rho_ag", c.reduced.rho_ag},
                     {"sigma_e", c.reduced.sigma_e}, {"rho_ec", c.reduced.rho_ec}, {"rho_eg", c.reduced.rho_eg},
                     {"emissions_initial", c.reduced.emissions_initial ? json(*c.reduced.emissions_initial) : json()}}},
        {"plants", plants},
        {"sweeps", {{"case1_caps", c.sweeps.case1_caps}, {"case2_caps", c.sweeps.case2_caps},
                    {"case2_gas_initial", c.sweeps.case2_gas_initial}, {"case4_caps", c.sweeps.case4_caps}}},
        {"output_dir", c.output_dir},
    };
}

ScenarioConfig config_from_json(const nlohmann::json& given) {
    const json defaults = to_json(ScenarioConfig{});
    check_keys(given, defaults, "");
    json j = defaults;
    j.merge_patch(given);
    // merge_patch drops keys set to null; restore the optional one.
    if (!j["reduced"].contains("emissions_initial")) j["reduced"]["emissions_initial"] = nullptr;

    ScenarioConfig c;
    ModelParams& m = c.model;
    m.stack.coal = fuel_stack_from(j["stack"]["coal"], "stack.coal");
    m.stack.gas = fuel_stack_from(j["stack"]["gas"], "stack.gas");
    const json& d = j["demand"];
    m.demand.mean_reversion = num(d, "mean_reversion", "demand");
    m.demand.seasonal_level = num(d, "seasonal_level", "demand");
    m.demand.seasonal_amplitude = num(d, "seasonal_amplitude", "demand");
    m.demand.seasonal_frequency = num(d, "seasonal_frequency", "demand");
    m.demand.vol_scale = num(d, "vol_scale", "demand");
    m.demand.initial = num(d, "initial", "demand");
    m.demand.harmonics.clear();
    if (!d["harmonics"].is_array()) throw ConfigError("demand.harmonics: expected an array");
    for (const json& h : d["harmonics"])
        m.demand.harmonics.push_back({num(h, "amplitude", "demand.harmonics"), num(h, "frequency", "demand.harmonics")});
    m.fuels.coal = fuel_process_from(j["fuels"]["coal"], "fuels.coal");
    m.fuels.gas = fuel_process_from(j["fuels"]["gas"], "fuels.gas");
    m.fuels.correlation = num(j["fuels"], "correlation", "fuels");
    const json& cp = j["cap"];
    m.cap = {num(cp, "penalty", "cap"), num(cp, "cap", "cap"), num(cp, "horizon", "cap"), num(cp, "rate", "cap"),
             num(cp, "smoothing", "cap")};
    m.hours_per_year = num(j, "hours_per_year", "");

    const json& g = j["grid"];
    c.grid.n_d = read<int>(g, "n_d", "grid");
    c.grid.n_c = read<int>(g, "n_c", "grid");
    c.grid.n_g = read<int>(g, "n_g", "grid");
    c.grid.n_e = read<int>(g, "n_e", "grid");
    c.grid.n_t = read<int>(g, "n_t", "grid");
    c.grid.coal_max = num(g, "coal_max", "grid");
    c.grid.gas_max = num(g, "gas_max", "grid");
    c.grid.mixed_term = read<bool>(g, "mixed_term", "grid");
    c.grid.retain_stride = read<int>(g, "retain_stride", "grid");
    const auto prec = read<std::string>(g, "precision", "grid");
    if (prec != "f32" && prec != "f64") throw ConfigError("grid.precision must be f32 or f64");
    c.grid.precision = prec == "f32" ? Precision::f32 : Precision::f64;

    const json& mc = j["mc"];
    c.mc.n_paths = read<int>(mc, "n_paths", "mc");
    c.mc.n_steps = read<int>(mc, "n_steps", "mc");
    c.mc.seed = read<std::uint64_t>(mc, "seed", "mc");
    c.mc.record_stride = read<int>(mc, "record_stride", "mc");

    c.variant = variant_from_string(read<std::string>(j, "variant", ""));

    const json& r = j["reduced"];
    c.reduced.sigma_a = num(r, "sigma_a", "reduced");
    c.reduced.rho_ac = num(r, "rho_ac", "reduced");
    c.reduced.rho_ag = num(r, "rho_ag", "reduced");
    c.reduced.sigma_e = num(r, "sigma_e", "reduced");
    c.reduced.rho_ec = num(r, "rho_ec", "reduced");
    c.reduced.rho_eg = num(r, "rho_eg", "reduced");
    if (!r["emissions_initial"].is_null()) c.reduced.emissions_initial = num(r, "emissions_initial", "reduced");

    c.plants.clear();
    if (!j["plants"].is_array()) throw ConfigError("plants: expected an array");
    for (std::size_t i = 0; i < j["plants"].size(); ++i) c.plants.push_back(plant_from(j["plants"][i], "plants." + std::to_string(i)));

    const json& s = j["sweeps"];
    c.sweeps.case1_caps = read<std::vector<double>>(s, "case1_caps", "sweeps");
    c.sweeps.case2_caps = read<std::vector<double>>(s, "case2_caps", "sweeps");
    c.sweeps.case2_gas_initial = read<std::vector<double>>(s, "case2_gas_initial", "sweeps");
    c.sweeps.case4_caps = read<std::vector<double>>(s, "case4_caps", "sweeps");
    c.output_dir = read<std::string>(j, "output_dir", "");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    // Resolve against the full default document so overrides of keys absent from `doc` work.
    json full = to_json(ScenarioConfig{});
    full.merge_patch(doc);
    json* node = &full;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_object()) {
            if (!node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
            node = &(*node)[part];
        } else if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                throw ConfigError("'" + part + "' is not an array index in '" + key + "'");
            }
            if (idx >= node->size()) throw ConfigError("index out of range in '" + key + "'");
            node = &(*node)[idx];
        } else {
            throw ConfigError("'" + key + "' descends into a scalar");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
    doc = full;
}

void validate_config(const ScenarioConfig& c) {
    c.model.validate();
    for (const PlantSpec& p : c.plants) p.validate();
    const GridSpec& g = c.grid;
    if (g.n_d < 3 || g.n_c < 3 || g.n_g < 3 || g.n_e < 3) throw ConfigError("grid: every axis needs at least 3 nodes");
    if (g.n_t < 1) throw ConfigError("grid.n_t must be >= 1");
    if (g.retain_stride < 0) throw ConfigError("grid.retain_stride must be >= 0");
    if (!(g.coal_max > c.model.fuels.coal.initial && g.gas_max > c.model.fuels.gas.initial))
        throw ConfigError("grid: fuel axes must extend past the initial fuel prices");
    for (double s0 : c.sweeps.case2_gas_initial)
        if (!(s0 > 0 && s0 < g.gas_max)) throw ConfigError("sweeps.case2_gas_initial must lie in (0, grid.gas_max)");
    for (const auto* caps : {&c.sweeps.case1_caps, &c.sweeps.case2_caps, &c.sweeps.case4_caps})
        for (double cap : *caps)
            if (!(cap >= 0)) throw ConfigError("sweep caps must be >= 0");
    if (c.mc.n_paths < 1 || c.mc.n_steps < 1 || c.mc.record_stride < 1)
        throw ConfigError("mc: n_paths, n_steps and record_stride must be >= 1");
    for (double rho : {c.reduced.rho_ac, c.reduced.rho_ag, c.reduced.rho_ec, c.reduced.rho_eg})
        if (!(std::abs(rho) <= 1)) throw ConfigError("reduced: correlations must lie in [-1, 1]");
    if (!(c.reduced.sigma_a > 0 && c.reduced.sigma_e > 0)) throw ConfigError("reduced: volatilities must be > 0");
    correlation_factor(c.model.fuels.correlation, c.reduced.rho_ac, c.reduced.rho_ag);
    correlation_factor(c.model.fuels.correlation, c.reduced.rho_ec, c.reduced.rho_eg);
    check_stability(Grid4::build(g, c.model), c.model, g.mixed_term);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    const std::string s = to_json(config).dump();
    return fnv1a(s.data(), s.size());
}

std::uint64_t grid_hash(const ScenarioConfig& config) {
    const Grid4 g = Grid4::build(config.grid, config.model);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Axis* a : {&g.d, &g.c, &g.g, &g.e}) h = fnv1a(a->nodes.data(), a->size() * sizeof(double), h);
    h = fnv1a(&g.dt, sizeof g.dt, h);
    return fnv1a(&g.n_t, sizeof g.n_t, h);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace cleanspread
