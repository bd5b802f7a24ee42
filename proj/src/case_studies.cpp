#include "cleanspread/case_studies.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "cleanspread/errors.hpp"
#include "cleanspread/surface_io.hpp"

namespace cleanspread {

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
}

Expectations::Expectations()
    : reference_a0{{2.0e8, 5.0}, {1.8e8, 28.0}, {1.6e8, 52.0}, {1.4e8, 80.0}, {1.2e8, 94.0}} {}

Expectations load_expectations(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open expectations " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    Expectations x;
    auto opt = [&](const char* key, double& v) {
        if (j.contains(key)) v = j.at(key).get<double>();
    };
    try {
        opt("base_a0_min", x.base_a0_min);
        opt("base_a0_max", x.base_a0_max);
        opt("a0_relative_tolerance", x.a0_relative_tolerance);
        opt("a0_absolute_tolerance", x.a0_absolute_tolerance);
        opt("martingale_sigmas", x.martingale_sigmas);
        opt("seasonality_sigmas", x.seasonality_sigmas);
        opt("profit_equality_sigmas", x.profit_equality_sigmas);
        opt("early_window_end", x.early_window_end);
        opt("late_window_days", x.late_window_days);
        if (j.contains("reference_a0")) {
            x.reference_a0.clear();
            for (const auto& p : j.at("reference_a0")) x.reference_a0.emplace_back(p.at("cap").get<double>(), p.at("a0").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return x;
}

const Table& CaseStudyReport::table(const std::string& name) const {
    for (const Table& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("no table " + name);
}

const Check* CaseStudyReport::check(const std::string& name) const {
    for (const Check& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::string cell(double v) { return format_number(v); }
std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void add_check(CaseStudyReport& r, std::string name, double value, double lower, double upper) {
    r.checks.push_back({std::move(name), value, lower, upper, value >= lower && value <= upper});
}

ModelParams with_cap(const ScenarioConfig& c, double cap) {
    ModelParams m = c.model;
    m.cap.cap = cap;
    return m;
}

struct CapRun {
    double cap = 0.0;
    SolveResult solved;
    double a0_coarse = 0.0;
    double path_a0 = 0.0;  // α(0, state₀) as seen by the paths
};

CapRun solve_cap(const ScenarioConfig& c, double cap, bool a0_only, CaseStudyReport& r, bool coarse = true) {
    CapRun run;
    run.cap = cap;
    const ModelParams m = with_cap(c, cap);
    run.solved = solve(m, c.grid, {Kernel::optimized, a0_only});
    run.a0_coarse = coarse ? solve(m, c.grid.scaled(0.5), {Kernel::optimized, true}).a0 : run.solved.a0;
    run.path_a0 = a0_only ? run.solved.a0
                          : run.solved.surface.interpolate(0.0, m.demand.initial, m.fuels.coal.initial,
                                                           m.fuels.gas.initial, 0.0);
    if (!a0_only) r.surfaces.emplace_back("cap=" + format_number(cap), checksum_hex(run.solved.surface.checksum()));
    return run;
}

AllowanceModel allowance_model(const ScenarioConfig& c, Variant v, const CapRun& run) {
    AllowanceModel am;
    am.variant = v;
    am.reduced = c.reduced;
    am.initial_allowance = run.path_a0;
    if (v == Variant::structural) am.surface = &run.solved.surface;
    if (v == Variant::gbm_emissions) {
        CapParams cp = c.model.cap;
        cp.cap = run.cap;
        am.emissions_initial = c.reduced.emissions_initial.value_or(run.cap);
        am.emissions_drift = calibrate_emissions_drift(am.emissions_initial, c.reduced.sigma_e, cp, run.path_a0);
    }
    return am;
}

Table spread_table(std::string name) {
    return {std::move(name), {"tau", "value", "standard_error", "plant", "variant", "cap", "a0", "tau_offset"}, {}};
}

void quote_strip(const PathSet& paths, const ScenarioConfig& c, double cap, double a0, Table& t) {
    const std::vector<double> taus = maturity_strip(paths);
    for (const PlantSpec& p : c.plants) {
        for (double tau : taus) {
            const SpreadQuote q = spread_option(paths, p, c.model.cap.rate, tau);
            t.add({cell(q.maturity), cell(q.value), cell(q.standard_error), p.id, std::string(to_string(paths.variant)),
                   cell(cap), cell(a0), cell(q.maturity_offset)});
        }
    }
}

Table plant_value_table(std::string name) {
    return {std::move(name), {"plant", "variant", "cap", "gas_initial", "a0", "value", "standard_error"}, {}};
}

std::vector<SpreadQuote> add_plant_values(const PathSet& paths, const ScenarioConfig& c, double cap, double a0,
                                          Table& t) {
    const std::vector<double> taus = maturity_strip(paths);
    std::vector<SpreadQuote> out;
    for (const PlantSpec& p : c.plants) {
        const SpreadQuote q = plant_value(paths, p, c.model.cap.rate, taus);
        t.add({p.id, std::string(to_string(paths.variant)), cell(cap), cell(c.model.fuels.gas.initial), cell(a0),
               cell(q.value), cell(q.standard_error)});
        out.push_back(q);
    }
    return out;
}

// Index of the least efficient plant (highest heat rate) of a fuel, or -1.
int low_efficiency(const std::vector<PlantSpec>& plants, Fuel f) {
    int best = -1;
    for (std::size_t i = 0; i < plants.size(); ++i)
        if (plants[i].fuel == f && (best < 0 || plants[i].heat_rate > plants[best].heat_rate)) best = static_cast<int>(i);
    return best;
}

nlohmann::json martingale_diagnostic(const PathSet& paths, const CapRun& run, const ModelParams& m, const Grid4& grid,
                                     const Expectations& x, CaseStudyReport& r) {
    const MartingaleCheck mc = terminal_digital(paths, m.cap, grid.e);
    const double bias = std::abs(mc.sampled_mean - mc.discounted_mean) + std::abs(run.solved.a0 - run.a0_coarse);
    const double residual = std::abs(mc.discounted_mean - run.solved.a0);
    add_check(r, "martingale cap=" + format_number(run.cap), residual, 0.0,
              x.martingale_sigmas * mc.standard_error + bias);
    return {{"discounted_mean", mc.discounted_mean}, {"standard_error", mc.standard_error},
            {"mass_near_cap", mc.mass_near_cap}, {"sampled_terminal_mean", mc.sampled_mean}, {"grid_bias_allowance", bias}, {"residual", residual},
            {"a0_half_grid", run.a0_coarse}};
}

double reflection_rate(const PathSet& p) {
    return static_cast<double>(p.pre_reflection_hits) / (static_cast<double>(p.n_paths) * p.n_steps);
}

nlohmann::json cap_diagnostics(const CapRun& run, const PathSet* paths) {
    nlohmann::json d = {{"cap", run.cap}, {"a0", run.solved.a0}, {"path_a0", run.path_a0},
                        {"limiter_correction", run.solved.max_limiter_correction}};
    if (paths) d["demand_reflection_rate"] = reflection_rate(*paths);
    return d;
}

Table a0_table() {
    return {"a0", {"cap", "a0", "a0_half_grid", "limiter_correction"}, {}};
}

void add_a0_row(Table& t, const CapRun& run) {
    t.add({cell(run.cap), cell(run.solved.a0), cell(run.a0_coarse), cell(run.solved.max_limiter_correction)});
}

void case_one(const ScenarioConfig& c, const Expectations& x, CaseStudyReport& r) {
    Table spreads = spread_table("case1_spreads");
    Table values = plant_value_table("case1_plant_values");
    Table a0 = a0_table();
    Table months{"case1_monthly", {"cap", "plant", "month", "value", "standard_error"}, {}};
    nlohmann::json per_cap = nlohmann::json::array();
    std::vector<std::pair<double, std::vector<SpreadQuote>>> plant_values;
    std::vector<std::pair<double, double>> a0s;
    const int low_gas = low_efficiency(c.plants, Fuel::gas);
    const int low_coal = low_efficiency(c.plants, Fuel::coal);

    // Seasonality is judged at the sweep cap nearest the configured one.
    double season_cap = c.sweeps.case1_caps.empty() ? 0.0 : c.sweeps.case1_caps.front();
    for (double cap : c.sweeps.case1_caps)
        if (std::abs(cap - c.model.cap.cap) < std::abs(season_cap - c.model.cap.cap)) season_cap = cap;

    for (double cap : c.sweeps.case1_caps) {
        const CapRun run = solve_cap(c, cap, false, r);
        const ModelParams m = with_cap(c, cap);
        const PathSet paths = simulate(m, allowance_model(c, Variant::structural, run), c.mc);
        quote_strip(paths, c, cap, run.solved.a0, spreads);
        plant_values.emplace_back(cap, add_plant_values(paths, c, cap, run.solved.a0, values));
        add_a0_row(a0, run);
        a0s.emplace_back(cap, run.solved.a0);
        nlohmann::json d = cap_diagnostics(run, &paths);
        d["martingale"] = martingale_diagnostic(paths, run, m, run.solved.surface.grid(), x, r);

        if (cap == season_cap) {
            for (int idx : {low_coal, low_gas}) {
                if (idx < 0) continue;
                const PlantSpec& p = c.plants[idx];
                const std::vector<Estimate> prof = monthly_profile(paths, p, m.cap.rate);
                for (std::size_t k = 0; k < prof.size(); ++k)
                    months.add({cell(cap), p.id, cell(static_cast<double>(k + 1)), cell(prof[k].mean),
                                cell(prof[k].standard_error)});
                const auto [lo, hi] = std::minmax_element(prof.begin(), prof.end(),
                                                          [](const Estimate& a, const Estimate& b) { return a.mean < b.mean; });
                const double se = std::hypot(lo->standard_error.value_or(0.0), hi->standard_error.value_or(0.0));
                add_check(r, "seasonality " + p.id + " peak-trough / se", se > 0 ? (hi->mean - lo->mean) / se : 0.0,
                          x.seasonality_sigmas, INFINITY);
            }
        }
        per_cap.push_back(d);
    }
    r.diagnostics["caps"] = per_cap;

    // Monotone in cap and close to the reference values.
    std::vector<std::pair<double, double>> sorted = a0s;
    std::sort(sorted.begin(), sorted.end());
    bool decreasing = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) decreasing = decreasing && sorted[i].second < sorted[i - 1].second;
    add_check(r, "a0 strictly decreasing in cap", decreasing ? 1.0 : 0.0, 1.0, 1.0);
    for (const auto& [cap, value] : a0s) {
        for (const auto& [ref_cap, ref] : x.reference_a0) {
            if (ref_cap != cap) continue;
            const double tol = std::max(x.a0_relative_tolerance * ref, x.a0_absolute_tolerance);
            add_check(r, "a0 cap=" + format_number(cap), value, ref - tol, ref + tol);
        }
        if (cap == c.model.cap.cap) add_check(r, "base a0", value, x.base_a0_min, x.base_a0_max);
    }

    if (plant_values.size() >= 2) {
        const auto by_cap = [](const auto& a, const auto& b) { return a.first < b.first; };
        const auto& strict = *std::min_element(plant_values.begin(), plant_values.end(), by_cap);
        const auto& lenient = *std::max_element(plant_values.begin(), plant_values.end(), by_cap);
        if (low_gas >= 0)
            add_check(r, "low-efficiency gas: strict minus lenient value",
                      strict.second[low_gas].value - lenient.second[low_gas].value, 0.0, INFINITY);
        if (low_coal >= 0)
            add_check(r, "low-efficiency coal: lenient minus strict value",
                      lenient.second[low_coal].value - strict.second[low_coal].value, 0.0, INFINITY);
    }
    r.tables = {std::move(a0), std::move(spreads), std::move(values), std::move(months)};
}

void case_two(const ScenarioConfig& c, CaseStudyReport& r) {
    Table values = plant_value_table("case2_plant_values");
    Table a0 = a0_table();
    const int low_gas = low_efficiency(c.plants, Fuel::gas);
    nlohmann::json per_cap = nlohmann::json::array();
    for (double cap : c.sweeps.case2_caps) {
        const CapRun run = solve_cap(c, cap, false, r, false);
        add_a0_row(a0, run);
        std::vector<double> gas_values;
        for (double s0 : c.sweeps.case2_gas_initial) {
            ScenarioConfig sc = c;
            sc.model.cap.cap = cap;
            sc.model.fuels.gas.initial = s0;
            const double path_a0 = run.solved.surface.interpolate(0.0, sc.model.demand.initial,
                                                                  sc.model.fuels.coal.initial, s0, 0.0);
            const PathSet paths = simulate(sc.model, allowance_model(sc, Variant::structural, run), sc.mc);
            const std::vector<SpreadQuote> q = add_plant_values(paths, sc, cap, path_a0, values);
            if (low_gas >= 0) gas_values.push_back(q[low_gas].value);
        }
        per_cap.push_back(cap_diagnostics(run, nullptr));
        // Directional check on the most lenient (low-A₀) cap.
        if (cap == *std::max_element(c.sweeps.case2_caps.begin(), c.sweeps.case2_caps.end()) && gas_values.size() >= 2)
            add_check(r, "low-efficiency gas value, lowest minus highest gas price at lenient cap",
                      gas_values.front() - gas_values.back(), 0.0, INFINITY);
    }
    r.diagnostics["caps"] = per_cap;
    r.tables = {std::move(a0), std::move(values)};
}

void case_three(const ScenarioConfig& c, CaseStudyReport& r) {
    const double cap = c.model.cap.cap;
    const CapRun run = solve_cap(c, cap, false, r, false);
    Table spreads = spread_table("case3_spreads");
    Table values = plant_value_table("case3_plant_values");
    std::vector<std::vector<SpreadQuote>> by_variant;
    nlohmann::json d = cap_diagnostics(run, nullptr);
    for (Variant v : {Variant::structural, Variant::gbm_allowance, Variant::gbm_emissions}) {
        const AllowanceModel am = allowance_model(c, v, run);
        if (v == Variant::gbm_emissions) {
            d["emissions_initial"] = am.emissions_initial;
            d["emissions_drift"] = am.emissions_drift;
        }
        const PathSet paths = simulate(c.model, am, c.mc);
        quote_strip(paths, c, cap, run.path_a0, spreads);
        by_variant.push_back(add_plant_values(paths, c, cap, run.path_a0, values));
    }
    for (Fuel f : kFuels) {
        const int idx = low_efficiency(c.plants, f);
        if (idx < 0) continue;
        for (std::size_t v = 1; v < by_variant.size(); ++v) {
            add_check(r, c.plants[idx].id + ": " + std::string(to_string(v == 1 ? Variant::gbm_allowance : Variant::gbm_emissions)) +
                             " minus structural value",
                      by_variant[v][idx].value - by_variant[0][idx].value, 0.0, INFINITY);
        }
    }
    r.diagnostics["caps"] = nlohmann::json::array({d});
    r.tables = {std::move(spreads), std::move(values)};
}

double total_estimate_se(const std::vector<double>& totals) {
    return mean_and_standard_error(totals).standard_error.value_or(0.0);
}

void case_four(const ScenarioConfig& c, const Expectations& x, CaseStudyReport& r) {
    Table series{"case4_profit_paths", {"t", "cap_mean", "cap_standard_error", "tax_mean", "tax_standard_error"}, {}};
    Table totals{"case4_total_profits",
                 {"cap", "a0", "cap_total", "cap_total_standard_error", "tax_total", "tax_total_standard_error"}, {}};
    nlohmann::json per_cap = nlohmann::json::array();

    auto run_cap = [&](double cap, bool record_series) {
        const CapRun run = solve_cap(c, cap, false, r, false);
        const ModelParams m = with_cap(c, cap);
        const PathSet cat = simulate(m, allowance_model(c, Variant::structural, run), c.mc);
        const PathSet tax = simulate(m, allowance_model(c, Variant::tax, run), c.mc);
        const std::vector<double> cat_totals = per_path_profit_totals(cat, m);
        const std::vector<double> tax_totals = per_path_profit_totals(tax, m);
        totals.add({cell(cap), cell(run.solved.a0), cell(mean_and_standard_error(cat_totals).mean),
                    cell(total_estimate_se(cat_totals)), cell(mean_and_standard_error(tax_totals).mean),
                    cell(total_estimate_se(tax_totals))});
        per_cap.push_back(cap_diagnostics(run, &cat));
        if (!record_series) return;

        const ProfitSeries a = sector_profits(cat, m);
        const ProfitSeries b = sector_profits(tax, m);
        double early = 0.0, late = 0.0;
        int n_early = 0, n_late = 0;
        const double late_start = m.cap.horizon - x.late_window_days / 365.0;
        for (std::size_t k = 0; k < a.time.size(); ++k) {
            series.add({cell(a.time[k]), cell(a.mean[k]), cell(a.standard_error[k]), cell(b.mean[k]),
                        cell(b.standard_error[k])});
            if (a.time[k] > 0.0 && a.time[k] <= x.early_window_end) {
                early += b.mean[k] - a.mean[k];
                ++n_early;
            }
            if (a.time[k] > late_start) {
                late += a.mean[k] - b.mean[k];
                ++n_late;
            }
        }
        const double se0 = std::hypot(a.standard_error[0], b.standard_error[0]);
        add_check(r, "t=0 profit difference", std::abs(a.mean[0] - b.mean[0]), 0.0, x.profit_equality_sigmas * se0);
        add_check(r, "early window: tax minus cap profit", n_early ? early / n_early : 0.0, 0.0, INFINITY);
        add_check(r, "late window: cap minus tax profit", n_late ? late / n_late : 0.0, 0.0, INFINITY);
    };

    run_cap(c.model.cap.cap, true);
    for (double cap : c.sweeps.case4_caps) run_cap(cap, false);
    r.diagnostics["caps"] = per_cap;
    r.tables = {std::move(series), std::move(totals)};
}

CaseStudyReport guarded(std::string id, const std::function<void(CaseStudyReport&)>& body) {
    CaseStudyReport r;
    r.id = std::move(id);
    try {
        body(r);
    } catch (const ConfigError& e) {
        r.failure = e.what();
        r.exit_code = 2;
    } catch (const NumericalError& e) {
        r.failure = e.what();
        r.exit_code = 3;
    } catch (const DomainError& e) {
        r.failure = e.what();
        r.exit_code = 3;
    } catch (const std::exception& e) {
        r.failure = e.what();
        r.exit_code = 1;
    }
    return r;
}

}  // namespace

std::vector<double> per_path_profit_totals(const PathSet& paths, const ModelParams& model) {
    std::vector<double> out(static_cast<std::size_t>(paths.n_paths), 0.0);
    for (std::size_t r = 0; r < paths.records(); ++r) {
        for (std::size_t p = 0; p < out.size(); ++p) {
            const std::size_t q = paths.at(r, p);
            out[p] += sector_profit_rate(model.stack, paths.price[q], {paths.allowance[q], paths.coal[q], paths.gas[q]});
        }
    }
    return out;
}

std::vector<Estimate> monthly_profile(const PathSet& paths, const PlantSpec& plant, double rate) {
    std::vector<std::vector<double>> sums(12, std::vector<double>(static_cast<std::size_t>(paths.n_paths), 0.0));
    std::vector<int> counts(12, 0);
    const double horizon = paths.n_steps * paths.dt;
    for (double tau : maturity_strip(paths)) {
        const int month = std::clamp(static_cast<int>(std::ceil(tau / horizon * 12.0 - 1e-9)) - 1, 0, 11);
        const std::vector<double> v = discounted_payoffs(paths, plant, rate, tau);
        for (std::size_t p = 0; p < v.size(); ++p) sums[month][p] += v[p];
        ++counts[month];
    }
    std::vector<Estimate> out(12);
    for (int m = 0; m < 12; ++m) {
        if (counts[m] == 0) continue;
        for (double& s : sums[m]) s /= counts[m];
        out[m] = mean_and_standard_error(sums[m]);
    }
    return out;
}

CaseStudyReport run_solve(const ScenarioConfig& c, const std::optional<std::filesystem::path>& surface_path) {
    return guarded("solve", [&](CaseStudyReport& r) {
        validate_config(c);
        const CapRun run = solve_cap(c, c.model.cap.cap, !surface_path.has_value(), r, false);
        if (surface_path) write_surface(run.solved.surface, *surface_path);
        Table t = a0_table();
        add_a0_row(t, run);
        r.tables.push_back(std::move(t));
        r.diagnostics["caps"] = nlohmann::json::array({cap_diagnostics(run, nullptr)});
    });
}

CaseStudyReport run_price(const ScenarioConfig& c, const Expectations& x) {
    return guarded("price", [&](CaseStudyReport& r) {
        validate_config(c);
        const bool structural = c.variant == Variant::structural;
        const CapRun run = solve_cap(c, c.model.cap.cap, !structural, r, structural);
        const PathSet paths = simulate(c.model, allowance_model(c, c.variant, run), c.mc);
        Table spreads = spread_table("spreads");
        Table values = plant_value_table("plant_values");
        quote_strip(paths, c, c.model.cap.cap, run.path_a0, spreads);
        add_plant_values(paths, c, c.model.cap.cap, run.path_a0, values);
        Table a0 = a0_table();
        add_a0_row(a0, run);
        nlohmann::json d = cap_diagnostics(run, &paths);
        if (structural) d["martingale"] = martingale_diagnostic(paths, run, c.model, run.solved.surface.grid(), x, r);
        r.diagnostics["caps"] = nlohmann::json::array({d});
        r.tables = {std::move(a0), std::move(spreads), std::move(values)};
    });
}

CaseStudyReport run_case_study(const std::string& id, const ScenarioConfig& c, const Expectations& x) {
    return guarded("case-study-" + id, [&](CaseStudyReport& r) {
        validate_config(c);
        if (id == "I") case_one(c, x, r);
        else if (id == "II") case_two(c, r);
        else if (id == "III") case_three(c, r);
        else if (id == "IV") case_four(c, x, r);
        else throw ConfigError("unknown case study '" + id + "' (expected I|II|III|IV)");
    });
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
    os << text;
    if (!os) throw std::runtime_error("write failed " + path.string() + ": " + std::strerror(errno));
}

std::string csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.columns);
    for (const auto& row : t.rows) line(row);
    return out;
}

}  // namespace

void emit_outputs(const CaseStudyReport& report, const ScenarioConfig& c, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json files = nlohmann::json::array();
    for (const Table& t : report.tables) {
        write_file(dir / (t.name + ".csv"), csv(t));
        files.push_back(t.name + ".csv");
    }
    Table checks{"checks", {"check", "value", "lower", "upper", "pass"}, {}};
    nlohmann::json check_json = nlohmann::json::array();
    for (const Check& k : report.checks) {
        checks.add({k.name, cell(k.value), cell(k.lower), cell(k.upper), k.pass ? "PASS" : "FAIL"});
        check_json.push_back({{"name", k.name}, {"value", k.value}, {"lower", cell(k.lower)}, {"upper", cell(k.upper)},
                              {"pass", k.pass}});
    }
    write_file(dir / "checks.csv", csv(checks));
    files.push_back("checks.csv");

    nlohmann::json surfaces = nlohmann::json::array();
    for (const auto& [label, sum] : report.surfaces) surfaces.push_back({{"label", label}, {"checksum_fnv1a64", sum}});
    std::string grid_hex = "invalid";
    try {
        grid_hex = checksum_hex(grid_hash(c));
    } catch (const std::exception&) {
        // failed validation runs still get a manifest
    }
    nlohmann::json manifest = {
        {"report", report.id},
        {"status", report.failure ? "failed" : "ok"},
        {"config", to_json(c)},
        {"config_hash", checksum_hex(config_hash(c))},
        {"grid_hash", grid_hex},
        {"seed", c.mc.seed},
        {"surfaces", surfaces},
        {"diagnostics", report.diagnostics},
        {"checks", check_json},
        {"files", files},
    };
    if (report.failure) manifest["error"] = *report.failure;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace cleanspread
