#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cleanspread/case_studies.hpp"
#include "cleanspread/dynamics.hpp"
#include "cleanspread/errors.hpp"
#include "cleanspread/surface_io.hpp"

using namespace cleanspread;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    double grid_scale = 1.0;
    std::string variant;
    int threads = 0;
    std::vector<std::string> sets;
    std::string expectations;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "scenario JSON (defaults apply when omitted)");
    app->add_option("--seed", c.seed, "Monte Carlo seed");
    app->add_option("--out", c.out, "output directory (default: config output_dir)");
    app->add_option("--grid-scale", c.grid_scale, "refine (>1) or coarsen (<1) every mesh axis and the time step");
    app->add_option("--variant", c.variant, "structural | gbm_allowance | gbm_emissions | tax");
    app->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)");
    app->add_option("--set", c.sets, "override a config key, e.g. --set cap.cap=1.6e8")->take_all();
    app->add_option("--expectations", c.expectations, "tolerances for report checks");
}

ScenarioConfig build_config(const Common& c) {
    nlohmann::json doc = nlohmann::json::object();
    if (!c.config.empty()) {
        std::ifstream is(c.config);
        if (!is) throw ConfigError("cannot open config " + c.config);
        doc = nlohmann::json::parse(is, nullptr, false);
        if (doc.is_discarded()) throw ConfigError(c.config + ": not valid JSON");
    }
    for (const std::string& s : c.sets) apply_override(doc, s);
    ScenarioConfig cfg = config_from_json(doc);
    if (c.seed) cfg.mc.seed = *c.seed;
    if (!c.variant.empty()) cfg.variant = variant_from_string(c.variant);
    if (c.grid_scale != 1.0) cfg.grid = cfg.grid.scaled(c.grid_scale);
    if (!c.out.empty()) cfg.output_dir = c.out;
    return cfg;
}

Expectations expectations_for(const Common& c) {
    if (!c.expectations.empty()) return load_expectations(c.expectations);
    if (fs::exists("config/expectations.json")) return load_expectations("config/expectations.json");
    return {};
}

int finish(const CaseStudyReport& r, const ScenarioConfig& cfg) {
    emit_outputs(r, cfg, cfg.output_dir);
    for (const Check& k : r.checks) std::printf("%s %s = %s\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), format_number(k.value).c_str());
    if (r.failure) {
        std::fprintf(stderr, "error: %s\n", r.failure->c_str());
        return r.exit_code;
    }
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "manifest.json").string().c_str());
    return 0;
}

int run_validate(const ScenarioConfig& cfg) {
    validate_config(cfg);
    const Grid4 g = Grid4::build(cfg.grid, cfg.model);
    std::printf("config ok\n");
    std::printf("  market capacity      %s MWh\n", format_number(cfg.model.capacity()).c_str());
    std::printf("  max emissions        %s tCO2\n", format_number(cfg.model.max_emissions()).c_str());
    std::printf("  jacobi margin        %s MWh\n",
                format_number(jacobi_containment_margin(cfg.model.demand, cfg.model.capacity(), cfg.model.cap.horizon)).c_str());
    std::printf("  mesh nodes           %zu x %d steps\n", g.size(), g.n_t);
    std::printf("  config hash          %s\n", checksum_hex(config_hash(cfg)).c_str());
    std::printf("  grid hash            %s\n", checksum_hex(grid_hash(cfg)).c_str());
    return 0;
}

int run_export(const std::string& surface, const fs::path& out, double t) {
    const AllowanceSurface s = read_surface(surface);
    const Grid4& g = s.grid();
    std::size_t slot = 0;
    for (std::size_t k = 1; k < s.slice_count(); ++k)
        if (std::abs(g.time(s.slice_steps()[k]) - t) < std::abs(g.time(s.slice_steps()[slot]) - t)) slot = k;
    fs::create_directories(out);
    const fs::path file = out / "surface_slice.csv";
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << "t,demand,coal,gas,emissions,allowance\n";
    const std::string ts = format_number(g.time(s.slice_steps()[slot]));
    for (std::size_t m = 0; m < g.d.size(); ++m)
        for (std::size_t i = 0; i < g.c.size(); ++i)
            for (std::size_t j = 0; j < g.g.size(); ++j)
                for (std::size_t n = 0; n < g.e.size(); ++n)
                    os << ts << ',' << format_number(g.d.nodes[m]) << ',' << format_number(g.c.nodes[i]) << ','
                       << format_number(g.g.nodes[j]) << ',' << format_number(g.e.nodes[n]) << ','
                       << format_number(s.value(slot, g.index(m, i, j, n))) << '\n';
    if (!os) throw std::runtime_error("write failed " + file.string());
    std::printf("wrote %s (t = %s)\n", file.string().c_str(), ts.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cleanspread: structural electricity/allowance model, PDE solver and spread pricer"};
    app.require_subcommand(1);
    Common common;
    std::string case_id, surface_file;
    double slice_time = 0.0;

    auto* solve_cmd = app.add_subcommand("solve", "solve the allowance surface and report A0");
    auto* price_cmd = app.add_subcommand("price", "simulate and price clean spreads for the plant list");
    auto* case_cmd = app.add_subcommand("case-study", "run case study I, II, III or IV");
    case_cmd->add_option("id", case_id, "I | II | III | IV")->required();
    auto* validate_cmd = app.add_subcommand("validate", "check a configuration without computing");
    auto* export_cmd = app.add_subcommand("export-surface", "write one slice of a surface container as CSV");
    export_cmd->add_option("--surface", surface_file, "surface container written by solve")->required();
    export_cmd->add_option("--time", slice_time, "slice time in years (nearest retained slice)");
    for (auto* cmd : {solve_cmd, price_cmd, case_cmd, validate_cmd, export_cmd}) add_common(cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (common.threads > 0) omp_set_num_threads(common.threads);
        if (*export_cmd) return run_export(surface_file, common.out.empty() ? fs::path("out") : fs::path(common.out), slice_time);
        const ScenarioConfig cfg = build_config(common);
        if (*validate_cmd) return run_validate(cfg);
        if (*solve_cmd) {
            fs::create_directories(cfg.output_dir);
            const CaseStudyReport r = run_solve(cfg, fs::path(cfg.output_dir) / "surface.bin");
            if (!r.failure) std::printf("A0 = %s\n", r.tables.front().rows.front()[1].c_str());
            return finish(r, cfg);
        }
        if (*price_cmd) return finish(run_price(cfg, expectations_for(common)), cfg);
        if (*case_cmd) return finish(run_case_study(case_id, cfg, expectations_for(common)), cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
