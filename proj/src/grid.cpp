#include "cleanspread/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cleanspread/errors.hpp"

namespace cleanspread {

GridSpec GridSpec::scaled(double factor) const {
    if (!(factor > 0)) throw ConfigError("grid scale must be > 0");
    auto refine = [factor](int n) { return std::max(2, static_cast<int>(std::lround((n - 1) * factor)) + 1); };
    GridSpec out = *this;
    out.n_d = refine(n_d);
    out.n_c = refine(n_c);
    out.n_g = refine(n_g);
    out.n_e = refine(n_e);
    out.n_t = std::max(1, static_cast<int>(std::lround(n_t * factor)));
    return out;
}

Axis Axis::uniform(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw ConfigError("axis needs at least two nodes and hi > lo");
    Axis a;
    a.nodes.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) a.nodes[k] = lo + (hi - lo) * k / (n - 1);
    a.nodes.back() = hi;  // exact endpoint
    return a;
}

std::pair<std::size_t, double> Axis::locate(double x) const {
    const std::size_t n = nodes.size();
    if (x <= nodes.front()) return {0, 0.0};
    if (x >= nodes.back()) return {n - 2, 1.0};
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const auto hi = static_cast<std::size_t>(it - nodes.begin());
    const std::size_t lo = hi - 1;
    return {lo, (x - nodes[lo]) / (nodes[hi] - nodes[lo])};
}

Grid4 Grid4::build(const GridSpec& spec, const ModelParams& model) {
    if (spec.n_t < 1) throw ConfigError("grid.n_t must be >= 1");
    if (!(spec.coal_max > 0 && spec.gas_max > 0)) throw ConfigError("grid fuel extents must be > 0");
    if (spec.retain_stride < 0) throw ConfigError("grid.retain_stride must be >= 0");
    Grid4 g;
    g.d = Axis::uniform(0.0, model.capacity(), spec.n_d);
    g.c = Axis::uniform(0.0, spec.coal_max, spec.n_c);
    g.g = Axis::uniform(0.0, spec.gas_max, spec.n_g);
    g.e = Axis::uniform(0.0, model.max_emissions(), spec.n_e);
    g.n_t = spec.n_t;
    g.dt = model.cap.horizon / spec.n_t;
    return g;
}

namespace {

double min_spacing(const Axis& a) {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < a.size(); ++k) h = std::min(h, a.nodes[k] - a.nodes[k - 1]);
    return h;
}

}  // namespace

void check_stability(const Grid4& grid, const ModelParams& model, bool mixed_term) {
    const double speed = model.hours_per_year * max_emissions_rate(model.stack);
    const double advection_bound = 0.9 * min_spacing(grid.e) / speed;
    if (grid.dt > advection_bound) {
        throw ConfigError("time step " + std::to_string(grid.dt) + " exceeds emissions advection bound " +
                          std::to_string(advection_bound) + " (0.9 de / (hours * mu_e max))");
    }
    const double rho = model.fuels.correlation;
    if (mixed_term && rho != 0.0) {
        const double sc = model.fuels.coal.vol * grid.c.back();
        const double sg = model.fuels.gas.vol * grid.g.back();
        const double cross_bound = min_spacing(grid.c) * min_spacing(grid.g) / (2.0 * std::abs(rho) * sc * sg);
        if (grid.dt > cross_bound) {
            throw ConfigError("time step " + std::to_string(grid.dt) + " exceeds explicit cross-term bound " +
                              std::to_string(cross_bound) + " (ds_c ds_g / (2 |rho| sigma_c sigma_g))");
        }
    }
}

}  // namespace cleanspread
