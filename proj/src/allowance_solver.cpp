#include "cleanspread/allowance_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "cleanspread/errors.hpp"
#include "imex_detail.hpp"

namespace cleanspread {

AllowanceSurface::AllowanceSurface(Grid4 grid, CapParams cap, Precision precision, std::vector<int> slice_steps)
    : grid_(std::move(grid)), cap_(cap), precision_(precision), slice_steps_(std::move(slice_steps)) {
    if (slice_steps_.empty() || !std::is_sorted(slice_steps_.begin(), slice_steps_.end())) {
        throw std::invalid_argument("AllowanceSurface: slice steps must be non-empty and ascending");
    }
    const std::size_t total = grid_.size() * slice_steps_.size();
    if (precision_ == Precision::f32) {
        f32_.assign(total, 0.0f);
    } else {
        f64_.assign(total, 0.0);
    }
}

int AllowanceSurface::slot_of_step(int k) const {
    const auto it = std::lower_bound(slice_steps_.begin(), slice_steps_.end(), k);
    return it != slice_steps_.end() && *it == k ? static_cast<int>(it - slice_steps_.begin()) : -1;
}

void AllowanceSurface::store(std::size_t slot, std::span<const double> slice) {
    const std::size_t n = grid_.size();
    if (precision_ == Precision::f32) {
        std::transform(slice.begin(), slice.end(), f32_.begin() + slot * n, [](double v) { return static_cast<float>(v); });
    } else {
        std::copy(slice.begin(), slice.end(), f64_.begin() + slot * n);
    }
}

namespace {

template <typename Value>
double multilinear(const Grid4& g, Value&& value, double d, double coal, double gas, double e) {
    const auto [m, wd] = g.d.locate(d);
    const auto [i, wc] = g.c.locate(coal);
    const auto [j, wg] = g.g.locate(gas);
    const auto [n, we] = g.e.locate(e);
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const double fa = a ? wd : 1.0 - wd;
        if (fa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const double fb = fa * (b ? wc : 1.0 - wc);
            if (fb == 0.0) continue;
            for (int c = 0; c < 2; ++c) {
                const double fc = fb * (c ? wg : 1.0 - wg);
                if (fc == 0.0) continue;
                const std::size_t base = g.index(m + a, i + b, j + c, n);
                if (we != 1.0) acc += fc * (1.0 - we) * value(base);
                if (we != 0.0) acc += fc * we * value(base + 1);
            }
        }
    }
    return acc;
}

}  // namespace

double interpolate_slice(const Grid4& grid, std::span<const double> slice, double d, double coal, double gas,
                         double e) {
    return multilinear(grid, [&](std::size_t q) { return slice[q]; }, d, coal, gas, e);
}

double AllowanceSurface::interpolate_slot(std::size_t slot, double d, double coal, double gas, double e) const {
    const std::size_t offset = slot * grid_.size();
    if (precision_ == Precision::f32) {
        return multilinear(grid_, [&](std::size_t q) { return static_cast<double>(f32_[offset + q]); }, d, coal, gas, e);
    }
    return multilinear(grid_, [&](std::size_t q) { return f64_[offset + q]; }, d, coal, gas, e);
}

double AllowanceSurface::interpolate(double t, double d, double coal, double gas, double e) const {
    t = std::clamp(t, 0.0, cap_.horizon);
    const double bound = cap_.upper_bound(t);
    if (e >= grid_.e.back()) return std::clamp(emax_value(t), 0.0, bound);

    const double pos = t / grid_.dt;
    double value;
    if (slice_steps_.size() == 1 || pos <= slice_steps_.front()) {
        value = interpolate_slot(0, d, coal, gas, e);
    } else if (pos >= slice_steps_.back()) {
        value = interpolate_slot(slice_steps_.size() - 1, d, coal, gas, e);
    } else {
        const auto it = std::upper_bound(slice_steps_.begin(), slice_steps_.end(), pos);
        const auto hi = static_cast<std::size_t>(it - slice_steps_.begin());
        const std::size_t lo = hi - 1;
        const double w = (pos - slice_steps_[lo]) / (slice_steps_[hi] - slice_steps_[lo]);
        value = interpolate_slot(lo, d, coal, gas, e);
        // Steps that land on a retained slice up to rounding skip the second lookup.
        if (w > 1e-12) value = (1.0 - w) * value + w * interpolate_slot(hi, d, coal, gas, e);
    }
    return std::clamp(value, 0.0, bound);
}

std::uint64_t AllowanceSurface::checksum() const {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t k = 0; k < n; ++k) {
            h ^= b[k];
            h *= 1099511628211ULL;
        }
    };
    if (precision_ == Precision::f32) {
        mix(f32_.data(), f32_.size() * sizeof(float));
    } else {
        mix(f64_.data(), f64_.size() * sizeof(double));
    }
    return h;
}

bool AllowanceSurface::operator==(const AllowanceSurface& o) const {
    auto same_axis = [](const Axis& a, const Axis& b) { return a.nodes == b.nodes; };
    return same_axis(grid_.d, o.grid_.d) && same_axis(grid_.c, o.grid_.c) && same_axis(grid_.g, o.grid_.g) &&
           same_axis(grid_.e, o.grid_.e) && grid_.dt == o.grid_.dt && grid_.n_t == o.grid_.n_t && cap_ == o.cap_ &&
           precision_ == o.precision_ && slice_steps_ == o.slice_steps_ && f32_.size() == o.f32_.size() &&
           f64_.size() == o.f64_.size() &&
           std::memcmp(f32_.data(), o.f32_.data(), f32_.size() * sizeof(float)) == 0 &&
           std::memcmp(f64_.data(), o.f64_.data(), f64_.size() * sizeof(double)) == 0;
}

SolveResult solve(const ModelParams& model, const GridSpec& spec, const SolveOptions& options) {
    model.stack.validate();
    if (!(model.cap.horizon > 0)) throw ConfigError("cap.horizon must be > 0");
    const Grid4 grid = Grid4::build(spec, model);
    check_stability(grid, model, spec.mixed_term);

    std::vector<int> steps;
    if (options.a0_only || spec.retain_stride == 0) {
        steps = {0};
    } else {
        for (int k = 0; k <= grid.n_t; k += spec.retain_stride) steps.push_back(k);
        if (steps.back() != grid.n_t) steps.push_back(grid.n_t);
    }
    const Precision precision = options.a0_only ? Precision::f64 : spec.precision;

    SolveResult result{AllowanceSurface(grid, model.cap, precision, steps), 0.0, 0.0};
    std::vector<double> cur(grid.size());
    std::vector<double> nxt(grid.size());
    terminal_slice(grid, model.cap, cur);
    if (const int slot = result.surface.slot_of_step(grid.n_t); slot >= 0) result.surface.store(slot, cur);

    for (int k = grid.n_t - 1; k >= 0; --k) {
        const StepDiagnostics diag = options.kernel == Kernel::reference
                                         ? imex_step_reference(grid, model, spec.mixed_term, k, cur, nxt)
                                         : imex_step(grid, model, spec.mixed_term, k, cur, nxt);
        result.max_limiter_correction = std::max(result.max_limiter_correction, diag.limiter_correction);
        std::swap(cur, nxt);
        if (!std::all_of(cur.begin(), cur.end(), [](double v) { return std::isfinite(v); })) {
            throw NumericalError("non-finite allowance value in time slice " + std::to_string(k));
        }
        if (const int slot = result.surface.slot_of_step(k); slot >= 0) result.surface.store(slot, cur);
    }

    const double a0 = interpolate_slice(grid, cur, model.demand.initial, model.fuels.coal.initial,
                                        model.fuels.gas.initial, 0.0);
    result.a0 = std::clamp(a0, 0.0, model.cap.upper_bound(0.0));
    return result;
}

const FicheraFace& FicheraReport::face(const std::string& name) const {
    for (const auto& f : faces)
        if (f.name == name) return f;
    throw std::out_of_range("no Fichera face named " + name);
}

bool FicheraReport::condition_only_at_emax() const {
    for (const auto& f : faces) {
        if (f.inflow != (f.name == "e=emax")) return false;
    }
    return true;
}

FicheraReport fichera_diagnostic(const ModelParams& model, const Grid4& grid) {
    const DemandParams& dem = model.demand;
    const double cap = model.capacity();
    const FuelProcess& pc = model.fuels.coal;
    const FuelProcess& pg = model.fuels.gas;
    const double rho = model.fuels.correlation;

    // Diffusion matrix a = ½ σσᵀ; f = Σ_i (b_i − Σ_j ∂_j a_ij) n_i on faces where a n·n = 0.
    auto half_dvar_demand = [&](double d) { return dem.mean_reversion * dem.vol_scale * (cap - 2.0 * d); };

    std::vector<double> times;
    const int stride = std::max(1, grid.n_t / 64);
    for (int k = 0; k <= grid.n_t; k += stride) times.push_back(grid.time(k));
    times.push_back(model.cap.horizon);

    auto make = [](std::string name, bool imposed) {
        return FicheraFace{std::move(name), std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(), false, imposed};
    };
    FicheraFace d0 = make("d=0", false), dmax = make("d=xmax", false);
    for (double t : times) {
        const double f0 = -dem.mean_reversion * (0.0 - seasonal_mean(dem, t)) - half_dvar_demand(0.0);
        const double f1 = -(-dem.mean_reversion * (cap - seasonal_mean(dem, t)) - half_dvar_demand(cap));
        d0.min_f = std::min(d0.min_f, f0);
        d0.max_f = std::max(d0.max_f, f0);
        dmax.min_f = std::min(dmax.min_f, f1);
        dmax.max_f = std::max(dmax.max_f, f1);
    }

    // s_c = 0: b_c → 0, ∂_c a_cc = σ̂_c² s_c → 0, ∂_g a_cg = ½ ρ σ̂_c σ̂_g s_c → 0.
    auto fuel_face = [&](std::string name, const FuelProcess& p, double s) {
        FicheraFace face = make(std::move(name), false);
        face.min_f = face.max_f = detail::fuel_drift_at(p, s) - p.vol * p.vol * s - 0.5 * rho * pc.vol * pg.vol * s;
        return face;
    };
    const FicheraFace c0 = fuel_face("coal=0", pc, grid.c.front());
    const FicheraFace g0 = fuel_face("gas=0", pg, grid.g.front());

    FicheraFace e0 = make("e=0", false), emax = make("e=emax", true);
    const double pen = model.cap.penalty;
    for (double d : grid.d.nodes)
        for (double sc : grid.c.nodes)
            for (double sg : grid.g.nodes)
                for (double a : {0.0, 0.5 * pen, pen}) {
                    const double mu = model.hours_per_year * detail::node_emissions_rate(model, d, a, sc, sg);
                    e0.min_f = std::min(e0.min_f, mu);
                    e0.max_f = std::max(e0.max_f, mu);
                    emax.min_f = std::min(emax.min_f, -mu);
                    emax.max_f = std::max(emax.max_f, -mu);
                }

    FicheraReport report{{d0, dmax, c0, g0, e0, emax}};
    for (auto& f : report.faces) {
        const double scale = 1.0 + std::max(std::abs(f.min_f), std::abs(f.max_f));
        f.inflow = f.min_f < -1e-12 * scale;
    }
    return report;
}

}  // namespace cleanspread
