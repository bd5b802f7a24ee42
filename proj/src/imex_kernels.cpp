#include <algorithm>
#include <cmath>
#include <vector>

#include "cleanspread/allowance_solver.hpp"
#include "imex_detail.hpp"

namespace cleanspread {

using detail::Tridiagonal;

namespace {

// Explicit part at one node: upwind emissions advection (from e_{n+1} toward e_n) plus
// the central cross derivative in (s_c, s_g).
inline double explicit_update(const Grid4& grid, const ModelParams& model, bool mixed_term,
                              std::span<const double> next, std::size_t m, std::size_t i, std::size_t j,
                              std::size_t n, bool skip_flat) {
    const std::size_t idx = grid.index(m, i, j, n);
    const double w = next[idx];
    const double diff = next[idx + 1] - w;
    double value = w;
    if (!(skip_flat && diff == 0.0)) {
        const double mu = detail::node_emissions_rate(model, grid.d.nodes[m], w, grid.c.nodes[i], grid.g.nodes[j]);
        const double de = grid.e.nodes[n + 1] - grid.e.nodes[n];
        value += grid.dt * model.hours_per_year * mu / de * diff;
    }
    if (mixed_term && i > 0 && i + 1 < grid.c.size() && j > 0 && j + 1 < grid.g.size()) {
        const double sc = grid.c.nodes[i];
        const double sg = grid.g.nodes[j];
        const double hc = grid.c.nodes[i + 1] - grid.c.nodes[i - 1];
        const double hg = grid.g.nodes[j + 1] - grid.g.nodes[j - 1];
        const double mixed = next[grid.index(m, i + 1, j + 1, n)] - next[grid.index(m, i + 1, j - 1, n)] -
                             next[grid.index(m, i - 1, j + 1, n)] + next[grid.index(m, i - 1, j - 1, n)];
        value += grid.dt * detail::cross_coefficient(model, sc, sg) * mixed / (hc * hg);
    }
    return value;
}

void solve_line(const Tridiagonal& t, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> cp(n);
    double piv = t.diag[0];
    cp[0] = t.super[0] / piv;
    rhs[0] = rhs[0] / piv;
    for (std::size_t m = 1; m < n; ++m) {
        piv = t.diag[m] - t.sub[m] * cp[m - 1];
        cp[m] = t.super[m] / piv;
        rhs[m] = (rhs[m] - t.sub[m] * rhs[m - 1]) / piv;
    }
    for (std::size_t m = n - 1; m-- > 0;) rhs[m] = rhs[m] - cp[m] * rhs[m + 1];
}

// Boundary data, discounting and (with the mixed term) the limiter; identical in both kernels.
StepDiagnostics finish_step(const Grid4& grid, const ModelParams& model, bool mixed_term, int k,
                            std::span<double> out, bool parallel) {
    const double t = grid.time(k);
    const double disc = std::exp(-model.cap.rate * grid.dt);
    const double face = terminal_condition(model.cap, grid.e.back()) * model.cap.discount(t);
    const double bound = model.cap.upper_bound(t);
    const std::size_t ne = grid.e.size();
    const auto lines = static_cast<long>(grid.size() / ne);
    double correction = 0.0;
#pragma omp parallel for schedule(static) reduction(max : correction) if (parallel)
    for (long l = 0; l < lines; ++l) {
        double* line = out.data() + static_cast<std::size_t>(l) * ne;
        for (std::size_t n = 0; n + 1 < ne; ++n) line[n] *= disc;
        line[ne - 1] = face;
        if (mixed_term) correction = std::max(correction, detail::limit_line(line, ne, bound));
    }
    return {correction};
}

}  // namespace

void terminal_slice(const Grid4& grid, const CapParams& cap, std::span<double> slice) {
    const std::size_t ne = grid.e.size();
    for (std::size_t q = 0; q < grid.size(); ++q) slice[q] = terminal_condition(cap, grid.e.nodes[q % ne]);
}

StepDiagnostics imex_step_reference(const Grid4& grid, const ModelParams& model, bool mixed_term, int k,
                                    std::span<const double> next, std::span<double> out) {
    const std::size_t nd = grid.d.size(), nc = grid.c.size(), ng = grid.g.size(), ne = grid.e.size();
    const double t = grid.time(k);

    for (std::size_t m = 0; m < nd; ++m)
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t j = 0; j < ng; ++j) {
                for (std::size_t n = 0; n + 1 < ne; ++n)
                    out[grid.index(m, i, j, n)] = explicit_update(grid, model, mixed_term, next, m, i, j, n, false);
                out[grid.index(m, i, j, ne - 1)] = next[grid.index(m, i, j, ne - 1)];
            }

    std::vector<double> line;
    // Demand lines.
    const Tridiagonal opd = detail::demand_operator(grid, model, t);
    line.resize(nd);
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = 0; j < ng; ++j)
            for (std::size_t n = 0; n < ne; ++n) {
                for (std::size_t m = 0; m < nd; ++m) line[m] = out[grid.index(m, i, j, n)];
                solve_line(opd, line);
                for (std::size_t m = 0; m < nd; ++m) out[grid.index(m, i, j, n)] = line[m];
            }
    // Coal lines.
    const Tridiagonal opc = detail::fuel_operator(grid.c, model.fuels.coal, grid.dt);
    line.resize(nc);
    for (std::size_t m = 0; m < nd; ++m)
        for (std::size_t j = 0; j < ng; ++j)
            for (std::size_t n = 0; n < ne; ++n) {
                for (std::size_t i = 0; i < nc; ++i)
                    line[i] = detail::neumann_rhs(i, nc, out[grid.index(m, i, j, n)]);
                solve_line(opc, line);
                for (std::size_t i = 0; i < nc; ++i) out[grid.index(m, i, j, n)] = line[i];
            }
    // Gas lines.
    const Tridiagonal opg = detail::fuel_operator(grid.g, model.fuels.gas, grid.dt);
    line.resize(ng);
    for (std::size_t m = 0; m < nd; ++m)
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t n = 0; n < ne; ++n) {
                for (std::size_t j = 0; j < ng; ++j)
                    line[j] = detail::neumann_rhs(j, ng, out[grid.index(m, i, j, n)]);
                solve_line(opg, line);
                for (std::size_t j = 0; j < ng; ++j) out[grid.index(m, i, j, n)] = line[j];
            }

    return finish_step(grid, model, mixed_term, k, out, false);
}

namespace {

// Solves all lines along an axis at once. Lines are laid out as `outer` groups, each with
// `len` rows of `inner` contiguous unknowns (row stride `inner`).
void sweep_axis(const detail::ThomasFactors& f, double* data, std::size_t outer, std::size_t len, std::size_t inner,
                bool neumann_last) {
    const auto groups = static_cast<long>(outer);
#pragma omp parallel for schedule(static)
    for (long o = 0; o < groups; ++o) {
        double* base = data + static_cast<std::size_t>(o) * len * inner;
        if (neumann_last) std::fill(base + (len - 1) * inner, base + len * inner, 0.0);
        {
            const double piv = f.pivot[0];
            for (std::size_t q = 0; q < inner; ++q) base[q] = base[q] / piv;
        }
        for (std::size_t m = 1; m < len; ++m) {
            double* row = base + m * inner;
            const double* prev = row - inner;
            const double a = f.sub[m];
            const double piv = f.pivot[m];
            for (std::size_t q = 0; q < inner; ++q) row[q] = (row[q] - a * prev[q]) / piv;
        }
        for (std::size_t m = len - 1; m-- > 0;) {
            double* row = base + m * inner;
            const double* nxt = row + inner;
            const double c = f.cprime[m];
            for (std::size_t q = 0; q < inner; ++q) row[q] = row[q] - c * nxt[q];
        }
    }
}

// Demand axis: a single group with a very wide row; split the row into column blocks.
void sweep_demand(const detail::ThomasFactors& f, double* data, std::size_t len, std::size_t inner) {
    constexpr std::size_t block = 512;
    const auto blocks = static_cast<long>((inner + block - 1) / block);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < blocks; ++b) {
        const std::size_t q0 = static_cast<std::size_t>(b) * block;
        const std::size_t q1 = std::min(inner, q0 + block);
        for (std::size_t q = q0; q < q1; ++q) data[q] = data[q] / f.pivot[0];
        for (std::size_t m = 1; m < len; ++m) {
            double* row = data + m * inner;
            const double* prev = row - inner;
            const double a = f.sub[m];
            const double piv = f.pivot[m];
            for (std::size_t q = q0; q < q1; ++q) row[q] = (row[q] - a * prev[q]) / piv;
        }
        for (std::size_t m = len - 1; m-- > 0;) {
            double* row = data + m * inner;
            const double* nxt = row + inner;
            const double c = f.cprime[m];
            for (std::size_t q = q0; q < q1; ++q) row[q] = row[q] - c * nxt[q];
        }
    }
}

}  // namespace

StepDiagnostics imex_step(const Grid4& grid, const ModelParams& model, bool mixed_term, int k,
                          std::span<const double> next, std::span<double> out) {
    const std::size_t nd = grid.d.size(), nc = grid.c.size(), ng = grid.g.size(), ne = grid.e.size();
    const double t = grid.time(k);

    const auto lines = static_cast<long>(nd * nc * ng);
#pragma omp parallel for schedule(dynamic, 16)
    for (long l = 0; l < lines; ++l) {
        const auto j = static_cast<std::size_t>(l) % ng;
        const auto i = (static_cast<std::size_t>(l) / ng) % nc;
        const auto m = static_cast<std::size_t>(l) / (ng * nc);
        for (std::size_t n = 0; n + 1 < ne; ++n)
            out[grid.index(m, i, j, n)] = explicit_update(grid, model, mixed_term, next, m, i, j, n, true);
        out[grid.index(m, i, j, ne - 1)] = next[grid.index(m, i, j, ne - 1)];
    }

    sweep_demand(detail::factor(detail::demand_operator(grid, model, t)), out.data(), nd, nc * ng * ne);
    sweep_axis(detail::factor(detail::fuel_operator(grid.c, model.fuels.coal, grid.dt)), out.data(), nd, nc, ng * ne,
               true);
    sweep_axis(detail::factor(detail::fuel_operator(grid.g, model.fuels.gas, grid.dt)), out.data(), nd * nc, ng, ne,
               true);

    return finish_step(grid, model, mixed_term, k, out, true);
}

}  // namespace cleanspread
