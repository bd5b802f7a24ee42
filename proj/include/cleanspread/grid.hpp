#pragma once

#include <cstddef>
#include <vector>

#include "cleanspread/model.hpp"

namespace cleanspread {

enum class Precision { f32, f64 };

/// Node counts and extents of the (d, s_c, s_g, e) mesh plus the time step count.
struct GridSpec {
    int n_d = 25;
    int n_c = 20;
    int n_g = 20;
    int n_e = 40;
    int n_t = 365;
    double coal_max = 25.0;  // EUR/MMBtu
    double gas_max = 25.0;   // EUR/MMBtu
    bool mixed_term = true;
    int retain_stride = 1;   // keep every k-th time slice; 0 keeps only t = 0
    Precision precision = Precision::f32;

    /// Refines every axis and the time step by `factor` (node spacing divided by it).
    GridSpec scaled(double factor) const;

    bool operator==(const GridSpec&) const = default;
};

struct Axis {
    std::vector<double> nodes;

    std::size_t size() const { return nodes.size(); }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }
    /// Index i of the cell [x_i, x_{i+1}] containing x (clamped) and the weight of x_{i+1}.
    std::pair<std::size_t, double> locate(double x) const;

    static Axis uniform(double lo, double hi, int n);
};

/// Tensor mesh over d ∈ [0, x̄], s_c ∈ [0, s_c^max], s_g ∈ [0, s_g^max], e ∈ [0, ē]
/// with row-major layout, e fastest.
struct Grid4 {
    Axis d, c, g, e;
    double dt = 0.0;
    int n_t = 0;

    std::size_t size() const { return d.size() * c.size() * g.size() * e.size(); }
    std::size_t index(std::size_t m, std::size_t i, std::size_t j, std::size_t n) const {
        return ((m * c.size() + i) * g.size() + j) * e.size() + n;
    }
    double time(int k) const { return k * dt; }

    static Grid4 build(const GridSpec& spec, const ModelParams& model);
};

/// Throws ConfigError when the explicit parts of the scheme violate their step bounds:
/// Δt ≤ 0.9 Δe / (hours · μ_e^max) for emissions advection and, with the mixed term,
/// Δt ≤ Δs_c Δs_g / (2 |ρ| σ_c^max σ_g^max).
void check_stability(const Grid4& grid, const ModelParams& model, bool mixed_term);

}  // namespace cleanspread
