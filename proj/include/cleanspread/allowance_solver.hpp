#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cleanspread/grid.hpp"
#include "cleanspread/model.hpp"

namespace cleanspread {

/// Decoupling field α(t, d, s_c, s_g, e) on retained time slices of a Grid4.
class AllowanceSurface {
public:
    AllowanceSurface() = default;
    AllowanceSurface(Grid4 grid, CapParams cap, Precision precision, std::vector<int> slice_steps);

    const Grid4& grid() const { return grid_; }
    const CapParams& cap() const { return cap_; }
    Precision precision() const { return precision_; }
    const std::vector<int>& slice_steps() const { return slice_steps_; }
    std::size_t slice_count() const { return slice_steps_.size(); }
    /// Slot of a retained step index, or -1.
    int slot_of_step(int k) const;

    double value(std::size_t slot, std::size_t index) const {
        const std::size_t at = slot * grid_.size() + index;
        return precision_ == Precision::f32 ? static_cast<double>(f32_[at]) : f64_[at];
    }
    void store(std::size_t slot, std::span<const double> slice);

    /// Value on the face e = ē, where the Dirichlet condition holds.
    double emax_value(double t) const { return terminal_condition(cap_, grid_.e.back()) * cap_.discount(t); }

    /// Multilinear in the state, linear in time between the bracketing retained slices;
    /// inputs clamped to the grid hull, output clamped to [0, π e^{-r(T-t)}].
    double interpolate(double t, double d, double coal, double gas, double e) const;
    double interpolate_slot(std::size_t slot, double d, double coal, double gas, double e) const;

    /// FNV-1a over the raw payload bytes.
    std::uint64_t checksum() const;

    std::span<const float> raw_f32() const { return f32_; }
    std::span<const double> raw_f64() const { return f64_; }
    std::span<float> raw_f32() { return f32_; }
    std::span<double> raw_f64() { return f64_; }

    bool operator==(const AllowanceSurface& o) const;

private:
    Grid4 grid_;
    CapParams cap_;
    Precision precision_ = Precision::f64;
    std::vector<int> slice_steps_;
    std::vector<float> f32_;
    std::vector<double> f64_;
};

/// Multilinear interpolation of one slice stored as doubles.
double interpolate_slice(const Grid4& grid, std::span<const double> slice, double d, double coal, double gas,
                         double e);

/// The two implementations of a backward step: a straightforward serial one kept as the
/// reference and an optimized OpenMP one (pre-factored line solves, skipped flat cells).
enum class Kernel { reference, optimized };

struct StepDiagnostics {
    /// Largest adjustment made by the bound/monotonicity limiter (mixed term only).
    double limiter_correction = 0.0;
};

/// One backward IMEX step producing slice k from slice k + 1.
StepDiagnostics imex_step(const Grid4& grid, const ModelParams& model, bool mixed_term, int k,
                          std::span<const double> next, std::span<double> out);
StepDiagnostics imex_step_reference(const Grid4& grid, const ModelParams& model, bool mixed_term, int k,
                                    std::span<const double> next, std::span<double> out);

/// Fills `slice` with the terminal data φ(e) (the e = ē face included).
void terminal_slice(const Grid4& grid, const CapParams& cap, std::span<double> slice);

struct SolveResult {
    AllowanceSurface surface;
    double a0 = 0.0;  // α(0, d₀, s₀ᶜ, s₀ᵍ, 0) from the double-precision t = 0 slice
    double max_limiter_correction = 0.0;
};

struct SolveOptions {
    Kernel kernel = Kernel::optimized;
    /// Keep only the t = 0 slice regardless of the grid spec (A₀-only runs).
    bool a0_only = false;
};

SolveResult solve(const ModelParams& model, const GridSpec& spec, const SolveOptions& options = {});

struct FicheraFace {
    std::string name;
    double min_f = 0.0;
    double max_f = 0.0;
    bool inflow = false;             // some f < 0: data must be prescribed
    bool condition_imposed = false;  // the scheme imposes a boundary condition here
};

struct FicheraReport {
    std::vector<FicheraFace> faces;

    const FicheraFace& face(const std::string& name) const;
    /// True when e = ē is the only face with inflow.
    bool condition_only_at_emax() const;
};

/// Evaluates the Fichera function on the degenerate boundary faces of the mesh.
FicheraReport fichera_diagnostic(const ModelParams& model, const Grid4& grid);

}  // namespace cleanspread
