#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "precflex/scalar.hpp"

namespace precflex::swm {

/// Physical and numerical configuration of a double-gyre run. All values in
/// SI units. The defaults are a desk-scale reduced-gravity basin.
struct SwmParams {
    int nx = 200;
    int ny = 100;
    double Lx = 2.0e6;
    double Ly = 1.0e6;
    double g = 0.1;
    double H = 500.0;
    double f0 = 1.0e-4;
    double beta = 2.0e-11;
    double wind_amplitude = 2.0e-7;  // m/s^2, peak zonal forcing acceleration
    double nu4 = 1.0e11;             // biharmonic viscosity, m^4/s
    double r_bottom = 1.0e-7;        // linear bottom friction, 1/s
    double dt = 0.0;                 // 0 selects 0.9 of the CFL limit
    std::int64_t n_steps = 500;
    double scale_s = 1.0;            // power of two
    bool nonlinear = true;
    bool compensated = true;
    /// Precision of the time integration; unset means the model precision
    /// (binary32 for the mixed kind).
    std::optional<ScalarKind> integration_kind;

    std::uint64_t seed = 42;
    double noise_fraction = 0.01;  // eta perturbation amplitude as a fraction of H
    std::int64_t diag_every = 10;

    double dx() const noexcept { return Lx / nx; }
    double dy() const noexcept { return Ly / ny; }
    double wave_speed() const;
    double cfl_dt() const;
    /// dt, or 0.9 * min(dx, dy) / sqrt(g H) when dt is 0.
    double effective_dt() const;
};

/// Throws ConfigError naming the first violated constraint.
void validate(const SwmParams& p);

bool is_power_of_two(double s) noexcept;

/// Sets one field from its config key (`swm.nx`, `swm.nonlinear`, ...).
/// Throws ConfigError on an unknown key or a malformed value.
void set_param(SwmParams& p, std::string_view key, std::string_view value);

/// All config keys accepted by set_param.
const std::vector<std::string>& param_keys();

/// Storage of the three prognostic fields in one contiguous array:
/// u is (nx+1) x ny at x-faces, v is nx x (ny+1) at y-faces, eta is nx x ny
/// at cell centres. Each field is row-major with the x index outermost.
struct Layout {
    int nx = 0;
    int ny = 0;

    Layout() = default;
    Layout(int nx_, int ny_) : nx(nx_), ny(ny_) {}

    std::size_t u_size() const noexcept { return static_cast<std::size_t>(nx + 1) * ny; }
    std::size_t v_size() const noexcept { return static_cast<std::size_t>(nx) * (ny + 1); }
    std::size_t eta_size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
    std::size_t size() const noexcept { return u_size() + v_size() + eta_size(); }

    std::size_t u_offset() const noexcept { return 0; }
    std::size_t v_offset() const noexcept { return u_size(); }
    std::size_t eta_offset() const noexcept { return u_size() + v_size(); }

    std::size_t u(int i, int j) const noexcept { return static_cast<std::size_t>(i) * ny + j; }
    std::size_t v(int i, int j) const noexcept {
        return v_offset() + static_cast<std::size_t>(i) * (ny + 1) + j;
    }
    std::size_t eta(int i, int j) const noexcept {
        return eta_offset() + static_cast<std::size_t>(i) * ny + j;
    }
};

}  // namespace precflex::swm
