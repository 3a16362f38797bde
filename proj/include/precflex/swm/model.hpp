#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "precflex/errors.hpp"
#include "precflex/scalar.hpp"
#include "precflex/swm/params.hpp"

namespace precflex::swm {

/// Surface elevation is held in units of this many metres, a power of two
/// near sqrt(H/g) for the default basin, so elevation and velocity share a
/// magnitude range.
inline constexpr double eta_unit = 64.0;

/// Right-hand side of the shallow water equations on an Arakawa C-grid in a
/// closed, free-slip basin.
///
/// Tendencies are returned per time step (already multiplied by dt) and in
/// scaled space: with state fields stored as s*u, s*v, s*eta/eta_unit the
/// returned increments are the same multiples of the physical ones. Grid spacings, dt, g and the
/// Coriolis parameter are folded into precomputed constants so that every
/// quantity formed in the main loop stays within a few orders of magnitude
/// of the state; only the fluid depth needs 1/s and it gets it through a
/// constant as well.
template <Scalar T>
class Model {
public:
    /// Power-of-two factor on the surface potential inside the momentum
    /// equations, and on the factors of the kinetic energy products.
    static constexpr double potential_unit = 256.0;
    static constexpr double ke_pre = 4.0;

    Model(const SwmParams& p, const ScalarContext& ctx = {})
        : layout_(p.nx, p.ny), nonlinear_(p.nonlinear) {
        const double dx = p.dx();
        const double dy = p.dy();
        const double dt = p.effective_dt();
        const double s = p.scale_s;
        auto make = [&ctx](double x) { return make_scalar<T>(x, ctx); };

        // Momentum tendencies are accumulated in units of the pressure
        // gradient g*dt/dx / potential_unit and multiplied by that once at
        // the end; every other coefficient is expressed relative to it. This
        // keeps the weak terms (friction, viscosity, kinetic energy) from
        // being formed as isolated tiny products.
        const double lead = p.g * dt * eta_unit / dx / potential_unit;

        zero_ = make(0.0);
        half_ = make(0.5);
        lead_ = make(lead);
        dt_dx_ = make(dt / dx);
        dt_dy_ = make(dt / dy);
        depth_eta_ = make(dt / dx / s);
        depth_mean_ = make(p.H * dt / dx / eta_unit);
        depth_offset_ = make(p.H * s / eta_unit);
        dx_dy_ = make(dx / dy);
        pv_scale_ = make(1.0 / s / lead);
        potential_unit_ = make(potential_unit);
        ke_pre_ = make(ke_pre);
        ke_post_ = make(0.25 * potential_unit / s / ke_pre / p.g / eta_unit);
        quarter_ = make(0.25);
        friction_ = make(p.r_bottom * dt / lead);
        biharmonic_ = make(p.nu4 * dt / (dx * dx * dx * dx) / lead);
        aspect_ = make((dx / dy) * (dx / dy));

        const int nx = p.nx, ny = p.ny;
        auto coriolis = [&p](double y) { return p.f0 + p.beta * (y - 0.5 * p.Ly); };
        coriolis_u_.reserve(ny);
        wind_u_.reserve(ny);
        for (int j = 0; j < ny; ++j) {
            const double y = (j + 0.5) * dy;
            coriolis_u_.push_back(make(dt * coriolis(y) / lead));
            const double forcing = -p.wind_amplitude * std::cos(2.0 * std::numbers::pi * y / p.Ly);
            wind_u_.push_back(make(s * dt * forcing / lead));
        }
        coriolis_v_.reserve(ny + 1);
        coriolis_q_.reserve(ny + 1);
        for (int j = 0; j <= ny; ++j) {
            coriolis_v_.push_back(make(dt * coriolis(j * dy) / lead));
            coriolis_q_.push_back(make(s * dt * coriolis(j * dy)));
        }

        depth_.assign(static_cast<std::size_t>(nx) * ny, zero_);
        bernoulli_.assign(static_cast<std::size_t>(nx) * ny, zero_);
        flux_u_.assign(layout_.u_size(), zero_);
        flux_v_.assign(static_cast<std::size_t>(nx) * (ny + 1), zero_);
        pv_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), zero_);
        lap_u_.assign(layout_.u_size(), zero_);
        bih_u_.assign(layout_.u_size(), zero_);
        lap_v_.assign(layout_.v_size(), zero_);
        bih_v_.assign(layout_.v_size(), zero_);
        sq_u_.assign(layout_.u_size(), zero_);
        sq_v_.assign(layout_.v_size(), zero_);
    }

    const Layout& layout() const noexcept { return layout_; }

    /// Step index carried by any BlowupError raised from rhs.
    void set_step(std::int64_t step) noexcept { step_ = step; }

    void rhs(std::span<const T> x, std::span<T> out) {
        const Layout& L = layout_;
        const int nx = L.nx, ny = L.ny;
        auto u = [&](int i, int j) -> const T& { return x[L.u(i, j)]; };
        auto v = [&](int i, int j) -> const T& { return x[L.v(i, j)]; };
        auto eta = [&](int i, int j) -> const T& { return x[L.eta(i, j)]; };
        auto c = [ny](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };
        auto vi = [ny](int i, int j) { return static_cast<std::size_t>(i) * (ny + 1) + j; };
        auto qi = [ny](int i, int j) { return static_cast<std::size_t>(i) * (ny + 1) + j; };

        // layer depth at centres, in units of eta_unit * dx/dt; the mean
        // depth is added in state units so small eta never stands alone
        if (nonlinear_) {
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) depth_[c(i, j)] = (eta(i, j) + depth_offset_) * depth_eta_;
        }

        // volume fluxes; zero through the walls
        for (int j = 0; j < ny; ++j) {
            flux_u_[L.u(0, j)] = zero_;
            flux_u_[L.u(nx, j)] = zero_;
        }
        for (int i = 1; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const T h = nonlinear_ ? half_ * (depth_[c(i - 1, j)] + depth_[c(i, j)]) : depth_mean_;
                flux_u_[L.u(i, j)] = u(i, j) * h;
            }
        }
        for (int i = 0; i < nx; ++i) {
            flux_v_[vi(i, 0)] = zero_;
            flux_v_[vi(i, ny)] = zero_;
            for (int j = 1; j < ny; ++j) {
                const T h = nonlinear_ ? half_ * (depth_[c(i, j - 1)] + depth_[c(i, j)]) : depth_mean_;
                flux_v_[vi(i, j)] = v(i, j) * h;
            }
        }

        // continuity
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const T div_x = flux_u_[L.u(i + 1, j)] - flux_u_[L.u(i, j)];
                const T div_y = flux_v_[vi(i, j + 1)] - flux_v_[vi(i, j)];
                out[L.eta(i, j)] = -(div_x + dx_dy_ * div_y);
            }
        }

        laplacian_u(x.subspan(L.u_offset(), L.u_size()), lap_u_);
        laplacian_u(lap_u_, bih_u_);
        laplacian_v(x.subspan(L.v_offset(), L.v_size()), lap_v_);
        laplacian_v(lap_v_, bih_v_);

        if (!nonlinear_) {
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) bernoulli_[c(i, j)] = eta(i, j) * potential_unit_;
        } else {
            // Bernoulli potential divided by g: eta + kinetic energy / g
            for (std::size_t k = 0; k < L.u_size(); ++k) {
                const T& f = x[L.u_offset() + k];
                sq_u_[k] = (f * ke_pre_) * f;
            }
            for (std::size_t k = 0; k < L.v_size(); ++k) {
                const T& f = x[L.v_offset() + k];
                sq_v_[k] = (f * ke_pre_) * f;
            }
            for (int i = 0; i < nx; ++i) {
                for (int j = 0; j < ny; ++j) {
                    const T ke_u = sq_u_[L.u(i, j)] + sq_u_[L.u(i + 1, j)];
                    const T ke_v = sq_v_[vi(i, j)] + sq_v_[vi(i, j + 1)];
                    bernoulli_[c(i, j)] = eta(i, j) * potential_unit_ + ke_post_ * (ke_u + ke_v);
                }
            }
            // potential vorticity at corners; zero relative vorticity and
            // zero flux along the free-slip walls
            for (int i = 0; i <= nx; ++i) {
                for (int j = 0; j <= ny; ++j) {
                    if (i == 0 || i == nx || j == 0 || j == ny) {
                        pv_[qi(i, j)] = zero_;
                        continue;
                    }
                    const T zeta = dt_dx_ * (v(i, j) - v(i - 1, j)) - dt_dy_ * (u(i, j) - u(i, j - 1));
                    const T h = quarter_ * ((depth_[c(i - 1, j - 1)] + depth_[c(i, j - 1)]) +
                                            (depth_[c(i - 1, j)] + depth_[c(i, j)]));
                    pv_[qi(i, j)] = ((coriolis_q_[j] + zeta) * pv_scale_) / h;
                }
            }
        }

        // u momentum
        for (int j = 0; j < ny; ++j) {
            out[L.u(0, j)] = zero_;
            out[L.u(nx, j)] = zero_;
        }
        for (int i = 1; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                T acc;
                if (nonlinear_) {
                    const T vs = half_ * (flux_v_[vi(i - 1, j)] + flux_v_[vi(i, j)]);
                    const T vn = half_ * (flux_v_[vi(i - 1, j + 1)] + flux_v_[vi(i, j + 1)]);
                    const T rot = half_ * (pv_[qi(i, j)] * vs + pv_[qi(i, j + 1)] * vn);
                    acc = -(bernoulli_[c(i, j)] - bernoulli_[c(i - 1, j)]) + rot;
                } else {
                    const T vbar = quarter_ * ((v(i - 1, j) + v(i, j)) + (v(i - 1, j + 1) + v(i, j + 1)));
                    acc = -(bernoulli_[c(i, j)] - bernoulli_[c(i - 1, j)]) + coriolis_u_[j] * vbar;
                }
                acc = acc + wind_u_[j];
                acc = acc - friction_ * u(i, j);
                acc = acc - biharmonic_ * bih_u_[L.u(i, j)];
                out[L.u(i, j)] = lead_ * acc;
            }
        }

        // v momentum
        for (int i = 0; i < nx; ++i) {
            out[L.v(i, 0)] = zero_;
            out[L.v(i, ny)] = zero_;
            for (int j = 1; j < ny; ++j) {
                T acc;
                if (nonlinear_) {
                    const T uw = half_ * (flux_u_[L.u(i, j - 1)] + flux_u_[L.u(i, j)]);
                    const T ue = half_ * (flux_u_[L.u(i + 1, j - 1)] + flux_u_[L.u(i + 1, j)]);
                    const T rot = half_ * (pv_[qi(i, j)] * uw + pv_[qi(i + 1, j)] * ue);
                    acc = -(dx_dy_ * (bernoulli_[c(i, j)] - bernoulli_[c(i, j - 1)])) - rot;
                } else {
                    const T ubar = quarter_ * ((u(i, j - 1) + u(i + 1, j - 1)) + (u(i, j) + u(i + 1, j)));
                    acc = -(dx_dy_ * (bernoulli_[c(i, j)] - bernoulli_[c(i, j - 1)])) - coriolis_v_[j] * ubar;
                }
                acc = acc - friction_ * v(i, j);
                acc = acc - biharmonic_ * bih_v_[vi(i, j)];
                out[L.v(i, j)] = lead_ * acc;
            }
        }

        for (std::size_t k = 0; k < out.size(); ++k) {
            if (!std::isfinite(to_f64(out[k]))) {
                throw BlowupError(step_, "non-finite tendency");
            }
        }
    }

private:
    // Grid Laplacian scaled by dx^2 at u points. The walls at i = 0 and
    // i = nx hold zero; north/south neighbours outside the basin mirror the
    // boundary value (no normal gradient).
    void laplacian_u(std::span<const T> f, std::span<T> out) const {
        const int nx = layout_.nx, ny = layout_.ny;
        const Layout& L = layout_;
        for (int j = 0; j < ny; ++j) {
            out[L.u(0, j)] = zero_;
            out[L.u(nx, j)] = zero_;
        }
        for (int i = 1; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const T& centre = f[L.u(i, j)];
                const T& south = j > 0 ? f[L.u(i, j - 1)] : centre;
                const T& north = j < ny - 1 ? f[L.u(i, j + 1)] : centre;
                const T twice = centre + centre;
                const T along_x = (f[L.u(i + 1, j)] + f[L.u(i - 1, j)]) - twice;
                const T along_y = (north + south) - twice;
                out[L.u(i, j)] = along_x + aspect_ * along_y;
            }
        }
    }

    void laplacian_v(std::span<const T> f, std::span<T> out) const {
        const int nx = layout_.nx, ny = layout_.ny;
        auto at = [ny](int i, int j) { return static_cast<std::size_t>(i) * (ny + 1) + j; };
        for (int i = 0; i < nx; ++i) {
            out[at(i, 0)] = zero_;
            out[at(i, ny)] = zero_;
            for (int j = 1; j < ny; ++j) {
                const T& centre = f[at(i, j)];
                const T& west = i > 0 ? f[at(i - 1, j)] : centre;
                const T& east = i < nx - 1 ? f[at(i + 1, j)] : centre;
                const T twice = centre + centre;
                const T along_x = (east + west) - twice;
                const T along_y = (f[at(i, j + 1)] + f[at(i, j - 1)]) - twice;
                out[at(i, j)] = along_x + aspect_ * along_y;
            }
        }
    }

    Layout layout_;
    bool nonlinear_;
    std::int64_t step_ = 0;

    T zero_, half_, quarter_, lead_;
    T dt_dx_, dt_dy_, depth_eta_, depth_mean_, depth_offset_, dx_dy_;
    T pv_scale_, potential_unit_, ke_pre_, ke_post_;
    T friction_, biharmonic_, aspect_;
    std::vector<T> coriolis_u_, coriolis_v_, coriolis_q_, wind_u_;

    std::vector<T> depth_, bernoulli_, flux_u_, flux_v_, pv_;
    std::vector<T> lap_u_, bih_u_, lap_v_, bih_v_, sq_u_, sq_v_;
};

/// Classical fourth-order Runge-Kutta. Produces the increment
/// dt * ((k1 + k4) / 6 + (k2 + k3) / 3) rather than the new state, so the caller
/// can add it with compensation. Stages run in T; the increment is combined in
/// the precision of the delta buffer, which may be wider.
template <Scalar T>
class Rk4 {
public:
    Rk4(std::size_t n, double dt, const ScalarContext& ctx = {})
        : ctx_(ctx),
          dt_value_(dt),
          half_dt_(make_scalar<T>(0.5 * dt, ctx)),
          dt_(make_scalar<T>(dt, ctx)),
          k1_(n), k2_(n), k3_(n), k4_(n), stage_(n) {}

    /// rhs(std::span<const T> state, std::span<T> tendency)
    template <class Rhs, Scalar D>
    void increment(std::span<const T> x, Rhs&& rhs, std::span<D> delta) {
        const std::size_t n = x.size();
        if (n != k1_.size() || delta.size() != n) {
            throw DimensionError("rk4: state size does not match the workspace");
        }
        rhs(x, std::span<T>(k1_));
        for (std::size_t k = 0; k < n; ++k) stage_[k] = x[k] + half_dt_ * k1_[k];
        rhs(std::span<const T>(stage_), std::span<T>(k2_));
        for (std::size_t k = 0; k < n; ++k) stage_[k] = x[k] + half_dt_ * k2_[k];
        rhs(std::span<const T>(stage_), std::span<T>(k3_));
        for (std::size_t k = 0; k < n; ++k) stage_[k] = x[k] + dt_ * k3_[k];
        rhs(std::span<const T>(stage_), std::span<T>(k4_));
        const D sixth_dt = make_scalar<D>(dt_value_ / 6.0, ctx_);
        const D third_dt = make_scalar<D>(dt_value_ / 3.0, ctx_);
        auto wide = [this](const T& k) { return scalar_cast<D>(k, ctx_); };
        for (std::size_t k = 0; k < n; ++k) {
            delta[k] = (wide(k1_[k]) + wide(k4_[k])) * sixth_dt + (wide(k2_[k]) + wide(k3_[k])) * third_dt;
        }
    }

private:
    ScalarContext ctx_;
    double dt_value_;
    T half_dt_, dt_;
    std::vector<T> k1_, k2_, k3_, k4_, stage_;
};

/// Carries are stored multiplied by this power of two. The Kahan residual
/// sits about one unit in the last place below the running sum, which for a
/// binary16 sum is deep in the subnormal range whenever the sum is small;
/// the stored multiple stays normal while the arithmetic is unchanged.
inline constexpr double carry_unit = 16.0;

/// Adds increments to a running sum in precision I. With compensation this
/// is Kahan summation: y = delta + carry, t = sum + y, carry = y - (t - sum),
/// sum = t, evaluated on carry_unit multiples of y and carry (exact scaling,
/// so the sums match the textbook form bit for bit). Without compensation,
/// sum += delta and the carry stays zero.
template <Scalar T, Scalar I>
void compensated_update(std::span<I> sum, std::span<I> carry, std::span<const T> delta, bool compensated,
                        const ScalarContext& ctx = {}) {
    if (sum.size() != delta.size() || carry.size() != delta.size()) {
        throw DimensionError("compensated_update: shape mismatch");
    }
    const I unit = make_scalar<I>(carry_unit, ctx);
    const I inv_unit = make_scalar<I>(1.0 / carry_unit, ctx);
    for (std::size_t k = 0; k < delta.size(); ++k) {
        const I d = scalar_cast<I>(delta[k], ctx);
        if (compensated) {
            const I y = d * unit + carry[k];
            const I t = sum[k] + y * inv_unit;
            carry[k] = y - (t - sum[k]) * unit;
            sum[k] = t;
        } else {
            sum[k] = sum[k] + d;
        }
    }
}

/// Prognostic state held in integration precision I, together with the
/// carries (as carry_unit multiples), and mirrored into model precision T after each update.
template <Scalar T, Scalar I>
class CompensatedState {
public:
    CompensatedState(std::span<const double> initial, bool compensated, const ScalarContext& ctx = {})
        : compensated_(compensated), ctx_(ctx) {
        sum_.reserve(initial.size());
        state_.reserve(initial.size());
        for (double x : initial) {
            sum_.push_back(make_scalar<I>(x, ctx));
            state_.push_back(scalar_cast<T>(sum_.back(), ctx));
        }
        carry_.assign(initial.size(), make_scalar<I>(0.0, ctx));
    }

    std::span<const T> state() const noexcept { return state_; }
    std::span<const I> sum() const noexcept { return sum_; }
    std::span<const I> carry() const noexcept { return carry_; }

    template <Scalar D>
    void update(std::span<const D> delta) {
        compensated_update<D, I>(sum_, carry_, delta, compensated_, ctx_);
        for (std::size_t k = 0; k < sum_.size(); ++k) {
            state_[k] = scalar_cast<T>(sum_[k], ctx_);
        }
    }

private:
    bool compensated_;
    ScalarContext ctx_;
    std::vector<I> sum_;
    std::vector<I> carry_;
    std::vector<T> state_;
};

}  // namespace precflex::swm
