#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "precflex/random.hpp"
#include "precflex/sherlog.hpp"
#include "precflex/swm/model.hpp"
#include "precflex/swm/params.hpp"

namespace precflex::swm {

/// Unscaled fields in binary64, laid out as in `Layout`.
struct Snapshot {
    int nx = 0;
    int ny = 0;
    double t = 0.0;
    std::vector<double> u;    // (nx+1) x ny
    std::vector<double> v;    // nx x (ny+1)
    std::vector<double> eta;  // nx x ny
};

struct DiagnosticRow {
    std::int64_t step = 0;
    double t = 0.0;
    double mean_eta = 0.0;
    double mean_ke = 0.0;
    double max_u = 0.0;

    friend bool operator==(const DiagnosticRow&, const DiagnosticRow&) = default;
};

struct SimulationResult {
    std::vector<DiagnosticRow> diagnostics;
    Snapshot final_state;
};

/// Rest state plus uniform eta noise of amplitude noise_fraction * H drawn
/// from the run's seed. Unscaled, packed as in `Layout`.
std::vector<double> initial_condition(const SwmParams& p);

/// Multiplies every prognostic field by s.
std::vector<double> apply_scaling(std::span<const double> fields, double s);
/// Divides every prognostic field by s.
std::vector<double> unscale(std::span<const double> fields, double s);

Snapshot make_snapshot(const Layout& layout, std::span<const double> unscaled, double t);
DiagnosticRow diagnose(const Snapshot& snap, std::int64_t step);

/// Converts physical fields to the model's state variables (eta in units of
/// eta_unit) and back. Both are exact: eta_unit is a power of two.
std::vector<double> to_model_units(const Layout& layout, std::span<const double> fields);
std::vector<double> to_physical_units(const Layout& layout, std::span<const double> state);

/// Runs the model with tendencies in T and time integration in I. This is
/// the generic entry point; run_simulation picks T and I from a ScalarKind.
template <Scalar T, Scalar I>
SimulationResult simulate(const SwmParams& p, const ScalarContext& ctx = {}) {
    validate(p);
    const Layout layout(p.nx, p.ny);
    const double inv_s = 1.0 / p.scale_s;

    const auto scaled = to_model_units(layout, apply_scaling(initial_condition(p), p.scale_s));
    CompensatedState<T, I> cs(scaled, p.compensated, ctx);
    Model<T> model(p, ctx);
    // The model works in time steps; one RK4 step spans dt = 1.
    Rk4<T> rk4(layout.size(), 1.0, ctx);
    std::vector<I> delta(layout.size(), make_scalar<I>(0.0, ctx));

    const double dt = p.effective_dt();
    std::vector<double> unscaled(layout.size());
    auto capture = [&](std::int64_t step) {
        const auto state = cs.state();
        for (std::size_t k = 0; k < state.size(); ++k) unscaled[k] = to_f64(state[k]) * inv_s;
        return make_snapshot(layout, to_physical_units(layout, unscaled), static_cast<double>(step) * dt);
    };

    SimulationResult result;
    result.diagnostics.push_back(diagnose(capture(0), 0));
    auto rhs = [&model](std::span<const T> x, std::span<T> out) { model.rhs(x, out); };
    for (std::int64_t step = 1; step <= p.n_steps; ++step) {
        model.set_step(step);
        rk4.increment(cs.state(), rhs, std::span<I>(delta));
        cs.update(std::span<const I>(delta));
        for (const T& x : cs.state()) {
            if (!std::isfinite(to_f64(x))) {
                throw BlowupError(step, "non-finite state after update");
            }
        }
        if (step % p.diag_every == 0) {
            result.diagnostics.push_back(diagnose(capture(step), step));
        }
    }
    result.final_state = capture(p.n_steps);
    return result;
}

/// Runs at the given number format. With a recorder, every arithmetic result
/// of the run is logged into it through SherlogScalar; the numbers computed
/// are bitwise the same as without one.
SimulationResult run_simulation(const SwmParams& p, ScalarKind kind, sherlog::LogHistogram* recorder = nullptr);

/// Integration precision used for a run of the given kind.
ScalarKind integration_kind_for(const SwmParams& p, ScalarKind kind);

/// Root-mean-square difference of two equally sized fields.
double rmse(std::span<const double> a, std::span<const double> b);

}  // namespace precflex::swm
