#include "precflex/swm/simulation.hpp"

#include <algorithm>

namespace precflex::swm {

std::vector<double> initial_condition(const SwmParams& p) {
    const Layout layout(p.nx, p.ny);
    std::vector<double> fields(layout.size(), 0.0);
    Rng rng(SeedTree(p.seed).split("swm.init"));
    const double amplitude = p.noise_fraction * p.H;
    for (int i = 0; i < p.nx; ++i) {
        for (int j = 0; j < p.ny; ++j) {
            fields[layout.eta(i, j)] = rng.uniform(-amplitude, amplitude);
        }
    }
    return fields;
}

std::vector<double> apply_scaling(std::span<const double> fields, double s) {
    if (!is_power_of_two(s)) {
        throw ConfigError("scale must be a positive power of two");
    }
    std::vector<double> out(fields.begin(), fields.end());
    for (double& x : out) x *= s;
    return out;
}

std::vector<double> unscale(std::span<const double> fields, double s) {
    if (!is_power_of_two(s)) {
        throw ConfigError("scale must be a positive power of two");
    }
    const double inv = 1.0 / s;
    std::vector<double> out(fields.begin(), fields.end());
    for (double& x : out) x *= inv;
    return out;
}

std::vector<double> to_model_units(const Layout& layout, std::span<const double> fields) {
    std::vector<double> out(fields.begin(), fields.end());
    for (std::size_t k = layout.eta_offset(); k < out.size(); ++k) out[k] *= 1.0 / eta_unit;
    return out;
}

std::vector<double> to_physical_units(const Layout& layout, std::span<const double> state) {
    std::vector<double> out(state.begin(), state.end());
    for (std::size_t k = layout.eta_offset(); k < out.size(); ++k) out[k] *= eta_unit;
    return out;
}

Snapshot make_snapshot(const Layout& layout, std::span<const double> unscaled, double t) {
    Snapshot s;
    s.nx = layout.nx;
    s.ny = layout.ny;
    s.t = t;
    const auto begin = unscaled.begin();
    s.u.assign(begin, begin + static_cast<std::ptrdiff_t>(layout.u_size()));
    s.v.assign(begin + static_cast<std::ptrdiff_t>(layout.v_offset()),
               begin + static_cast<std::ptrdiff_t>(layout.v_offset() + layout.v_size()));
    s.eta.assign(begin + static_cast<std::ptrdiff_t>(layout.eta_offset()), unscaled.end());
    return s;
}

DiagnosticRow diagnose(const Snapshot& snap, std::int64_t step) {
    const int nx = snap.nx, ny = snap.ny;
    const Layout L(nx, ny);
    DiagnosticRow row;
    row.step = step;
    row.t = snap.t;

    double eta_sum = 0.0;
    for (double e : snap.eta) eta_sum += e;
    row.mean_eta = eta_sum / static_cast<double>(snap.eta.size());

    double ke_sum = 0.0;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double uc = 0.5 * (snap.u[L.u(i, j)] + snap.u[L.u(i + 1, j)]);
            const double vc = 0.5 * (snap.v[static_cast<std::size_t>(i) * (ny + 1) + j] +
                                     snap.v[static_cast<std::size_t>(i) * (ny + 1) + j + 1]);
            ke_sum += 0.5 * (uc * uc + vc * vc);
        }
    }
    row.mean_ke = ke_sum / static_cast<double>(nx * ny);

    double max_u = 0.0;
    for (double x : snap.u) max_u = std::max(max_u, std::fabs(x));
    row.max_u = max_u;
    return row;
}

ScalarKind integration_kind_for(const SwmParams& p, ScalarKind kind) {
    if (p.integration_kind) {
        return *p.integration_kind;
    }
    return kind == ScalarKind::f16_mixed ? ScalarKind::f32 : kind;
}

namespace {

template <class T>
SimulationResult with_integration(const SwmParams& p, ScalarKind integration, sherlog::LogHistogram* recorder) {
    const ScalarContext ctx{recorder};
    auto run = [&]<class I>() {
        if (recorder) {
            return simulate<sherlog::SherlogScalar<T>, sherlog::SherlogScalar<I>>(p, ctx);
        }
        return simulate<T, I>(p, ctx);
    };
    switch (integration) {
        case ScalarKind::f64: return run.template operator()<double>();
        case ScalarKind::f32: return run.template operator()<float>();
        case ScalarKind::f16: return run.template operator()<Half16>();
        case ScalarKind::f16_mixed: break;
    }
    throw ConfigError("unsupported integration kind");
}

}  // namespace

SimulationResult run_simulation(const SwmParams& p, ScalarKind kind, sherlog::LogHistogram* recorder) {
    validate(p);
    const ScalarKind integration = integration_kind_for(p, kind);
    switch (kind) {
        case ScalarKind::f64: return with_integration<double>(p, integration, recorder);
        case ScalarKind::f32: return with_integration<float>(p, integration, recorder);
        case ScalarKind::f16:
        case ScalarKind::f16_mixed: return with_integration<Half16>(p, integration, recorder);
    }
    throw ConfigError("unknown scalar kind");
}

double rmse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("rmse: size mismatch");
    }
    if (a.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

}  // namespace precflex::swm
