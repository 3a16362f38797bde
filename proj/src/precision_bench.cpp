#include "precflex/precision_bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "precflex/csv.hpp"
#include "precflex/errors.hpp"
#include "precflex/swm/simulation.hpp"

namespace precflex::bench {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Timed {
    bool diverged = false;
    double seconds = nan;
    std::vector<double> eta;
};

Timed timed_run(const swm::SwmParams& p, ScalarKind kind, int repeats) {
    Timed out;
    out.seconds = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        try {
            auto result = swm::run_simulation(p, kind);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            out.seconds = std::min(out.seconds, elapsed.count());
            out.eta = std::move(result.final_state.eta);
        } catch (const BlowupError&) {
            out.diverged = true;
            out.seconds = nan;
            out.eta.clear();
            return out;
        }
    }
    return out;
}

struct Cell {
    Timed plain;
    Timed comp;
};

}  // namespace

const char* const hardware_caveat =
    "note: timings are from this host with software-emulated binary16; they do not reproduce "
    "A64FX speedups (about 4x for f16 and 2x for f32 over f64 at 3000x1500)";

SweepResult precision_sweep(const swm::SwmParams& base, std::span<const ScalarKind> kinds,
                            std::span<const GridSize> sizes, std::int64_t horizon,
                            const SweepOptions& options) {
    if (std::find(kinds.begin(), kinds.end(), ScalarKind::f64) == kinds.end()) {
        throw ConfigError("precision sweep needs f64 among the kinds as baseline");
    }
    if (horizon < 0) {
        throw ConfigError("precision sweep horizon must be >= 0");
    }
    if (options.repeats < 1) {
        throw ConfigError("precision sweep repeats must be >= 1");
    }

    std::vector<swm::SwmParams> configs;
    for (const GridSize& g : sizes) {
        swm::SwmParams p = base;
        p.nx = g.nx;
        p.ny = g.ny;
        p.n_steps = horizon;
        p.diag_every = std::max<std::int64_t>(1, horizon);
        swm::validate(p);
        configs.push_back(p);
    }

    // cells[size][kind]
    std::vector<std::vector<Cell>> cells(sizes.size(), std::vector<Cell>(kinds.size()));
    auto run_cell = [&](std::size_t si, std::size_t ki) {
        swm::SwmParams plain = configs[si];
        plain.compensated = false;
        swm::SwmParams comp = configs[si];
        comp.compensated = true;
        cells[si][ki].plain = timed_run(plain, kinds[ki], options.repeats);
        cells[si][ki].comp = timed_run(comp, kinds[ki], options.repeats);
    };

    if (options.parallel) {
        std::vector<std::future<void>> jobs;
        for (std::size_t si = 0; si < sizes.size(); ++si) {
            for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
                jobs.push_back(std::async(std::launch::async, run_cell, si, ki));
            }
        }
        for (auto& j : jobs) j.get();
    } else {
        for (std::size_t si = 0; si < sizes.size(); ++si) {
            for (std::size_t ki = 0; ki < kinds.size(); ++ki) run_cell(si, ki);
        }
    }

    SweepResult result;
    result.timings_reliable = !options.parallel;
    const auto f64_index =
        static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), ScalarKind::f64) - kinds.begin());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        // the reported run uses the base compensation setting
        auto reported = [&](const Cell& c) -> const Timed& { return base.compensated ? c.comp : c.plain; };
        const Timed& ref = reported(cells[si][f64_index]);
        for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
            const Cell& c = cells[si][ki];
            const Timed& run = reported(c);
            SweepRow row;
            row.kind = kinds[ki];
            row.nx = sizes[si].nx;
            row.ny = sizes[si].ny;
            row.steps = horizon;
            row.t_wall_s = run.seconds;
            row.status = c.plain.diverged || c.comp.diverged ? "diverged" : "ok";
            row.speedup = ref.diverged || run.diverged ? nan : ref.seconds / run.seconds;
            row.rmse_eta = ref.diverged || run.diverged ? nan : swm::rmse(run.eta, ref.eta);
            row.comp_overhead = c.plain.diverged || c.comp.diverged ? nan : c.comp.seconds / c.plain.seconds - 1.0;
            result.rows.push_back(row);
        }
    }
    return result;
}

void write_csv(std::ostream& os, std::span<const SweepRow> rows) {
    csv::Writer w(os);
    w.row({"kind", "nx", "ny", "steps", "t_wall_s", "speedup", "rmse_eta", "comp_overhead", "status"});
    for (const SweepRow& r : rows) {
        w.row({std::string(to_string(r.kind)), std::to_string(r.nx), std::to_string(r.ny), std::to_string(r.steps),
               csv::number(r.t_wall_s), csv::number(r.speedup), csv::number(r.rmse_eta),
               csv::number(r.comp_overhead), r.status});
    }
}

svg::LineChart speedup_chart(std::span<const SweepRow> rows) {
    svg::LineChart chart;
    chart.title = "Speedup over f64";
    chart.x_label = "grid points (nx*ny)";
    chart.y_label = "speedup";
    chart.log2_x = true;
    for (const SweepRow& r : rows) {
        const std::string label(to_string(r.kind));
        auto it = std::find_if(chart.series.begin(), chart.series.end(),
                               [&](const svg::Series& s) { return s.label == label; });
        if (it == chart.series.end()) {
            chart.series.push_back({label, {}, {}});
            it = chart.series.end() - 1;
        }
        it->x.push_back(static_cast<double>(r.nx) * r.ny);
        it->y.push_back(r.speedup);
    }
    return chart;
}

}  // namespace precflex::bench
