#include "precflex/cli/cli.hpp"

#include <sys/utsname.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "precflex/cli/config.hpp"
#include "precflex/csv.hpp"
#include "precflex/errors.hpp"
#include "precflex/kernels.hpp"
#include "precflex/netbench/bench.hpp"
#include "precflex/precision_bench.hpp"
#include "precflex/sherlog.hpp"
#include "precflex/svg.hpp"
#include "precflex/swm/simulation.hpp"
#include "precflex/swm/snapshot.hpp"

namespace precflex::cli {
namespace {

// Restores the process-wide binary16 policy when a command finishes.
class DefaultPolicyGuard {
public:
    DefaultPolicyGuard() : saved_(default_policy()) {}
    ~DefaultPolicyGuard() { set_default_policy(saved_); }

private:
    RoundingPolicy saved_;
};

// Writes to a file when a path is given ("-" or empty means the stream).
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw ResourceError("cannot write " + path);
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

ScalarKind kind_of(const std::string& text) {
    const auto k = parse_scalar_kind(text);
    if (!k) throw ConfigError("unknown number format '" + text + "' (f64, f32, f16, mixed)");
    return *k;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::vector<bench::GridSize> parse_sizes(const std::string& text) {
    std::vector<bench::GridSize> out;
    for (const auto& s : split(text, ',')) {
        const auto x = s.find('x');
        try {
            if (x == std::string::npos) throw std::invalid_argument(s);
            std::size_t used = 0;
            const int nx = std::stoi(s.substr(0, x), &used);
            if (used != x) throw std::invalid_argument(s);
            const std::string rest = s.substr(x + 1);
            const int ny = std::stoi(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(s);
            out.push_back({nx, ny});
        } catch (const std::logic_error&) {
            throw ConfigError("grid size '" + s + "' is not of the form NXxNY");
        }
    }
    if (out.empty()) throw ConfigError("no grid sizes given");
    return out;
}

std::vector<std::size_t> parse_byte_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& s : split(text, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw ConfigError("message size '" + s + "' is not a byte count");
        }
    }
    return out;
}

// Settings shared by every command after config, environment and overrides
// are merged.
struct Settings {
    Config config;
    std::uint64_t seed = 42;
    // set by --seed or run.seed; wins over swm.seed
    bool seed_given = false;
    RoundingPolicy policy;
};

Settings resolve(const std::string& config_path, const std::vector<std::string>& overrides,
                 std::optional<std::uint64_t> seed_flag) {
    Settings s;
    if (const char* env = std::getenv("HALF_FLUSH_SUBNORMALS"); env && *env) {
        s.config.set("fp16.flush_subnormals", env);
    }
    if (!config_path.empty()) {
        const Config file = Config::load(config_path);
        for (const auto& [k, v] : file.values()) s.config.set(k, v);
    }
    for (const auto& o : overrides) s.config.set(std::string_view(o));

    for (const auto& [key, value] : s.config.values()) {
        if (key == "fp16.flush_subnormals") {
            s.policy.flush_subnormals = parse_bool(key, value);
        } else if (key == "fp16.muladd") {
            if (value == "fused") {
                s.policy.muladd_mode = MuladdMode::fused_single_rounding;
            } else if (value == "double") {
                s.policy.muladd_mode = MuladdMode::double_rounding;
            } else {
                throw ConfigError("fp16.muladd: expected fused or double, got '" + value + "'");
            }
        } else if (key == "run.seed") {
            try {
                std::size_t used = 0;
                s.seed = std::stoull(value, &used);
                s.seed_given = true;
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::logic_error&) {
                throw ConfigError("run.seed: expected an unsigned integer, got '" + value + "'");
            }
        } else if (key.rfind("swm.", 0) != 0) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (seed_flag) {
        s.seed = *seed_flag;
        s.seed_given = true;
    }
    return s;
}

struct SwmFlags {
    std::string kind = "f64";
    std::optional<int> nx, ny;
    std::optional<std::int64_t> steps;
    std::optional<double> scale;
};

void add_swm_flags(CLI::App* app, SwmFlags& f, const std::string& default_kind) {
    f.kind = default_kind;
    app->add_option("--kind", f.kind, "Number format: f64, f32, f16 or mixed")->capture_default_str();
    app->add_option("--nx", f.nx, "Grid points in x");
    app->add_option("--ny", f.ny, "Grid points in y");
    app->add_option("--steps", f.steps, "Number of time steps");
    app->add_option("--scale", f.scale, "Power-of-two scaling s");
}

swm::SwmParams swm_params(const Settings& s, const SwmFlags* f) {
    swm::SwmParams p;
    for (const auto& [key, value] : s.config.values()) {
        if (key.rfind("swm.", 0) == 0) swm::set_param(p, key, value);
    }
    if (s.seed_given) p.seed = s.seed;
    if (f) {
        if (f->nx) p.nx = *f->nx;
        if (f->ny) p.ny = *f->ny;
        if (f->steps) p.n_steps = *f->steps;
        if (f->scale) p.scale_s = *f->scale;
    }
    swm::validate(p);
    return p;
}

void write_diagnostics(std::ostream& os, const std::vector<swm::DiagnosticRow>& rows) {
    csv::Writer w(os);
    w.row({"step", "t", "mean_eta", "mean_ke", "max_u"});
    for (const auto& r : rows) {
        w.row({std::to_string(r.step), csv::number(r.t), csv::number(r.mean_eta), csv::number(r.mean_ke),
               csv::number(r.max_u)});
    }
}

}  // namespace

std::string host_info() {
    std::ostringstream o;
    utsname u{};
    if (uname(&u) == 0) {
        o << "host: " << u.sysname << ' ' << u.release << ' ' << u.machine << " node=" << u.nodename;
    } else {
        o << "host: unknown";
    }
    o << " cpus=" << std::thread::hardware_concurrency();
#if defined(__clang__)
    o << " compiler=clang-" << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
    o << " compiler=gcc-" << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
#ifdef NDEBUG
    o << " build=optimized";
#else
    o << " build=debug";
#endif
    return o.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    DefaultPolicyGuard policy_guard;

    CLI::App app{"Reduced-precision numerics toolkit: binary16 emulation, axpy and shallow-water benchmarks, "
                 "range logging and a message-passing benchmark engine."};
    app.name(args.empty() ? "precflex" : args[0]);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Flat 'section.key = value' config file");
    app.add_option("--set", overrides, "Override a config key (section.key=value); repeatable");
    app.add_option("--seed", seed, "Root seed of all randomness (default 42)");

    // axpy-bench
    auto* axpy = app.add_subcommand("axpy-bench", "Time y <- a*x + y over doubling vector sizes");
    std::string axpy_kind = "all", axpy_csv, axpy_svg;
    int min_exp = 4, max_exp = 20, samples = 11;
    double min_time = 0.010;
    bool cold = false;
    axpy->add_option("--kind", axpy_kind, "f64, f32, f16 or all")->capture_default_str();
    axpy->add_option("--min-exp", min_exp, "Smallest size 2^min-exp")->capture_default_str();
    axpy->add_option("--max-exp", max_exp, "Largest size 2^max-exp")->capture_default_str();
    axpy->add_option("--samples", samples, "Timed samples per size (median and min taken)")->capture_default_str();
    axpy->add_option("--min-time", min_time, "Minimum seconds per sample")->capture_default_str();
    axpy->add_flag("--cold", cold, "Rotate through 16 buffer copies so caches stay cold");
    axpy->add_option("--csv", axpy_csv, "CSV output path (default stdout)");
    axpy->add_option("--svg", axpy_svg, "GFLOPS-vs-size chart path");

    // swm run / swm bench
    auto* swm_cmd = app.add_subcommand("swm", "Shallow-water model");
    swm_cmd->require_subcommand(1);
    auto* run = swm_cmd->add_subcommand("run", "Run the model and print diagnostics as CSV");
    SwmFlags run_flags;
    std::string run_csv, run_snapshot, run_svg;
    add_swm_flags(run, run_flags, "f64");
    run->add_option("--csv", run_csv, "Diagnostics CSV path (default stdout)");
    run->add_option("--snapshot", run_snapshot, "Write the final state to this binary file");
    run->add_option("--svg", run_svg, "Write a heat map of the final surface elevation");

    auto* sweep = swm_cmd->add_subcommand("bench", "Sweep number formats and grid sizes");
    std::string sweep_kinds = "f64,f32,f16,mixed", sweep_sizes = "32x16,64x32,128x64", sweep_csv, sweep_svg;
    std::int64_t horizon = 200;
    int repeats = 1;
    bool parallel = false;
    sweep->add_option("--kinds", sweep_kinds, "Comma-separated number formats (must include f64)")
        ->capture_default_str();
    sweep->add_option("--sizes", sweep_sizes, "Comma-separated NXxNY grids")->capture_default_str();
    sweep->add_option("--horizon", horizon, "Steps per run")->capture_default_str();
    sweep->add_option("--repeats", repeats, "Timed repetitions, minimum kept")->capture_default_str();
    sweep->add_flag("--parallel", parallel, "Run configurations concurrently (timings unreliable)");
    sweep->add_option("--csv", sweep_csv, "CSV output path (default stdout)");
    sweep->add_option("--svg", sweep_svg, "Speedup-vs-size chart path");

    // sherlog report
    auto* sherlog_cmd = app.add_subcommand("sherlog", "Magnitude logging of model arithmetic");
    sherlog_cmd->require_subcommand(1);
    auto* report = sherlog_cmd->add_subcommand("report", "Histogram of result exponents of one model run");
    SwmFlags report_flags;
    std::string report_csv;
    add_swm_flags(report, report_flags, "f32");
    report->add_option("--csv", report_csv, "Histogram CSV path (default stdout)");

    // netbench
    auto* net = app.add_subcommand("netbench", "Message-passing benchmarks over in-process ranks");
    std::string net_op = "pingpong", net_sizes, net_csv, net_svg, reduce_op = "sum";
    std::optional<int> ranks, reps;
    int net_max_exp = 22;
    bool cache_avoidance = false;
    net->add_option("--op", net_op, "pingpong, reduce, allreduce or gatherv")
        ->check(CLI::IsMember({"pingpong", "reduce", "allreduce", "gatherv"}))
        ->capture_default_str();
    net->add_option("--ranks", ranks, "Number of ranks (pingpong: 2, collectives default 4)");
    net->add_option("--sizes", net_sizes, "Comma-separated message sizes in bytes (default 0 and 2^0..2^max-exp)");
    net->add_option("--max-exp", net_max_exp, "Largest default size 2^max-exp")->capture_default_str();
    net->add_option("--reps", reps, "Fixed repetitions per size instead of the schedule");
    net->add_option("--reduce-op", reduce_op, "sum, max or plus-one (a+b+1)")
        ->check(CLI::IsMember({"sum", "max", "plus-one"}))
        ->capture_default_str();
    net->add_flag("--cache-avoidance", cache_avoidance, "Rotate through 16 send buffers");
    net->add_option("--csv", net_csv, "CSV output path (default stdout)");
    net->add_option("--svg", net_svg, "Latency or throughput chart path");

    for (auto* sub : {axpy, swm_cmd, run, sweep, sherlog_cmd, report, net}) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("precflex");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << app.get_name() << ": " << e.what() << '\n';
        return exit_usage;
    }

    try {
        const Settings settings = resolve(config_path, overrides, seed);
        set_default_policy(settings.policy);

        if (*axpy) {
            err << host_info() << '\n';
            std::vector<ScalarKind> kinds;
            if (axpy_kind == "all") {
                kinds = {ScalarKind::f64, ScalarKind::f32, ScalarKind::f16};
            } else {
                kinds = {kind_of(axpy_kind)};
                if (kinds[0] == ScalarKind::f16_mixed) throw ConfigError("axpy-bench supports f64, f32 and f16");
            }
            kernels::AxpyBenchConfig cfg;
            cfg.seed = settings.seed;
            cfg.buffer_copies = cold ? kernels::cold_buffer_copies : 1;
            cfg.protocol.samples = samples;
            cfg.protocol.min_sample_seconds = min_time;
            const auto sizes = kernels::power_of_two_sizes(min_exp, max_exp);
            Sink sink(axpy_csv, out);
            csv::Writer w(sink.stream());
            w.row({"kind", "size", "t_min_s", "t_median_s", "gflops"});
            svg::LineChart chart{"axpy throughput", "vector length", "GFLOPS", true, {}};
            for (ScalarKind k : kinds) {
                svg::Series series{std::string(to_string(k)), {}, {}};
                for (const auto& r : kernels::bench_axpy(k, sizes, cfg)) {
                    if (!r.ok()) {
                        err << "axpy-bench: " << to_string(k) << " size " << r.size << ": " << *r.error << '\n';
                        w.row({std::string(to_string(k)), std::to_string(r.size), "", "", ""});
                        continue;
                    }
                    w.row({std::string(to_string(k)), std::to_string(r.size), csv::number(r.t_min),
                           csv::number(r.t_median), csv::number(r.gflops())});
                    series.x.push_back(static_cast<double>(r.size));
                    series.y.push_back(r.gflops());
                }
                chart.series.push_back(std::move(series));
            }
            if (!axpy_svg.empty()) svg::write_file(axpy_svg, svg::render(chart));
            return exit_ok;
        }

        if (*run) {
            const swm::SwmParams p = swm_params(settings, &run_flags);
            const auto result = swm::run_simulation(p, kind_of(run_flags.kind));
            Sink sink(run_csv, out);
            write_diagnostics(sink.stream(), result.diagnostics);
            if (!run_snapshot.empty()) swm::write_snapshot(run_snapshot, result.final_state);
            if (!run_svg.empty()) {
                const auto& s = result.final_state;
                svg::write_file(run_svg, svg::heatmap(s.eta, s.nx, s.ny,
                                                      "surface elevation (m) after " + std::to_string(p.n_steps) +
                                                          " steps, " + std::string(to_string(kind_of(run_flags.kind)))));
            }
            return exit_ok;
        }

        if (*sweep) {
            err << host_info() << '\n' << bench::hardware_caveat << '\n';
            swm::SwmParams base = swm_params(settings, nullptr);
            std::vector<ScalarKind> kinds;
            for (const auto& k : split(sweep_kinds, ',')) kinds.push_back(kind_of(k));
            const auto sizes = parse_sizes(sweep_sizes);
            bench::SweepOptions opt;
            opt.repeats = repeats;
            opt.parallel = parallel;
            const auto res = bench::precision_sweep(base, kinds, sizes, horizon, opt);
            if (!res.timings_reliable) err << "note: runs were concurrent; timings are unreliable\n";
            for (const auto& r : res.rows) {
                if (r.status != "ok") {
                    err << "note: " << to_string(r.kind) << " at " << r.nx << "x" << r.ny << " diverged\n";
                }
            }
            Sink sink(sweep_csv, out);
            bench::write_csv(sink.stream(), res.rows);
            if (!sweep_svg.empty()) svg::write_file(sweep_svg, svg::render(bench::speedup_chart(res.rows)));
            return exit_ok;
        }

        if (*report) {
            const swm::SwmParams p = swm_params(settings, &report_flags);
            sherlog::LogHistogram hist;
            swm::run_simulation(p, kind_of(report_flags.kind), &hist);
            Sink sink(report_csv, out);
            sherlog::write_csv(sink.stream(), hist);
            err << "sherlog: records=" << hist.total()
                << " subnormal_fraction=" << csv::number(sherlog::subnormal_fraction(hist))
                << " suggested_scale=" << csv::number(sherlog::suggest_scale(hist)) << '\n';
            return exit_ok;
        }

        if (*net) {
            err << host_info() << '\n';
            netbench::NetBenchConfig cfg;
            cfg.seed = settings.seed;
            cfg.cache_avoidance = cache_avoidance;
            cfg.fixed_repetitions = reps;
            cfg.msg_sizes = net_sizes.empty() ? netbench::default_sizes(net_max_exp) : parse_byte_sizes(net_sizes);
            cfg.validate();
            netbench::SteadyClock clock;
            Sink sink(net_csv, out);
            if (net_op == "pingpong") {
                if (ranks && *ranks != 2) throw ConfigError("pingpong runs on exactly 2 ranks");
                netbench::InProcNetwork network(2);
                const auto rows = netbench::pingpong(network.endpoint(0), network.endpoint(1), cfg, clock);
                netbench::write_pingpong_csv(sink.stream(), rows);
                if (!net_svg.empty()) svg::write_file(net_svg, svg::render(netbench::pingpong_chart(rows)));
            } else {
                const int n = ranks.value_or(4);
                if (n < 2) throw ConfigError("collectives need at least 2 ranks");
                const auto kind = net_op == "reduce"      ? netbench::CollectiveKind::reduce
                                  : net_op == "allreduce" ? netbench::CollectiveKind::allreduce
                                                          : netbench::CollectiveKind::gatherv;
                const netbench::ReduceOp op =
                    reduce_op == "max"        ? netbench::ReduceOp::max()
                    : reduce_op == "plus-one" ? netbench::ReduceOp{"plus-one", [](double a, double b) { return a + b + 1.0; }}
                                              : netbench::ReduceOp::sum();
                netbench::InProcNetwork network(n);
                const auto eps = network.endpoints();
                const auto rows = netbench::collective_bench(kind, eps, op, cfg, clock);
                netbench::write_collective_csv(sink.stream(), kind, n, rows);
                if (!net_svg.empty()) {
                    svg::write_file(net_svg, svg::render(netbench::latency_chart(net_op + " latency", rows)));
                }
            }
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        err << app.get_name() << ": config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const BlowupError& e) {
        err << app.get_name() << ": " << e.what() << '\n';
        return exit_blowup;
    } catch (const std::exception& e) {
        err << app.get_name() << ": error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

}  // namespace precflex::cli
