#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "precflex/cli/cli.hpp"
#include "precflex/cli/config.hpp"
#include "precflex/errors.hpp"
#include "precflex/swm/snapshot.hpp"

using namespace precflex;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "precflex");
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("precflex_test_" + name);
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string l;
    while (std::getline(ss, l)) out.push_back(l);
    return out;
}

std::size_t columns(const std::string& line) {
    std::size_t n = 1;
    for (char c : line) n += c == ',';
    return n;
}

void check_rectangular(const std::string& csv) {
    const auto ls = lines(csv);
    REQUIRE(ls.size() >= 2);
    for (const auto& l : ls) CHECK(columns(l) == columns(ls[0]));
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
}

const std::vector<std::string> small_run{"--set", "swm.nx=16", "--set", "swm.ny=8", "swm", "run", "--steps", "20"};

}  // namespace

TEST_CASE("help exits 0") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("swm") != std::string::npos);
    CHECK(run({"swm", "run", "--help"}).code == 0);
}

TEST_CASE("missing config file is a usage error naming the path") {
    const auto r = run({"swm", "run", "--config", "missing.file"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.file") != std::string::npos);
    CHECK(lines(r.err).size() == 1);
}

TEST_CASE("unknown flags and subcommands exit 2") {
    CHECK(run({"swm", "run", "--bogus"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"swm"}).code == 2);
    CHECK(run({"netbench", "--op", "scatter"}).code == 2);
}

TEST_CASE("swm run with defaults prints diagnostics") {
    const auto r = run({"swm", "run"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("step,t,mean_eta,mean_ke,max_u\n", 0) == 0);
    CHECK(lines(r.out).size() == 52);
    check_rectangular(r.out);
}

TEST_CASE("blowup exits 3") {
    const auto r = run({"swm", "run", "--kind", "f16", "--scale", "1048576", "--nx", "32", "--ny", "16"});
    CHECK(r.code == 3);
    CHECK(r.err.find("step 1") != std::string::npos);
}

TEST_CASE("config file, overrides and flags layer in that order") {
    const auto path = temp_path("layer.cfg");
    {
        std::ofstream os(path);
        os << "# test config\n\nswm.nx = 16\nswm.ny = 8\nswm.n_steps = 30\nswm.diag_every = 10\n";
    }
    auto r = run({"--config", path.string(), "swm", "run"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() == 5);
    r = run({"--config", path.string(), "--set", "swm.n_steps=10", "swm", "run"});
    CHECK(lines(r.out).size() == 3);
    r = run({"--config", path.string(), "--set", "swm.n_steps=10", "swm", "run", "--steps", "50"});
    CHECK(lines(r.out).size() == 7);
    std::filesystem::remove(path);
}

TEST_CASE("bad config contents exit 2") {
    const auto path = temp_path("bad.cfg");
    {
        std::ofstream os(path);
        os << "swm.nx = 16\nthis line is wrong\n";
    }
    auto r = run({"--config", path.string(), "swm", "run"});
    CHECK(r.code == 2);
    CHECK(r.err.find(":2:") != std::string::npos);
    std::filesystem::remove(path);
    CHECK(run({"--set", "swm.nope=1", "swm", "run"}).code == 2);
    CHECK(run({"--set", "nosection=1", "swm", "run"}).code == 2);
    CHECK(run({"--set", "other.key=1", "swm", "run"}).code == 2);
    CHECK(run({"--set", "fp16.muladd=sometimes", "swm", "run"}).code == 2);
    CHECK(run({"--set", "fp16.flush_subnormals=maybe", "swm", "run"}).code == 2);
    CHECK(run({"--set", "swm.nx=2", "swm", "run"}).code == 2);
    CHECK(run({"swm", "run", "--kind", "f8"}).code == 2);
}

TEST_CASE("config parser") {
    std::istringstream is("  a.b =  1 # note\n# c\n\nx.y=two words\nz.w = a#b\n");
    const auto c = cli::Config::parse(is, "mem");
    CHECK(c.get("a.b") == "1");
    CHECK(c.get("x.y") == "two words");
    CHECK(c.get("z.w") == "a#b");
    CHECK_FALSE(c.get("a.c").has_value());
    cli::Config d;
    CHECK_THROWS_AS(d.set("novalue"), ConfigError);
    CHECK(cli::parse_bool("k", "on"));
    CHECK_FALSE(cli::parse_bool("k", "0"));
}

TEST_CASE("flush policy from config and environment changes binary16 results") {
    std::vector<std::string> base{"--set", "swm.nx=16", "--set", "swm.ny=8", "sherlog", "report", "--kind", "f16",
                                  "--steps", "5"};
    const auto plain = run(base);
    auto flushed_args = base;
    flushed_args.insert(flushed_args.begin(), {"--set", "fp16.flush_subnormals=true"});
    const auto flushed = run(flushed_args);
    REQUIRE(plain.code == 0);
    REQUIRE(flushed.code == 0);
    CHECK(plain.out != flushed.out);

    setenv("HALF_FLUSH_SUBNORMALS", "1", 1);
    const auto env = run(base);
    unsetenv("HALF_FLUSH_SUBNORMALS");
    CHECK(env.out == flushed.out);
    // the process default is restored after each command
    CHECK(run(base).out == plain.out);

    auto fused = base;
    fused.insert(fused.begin(), {"--set", "fp16.muladd=fused"});
    CHECK(run(fused).code == 0);
}

TEST_CASE("swm run writes snapshot and heat map") {
    const auto snap = temp_path("run.snap"), svg = temp_path("eta.svg");
    auto args = small_run;
    args.insert(args.end(), {"--snapshot", snap.string(), "--svg", svg.string()});
    REQUIRE(run(args).code == 0);
    const auto s = swm::read_snapshot(snap.string());
    CHECK(s.nx == 16);
    CHECK(s.ny == 8);
    CHECK(s.eta.size() == 128);
    std::ifstream is(svg);
    std::string doc((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(doc.rfind("<svg", 0) == 0);
    std::filesystem::remove(snap);
    std::filesystem::remove(svg);
    CHECK(run({"swm", "run", "--steps", "1", "--snapshot", "/nonexistent/dir/x"}).code == 1);
}

TEST_CASE("sherlog report prints histogram and summary") {
    const auto r = run({"--set", "swm.nx=16", "--set", "swm.ny=8", "sherlog", "report", "--steps", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("exponent,count\n", 0) == 0);
    check_rectangular(r.out);
    CHECK(lines(r.out).size() == 1 + 129 + 3);
    CHECK(r.err.find("suggested_scale=") != std::string::npos);
}

TEST_CASE("swm bench emits a complete table") {
    const auto r = run({"swm", "bench", "--sizes", "16x8", "--horizon", "10", "--kinds", "f64,f32,f16"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("kind,nx,ny,steps,t_wall_s,speedup,rmse_eta,comp_overhead,status\n", 0) == 0);
    CHECK(lines(r.out).size() == 4);
    check_rectangular(r.out);
    CHECK(r.err.find("host:") != std::string::npos);
    CHECK(r.err.find("A64FX") != std::string::npos);
    CHECK(run({"swm", "bench", "--sizes", "16x8", "--kinds", "f32"}).code == 2);
    CHECK(run({"swm", "bench", "--sizes", "16by8"}).code == 2);
}

TEST_CASE("axpy-bench emits one row per kind and size") {
    const auto r = run({"axpy-bench", "--min-exp", "3", "--max-exp", "5", "--samples", "2", "--min-time", "0.0005"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("kind,size,t_min_s,t_median_s,gflops\n", 0) == 0);
    CHECK(lines(r.out).size() == 1 + 3 * 3);
    check_rectangular(r.out);
    CHECK(run({"axpy-bench", "--kind", "mixed"}).code == 2);
    CHECK(run({"axpy-bench", "--min-exp", "9", "--max-exp", "3"}).code == 2);
}

TEST_CASE("netbench subcommand") {
    auto r = run({"netbench", "--sizes", "0,16,256", "--reps", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("op,ranks,size_bytes,t_min_us,t_avg_us,t_max_us,throughput_MBps\n", 0) == 0);
    CHECK(lines(r.out).size() == 4);
    check_rectangular(r.out);
    r = run({"netbench", "--op", "gatherv", "--ranks", "3", "--sizes", "0,16,256", "--reps", "5", "--cache-avoidance"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("gatherv,3,256,") != std::string::npos);
    CHECK(run({"netbench", "--ranks", "3"}).code == 2);
    CHECK(run({"netbench", "--op", "reduce", "--ranks", "1"}).code == 2);
    CHECK(run({"netbench", "--sizes", "16,8"}).code == 2);
}

TEST_CASE("fixed seed reproduces output, other seeds differ") {
    const auto a = run(small_run);
    const auto b = run(small_run);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto other = small_run;
    other.insert(other.begin(), {"--seed", "7"});
    CHECK(run(other).out != a.out);
    auto via_config = small_run;
    via_config.insert(via_config.begin(), {"--set", "run.seed=7"});
    CHECK(run(via_config).out == run(other).out);
    auto model_seed = small_run;
    model_seed.insert(model_seed.begin(), {"--set", "swm.seed=7"});
    CHECK(run(model_seed).out == run(other).out);
    model_seed.insert(model_seed.begin(), {"--seed", "42"});
    CHECK(run(model_seed).out == a.out);
}
