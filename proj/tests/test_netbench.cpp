#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <sstream>
#include <thread>
#include <vector>

#include "doctest.h"
#include "precflex/errors.hpp"
#include "precflex/netbench/bench.hpp"
#include "precflex/random.hpp"

using namespace precflex;
using namespace precflex::netbench;

namespace {

// Independent reference for the binomial bracketing: a block of 2m ranks
// starting at lo combines the results of its two halves.
double tree(const std::vector<double>& x, int lo, int m, const ReduceOp& op) {
    const int n = static_cast<int>(x.size());
    if (m == 1) return x[lo];
    const int half = m / 2;
    if (lo + half >= n) return tree(x, lo, half, op);
    return op.fn(tree(x, lo, half, op), tree(x, lo + half, half, op));
}

std::vector<double> oracle_reduce(const std::vector<std::vector<double>>& in, const ReduceOp& op) {
    const int n = static_cast<int>(in.size());
    int m = 1;
    while (m < n) m *= 2;
    std::vector<double> out(in[0].size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::vector<double> column;
        for (const auto& v : in) column.push_back(v[k]);
        out[k] = tree(column, 0, m, op);
    }
    return out;
}

template <class Body>
void on_all_ranks(InProcNetwork& net, Body body) {
    std::vector<std::thread> th;
    for (int r = 0; r < net.size(); ++r) th.emplace_back([&, r] { body(net.endpoint(r)); });
    for (auto& t : th) t.join();
}

ReduceOp plus_one() {
    return {"plus1", [](double a, double b) { return a + b + 1.0; }};
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("pingpong on the scripted clock matches closed form") {
    InProcNetwork net(2);
    FakeClock clock;
    TickingTransport t0(net.endpoint(0), clock, 1000);
    NetBenchConfig cfg;
    cfg.msg_sizes = {0, 1024};
    cfg.fixed_repetitions = 10;
    const auto rows = pingpong(t0, net.endpoint(1), cfg, clock);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size == 0);
    CHECK(rows[0].latency_us == 0.5);
    CHECK_FALSE(rows[0].throughput_MBps.has_value());
    CHECK(rows[1].size == 1024);
    CHECK(rows[1].latency_us == 0.5);
    REQUIRE(rows[1].throughput_MBps.has_value());
    CHECK(*rows[1].throughput_MBps == 2048.0);

    std::ostringstream os;
    write_pingpong_csv(os, rows);
    CHECK(os.str() ==
          "op,ranks,size_bytes,t_min_us,t_avg_us,t_max_us,throughput_MBps\n"
          "pingpong,2,0,0.5,0.5,0.5,\n"
          "pingpong,2,1024,0.5,0.5,0.5,2048\n");
}

TEST_CASE("pingpong closed form across sizes and step lengths") {
    for (std::int64_t step : {1, 250, 4096}) {
        InProcNetwork net(2);
        FakeClock clock(12345);
        TickingTransport t0(net.endpoint(0), clock, step);
        NetBenchConfig cfg;
        cfg.msg_sizes = default_sizes(12);
        cfg.cache_avoidance = true;
        const auto rows = pingpong(t0, net.endpoint(1), cfg, clock);
        REQUIRE(rows.size() == cfg.msg_sizes.size());
        for (const auto& r : rows) {
            const double lat = static_cast<double>(step) / 2.0 / 1000.0;
            CHECK(r.latency_us == lat);
            if (r.size > 0) CHECK(*r.throughput_MBps == static_cast<double>(r.size) / lat);
        }
    }
}

TEST_CASE("pingpong on the steady clock reports positive latencies") {
    InProcNetwork net(2);
    SteadyClock clock;
    NetBenchConfig cfg;
    cfg.msg_sizes = {0, 8, 1 << 16};
    cfg.fixed_repetitions = 20;
    const auto rows = pingpong(net.endpoint(0), net.endpoint(1), cfg, clock);
    for (const auto& r : rows) CHECK(r.latency_us > 0.0);
}

TEST_CASE("pingpong detects corrupted echoes") {
    class Corrupting final : public Transport {
    public:
        explicit Corrupting(Transport& t) : t_(t) {}
        void send(int dest, std::span<const std::byte> data) override {
            Bytes b(data.begin(), data.end());
            if (!b.empty()) b[0] ^= std::byte{1};
            t_.send(dest, b);
        }
        Bytes recv(int src) override { return t_.recv(src); }
        int rank() const override { return t_.rank(); }
        int size() const override { return t_.size(); }
        void abort(const std::string& r) override { t_.abort(r); }

    private:
        Transport& t_;
    };
    InProcNetwork net(2);
    Corrupting t1(net.endpoint(1));
    SteadyClock clock;
    NetBenchConfig cfg;
    cfg.msg_sizes = {16};
    cfg.fixed_repetitions = 3;
    CHECK_THROWS_AS(pingpong(net.endpoint(0), t1, cfg, clock), IntegrityError);
}

TEST_CASE("pingpong needs two ranks") {
    InProcNetwork net(3);
    SteadyClock clock;
    CHECK_THROWS_AS(pingpong(net.endpoint(0), net.endpoint(1), NetBenchConfig{}, clock), ConfigError);
}

TEST_CASE("repetition schedule") {
    NetBenchConfig cfg;
    CHECK(cfg.repetitions(0) == 1000);
    CHECK(cfg.repetitions(4096) == 1000);
    CHECK(cfg.repetitions(8192) == 500);
    CHECK(cfg.repetitions(16384) == 250);
    CHECK(cfg.repetitions(std::size_t{1} << 18) == 15);
    CHECK(cfg.repetitions(std::size_t{1} << 19) == 10);
    CHECK(cfg.repetitions(std::size_t{1} << 20) == 10);
    CHECK(cfg.repetitions(std::size_t{1} << 22) == 10);
    const auto s = default_sizes();
    CHECK(s.size() == 24);
    CHECK(s.front() == 0);
    CHECK(s.back() == (std::size_t{1} << 22));
    cfg.msg_sizes = {8, 4};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("allreduce sum of 1..4 gives 10 everywhere") {
    InProcNetwork net(4);
    std::vector<std::vector<double>> out(4);
    on_all_ranks(net, [&](Transport& t) {
        const double mine = t.rank() + 1.0;
        out[t.rank()] = allreduce(t, std::span<const double>(&mine, 1), ReduceOp::sum());
    });
    for (const auto& v : out) CHECK(v == std::vector<double>{10.0});
}

TEST_CASE("two-rank reduce max") {
    InProcNetwork net(2);
    std::vector<std::vector<double>> out(2);
    on_all_ranks(net, [&](Transport& t) {
        const double mine = t.rank() == 0 ? 5.0 : 3.0;
        out[t.rank()] = reduce(t, std::span<const double>(&mine, 1), ReduceOp::max());
    });
    CHECK(out[0] == std::vector<double>{5.0});
    CHECK(out[1].empty());
}

TEST_CASE("gatherv concatenates unequal chunks in rank order") {
    InProcNetwork net(3);
    const std::vector<std::size_t> counts{1, 2, 3};
    Bytes result;
    on_all_ranks(net, [&](Transport& t) {
        Bytes chunk(counts[t.rank()], std::byte(t.rank() + 1));
        Bytes r = gatherv(t, chunk, counts);
        if (t.rank() == 0) result = r;
    });
    const Bytes expect{std::byte{1}, std::byte{2}, std::byte{2}, std::byte{3}, std::byte{3}, std::byte{3}};
    CHECK(result == expect);
}

TEST_CASE("gatherv rejects chunks that contradict the counts") {
    InProcNetwork net(2);
    const std::vector<std::size_t> counts{1, 2};
    // rank 1 bypasses its own check by declaring 3 bytes locally
    std::exception_ptr err;
    std::thread r1([&] {
        const std::vector<std::size_t> lie{1, 3};
        gatherv(net.endpoint(1), Bytes(3), lie);
    });
    try {
        gatherv(net.endpoint(0), Bytes(1), counts);
    } catch (...) {
        err = std::current_exception();
    }
    r1.join();
    REQUIRE(err);
    CHECK_THROWS_AS(std::rethrow_exception(err), ProtocolError);
    CHECK_THROWS_AS(gatherv(net.endpoint(0), Bytes(2), counts), ProtocolError);
}

TEST_CASE("reductions equal the serial oracles for 2, 3, 4 and 8 ranks") {
    const std::vector<ReduceOp> ops{ReduceOp::sum(), ReduceOp::max(), plus_one()};
    Rng rng(7);
    for (int n : {2, 3, 4, 8}) {
        for (const auto& op : ops) {
            for (int trial = 0; trial < 5; ++trial) {
                const std::size_t len = 1 + rng.below(40);
                std::vector<std::vector<double>> in(n, std::vector<double>(len));
                for (auto& v : in)
                    for (double& x : v) x = rng.uniform(-1e3, 1e3);
                const auto expect = oracle_reduce(in, op);
                CHECK(same_bits(serial_reduce(in, op), expect));

                InProcNetwork net(n);
                std::vector<std::vector<double>> red(n), all(n);
                on_all_ranks(net, [&](Transport& t) {
                    red[t.rank()] = reduce(t, in[t.rank()], op);
                    all[t.rank()] = allreduce(t, in[t.rank()], op);
                });
                CHECK(same_bits(red[0], expect));
                for (int r = 0; r < n; ++r) {
                    CHECK(same_bits(all[r], expect));
                    if (r) CHECK(red[r].empty());
                }
            }
        }
    }
}

TEST_CASE("custom operator on integer data has the closed form sum + N - 1") {
    for (int n : {2, 3, 4, 8}) {
        InProcNetwork net(n);
        std::vector<std::vector<double>> all(n);
        on_all_ranks(net, [&](Transport& t) {
            const std::vector<double> mine{static_cast<double>(t.rank()), 10.0};
            all[t.rank()] = allreduce(t, mine, plus_one());
        });
        const double sum = n * (n - 1) / 2.0;
        for (const auto& v : all) CHECK(v == std::vector<double>{sum + n - 1, 10.0 * n + n - 1});
    }
}

TEST_CASE("gatherv equals the serial concatenation for 2, 3, 4 and 8 ranks") {
    Rng rng(11);
    for (int n : {2, 3, 4, 8}) {
        std::vector<std::size_t> counts(n);
        std::vector<Bytes> chunks(n);
        Bytes expect;
        for (int r = 0; r < n; ++r) {
            counts[r] = rng.below(50);
            chunks[r] = payload(3, r, counts[r]);
            expect.insert(expect.end(), chunks[r].begin(), chunks[r].end());
        }
        InProcNetwork net(n);
        Bytes got;
        on_all_ranks(net, [&](Transport& t) {
            Bytes r = gatherv(t, chunks[t.rank()], counts);
            if (t.rank() == 0) got = std::move(r);
        });
        CHECK(got == expect);
    }
}

TEST_CASE("collective benchmarks verify every repetition") {
    NetBenchConfig cfg;
    cfg.msg_sizes = {0, 4, 8, 64, 1024};
    cfg.fixed_repetitions = 5;
    for (int n : {2, 3, 4, 8}) {
        for (auto kind : {CollectiveKind::reduce, CollectiveKind::allreduce, CollectiveKind::gatherv}) {
            InProcNetwork net(n);
            SteadyClock clock;
            const auto eps = net.endpoints();
            const auto rows = collective_bench(kind, eps, plus_one(), cfg, clock);
            if (kind == CollectiveKind::gatherv) {
                CHECK(rows.size() == 5);
            } else {
                // 0 and 4 bytes both hold zero elements
                REQUIRE(rows.size() == 4);
                CHECK(rows[0].size == 0);
                CHECK(rows[1].size == 8);
            }
            for (const auto& r : rows) {
                CHECK(r.t_min_us <= r.t_avg_us);
                CHECK(r.t_avg_us <= r.t_max_us);
            }
            std::ostringstream os;
            write_collective_csv(os, kind, n, rows);
            CHECK(os.str().find(to_string(kind) + "," + std::to_string(n) + ",8,") != std::string::npos);
        }
    }
}

TEST_CASE("collective bench reports a wrong result") {
    // The operator gives different answers on different threads, so the
    // tree result cannot match the serial reference.
    std::atomic<int> calls{0};
    ReduceOp flaky{"flaky", [&](double a, double b) { return a + b + (calls++ % 7 == 3 ? 1.0 : 0.0); }};
    NetBenchConfig cfg;
    cfg.msg_sizes = {64};
    cfg.fixed_repetitions = 20;
    InProcNetwork net(4);
    SteadyClock clock;
    const auto eps = net.endpoints();
    CHECK_THROWS_AS(collective_bench(CollectiveKind::allreduce, eps, flaky, cfg, clock), CorrectnessError);
}

TEST_CASE("collectives need at least two ranks") {
    InProcNetwork net(1);
    SteadyClock clock;
    const auto eps = net.endpoints();
    CHECK_THROWS_AS(collective_bench(CollectiveKind::reduce, eps, ReduceOp::sum(), NetBenchConfig{}, clock),
                    ConfigError);
}

TEST_CASE("per-pair FIFO under 10^4 interleaved messages") {
    const int n = 4, per_pair = 10000 / (n * (n - 1)) + 1;
    InProcNetwork net(n);
    std::vector<int> errors(n, 0);
    on_all_ranks(net, [&](Transport& t) {
        std::thread sender([&] {
            for (int k = 0; k < per_pair; ++k) {
                for (int d = 0; d < n; ++d) {
                    if (d == t.rank()) continue;
                    const std::int64_t tag = k;
                    Bytes b(sizeof tag);
                    std::memcpy(b.data(), &tag, sizeof tag);
                    t.send(d, b);
                }
            }
        });
        std::vector<std::int64_t> expect(n, 0);
        for (int k = 0; k < per_pair * (n - 1); ++k) {
            const int src = (t.rank() + 1 + k % (n - 1)) % n;
            const Bytes b = t.recv(src);
            std::int64_t tag;
            std::memcpy(&tag, b.data(), sizeof tag);
            if (tag != expect[src]++) ++errors[t.rank()];
        }
        sender.join();
    });
    for (int e : errors) CHECK(e == 0);
}

TEST_CASE("abort wakes blocked receivers") {
    InProcNetwork net(2);
    std::thread waker([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        net.abort("test");
    });
    CHECK_THROWS_AS(net.endpoint(0).recv(1), TransportError);
    waker.join();
    CHECK(net.aborted());
    CHECK_THROWS_AS(net.endpoint(0).send(1, Bytes(1)), TransportError);
    CHECK_THROWS_AS(net.endpoint(5), TransportError);
}

TEST_CASE("buffer rotation changes addresses, never contents") {
    const Bytes pattern = payload(1, 2, 100);
    BufferPool hot(pattern, 1), cold(pattern, BufferPool::rotation);
    const auto h0 = hot.next(), h1 = hot.next();
    CHECK(h0.data() == h1.data());
    std::vector<const std::byte*> seen;
    for (std::size_t k = 0; k < BufferPool::rotation; ++k) {
        const auto b = cold.next();
        CHECK(std::equal(b.begin(), b.end(), pattern.begin(), pattern.end()));
        seen.push_back(b.data());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("fake clock") {
    FakeClock c(100, 5);
    CHECK(c.now() == 100);
    CHECK(c.now() == 105);
    c.advance(1000);
    CHECK(c.now() == 1110);
}
