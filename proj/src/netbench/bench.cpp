#include "precflex/netbench/bench.hpp"

#include <algorithm>
#include <cstring>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "precflex/csv.hpp"
#include "precflex/errors.hpp"
#include "precflex/random.hpp"

namespace precflex::netbench {
namespace {

std::vector<std::string> header_fields() {
    return {"op", "ranks", "size_bytes", "t_min_us", "t_avg_us", "t_max_us", "throughput_MBps"};
}

// Runs body(rank) on one thread per rank. The first exception is kept; the
// thread raising it aborts the transport so blocked peers wake up.
template <class Body>
void run_ranks(std::span<Transport* const> ranks, Body body) {
    std::mutex m;
    std::exception_ptr first;
    std::vector<std::thread> workers;
    for (std::size_t r = 0; r < ranks.size(); ++r) {
        workers.emplace_back([&, r] {
            try {
                body(static_cast<int>(r));
            } catch (const std::exception& e) {
                {
                    std::lock_guard lock(m);
                    if (!first) first = std::current_exception();
                }
                ranks[r]->abort(e.what());
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first) std::rethrow_exception(first);
}

std::vector<double> reduction_input(std::uint64_t seed, int rank, std::size_t count) {
    Rng rng(SeedTree(seed).split("netbench-reduce").split(std::to_string(rank) + ":" + std::to_string(count)));
    std::vector<double> v(count);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

}  // namespace

std::string to_string(CollectiveKind kind) {
    switch (kind) {
        case CollectiveKind::reduce: return "reduce";
        case CollectiveKind::allreduce: return "allreduce";
        case CollectiveKind::gatherv: return "gatherv";
    }
    return "?";
}

std::vector<std::size_t> default_sizes(int max_exp) {
    std::vector<std::size_t> s{0};
    for (int e = 0; e <= max_exp; ++e) s.push_back(std::size_t{1} << e);
    return s;
}

int NetBenchConfig::repetitions(std::size_t size) const {
    if (fixed_repetitions) return *fixed_repetitions;
    int reps = 1000;
    for (std::size_t s = 4096; s < size && reps > 10; s *= 2) reps /= 2;
    return std::max(reps, 10);
}

void NetBenchConfig::validate() const {
    if (!std::is_sorted(msg_sizes.begin(), msg_sizes.end())) {
        throw ConfigError("netbench message sizes must be ascending");
    }
    if (fixed_repetitions && *fixed_repetitions < 1) {
        throw ConfigError("netbench repetitions must be >= 1");
    }
    if (warmup_iters < 0) {
        throw ConfigError("netbench warmup iterations must be >= 0");
    }
}

BufferPool::BufferPool(std::span<const std::byte> pattern, std::size_t copies) {
    if (copies < 1) copies = 1;
    for (std::size_t k = 0; k < copies; ++k) buffers_.emplace_back(pattern.begin(), pattern.end());
}

std::span<const std::byte> BufferPool::next() {
    const Bytes& b = buffers_[cursor_];
    cursor_ = (cursor_ + 1) % buffers_.size();
    return b;
}

Bytes payload(std::uint64_t seed, std::uint64_t tag, std::size_t size) {
    Bytes out(size);
    std::uint64_t state = splitmix64(seed ^ splitmix64(tag));
    for (std::size_t k = 0; k < size; k += 8) {
        state = splitmix64(state);
        const std::size_t n = std::min<std::size_t>(8, size - k);
        std::memcpy(out.data() + k, &state, n);
    }
    return out;
}

std::vector<PingPongRow> pingpong(Transport& t0, Transport& t1, const NetBenchConfig& cfg, Clock& clock) {
    cfg.validate();
    if (t0.size() != 2 || t1.size() != 2 || t0.rank() != 0 || t1.rank() != 1) {
        throw ConfigError("pingpong needs exactly two ranks, 0 and 1");
    }
    std::vector<PingPongRow> rows;
    Transport* const eps[] = {&t0, &t1};
    run_ranks(eps, [&](int rank) {
        for (std::size_t size : cfg.msg_sizes) {
            const int reps = cfg.repetitions(size);
            const int total = cfg.warmup_iters + reps;
            if (rank == 1) {
                for (int k = 0; k < total; ++k) {
                    const Bytes b = t1.recv(0);
                    t1.send(0, b);
                }
                continue;
            }
            const Bytes pattern = payload(cfg.seed, size, size);
            BufferPool pool(pattern, cfg.cache_avoidance ? BufferPool::rotation : 1);
            std::int64_t start = 0;
            for (int k = 0; k < total; ++k) {
                if (k == cfg.warmup_iters) start = clock.now();
                const auto out = pool.next();
                t0.send(1, out);
                const Bytes echo = t0.recv(1);
                if (echo.size() != out.size() || !std::equal(echo.begin(), echo.end(), out.begin())) {
                    throw IntegrityError("pingpong: echo of " + std::to_string(size) + " bytes corrupted");
                }
            }
            const std::int64_t stop = clock.now();
            PingPongRow row;
            row.size = size;
            row.latency_us = static_cast<double>(stop - start) / (2.0 * reps) / 1000.0;
            if (size > 0) row.throughput_MBps = static_cast<double>(size) / row.latency_us;
            rows.push_back(row);
        }
    });
    return rows;
}

std::vector<CollectiveRow> collective_bench(CollectiveKind kind, std::span<Transport* const> ranks,
                                            const ReduceOp& op, const NetBenchConfig& cfg, Clock& clock) {
    cfg.validate();
    const int n = static_cast<int>(ranks.size());
    if (n < 2) {
        throw ConfigError("collectives need at least two ranks");
    }
    for (int r = 0; r < n; ++r) {
        if (ranks[r]->rank() != r || ranks[r]->size() != n) {
            throw ConfigError("collective endpoints must be ranks 0..N-1 of one network");
        }
    }

    std::vector<std::size_t> sizes;
    for (std::size_t s : cfg.msg_sizes) {
        const std::size_t eff = kind == CollectiveKind::gatherv ? s : s / sizeof(double) * sizeof(double);
        if (sizes.empty() || sizes.back() != eff) sizes.push_back(eff);
    }

    // per_rank[size index][rank] = mean nanoseconds per repetition
    std::vector<std::vector<double>> per_rank(sizes.size(), std::vector<double>(n, 0.0));
    run_ranks(ranks, [&](int rank) {
        Transport& t = *ranks[rank];
        for (std::size_t si = 0; si < sizes.size(); ++si) {
            const std::size_t size = sizes[si];
            const int reps = cfg.repetitions(size);
            const std::size_t copies = cfg.cache_avoidance ? BufferPool::rotation : 1;

            std::vector<std::vector<double>> inputs;
            std::vector<double> reference;
            Bytes gathered_reference;
            std::vector<std::size_t> counts(n, size);
            Bytes chunk;
            if (kind == CollectiveKind::gatherv) {
                chunk = payload(cfg.seed, (static_cast<std::uint64_t>(rank) << 32) ^ size, size);
                if (rank == 0) {
                    for (int r = 0; r < n; ++r) {
                        const Bytes c = payload(cfg.seed, (static_cast<std::uint64_t>(r) << 32) ^ size, size);
                        gathered_reference.insert(gathered_reference.end(), c.begin(), c.end());
                    }
                }
            } else {
                for (int r = 0; r < n; ++r) inputs.push_back(reduction_input(cfg.seed, r, size / sizeof(double)));
                reference = serial_reduce(inputs, op);
                chunk = to_bytes(inputs[static_cast<std::size_t>(rank)]);
            }
            BufferPool pool(chunk, copies);

            std::int64_t elapsed = 0;
            for (int k = 0; k < cfg.warmup_iters + reps; ++k) {
                barrier(t);
                const auto buf = pool.next();
                const std::int64_t t0 = clock.now();
                bool ok = true;
                switch (kind) {
                    case CollectiveKind::reduce: {
                        const auto res = reduce(t, to_doubles(buf), op);
                        const std::int64_t t1 = clock.now();
                        if (k >= cfg.warmup_iters) elapsed += t1 - t0;
                        ok = rank != 0 || to_bytes(res) == to_bytes(reference);
                        break;
                    }
                    case CollectiveKind::allreduce: {
                        const auto res = allreduce(t, to_doubles(buf), op);
                        const std::int64_t t1 = clock.now();
                        if (k >= cfg.warmup_iters) elapsed += t1 - t0;
                        ok = to_bytes(res) == to_bytes(reference);
                        break;
                    }
                    case CollectiveKind::gatherv: {
                        const Bytes res = gatherv(t, buf, counts);
                        const std::int64_t t1 = clock.now();
                        if (k >= cfg.warmup_iters) elapsed += t1 - t0;
                        ok = rank != 0 || res == gathered_reference;
                        break;
                    }
                }
                if (!ok) {
                    throw CorrectnessError(to_string(kind) + ": rank " + std::to_string(rank) +
                                           " result differs from the serial reference at " + std::to_string(size) +
                                           " bytes");
                }
            }
            per_rank[si][rank] = static_cast<double>(elapsed) / reps;
        }
    });

    std::vector<CollectiveRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const auto& v = per_rank[si];
        CollectiveRow row;
        row.size = sizes[si];
        row.t_min_us = *std::min_element(v.begin(), v.end()) / 1000.0;
        row.t_max_us = *std::max_element(v.begin(), v.end()) / 1000.0;
        double sum = 0.0;
        for (double x : v) sum += x;
        row.t_avg_us = sum / n / 1000.0;
        rows.push_back(row);
    }
    return rows;
}

void write_pingpong_csv(std::ostream& os, std::span<const PingPongRow> rows) {
    csv::Writer w(os);
    w.row(header_fields());
    for (const auto& r : rows) {
        const std::string lat = csv::number(r.latency_us);
        w.row({"pingpong", "2", std::to_string(r.size), lat, lat, lat,
               r.throughput_MBps ? csv::number(*r.throughput_MBps) : std::string()});
    }
}

void write_collective_csv(std::ostream& os, CollectiveKind kind, int ranks, std::span<const CollectiveRow> rows) {
    csv::Writer w(os);
    w.row(header_fields());
    for (const auto& r : rows) {
        w.row({to_string(kind), std::to_string(ranks), std::to_string(r.size), csv::number(r.t_min_us),
               csv::number(r.t_avg_us), csv::number(r.t_max_us), std::string()});
    }
}

svg::LineChart latency_chart(const std::string& title, std::span<const CollectiveRow> rows) {
    svg::LineChart c{title, "message size (bytes)", "latency (us)", true, {{"t_avg", {}, {}}, {"t_max", {}, {}}}};
    for (const auto& r : rows) {
        c.series[0].x.push_back(static_cast<double>(r.size));
        c.series[0].y.push_back(r.t_avg_us);
        c.series[1].x.push_back(static_cast<double>(r.size));
        c.series[1].y.push_back(r.t_max_us);
    }
    return c;
}

svg::LineChart pingpong_chart(std::span<const PingPongRow> rows) {
    svg::LineChart c{"pingpong throughput", "message size (bytes)", "throughput (MB/s)", true, {{"pingpong", {}, {}}}};
    for (const auto& r : rows) {
        if (!r.throughput_MBps) continue;
        c.series[0].x.push_back(static_cast<double>(r.size));
        c.series[0].y.push_back(*r.throughput_MBps);
    }
    return c;
}

}  // namespace precflex::netbench
