#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precflex/netbench/collectives.hpp"
#include "precflex/netbench/transport.hpp"
#include "precflex/svg.hpp"

namespace precflex::netbench {

enum class CollectiveKind { reduce, allreduce, gatherv };

std::string to_string(CollectiveKind kind);

/// Sizes 0 and 2^0 .. 2^max_exp bytes.
std::vector<std::size_t> default_sizes(int max_exp = 22);

struct NetBenchConfig {
    std::vector<std::size_t> msg_sizes = default_sizes();
    int warmup_iters = 2;
    /// Overrides the size-dependent schedule when set.
    std::optional<int> fixed_repetitions;
    bool cache_avoidance = false;
    std::uint64_t seed = 42;

    /// 1000 up to 4 KiB, halved per further doubling, at least 10.
    int repetitions(std::size_t size) const;
    /// Throws ConfigError unless sizes are ascending and repetitions >= 1.
    void validate() const;
};

/// `copies` disjoint buffers holding the same bytes; next() rotates through
/// them so consecutive repetitions touch different memory.
class BufferPool {
public:
    static constexpr std::size_t rotation = 16;

    BufferPool(std::span<const std::byte> pattern, std::size_t copies);
    std::span<const std::byte> next();
    std::size_t copies() const noexcept { return buffers_.size(); }

private:
    std::vector<Bytes> buffers_;
    std::size_t cursor_ = 0;
};

/// Deterministic payload of `size` bytes derived from seed and tag.
Bytes payload(std::uint64_t seed, std::uint64_t tag, std::size_t size);

struct PingPongRow {
    std::size_t size = 0;
    double latency_us = 0.0;
    /// Bytes per microsecond (1 MB = 10^6 bytes); absent for size 0.
    std::optional<double> throughput_MBps;
};

/// Rank 0 (t0) sends and waits for the echo from rank 1 (t1), which runs on
/// a worker thread. latency = elapsed / (2 reps); every echoed buffer is
/// compared with what was sent before the clock is read again. Throws
/// IntegrityError on a corrupted echo.
std::vector<PingPongRow> pingpong(Transport& t0, Transport& t1, const NetBenchConfig& cfg, Clock& clock);

struct CollectiveRow {
    std::size_t size = 0;
    double t_min_us = 0.0;
    double t_avg_us = 0.0;
    double t_max_us = 0.0;
};

/// Times `kind` over all ranks, one worker per rank. Each repetition starts
/// with a barrier; per-rank mean times are summarised by min/avg/max across
/// ranks. Reductions use size/8 binary64 elements (sizes are rounded down to
/// whole elements, duplicates dropped). gatherv chunks are `size` bytes per
/// rank. Every repetition's result is compared bitwise with a serial
/// reference; a mismatch throws CorrectnessError.
std::vector<CollectiveRow> collective_bench(CollectiveKind kind, std::span<Transport* const> ranks,
                                            const ReduceOp& op, const NetBenchConfig& cfg, Clock& clock);

/// Columns op,ranks,size_bytes,t_min_us,t_avg_us,t_max_us,throughput_MBps.
void write_pingpong_csv(std::ostream& os, std::span<const PingPongRow> rows);
void write_collective_csv(std::ostream& os, CollectiveKind kind, int ranks, std::span<const CollectiveRow> rows);

svg::LineChart latency_chart(const std::string& title, std::span<const CollectiveRow> rows);
svg::LineChart pingpong_chart(std::span<const PingPongRow> rows);

}  // namespace precflex::netbench
