#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precflex/errors.hpp"
#include "precflex/scalar.hpp"

namespace precflex::kernels {

/// y[i] = muladd(a, x[i], y[i]) for every i, in ascending order.
template <Scalar T>
void axpy_inplace(const T& a, std::span<const T> x, std::span<T> y) {
    if (x.size() != y.size()) {
        throw DimensionError("axpy: x has " + std::to_string(x.size()) + " elements, y has " +
                             std::to_string(y.size()));
    }
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = muladd(a, x[i], y[i]);
    }
}

// Non-inlined instantiations used by the benchmark harness.
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpy(float a, std::span<const float> x, std::span<float> y);
void axpy(Half16 a, std::span<const Half16> x, std::span<Half16> y);

struct TimingProtocol {
    int warmup_calls = 3;
    double min_sample_seconds = 0.010;
    int samples = 11;
};

struct BenchRecord {
    std::string label;
    ScalarKind element_kind = ScalarKind::f64;
    std::size_t size = 0;
    double t_min = 0.0;
    double t_median = 0.0;
    /// Floating-point operations per second, 2 * size / t_min.
    double rate = 0.0;
    /// FNV-1a hash of y after one kernel call on freshly seeded buffers.
    std::uint64_t result_hash = 0;
    /// Set when this size could not be run (for example over the memory cap).
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
    double gflops() const noexcept { return rate * 1e-9; }
};

struct AxpyBenchConfig {
    TimingProtocol protocol;
    std::uint64_t seed = 42;
    /// Rotate through this many disjoint (x, y) buffer pairs so consecutive
    /// calls touch cold memory. 1 means hot-cache reuse.
    std::size_t buffer_copies = 1;
    std::size_t memory_cap_bytes = std::size_t{1} << 30;
};

inline constexpr std::size_t cold_buffer_copies = 16;

std::vector<BenchRecord> bench_axpy(ScalarKind kind, std::span<const std::size_t> sizes,
                                    const AxpyBenchConfig& config);

/// Doubling sizes 2^min_exp .. 2^max_exp inclusive.
std::vector<std::size_t> power_of_two_sizes(int min_exp, int max_exp);

}  // namespace precflex::kernels
