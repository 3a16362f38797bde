#include "precflex/kernels.hpp"

#include <algorithm>
#include <bit>
#include <chrono>

#include "precflex/random.hpp"

namespace precflex::kernels {

void axpy(double a, std::span<const double> x, std::span<double> y) { axpy_inplace(a, x, y); }
void axpy(float a, std::span<const float> x, std::span<float> y) { axpy_inplace(a, x, y); }
void axpy(Half16 a, std::span<const Half16> x, std::span<Half16> y) { axpy_inplace(a, x, y); }

std::vector<std::size_t> power_of_two_sizes(int min_exp, int max_exp) {
    if (min_exp < 0 || max_exp < min_exp || max_exp > 40) {
        throw ConfigError("size exponents must satisfy 0 <= min <= max <= 40");
    }
    std::vector<std::size_t> sizes;
    for (int e = min_exp; e <= max_exp; ++e) {
        sizes.push_back(std::size_t{1} << e);
    }
    return sizes;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class T>
std::uint64_t hash_values(std::span<const T> values) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const T& v : values) {
        const double d = to_f64(v);
        std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
        for (int k = 0; k < 8; ++k) {
            h = (h ^ (bits & 0xFF)) * 0x100000001B3ull;
            bits >>= 8;
        }
    }
    return h;
}

template <class T>
void fill(std::vector<T>& v, Rng& rng) {
    for (auto& e : v) {
        e = make_scalar<T>(rng.uniform(-1.0, 1.0));
    }
}

template <class T>
BenchRecord bench_one(std::size_t n, const AxpyBenchConfig& cfg) {
    BenchRecord rec;
    rec.label = "axpy";
    rec.element_kind = scalar_traits<T>::kind;
    rec.size = n;

    const std::size_t copies = std::max<std::size_t>(cfg.buffer_copies, 1);
    const std::size_t bytes = 2 * n * sizeof(T) * copies;
    if (n == 0 || bytes / copies / 2 / sizeof(T) != n || bytes > cfg.memory_cap_bytes) {
        rec.error = n == 0 ? "size must be positive"
                           : "buffers need " + std::to_string(bytes) + " bytes, cap is " +
                                 std::to_string(cfg.memory_cap_bytes);
        return rec;
    }

    Rng rng(SeedTree(cfg.seed).split("axpy").split(std::to_string(n)));
    const T a = make_scalar<T>(0.5);
    std::vector<std::vector<T>> xs(copies, std::vector<T>(n));
    std::vector<std::vector<T>> ys(copies, std::vector<T>(n));
    for (std::size_t c = 0; c < copies; ++c) {
        fill(xs[c], rng);
        fill(ys[c], rng);
    }

    {
        // Result signature from exactly one call, independent of timing.
        std::vector<T> y0 = ys[0];
        axpy(a, std::span<const T>(xs[0]), std::span<T>(y0));
        rec.result_hash = hash_values<T>(y0);
    }

    std::size_t next = 0;
    auto call = [&] {
        axpy(a, std::span<const T>(xs[next]), std::span<T>(ys[next]));
        next = (next + 1) % copies;
    };

    for (int w = 0; w < cfg.protocol.warmup_calls; ++w) {
        call();
    }
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(cfg.protocol.samples));
    for (int s = 0; s < cfg.protocol.samples; ++s) {
        std::size_t calls = 0;
        const auto start = Clock::now();
        double elapsed = 0.0;
        do {
            call();
            ++calls;
            elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        } while (elapsed < cfg.protocol.min_sample_seconds);
        samples.push_back(elapsed / static_cast<double>(calls));
    }
    std::sort(samples.begin(), samples.end());
    rec.t_min = samples.front();
    rec.t_median = samples[samples.size() / 2];
    rec.rate = 2.0 * static_cast<double>(n) / rec.t_min;
    return rec;
}

template <class T>
std::vector<BenchRecord> bench_kind(std::span<const std::size_t> sizes, const AxpyBenchConfig& cfg) {
    std::vector<BenchRecord> out;
    out.reserve(sizes.size());
    for (std::size_t n : sizes) {
        try {
            out.push_back(bench_one<T>(n, cfg));
        } catch (const std::bad_alloc&) {
            BenchRecord rec;
            rec.label = "axpy";
            rec.element_kind = scalar_traits<T>::kind;
            rec.size = n;
            rec.error = "allocation failed";
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

std::vector<BenchRecord> bench_axpy(ScalarKind kind, std::span<const std::size_t> sizes,
                                    const AxpyBenchConfig& config) {
    if (config.protocol.samples < 1 || config.protocol.warmup_calls < 0) {
        throw ConfigError("timing protocol needs at least one sample");
    }
    switch (kind) {
        case ScalarKind::f64: return bench_kind<double>(sizes, config);
        case ScalarKind::f32: return bench_kind<float>(sizes, config);
        case ScalarKind::f16: return bench_kind<Half16>(sizes, config);
        case ScalarKind::f16_mixed: break;
    }
    throw DomainError("axpy benchmark supports f64, f32 and f16");
}

}  // namespace precflex::kernels
