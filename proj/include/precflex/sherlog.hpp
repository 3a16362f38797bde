#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

#include "precflex/scalar.hpp"

namespace precflex::sherlog {

/// Base-2 magnitude histogram of recorded values.
class LogHistogram {
public:
    static constexpr int min_exponent = -64;
    static constexpr int max_exponent = 64;
    static constexpr std::size_t bin_count = max_exponent - min_exponent + 1;

    /// Increments exactly one counter: zero, inf, nan, or the bin of
    /// clamp(floor(log2|x|), -64, 64).
    void record(double x) noexcept;

    /// Counter-wise sum; used to combine per-thread contexts.
    void merge(const LogHistogram& other) noexcept;

    std::uint64_t bin(int exponent) const;
    const std::array<std::uint64_t, bin_count>& bins() const noexcept { return bins_; }
    std::uint64_t zero_count() const noexcept { return zero_; }
    std::uint64_t inf_count() const noexcept { return inf_; }
    std::uint64_t nan_count() const noexcept { return nan_; }
    std::uint64_t total() const noexcept { return total_; }

    static int exponent_of(double x) noexcept;

    friend bool operator==(const LogHistogram&, const LogHistogram&) = default;

private:
    std::array<std::uint64_t, bin_count> bins_{};
    std::uint64_t zero_ = 0;
    std::uint64_t inf_ = 0;
    std::uint64_t nan_ = 0;
    std::uint64_t total_ = 0;
};

inline constexpr double f16_subnormal_lo = 0x1p-24;
inline constexpr double f16_subnormal_hi = 0x1p-14;

/// Fraction of all records whose bin's lower edge 2^e lies in [lo, hi).
/// Throws DomainError unless 0 < lo < hi.
double subnormal_fraction(const LogHistogram& h, double lo = f16_subnormal_lo,
                          double hi = f16_subnormal_hi);

/// Power of two s that moves the median recorded exponent to 0. With an even
/// number of records the lower median is used, i.e. ties go to the larger s.
/// Zero/inf/nan records do not vote; a histogram holding only those yields 1.
/// Throws DomainError on an empty histogram.
double suggest_scale(const LogHistogram& h);

/// CSV with columns exponent,count: one row per bin, then zero, inf, nan rows.
void write_csv(std::ostream& os, const LogHistogram& h);

/// Shadow number: delegates every operation to the base format and records
/// the magnitude of each arithmetic result in the attached histogram.
template <Scalar T>
class SherlogScalar {
public:
    SherlogScalar() = default;
    SherlogScalar(T value, LogHistogram* recorder) noexcept : value_(value), recorder_(recorder) {}

    const T& value() const noexcept { return value_; }
    LogHistogram* recorder() const noexcept { return recorder_; }

    friend SherlogScalar operator+(const SherlogScalar& a, const SherlogScalar& b) {
        return logged(a.value_ + b.value_, a, b);
    }
    friend SherlogScalar operator-(const SherlogScalar& a, const SherlogScalar& b) {
        return logged(a.value_ - b.value_, a, b);
    }
    friend SherlogScalar operator*(const SherlogScalar& a, const SherlogScalar& b) {
        return logged(a.value_ * b.value_, a, b);
    }
    friend SherlogScalar operator/(const SherlogScalar& a, const SherlogScalar& b) {
        return logged(a.value_ / b.value_, a, b);
    }
    friend SherlogScalar operator-(const SherlogScalar& a) { return logged(-a.value_, a, a); }
    friend SherlogScalar muladd(const SherlogScalar& a, const SherlogScalar& b, const SherlogScalar& c) {
        return logged(muladd(a.value_, b.value_, c.value_), a.recorder_ ? a : b, c);
    }

    SherlogScalar& operator+=(const SherlogScalar& b) { return *this = *this + b; }
    SherlogScalar& operator-=(const SherlogScalar& b) { return *this = *this - b; }
    SherlogScalar& operator*=(const SherlogScalar& b) { return *this = *this * b; }
    SherlogScalar& operator/=(const SherlogScalar& b) { return *this = *this / b; }

    // Comparisons are not arithmetic results and are not recorded.
    friend bool operator==(const SherlogScalar& a, const SherlogScalar& b) { return a.value_ == b.value_; }
    friend bool operator<(const SherlogScalar& a, const SherlogScalar& b) { return a.value_ < b.value_; }

private:
    static SherlogScalar logged(T result, const SherlogScalar& a, const SherlogScalar& b) {
        LogHistogram* rec = a.recorder_ ? a.recorder_ : b.recorder_;
        if (rec) {
            rec->record(scalar_traits<T>::to_f64(result));
        }
        return SherlogScalar(result, rec);
    }

    T value_{};
    LogHistogram* recorder_ = nullptr;
};

}  // namespace precflex::sherlog

namespace precflex {

template <Scalar T>
struct scalar_traits<sherlog::SherlogScalar<T>> {
    static constexpr ScalarKind kind = scalar_traits<T>::kind;
    static double to_f64(const sherlog::SherlogScalar<T>& x) noexcept {
        return scalar_traits<T>::to_f64(x.value());
    }
    static sherlog::SherlogScalar<T> make(double x, const ScalarContext& ctx) {
        return sherlog::SherlogScalar<T>(scalar_traits<T>::make(x, ctx), ctx.recorder);
    }
};

}  // namespace precflex
