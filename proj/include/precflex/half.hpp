#pragma once

#include <atomic>
#include <bit>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>

namespace precflex {

enum class MuladdMode : std::uint8_t {
    fused_single_rounding,
    double_rounding,
};

struct RoundingPolicy {
    // Results with magnitude in (0, 2^-14) become signed zero when set.
    bool flush_subnormals = false;
    MuladdMode muladd_mode = MuladdMode::double_rounding;

    friend bool operator==(const RoundingPolicy&, const RoundingPolicy&) = default;
};

namespace detail {

inline double decode_f16(std::uint16_t h) noexcept {
    const std::uint64_t sign = static_cast<std::uint64_t>(h & 0x8000) << 48;
    const unsigned exponent = (h >> 10) & 0x1F;
    const std::uint64_t mantissa = h & 0x3FF;
    if (exponent == 0x1F) {
        return mantissa ? std::numeric_limits<double>::quiet_NaN()
                        : std::bit_cast<double>(sign | 0x7FF0000000000000ULL);
    }
    if (exponent == 0) {
        const double m = static_cast<double>(mantissa) * 0x1p-24;
        return (h & 0x8000) ? -m : m;
    }
    return std::bit_cast<double>(sign | (static_cast<std::uint64_t>(exponent + 1008) << 52) | (mantissa << 42));
}

// Rounds |x| to a multiple of the binary16 quantum at its binade (2^-24 below
// the normal range) in nearest-even. The quantum count q then lines up with
// the bit encoding: bits = ((e + 14) << 10) + q covers the subnormal range
// (e = -14, q < 1024), the normal range (q in [1024, 2048]) and the carry into
// the next binade when q rounds up to 2048. Adding and removing 2^52 rounds to
// an integer under the default rounding mode.
inline std::uint16_t encode_f16(double x, bool flush) noexcept {
    const std::uint64_t raw = std::bit_cast<std::uint64_t>(x);
    const auto sign = static_cast<std::uint16_t>((raw >> 48) & 0x8000);
    const std::uint64_t mag = raw & 0x7FFFFFFFFFFFFFFFULL;
    if (mag > 0x7FF0000000000000ULL) {
        return 0x7E00;
    }
    const double ax = std::bit_cast<double>(mag);
    // 65520 is the midpoint between 65504 and 2^16; ties-to-even rounds up.
    if (ax >= 65520.0) {
        return sign | 0x7C00;
    }
    const int biased = static_cast<int>(mag >> 52);
    const int e = biased < 1023 - 14 ? -14 : biased - 1023;
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(1023 + 10 - e) << 52);
    const double q = (ax * scale + 0x1p52) - 0x1p52;
    auto bits = static_cast<std::uint16_t>(((e + 14) << 10) + static_cast<int>(q));
    if (flush && bits < 0x0400) {
        bits = 0;
    }
    return sign | bits;
}

}  // namespace detail

enum class FpClass : std::uint8_t { zero, subnormal, normal, inf, nan };

const char* to_string(FpClass c) noexcept;

/// IEEE-754 binary16 value held as its raw bit pattern.
///
/// Arithmetic widens both operands to binary64, computes there and rounds
/// once to nearest-even. Operators use the calling thread's current rounding
/// policy (see `PolicyScope`); the `f16_*` free functions take it explicitly.
class Half16 {
public:
    static constexpr std::uint16_t canonical_nan_bits = 0x7E00;

    constexpr Half16() noexcept = default;

    static constexpr Half16 from_bits(std::uint16_t bits) noexcept {
        Half16 h;
        h.bits_ = bits;
        return h;
    }

    /// Rounds with the thread's current policy.
    explicit Half16(double x) noexcept;

    constexpr std::uint16_t bits() const noexcept { return bits_; }

    double to_double() const noexcept { return detail::decode_f16(bits_); }
    explicit operator double() const noexcept { return to_double(); }
    explicit operator float() const noexcept { return static_cast<float>(to_double()); }

    Half16& operator+=(Half16 rhs) noexcept { return *this = *this + rhs; }
    Half16& operator-=(Half16 rhs) noexcept { return *this = *this - rhs; }
    Half16& operator*=(Half16 rhs) noexcept { return *this = *this * rhs; }
    Half16& operator/=(Half16 rhs) noexcept { return *this = *this / rhs; }

    friend Half16 operator+(Half16 a, Half16 b) noexcept;
    friend Half16 operator-(Half16 a, Half16 b) noexcept;
    friend Half16 operator*(Half16 a, Half16 b) noexcept;
    friend Half16 operator/(Half16 a, Half16 b) noexcept;
    // Sign flip is exact; NaN stays canonical.
    friend Half16 operator-(Half16 a) noexcept;

    // Numeric comparison (NaN unordered, +0 == -0).
    friend bool operator==(Half16 a, Half16 b) noexcept { return a.to_double() == b.to_double(); }
    friend std::partial_ordering operator<=>(Half16 a, Half16 b) noexcept {
        return a.to_double() <=> b.to_double();
    }

private:
    std::uint16_t bits_ = 0;
};

std::ostream& operator<<(std::ostream& os, Half16 h);

namespace half_limits {
inline constexpr double max_finite = 65504.0;
inline constexpr double min_normal = 0x1p-14;
inline constexpr double min_subnormal = 0x1p-24;
}  // namespace half_limits

inline Half16 round_f64_to_f16(double x, const RoundingPolicy& policy) noexcept {
    return Half16::from_bits(detail::encode_f16(x, policy.flush_subnormals));
}

inline double f16_to_f64(Half16 h) noexcept {
    return detail::decode_f16(h.bits());
}

// binary64 carries more than 2*11+2 significand bits, so computing the exact
// operation there and rounding once gives the correctly rounded binary16 result.
inline Half16 f16_add(Half16 a, Half16 b, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(f16_to_f64(a) + f16_to_f64(b), policy);
}
inline Half16 f16_sub(Half16 a, Half16 b, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(f16_to_f64(a) - f16_to_f64(b), policy);
}
inline Half16 f16_mul(Half16 a, Half16 b, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(f16_to_f64(a) * f16_to_f64(b), policy);
}
inline Half16 f16_div(Half16 a, Half16 b, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(f16_to_f64(a) / f16_to_f64(b), policy);
}
Half16 f16_muladd(Half16 x, Half16 y, Half16 z, const RoundingPolicy& policy) noexcept;

FpClass classify(Half16 h) noexcept;

// Transcendentals: widen, evaluate in binary64, round once.
Half16 f16_sqrt(Half16 x, const RoundingPolicy& policy) noexcept;
Half16 f16_exp(Half16 x, const RoundingPolicy& policy) noexcept;
Half16 f16_log(Half16 x, const RoundingPolicy& policy) noexcept;
Half16 f16_sin(Half16 x, const RoundingPolicy& policy) noexcept;
Half16 f16_cos(Half16 x, const RoundingPolicy& policy) noexcept;

/// muladd under the thread's current policy.
Half16 muladd(Half16 x, Half16 y, Half16 z) noexcept;

inline bool isfinite(Half16 h) noexcept {
    return (h.bits() & 0x7C00) != 0x7C00;
}

namespace detail {
struct ThreadPolicy {
    bool has_override = false;
    RoundingPolicy policy;
};
extern thread_local ThreadPolicy tls_policy;
extern std::atomic<std::uint8_t> default_policy_bits;
}  // namespace detail

inline RoundingPolicy default_policy() noexcept {
    const std::uint8_t v = detail::default_policy_bits.load(std::memory_order_relaxed);
    RoundingPolicy p;
    p.flush_subnormals = (v & 1) != 0;
    p.muladd_mode = (v & 2) ? MuladdMode::fused_single_rounding : MuladdMode::double_rounding;
    return p;
}
void set_default_policy(const RoundingPolicy& policy) noexcept;

// Policy used by Half16 operators: the thread's override if one is
// installed, otherwise the process-wide default.
inline RoundingPolicy current_policy() noexcept {
    return detail::tls_policy.has_override ? detail::tls_policy.policy : default_policy();
}
void set_current_policy(const RoundingPolicy& policy) noexcept;
void clear_current_policy() noexcept;

inline Half16 operator+(Half16 a, Half16 b) noexcept { return f16_add(a, b, current_policy()); }
inline Half16 operator-(Half16 a, Half16 b) noexcept { return f16_sub(a, b, current_policy()); }
inline Half16 operator*(Half16 a, Half16 b) noexcept { return f16_mul(a, b, current_policy()); }
inline Half16 operator/(Half16 a, Half16 b) noexcept { return f16_div(a, b, current_policy()); }

/// Installs a policy for the current thread until destruction.
class PolicyScope {
public:
    explicit PolicyScope(const RoundingPolicy& policy) noexcept;
    ~PolicyScope();

    PolicyScope(const PolicyScope&) = delete;
    PolicyScope& operator=(const PolicyScope&) = delete;

private:
    bool had_override_;
    RoundingPolicy saved_;
};

}  // namespace precflex
