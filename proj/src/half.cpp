#include "precflex/half.hpp"

#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

namespace precflex {
namespace {

std::uint8_t pack(const RoundingPolicy& p) noexcept {
    return static_cast<std::uint8_t>((p.flush_subnormals ? 1 : 0) |
                                     (p.muladd_mode == MuladdMode::fused_single_rounding ? 2 : 0));
}

}  // namespace

namespace detail {
thread_local ThreadPolicy tls_policy;
std::atomic<std::uint8_t> default_policy_bits{0};
}  // namespace detail

using detail::tls_policy;

const char* to_string(FpClass c) noexcept {
    switch (c) {
        case FpClass::zero: return "zero";
        case FpClass::subnormal: return "subnormal";
        case FpClass::normal: return "normal";
        case FpClass::inf: return "inf";
        case FpClass::nan: return "nan";
    }
    return "?";
}

void set_default_policy(const RoundingPolicy& policy) noexcept {
    detail::default_policy_bits.store(pack(policy), std::memory_order_relaxed);
}

void set_current_policy(const RoundingPolicy& policy) noexcept {
    tls_policy.has_override = true;
    tls_policy.policy = policy;
}

void clear_current_policy() noexcept {
    tls_policy.has_override = false;
}

PolicyScope::PolicyScope(const RoundingPolicy& policy) noexcept
    : had_override_(tls_policy.has_override), saved_(tls_policy.policy) {
    set_current_policy(policy);
}

PolicyScope::~PolicyScope() {
    tls_policy.has_override = had_override_;
    tls_policy.policy = saved_;
}

Half16::Half16(double x) noexcept : bits_(detail::encode_f16(x, current_policy().flush_subnormals)) {}

Half16 f16_muladd(Half16 x, Half16 y, Half16 z, const RoundingPolicy& policy) noexcept {
    if (policy.muladd_mode == MuladdMode::double_rounding) {
        return f16_add(f16_mul(x, y, policy), z, policy);
    }
    return round_f64_to_f16(std::fma(f16_to_f64(x), f16_to_f64(y), f16_to_f64(z)), policy);
}

Half16 muladd(Half16 x, Half16 y, Half16 z) noexcept {
    return f16_muladd(x, y, z, current_policy());
}

FpClass classify(Half16 h) noexcept {
    const unsigned exponent = (h.bits() >> 10) & 0x1F;
    const unsigned mantissa = h.bits() & 0x3FF;
    if (exponent == 0x1F) {
        return mantissa ? FpClass::nan : FpClass::inf;
    }
    if (exponent == 0) {
        return mantissa ? FpClass::subnormal : FpClass::zero;
    }
    return FpClass::normal;
}

Half16 f16_sqrt(Half16 x, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(std::sqrt(f16_to_f64(x)), policy);
}

Half16 f16_exp(Half16 x, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(std::exp(f16_to_f64(x)), policy);
}

Half16 f16_log(Half16 x, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(std::log(f16_to_f64(x)), policy);
}

Half16 f16_sin(Half16 x, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(std::sin(f16_to_f64(x)), policy);
}

Half16 f16_cos(Half16 x, const RoundingPolicy& policy) noexcept {
    return round_f64_to_f16(std::cos(f16_to_f64(x)), policy);
}



Half16 operator-(Half16 a) noexcept {
    if (classify(a) == FpClass::nan) {
        return Half16::from_bits(Half16::canonical_nan_bits);
    }
    return Half16::from_bits(static_cast<std::uint16_t>(a.bits() ^ 0x8000));
}

std::ostream& operator<<(std::ostream& os, Half16 h) {
    return os << h.to_double();
}

}  // namespace precflex
