#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "precflex/half.hpp"

namespace precflex {

namespace sherlog {
class LogHistogram;
}

/// Number format a run is tagged with. `f16_mixed` evaluates tendencies in
/// binary16 and performs the time integration in binary32.
enum class ScalarKind : std::uint8_t { f64, f32, f16, f16_mixed };

std::string_view to_string(ScalarKind kind) noexcept;
std::optional<ScalarKind> parse_scalar_kind(std::string_view text) noexcept;

/// Per-run state that scalar construction may need. Plain formats ignore it;
/// instrumented formats attach the recorder to every constant they create.
struct ScalarContext {
    sherlog::LogHistogram* recorder = nullptr;
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr ScalarKind kind = ScalarKind::f64;
    static double to_f64(double x) noexcept { return x; }
    static double make(double x, const ScalarContext&) noexcept { return x; }
};

template <>
struct scalar_traits<float> {
    static constexpr ScalarKind kind = ScalarKind::f32;
    static double to_f64(float x) noexcept { return x; }
    static float make(double x, const ScalarContext&) noexcept { return static_cast<float>(x); }
};

template <>
struct scalar_traits<Half16> {
    static constexpr ScalarKind kind = ScalarKind::f16;
    static double to_f64(Half16 x) noexcept { return x.to_double(); }
    static Half16 make(double x, const ScalarContext&) noexcept { return Half16(x); }
};

// muladd for the native formats is two separately rounded operations. The
// build disables floating-point contraction so this is never fused.
inline double muladd(double a, double b, double c) noexcept { return a * b + c; }
inline float muladd(float a, float b, float c) noexcept { return a * b + c; }

/// The contract every kernel and the shallow-water model are generic over.
template <class T>
concept Scalar = std::copyable<T> && requires(T a, T b, double d, const ScalarContext& ctx) {
    { a + b } -> std::convertible_to<T>;
    { a - b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a / b } -> std::convertible_to<T>;
    { -a } -> std::convertible_to<T>;
    { muladd(a, a, b) } -> std::convertible_to<T>;
    { scalar_traits<T>::to_f64(a) } -> std::same_as<double>;
    { scalar_traits<T>::make(d, ctx) } -> std::convertible_to<T>;
};

template <Scalar T>
double to_f64(const T& x) noexcept {
    return scalar_traits<T>::to_f64(x);
}

template <Scalar T>
T make_scalar(double x, const ScalarContext& ctx = {}) {
    return scalar_traits<T>::make(x, ctx);
}

/// Converts through binary64. Exact for every widening pair and correctly
/// rounded for narrowing ones, since binary64 holds every binary32 value.
template <Scalar To, Scalar From>
To scalar_cast(const From& x, const ScalarContext& ctx = {}) {
    if constexpr (std::same_as<To, From>) {
        return x;
    } else {
        return make_scalar<To>(to_f64(x), ctx);
    }
}

}  // namespace precflex
