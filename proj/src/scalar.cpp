#include "precflex/scalar.hpp"

namespace precflex {

std::string_view to_string(ScalarKind kind) noexcept {
    switch (kind) {
        case ScalarKind::f64: return "f64";
        case ScalarKind::f32: return "f32";
        case ScalarKind::f16: return "f16";
        case ScalarKind::f16_mixed: return "mixed";
    }
    return "?";
}

std::optional<ScalarKind> parse_scalar_kind(std::string_view text) noexcept {
    if (text == "f64" || text == "F64" || text == "float64") return ScalarKind::f64;
    if (text == "f32" || text == "F32" || text == "float32") return ScalarKind::f32;
    if (text == "f16" || text == "F16" || text == "float16") return ScalarKind::f16;
    if (text == "mixed" || text == "f16/32" || text == "f16_mixed") return ScalarKind::f16_mixed;
    return std::nullopt;
}

}  // namespace precflex
