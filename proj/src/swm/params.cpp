#include "precflex/swm/params.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "precflex/errors.hpp"

namespace precflex::swm {

double SwmParams::wave_speed() const {
    return std::sqrt(g * H);
}

double SwmParams::cfl_dt() const {
    return std::min(dx(), dy()) / wave_speed();
}

double SwmParams::effective_dt() const {
    return dt > 0.0 ? dt : 0.9 * cfl_dt();
}

bool is_power_of_two(double s) noexcept {
    if (!(s > 0.0) || !std::isfinite(s)) {
        return false;
    }
    int e = 0;
    return std::frexp(s, &e) == 0.5;
}

void validate(const SwmParams& p) {
    auto fail = [](const std::string& msg) { throw ConfigError("swm: " + msg); };
    if (p.nx < 4 || p.ny < 4) fail("nx and ny must be at least 4");
    if (!(p.Lx > 0) || !(p.Ly > 0)) fail("domain size must be positive");
    if (!(p.g > 0) || !(p.H > 0)) fail("g and H must be positive");
    if (!(p.nu4 >= 0) || !(p.r_bottom >= 0)) fail("dissipation coefficients must be non-negative");
    if (!std::isfinite(p.f0) || !std::isfinite(p.beta) || !std::isfinite(p.wind_amplitude)) {
        fail("Coriolis and wind parameters must be finite");
    }
    if (p.dt < 0) fail("dt must be positive (or 0 for automatic)");
    if (p.n_steps < 0) fail("n_steps must be non-negative");
    if (p.diag_every < 1) fail("diag_every must be at least 1");
    if (!is_power_of_two(p.scale_s)) fail("scale_s must be a positive power of two");
    if (!(p.noise_fraction >= 0)) fail("noise_fraction must be non-negative");
    const double dt = p.effective_dt();
    const double limit = 0.9 * p.cfl_dt();
    if (dt > limit * (1 + 1e-12)) {
        fail("dt " + std::to_string(dt) + " s violates the CFL bound " + std::to_string(limit) + " s");
    }
    // Largest biharmonic eigenvalue per step must sit inside RK4's real-axis
    // stability interval (about 2.78).
    const double aspect = (p.dx() / p.dy()) * (p.dx() / p.dy());
    const double c4 = p.nu4 * dt / std::pow(p.dx(), 4);
    if (c4 * (4 + 4 * aspect) * (4 + 4 * aspect) > 2.5) {
        fail("nu4 too large for this grid and dt (biharmonic step number " +
             std::to_string(c4 * (4 + 4 * aspect) * (4 + 4 * aspect)) + " > 2.5)");
    }
    if (p.integration_kind == ScalarKind::f16_mixed) fail("integration_kind must be f64, f32 or f16");
}

namespace {

template <class N>
N parse_number(std::string_view key, std::string_view text) {
    N value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

using Setter = std::function<void(SwmParams&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto dbl = [&t](const char* name, double SwmParams::*field) {
            t[std::string("swm.") + name] = [field](SwmParams& p, std::string_view k, std::string_view v) {
                p.*field = parse_number<double>(k, v);
            };
        };
        auto i64 = [&t](const char* name, std::int64_t SwmParams::*field) {
            t[std::string("swm.") + name] = [field](SwmParams& p, std::string_view k, std::string_view v) {
                p.*field = parse_number<std::int64_t>(k, v);
            };
        };
        auto flag = [&t](const char* name, bool SwmParams::*field) {
            t[std::string("swm.") + name] = [field](SwmParams& p, std::string_view k, std::string_view v) {
                p.*field = parse_bool(k, v);
            };
        };
        t["swm.nx"] = [](SwmParams& p, std::string_view k, std::string_view v) { p.nx = parse_number<int>(k, v); };
        t["swm.ny"] = [](SwmParams& p, std::string_view k, std::string_view v) { p.ny = parse_number<int>(k, v); };
        dbl("Lx", &SwmParams::Lx);
        dbl("Ly", &SwmParams::Ly);
        dbl("g", &SwmParams::g);
        dbl("H", &SwmParams::H);
        dbl("f0", &SwmParams::f0);
        dbl("beta", &SwmParams::beta);
        dbl("wind_amplitude", &SwmParams::wind_amplitude);
        dbl("nu4", &SwmParams::nu4);
        dbl("r_bottom", &SwmParams::r_bottom);
        dbl("dt", &SwmParams::dt);
        dbl("scale_s", &SwmParams::scale_s);
        dbl("noise_fraction", &SwmParams::noise_fraction);
        i64("n_steps", &SwmParams::n_steps);
        i64("diag_every", &SwmParams::diag_every);
        flag("nonlinear", &SwmParams::nonlinear);
        flag("compensated", &SwmParams::compensated);
        t["swm.seed"] = [](SwmParams& p, std::string_view k, std::string_view v) {
            p.seed = parse_number<std::uint64_t>(k, v);
        };
        t["swm.integration_kind"] = [](SwmParams& p, std::string_view k, std::string_view v) {
            if (v == "auto" || v.empty()) {
                p.integration_kind.reset();
                return;
            }
            const auto kind = parse_scalar_kind(v);
            if (!kind || *kind == ScalarKind::f16_mixed) {
                throw ConfigError("invalid value '" + std::string(v) + "' for " + std::string(k));
            }
            p.integration_kind = kind;
        };
        return t;
    }();
    return table;
}

}  // namespace

void set_param(SwmParams& p, std::string_view key, std::string_view value) {
    const auto& t = setters();
    const auto it = t.find(key);
    if (it == t.end()) {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
    it->second(p, key, value);
}

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

}  // namespace precflex::swm
