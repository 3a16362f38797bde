#include "precflex/cli/config.hpp"

#include <fstream>
#include <istream>

#include "precflex/errors.hpp"

namespace precflex::cli {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool split_assignment(std::string_view line, std::string& key, std::string& value) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) return false;
    key = std::string(trim(line.substr(0, eq)));
    value = std::string(trim(line.substr(eq + 1)));
    return !key.empty() && key.find('.') != std::string::npos && key.find_first_of(" \t") == std::string::npos;
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
    Config c;
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        // a '#' after whitespace starts a trailing comment
        for (std::size_t k = 1; k < t.size(); ++k) {
            if (t[k] == '#' && (t[k - 1] == ' ' || t[k - 1] == '\t')) {
                t = trim(t.substr(0, k));
                break;
            }
        }
        std::string key, value;
        if (!split_assignment(t, key, value)) {
            throw ConfigError(source + ":" + std::to_string(number) + ": expected 'section.key = value'");
        }
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse(is, path);
}

void Config::set(std::string_view assignment) {
    std::string key, value;
    if (!split_assignment(trim(assignment), key, value)) {
        throw ConfigError("--set expects section.key=value, got '" + std::string(assignment) + "'");
    }
    values_[key] = value;
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

}  // namespace precflex::cli
