#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace precflex::cli {

/// Flat `section.key = value` settings. Blank lines, lines starting with '#'
/// and trailing ` # ...` comments are ignored; whitespace is trimmed.
class Config {
public:
    static Config parse(std::istream& is, const std::string& source);
    static Config load(const std::string& path);

    /// Applies a `key=value` override.
    void set(std::string_view assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Accepts true/false, 1/0, yes/no, on/off. Throws ConfigError otherwise.
bool parse_bool(std::string_view key, std::string_view text);

}  // namespace precflex::cli
