#include "precflex/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace precflex::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string number(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void Writer::row(const std::vector<std::string>& fields) {
    if (columns_ == 0) {
        columns_ = fields.size();
    } else if (fields.size() != columns_) {
        throw std::logic_error("csv row has " + std::to_string(fields.size()) + " columns, expected " +
                               std::to_string(columns_));
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) os_ << ',';
        os_ << escape(fields[k]);
    }
    os_ << '\n';
}

}  // namespace precflex::csv
