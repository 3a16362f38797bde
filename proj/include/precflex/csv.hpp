#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace precflex::csv {

/// Quotes a field when it holds a comma, quote, CR or LF; inner quotes are
/// doubled.
std::string escape(std::string_view field);

/// Shortest round-trip decimal for finite values, empty
/// for NaN, "inf"/"-inf" otherwise.
std::string number(double x);

/// Writes rows terminated by '\n' and checks a constant column count.
class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}
    void row(const std::vector<std::string>& fields);
    void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

private:
    std::ostream& os_;
    std::size_t columns_ = 0;
};

}  // namespace precflex::csv
