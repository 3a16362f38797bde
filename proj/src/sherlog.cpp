#include "precflex/sherlog.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "precflex/errors.hpp"

namespace precflex::sherlog {

int LogHistogram::exponent_of(double x) noexcept {
    return std::clamp(std::ilogb(x), min_exponent, max_exponent);
}

void LogHistogram::record(double x) noexcept {
    ++total_;
    if (std::isnan(x)) {
        ++nan_;
    } else if (std::isinf(x)) {
        ++inf_;
    } else if (x == 0.0) {
        ++zero_;
    } else {
        ++bins_[static_cast<std::size_t>(exponent_of(x) - min_exponent)];
    }
}

void LogHistogram::merge(const LogHistogram& other) noexcept {
    for (std::size_t i = 0; i < bin_count; ++i) {
        bins_[i] += other.bins_[i];
    }
    zero_ += other.zero_;
    inf_ += other.inf_;
    nan_ += other.nan_;
    total_ += other.total_;
}

std::uint64_t LogHistogram::bin(int exponent) const {
    if (exponent < min_exponent || exponent > max_exponent) {
        throw DomainError("histogram exponent out of range");
    }
    return bins_[static_cast<std::size_t>(exponent - min_exponent)];
}

double subnormal_fraction(const LogHistogram& h, double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo)) {
        throw DomainError("subnormal_fraction requires 0 < lo < hi");
    }
    if (h.total() == 0) {
        return 0.0;
    }
    std::uint64_t count = 0;
    for (int e = LogHistogram::min_exponent; e <= LogHistogram::max_exponent; ++e) {
        const double edge = std::ldexp(1.0, e);
        if (edge >= lo && edge < hi) {
            count += h.bin(e);
        }
    }
    return static_cast<double>(count) / static_cast<double>(h.total());
}

double suggest_scale(const LogHistogram& h) {
    if (h.total() == 0) {
        throw DomainError("suggest_scale on an empty histogram");
    }
    std::uint64_t voters = 0;
    for (auto c : h.bins()) {
        voters += c;
    }
    if (voters == 0) {
        return 1.0;
    }
    // Lower median: the element at index (voters - 1) / 2 of the sorted exponents.
    const std::uint64_t target = (voters - 1) / 2;
    std::uint64_t seen = 0;
    int median = 0;
    for (int e = LogHistogram::min_exponent; e <= LogHistogram::max_exponent; ++e) {
        seen += h.bin(e);
        if (seen > target) {
            median = e;
            break;
        }
    }
    return std::ldexp(1.0, -median);
}

void write_csv(std::ostream& os, const LogHistogram& h) {
    os << "exponent,count\n";
    for (int e = LogHistogram::min_exponent; e <= LogHistogram::max_exponent; ++e) {
        os << e << ',' << h.bin(e) << '\n';
    }
    os << "zero," << h.zero_count() << '\n';
    os << "inf," << h.inf_count() << '\n';
    os << "nan," << h.nan_count() << '\n';
}

}  // namespace precflex::sherlog
