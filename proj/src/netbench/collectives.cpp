#include "precflex/netbench/collectives.hpp"

#include <algorithm>
#include <cstring>

#include "precflex/errors.hpp"

namespace precflex::netbench {
namespace {

void combine(std::vector<double>& acc, std::span<const double> other, const ReduceOp& op) {
    if (other.size() != acc.size()) {
        throw ProtocolError("reduce: partial result has " + std::to_string(other.size()) + " elements, expected " +
                            std::to_string(acc.size()));
    }
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = op.fn(acc[k], other[k]);
}

}  // namespace

ReduceOp ReduceOp::sum() {
    return {"sum", [](double a, double b) { return a + b; }};
}

ReduceOp ReduceOp::max() {
    return {"max", [](double a, double b) { return std::max(a, b); }};
}

Bytes to_bytes(std::span<const double> values) {
    Bytes out(values.size() * sizeof(double));
    if (!values.empty()) std::memcpy(out.data(), values.data(), out.size());
    return out;
}

std::vector<double> to_doubles(std::span<const std::byte> bytes) {
    if (bytes.size() % sizeof(double) != 0) {
        throw ProtocolError("payload of " + std::to_string(bytes.size()) + " bytes is not a binary64 array");
    }
    std::vector<double> out(bytes.size() / sizeof(double));
    if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

std::vector<double> reduce(Transport& t, std::span<const double> local, const ReduceOp& op) {
    const int rank = t.rank(), n = t.size();
    std::vector<double> acc(local.begin(), local.end());
    for (int mask = 1; mask < n; mask <<= 1) {
        if (rank & mask) {
            const Bytes b = to_bytes(acc);
            t.send(rank - mask, b);
            return {};
        }
        if (rank + mask < n) {
            const Bytes b = t.recv(rank + mask);
            combine(acc, to_doubles(b), op);
        }
    }
    return acc;
}

void broadcast(Transport& t, std::vector<double>& buffer) {
    const int rank = t.rank(), n = t.size();
    int mask = 1;
    while (mask < n) {
        if (rank & mask) {
            buffer = to_doubles(t.recv(rank - mask));
            break;
        }
        mask <<= 1;
    }
    for (mask >>= 1; mask > 0; mask >>= 1) {
        if (rank + mask < n) t.send(rank + mask, to_bytes(buffer));
    }
}

std::vector<double> allreduce(Transport& t, std::span<const double> local, const ReduceOp& op) {
    std::vector<double> result = reduce(t, local, op);
    broadcast(t, result);
    return result;
}

Bytes gatherv(Transport& t, std::span<const std::byte> chunk, std::span<const std::size_t> counts) {
    const int rank = t.rank(), n = t.size();
    if (counts.size() != static_cast<std::size_t>(n)) {
        throw ProtocolError("gatherv: " + std::to_string(counts.size()) + " counts for " + std::to_string(n) +
                            " ranks");
    }
    if (chunk.size() != counts[static_cast<std::size_t>(rank)]) {
        throw ProtocolError("gatherv: rank " + std::to_string(rank) + " chunk has " + std::to_string(chunk.size()) +
                            " bytes, declared " + std::to_string(counts[static_cast<std::size_t>(rank)]));
    }
    if (rank != 0) {
        t.send(0, chunk);
        return {};
    }
    Bytes out(chunk.begin(), chunk.end());
    for (int src = 1; src < n; ++src) {
        const Bytes b = t.recv(src);
        if (b.size() != counts[static_cast<std::size_t>(src)]) {
            throw ProtocolError("gatherv: rank " + std::to_string(src) + " sent " + std::to_string(b.size()) +
                                " bytes, declared " + std::to_string(counts[static_cast<std::size_t>(src)]));
        }
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

void barrier(Transport& t) {
    const double token = 0.0;
    std::vector<double> r = reduce(t, std::span<const double>(&token, 1), ReduceOp::sum());
    broadcast(t, r);
}

std::vector<double> serial_reduce(const std::vector<std::vector<double>>& inputs, const ReduceOp& op) {
    if (inputs.empty()) return {};
    std::vector<std::vector<double>> acc = inputs;
    const int n = static_cast<int>(inputs.size());
    for (int mask = 1; mask < n; mask <<= 1) {
        for (int r = 0; r + mask < n; r += 2 * mask) combine(acc[r], acc[r + mask], op);
    }
    return acc[0];
}

}  // namespace precflex::netbench
