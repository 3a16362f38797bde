#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "precflex/netbench/transport.hpp"

namespace precflex::netbench {

/// Element-wise binary64 reduction operator. Applied as fn(accumulated,
/// incoming) with the bracketing of the binomial tree; associativity and
/// commutativity are the caller's responsibility.
struct ReduceOp {
    std::string name;
    std::function<double(double, double)> fn;

    static ReduceOp sum();
    static ReduceOp max();
};

Bytes to_bytes(std::span<const double> values);
std::vector<double> to_doubles(std::span<const std::byte> bytes);

/// Binomial-tree reduction to rank 0. Round k (mask = 2^k): a rank with bit
/// k set sends its partial result to rank - mask and stops; otherwise it
/// combines acc = fn(acc, partial of rank + mask) if that rank exists.
/// Returns the result on rank 0 and an empty vector elsewhere.
std::vector<double> reduce(Transport& t, std::span<const double> local, const ReduceOp& op);

/// Binomial-tree broadcast of rank 0's buffer.
void broadcast(Transport& t, std::vector<double>& buffer);

/// reduce followed by broadcast: every rank returns rank 0's result.
std::vector<double> allreduce(Transport& t, std::span<const double> local, const ReduceOp& op);

/// Concatenation of every rank's chunk on rank 0, ordered by rank. counts[r]
/// is the byte length rank r contributes. Throws ProtocolError on rank 0 if
/// a received chunk does not match its count (or locally if the own chunk
/// does not). Returns an empty buffer on other ranks.
Bytes gatherv(Transport& t, std::span<const std::byte> chunk, std::span<const std::size_t> counts);

/// Returns once every rank has entered.
void barrier(Transport& t);

/// The reduction computed serially with the same bracketing as reduce().
std::vector<double> serial_reduce(const std::vector<std::vector<double>>& inputs, const ReduceOp& op);

}  // namespace precflex::netbench
