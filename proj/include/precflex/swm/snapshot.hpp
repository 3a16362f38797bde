#pragma once

#include <iosfwd>
#include <string>

#include "precflex/swm/simulation.hpp"

namespace precflex::swm {

/// Self-describing binary container for a Snapshot:
///
///   swm-snapshot v1 nx=<nx> ny=<ny> t=<seconds> fields=3\n
///   field <name> <rows> <cols> f64 le row-major\n  <rows*cols little-endian binary64>
///   ... repeated for u, v, eta
///
/// Rows are the x index. Throws ResourceError on I/O failure and DomainError
/// on a malformed stream.
void write_snapshot(std::ostream& os, const Snapshot& snap);
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

}  // namespace precflex::swm
