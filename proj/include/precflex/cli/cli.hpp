#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace precflex::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_blowup = 3;

/// Runs one command line. args[0] is the program name. Results go to `out`
/// unless a --csv path is given; diagnostics and host information go to
/// `err`. Returns 0 on success, 2 on usage or config errors, 3 on numerical
/// blowup and 1 on any other failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One line describing the machine and build, for benchmark provenance.
std::string host_info();

}  // namespace precflex::cli
