#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdsrf/stream.hpp"

namespace pdsrf::cli {

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 runtime failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SyntheticSpec {
  DriftStreamSpec stream;
  std::optional<std::uint64_t> seed;
};

/// Parses `key=value` pairs separated by commas, e.g.
/// "drift=gradual,at=1000,until=2000,n=30000,d=10,c=2,noise=0.05,seed=3".
SyntheticSpec parse_synthetic_spec(const std::string& text);

}  // namespace pdsrf::cli
