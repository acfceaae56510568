#pragma once

// Named property suites with fixed seeds. Each suite records its measured
// quantities next to the limits they are held to.

#include <string>
#include <vector>

#include "qot/io.hpp"

namespace qot::check {

struct Suite {
  std::string name;
  std::string description;
};

const std::vector<Suite>& suites();

/// Runs the suites named in `only` (comma separated; empty runs all).
/// Output: {"seed", "passed", "suites": [{"name", "passed", "metrics"}]}.
/// Unknown names raise io::ParseError. The output holds no timings, so equal
/// seeds give identical documents.
io::json run(const std::string& only, unsigned long seed);

}  // namespace qot::check
