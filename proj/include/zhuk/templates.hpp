#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zhuk/core.hpp"

namespace zhuk {

// Built-in template algebras: z2, z3, semilattice2, z2xz2, z4_5ary, and rps, the
// rock-paper-scissors tournament (x y is the winner, b beats a when b = a+1 mod 3).
std::vector<std::string> template_names();
OperationTable template_operation(const std::string& name);
Language template_language(const std::string& name);

struct GenOptions {
  int n = 3;
  double density = 0.5;  // probability of an edge per unordered pair of variables
  std::uint64_t seed = 1;
};

// Random instance over the invariant language of `lang`; deterministic per seed.
Instance generate_instance(const Language& lang, const GenOptions& opt);

}  // namespace zhuk
