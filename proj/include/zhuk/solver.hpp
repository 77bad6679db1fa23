#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "zhuk/algebra.hpp"
#include "zhuk/core.hpp"
#include "zhuk/trace.hpp"

namespace zhuk {

struct SolveConfig {
  int max_depth = 1;                       // recursion depth for sub-solves
  std::size_t brute_force_threshold = 0;   // product of domain sizes at or below which the oracle answers
  std::size_t oracle_cap = 1'000'000;      // largest product of domain sizes the oracle enumerates
  bool allow_oracle = true;                // sub-solves past the depth budget use the oracle
  DetectorLimits limits;
};

struct Answer {
  std::optional<Assignment> solution;
  Trace trace;
  bool satisfiable() const { return solution.has_value(); }
};

// `cache` may be shared between calls on the same language.
Answer solve(const Instance& inst, const Language& lang, const SolveConfig& cfg = {}, AlgebraCache* cache = nullptr);

// Product of the domain sizes, saturating at SIZE_MAX.
std::size_t search_space(const Instance& inst);

// All solutions in lexicographic order. Throws CapacityError above `cap`.
std::vector<Assignment> brute_force_solve(const Instance& inst, std::size_t cap = 1'000'000);
std::optional<Assignment> brute_force_first(const Instance& inst, std::size_t cap = 1'000'000);

}  // namespace zhuk
