#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "zhuk/algebra.hpp"
#include "zhuk/core.hpp"
#include "zhuk/trace.hpp"

namespace zhuk {

enum class CheckMode { WitnessOnly, Semantic };

struct CheckConfig {
  CheckMode mode = CheckMode::WitnessOnly;
  std::size_t oracle_cap = 1'000'000;
  DetectorLimits limits;
};

enum class StepStatus { WitnessOk, WitnessFail, SemanticsOk, SemanticsFail, Unchecked };

const char* to_string(StepStatus s);

struct StepVerdict {
  int index = 0;
  std::string kind;
  StepStatus status = StepStatus::WitnessOk;
  std::string reason;
  std::optional<Assignment> counterexample;  // a solution the step lost
};

struct Verdict {
  bool accepted = false;
  std::vector<StepVerdict> steps;
  int failed_step = -1;  // -1 for header problems or acceptance
  std::string reason;
  std::vector<int> unchecked;  // steps whose semantic check hit the oracle cap

  bool partial() const { return !unchecked.empty(); }
};

// `cache` may be shared with the solver; it must be built over `lang`.
Verdict verify_trace(const Instance& inst, const Language& lang, const Trace& trace, const CheckConfig& cfg = {},
                     AlgebraCache* cache = nullptr);

// Single-field corruptions of a valid trace, one or more per step, labeled "step k: field".
struct Mutation {
  std::string label;
  std::string kind;
  Trace trace;
};
std::vector<Mutation> single_field_mutations(const Trace& trace);

struct Cnf {
  int variables = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> comments;

  std::string to_dimacs() const;
};

// h(i,a) for a in D_i, numbered from 1 in (i, a) order; ALO and pairwise AMO per
// variable; one conflict clause per forbidden pair of each edge.
Cnf emit_cnf(const Instance& inst, const Language* lang = nullptr);

// Number of models by enumeration with clause pruning, stopping at `limit`.
std::size_t count_models(const Cnf& cnf, std::size_t limit = SIZE_MAX);
bool cnf_satisfiable(const Cnf& cnf);

}  // namespace zhuk
