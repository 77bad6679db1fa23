#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "zhuk/algebra.hpp"
#include "zhuk/core.hpp"

namespace zhuk {

// Existence oracle used for recursive sub-problems.
using SubSolver = std::function<std::optional<Assignment>(const Instance&)>;

enum class Outcome { Unchanged, Reduced, NoSolution };

const char* to_string(Outcome o);

struct IrreducibilityInfo {
  int anchor = -1;
  int congruence = -1;  // index into enumerate_congruences(D_anchor)
  std::vector<int> variables;
  std::vector<std::vector<Subset>> partitions;  // parallel to `variables`
};

struct Reduction {
  Outcome outcome = Outcome::Unchanged;
  Instance instance;
  int variable = -1;  // first variable whose domain shrank, if any
  Subset domain;
  std::optional<IrreducibilityInfo> irreducibility;
};

struct PropagationState {
  int n = 0;
  int rounds = 0;
  std::vector<BinaryRelation> pairs;  // row-major n x n
  const BinaryRelation& at(int i, int j) const { return pairs[static_cast<std::size_t>(i * n + j)]; }
};

Reduction cycle_consistency_reduce(const Instance& inst, PropagationState* state = nullptr);

// Classes of the Linked relation on D_i, sorted by least element. Variables without
// edges get the singleton partition.
std::vector<Subset> linked_components(const Instance& inst, int i);

struct InstanceProfile {
  bool one_consistent = false;
  bool cycle_consistent = false;
  bool linked = false;
  bool fragmented = false;
};

bool is_one_consistent(const Instance& inst);
InstanceProfile instance_profile(const Instance& inst);

// Same domains, only the edges with both ends in `vars`, renumbered in the given order.
Instance project_instance(const Instance& inst, const std::vector<int>& vars);

Reduction irreducibility_reduce(const Instance& inst, AlgebraCache& cache, const SubSolver& solve);

// `edge` selects one edge; nullopt weakens every edge.
Instance weaken_constraints(const Instance& inst, const Language& lang, std::optional<EdgeKey> edge = std::nullopt);

Reduction weaker_instance_reduce(const Instance& inst, const Language& lang, const SubSolver& solve);

}  // namespace zhuk
