#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "zhuk/core.hpp"

namespace zhuk {

using Tuple = std::vector<Element>;

struct WnuProfile {
  bool idempotent = false;
  bool wnu = false;
  bool special = false;
  friend bool operator==(const WnuProfile&, const WnuProfile&) = default;
};

WnuProfile wnu_profile(const OperationTable& op);

bool is_polymorphism(const OperationTable& f, Subset unary);
bool is_polymorphism(const OperationTable& f, const BinaryRelation& rel);

// Closure of a family of equal-length vectors under coordinatewise application of an
// operation. Semi-naive: each round only combines tuples that involve a vector found in
// the previous round.
class VectorClosure {
 public:
  VectorClosure(const OperationTable& op, std::size_t width);

  bool add(const Tuple& v);
  // Runs to the fixpoint. Returns true if `stop` fired on a newly generated vector.
  // Throws CapacityError once more than `work_cap` coordinate evaluations were spent.
  bool run(std::size_t work_cap, const std::function<bool(const Tuple&)>& stop = {});

  std::size_t size() const { return items_.size(); }
  Tuple item(std::size_t k) const;
  std::vector<Tuple> items() const;
  bool contains(const Tuple& v) const;
  int rounds() const { return rounds_; }

 private:
  std::string key(const Tuple& v) const;

  const OperationTable& op_;
  std::size_t width_;
  std::vector<std::string> items_;
  std::unordered_set<std::string> seen_;
  std::size_t processed_ = 0;
  int rounds_ = 0;
};

inline constexpr std::size_t kDefaultWorkCap = 400'000'000;

std::vector<Tuple> sg_closure(const OperationTable& op, const std::vector<Tuple>& generators);
Subset sg_closure(const OperationTable& op, Subset generators);
BinaryRelation sg_closure(const OperationTable& op, const BinaryRelation& generators);

// All nonempty invariant subsets of A and A^2, sorted by size then lexicographically.
Language build_invariant_language(int base_size, const OperationTable& op,
                                  std::vector<std::string> names = {});

class Congruence {
 public:
  Congruence() = default;
  Congruence(Subset carrier, std::vector<Subset> blocks);

  static Congruence diagonal(Subset carrier);
  static Congruence full(Subset carrier);

  Subset carrier() const { return carrier_; }
  const std::vector<Subset>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int block_index(Element a) const;
  const Subset& block_of(Element a) const { return blocks_[static_cast<std::size_t>(block_index(a))]; }
  Element representative(Element a) const { return block_of(a).min(); }
  std::vector<Element> representatives() const;
  bool is_diagonal() const { return block_count() == carrier_.size(); }
  bool is_full() const { return block_count() == 1; }
  bool refines(const Congruence& coarser) const;
  BinaryRelation pair_relation(int base_size) const;

  friend bool operator==(const Congruence& a, const Congruence& b) { return a.blocks_ == b.blocks_; }

 private:
  Subset carrier_;
  std::vector<Subset> blocks_;
  std::vector<int> index_;
};

struct CongruenceInfo {
  Congruence congruence;
  bool proper = false;
  bool maximal = false;
};

bool is_compatible(const OperationTable& op, const Congruence& c);

// Canonical order: more blocks first, then lexicographic on the block-index vector.
std::vector<CongruenceInfo> enumerate_congruences(Subset d, const OperationTable& op);

struct FactorAlgebra {
  Congruence congruence;
  std::vector<Element> representatives;
  OperationTable operation;  // acts on block indices 0..k-1
};

FactorAlgebra factor_algebra(Subset d, const OperationTable& op, const Congruence& c);

struct SpecialWnuResult {
  std::optional<OperationTable> op;
  int arity = 0;
  int depth = 0;
};

SpecialWnuResult derive_special_wnu(const OperationTable& op, int max_arity, int max_depth);

// Subalgebra (D, Ω|D) with its elements renumbered 0..|D|-1 in increasing order, plus
// the relations of the language restricted to D.
class LocalAlgebra {
 public:
  LocalAlgebra(const Language& lang, Subset d);

  Subset domain() const { return domain_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<Element>& elements() const { return elements_; }
  Element to_global(int local) const { return elements_[static_cast<std::size_t>(local)]; }
  int to_local(Element global) const;
  Subset to_global(Subset local) const;
  Subset to_local(Subset global) const;
  BinaryRelation to_global(const BinaryRelation& local) const;

  const OperationTable& op() const { return op_; }
  const OperationTable& global_op() const { return *global_op_; }
  int base_size() const { return base_size_; }
  const std::vector<Subset>& unary() const { return unary_; }
  const std::vector<BinaryRelation>& binary() const { return binary_; }
  bool preserves_language(const OperationTable& local_op) const;

  // Term operations of (D, Ω|D) of the given arity, optionally with constants, sorted by
  // table. Throws CapacityError when the closure exceeds the work cap.
  std::vector<Tuple> term_clone(int arity, bool with_constants, std::size_t work_cap) const;

 private:
  Subset domain_;
  int base_size_ = 0;
  std::vector<Element> elements_;
  std::vector<int> local_of_;
  OperationTable op_;
  const OperationTable* global_op_ = nullptr;
  std::vector<Subset> unary_;
  std::vector<BinaryRelation> binary_;
};

// Witness tables are over local indices of D (or block indices of D/σ for P).
struct BinaryAbsorbing {
  Subset absorbing;
  OperationTable term;
};

struct SgTranscript {
  Element element;
  BinaryRelation closure;  // Sg({a}×C ∪ C×{a}), global elements
};

struct Central {
  Subset center;
  OperationTable term;
  std::vector<SgTranscript> transcripts;
};

struct PcQuotient {
  Congruence congruence;
  OperationTable discriminator;
};

struct LinearQuotient {
  Congruence congruence;
  std::vector<int> primes;
  // iso[k] = coordinates of block k in Z_{p_1} x ... x Z_{p_s}.
  std::vector<std::vector<int>> iso;
  bool ambiguous = false;
};

using FourCaseWitness = std::variant<BinaryAbsorbing, Central, PcQuotient, LinearQuotient>;

std::string describe(const FourCaseWitness& w, const Language& lang);

struct DetectorLimits {
  std::size_t work_cap = kDefaultWorkCap;
  std::size_t backtrack_nodes = 2'000'000;
};

std::optional<BinaryAbsorbing> find_binary_absorption(const LocalAlgebra& alg, const DetectorLimits& lim = {});
std::optional<Central> find_central_subuniverse(const LocalAlgebra& alg, const DetectorLimits& lim = {});

struct PcChecks {
  bool relational = false;
  bool clone = false;
};
// Both checks of the discriminator on D/σ.
PcChecks pc_checks(const LocalAlgebra& alg, const Congruence& c, const DetectorLimits& lim = {});
std::optional<PcQuotient> find_pc_quotient(const LocalAlgebra& alg, const DetectorLimits& lim = {});

std::optional<LinearQuotient> linear_structure(const FactorAlgebra& f, const Congruence& c);
std::optional<LinearQuotient> find_linear_quotient(Subset d, const OperationTable& op);

FourCaseWitness classify_four_cases(const LocalAlgebra& alg, const DetectorLimits& lim = {});

// Witness re-validation; returns an error message or nullopt.
std::optional<std::string> check_binary_absorbing(const LocalAlgebra& alg, const BinaryAbsorbing& w);
std::optional<std::string> check_central(const LocalAlgebra& alg, const Central& w);
std::optional<std::string> check_pc_quotient(const LocalAlgebra& alg, const PcQuotient& w);
std::optional<std::string> check_linear_quotient(const LocalAlgebra& alg, const LinearQuotient& w);

OperationTable discriminator(int size);
bool is_subuniverse(const OperationTable& op, Subset s);

// Memoizes per-domain results. Not thread-safe; use one per thread.
class AlgebraCache {
 public:
  explicit AlgebraCache(const Language& lang, DetectorLimits lim = {});

  const Language& language() const { return lang_; }
  const DetectorLimits& limits() const { return lim_; }
  const LocalAlgebra& local(Subset d);
  const std::vector<CongruenceInfo>& congruences(Subset d);
  const std::optional<BinaryAbsorbing>& binary_absorption(Subset d);
  const std::optional<Central>& central(Subset d);
  const std::optional<PcQuotient>& pc_quotient(Subset d);
  const std::optional<LinearQuotient>& linear_quotient(Subset d);

 private:
  struct Entry {
    std::unique_ptr<LocalAlgebra> local;
    std::optional<std::vector<CongruenceInfo>> congruences;
    std::optional<std::optional<BinaryAbsorbing>> ba;
    std::optional<std::optional<Central>> cr;
    std::optional<std::optional<PcQuotient>> pc;
    std::optional<std::optional<LinearQuotient>> lin;
  };
  Entry& entry(Subset d);

  const Language& lang_;
  DetectorLimits lim_;
  std::map<std::uint64_t, Entry> entries_;
};

}  // namespace zhuk
