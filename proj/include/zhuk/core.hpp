#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zhuk {

using Element = int;
using Assignment = std::vector<Element>;

inline constexpr int kMaxBaseSize = 64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// Raised when a result the theory guarantees fails to materialize.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

// Subset of the base set {0, ..., l-1}, l <= 64.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint64_t bits) : bits_(bits) {}
  Subset(std::initializer_list<Element> elems) {
    for (Element a : elems) insert(a);
  }

  static constexpr Subset full(int size) {
    return Subset(size >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << size) - 1));
  }
  static constexpr Subset singleton(Element a) { return Subset(std::uint64_t{1} << a); }
  static Subset of(std::span<const Element> elems) {
    Subset s;
    for (Element a : elems) s.insert(a);
    return s;
  }

  constexpr bool contains(Element a) const { return (bits_ >> a) & 1U; }
  constexpr void insert(Element a) { bits_ |= std::uint64_t{1} << a; }
  constexpr void erase(Element a) { bits_ &= ~(std::uint64_t{1} << a); }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr Element min() const { return std::countr_zero(bits_); }
  constexpr bool is_subset_of(Subset o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr Subset operator&(Subset a, Subset b) { return Subset(a.bits_ & b.bits_); }
  friend constexpr Subset operator|(Subset a, Subset b) { return Subset(a.bits_ | b.bits_); }
  friend constexpr Subset operator-(Subset a, Subset b) { return Subset(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(Subset a, Subset b) = default;

 private:
  std::uint64_t bits_ = 0;
};

// Canonical order on subsets: by size, then lexicographically on the sorted element list.
bool canonical_less(Subset a, Subset b);

using Pair = std::pair<Element, Element>;

// Binary relation on the base set, stored as one successor bitmask per row.
class BinaryRelation {
 public:
  BinaryRelation() = default;
  explicit BinaryRelation(int base_size) : rows_(static_cast<std::size_t>(base_size)) {}

  static BinaryRelation product(int base_size, Subset left, Subset right);
  static BinaryRelation diagonal(int base_size, Subset on);
  static BinaryRelation from_pairs(int base_size, std::span<const Pair> pairs);

  int base_size() const { return static_cast<int>(rows_.size()); }
  bool contains(Element a, Element b) const { return row(a).contains(b); }
  void insert(Element a, Element b) { rows_[static_cast<std::size_t>(a)].insert(b); }
  void erase(Element a, Element b) { rows_[static_cast<std::size_t>(a)].erase(b); }
  Subset row(Element a) const { return rows_[static_cast<std::size_t>(a)]; }
  void set_row(Element a, Subset s) { rows_[static_cast<std::size_t>(a)] = s; }
  Subset column(Element b) const;
  Subset left_projection() const;
  Subset right_projection() const;
  int count() const;
  bool empty() const;
  std::vector<Pair> pairs() const;
  BinaryRelation transposed() const;
  BinaryRelation restricted(Subset left, Subset right) const;
  BinaryRelation compose(const BinaryRelation& other) const;
  bool is_subset_of(const BinaryRelation& other) const;

  friend BinaryRelation operator&(const BinaryRelation& a, const BinaryRelation& b);
  friend BinaryRelation operator|(const BinaryRelation& a, const BinaryRelation& b);
  friend bool operator==(const BinaryRelation&, const BinaryRelation&) = default;
  // Lexicographic on sorted pair lists.
  friend bool operator<(const BinaryRelation& a, const BinaryRelation& b);

 private:
  std::vector<Subset> rows_;
};

// Total m-ary operation on {0..l-1}; the table is row-major with the first argument
// most significant.
class OperationTable {
 public:
  OperationTable() = default;
  OperationTable(int base_size, int arity, std::vector<Element> table);

  template <class F>
  static OperationTable from_function(int base_size, int arity, F&& f) {
    std::size_t total = 1;
    for (int k = 0; k < arity; ++k) total *= static_cast<std::size_t>(base_size);
    std::vector<Element> table(total);
    std::vector<Element> args(static_cast<std::size_t>(arity), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      table[idx] = f(std::span<const Element>(args));
      for (int k = arity - 1; k >= 0; --k) {
        if (++args[static_cast<std::size_t>(k)] < base_size) break;
        args[static_cast<std::size_t>(k)] = 0;
      }
    }
    return OperationTable(base_size, arity, std::move(table));
  }

  int base_size() const { return base_size_; }
  int arity() const { return arity_; }
  const std::vector<Element>& table() const { return table_; }
  std::size_t index_of(std::span<const Element> args) const;
  Element operator()(std::span<const Element> args) const { return table_[index_of(args)]; }
  Element operator()(std::initializer_list<Element> args) const {
    return (*this)(std::span<const Element>(args.begin(), args.size()));
  }
  Element at(std::size_t index) const { return table_[index]; }

  friend bool operator==(const OperationTable&, const OperationTable&) = default;

 private:
  int base_size_ = 0;
  int arity_ = 0;
  std::vector<Element> table_;
};

struct Language {
  int base_size = 0;
  std::vector<std::string> element_names;
  OperationTable wnu;
  std::vector<Subset> unary;
  std::vector<BinaryRelation> binary;
  // True when the relation lists were generated as all invariant relations rather
  // than read from the file; such lists are not serialized.
  bool generated = false;

  std::string name_of(Element a) const;
};

using EdgeKey = std::pair<int, int>;

struct Instance {
  int base_size = 0;
  int n = 0;
  std::vector<Subset> domains;
  std::map<EdgeKey, BinaryRelation> edges;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& inst, const Language& lang);
bool is_solution(const Instance& inst, const Assignment& h);
Instance restrict_instance(const Instance& inst, int i, Subset d);

struct ParsedFile {
  Instance instance;
  Language language;
};

ParsedFile parse_instance(std::string_view text);
ParsedFile load_instance_file(const std::string& path);
std::string serialize_instance(const Instance& inst, const Language& lang);
// Compact canonical JSON of the instance part only; this is what digests cover.
std::string canonical_instance_json(const Instance& inst);

std::string format_subset(Subset s, const Language& lang);
std::string format_assignment(const Assignment& h, const Language& lang);

}  // namespace zhuk
