#include "zhuk/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace zhuk {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

// Calls f(args) for every tuple in elems^arity, first position most significant.
template <class F>
void for_each_tuple(const std::vector<Element>& elems, int arity, F&& f) {
  if (elems.empty()) return;
  std::vector<std::size_t> pos(static_cast<std::size_t>(arity), 0);
  Tuple args(static_cast<std::size_t>(arity), elems[0]);
  while (true) {
    f(static_cast<const Tuple&>(args));
    int k = arity - 1;
    for (; k >= 0; --k) {
      auto& p = pos[static_cast<std::size_t>(k)];
      if (++p < elems.size()) {
        args[static_cast<std::size_t>(k)] = elems[p];
        break;
      }
      p = 0;
      args[static_cast<std::size_t>(k)] = elems[0];
    }
    if (k < 0) return;
  }
}

}  // namespace

// ---------------------------------------------------------------- WNU properties

WnuProfile wnu_profile(const OperationTable& op) {
  WnuProfile p;
  const int l = op.base_size();
  const int m = op.arity();
  p.idempotent = true;
  for (Element x = 0; x < l; ++x) {
    Tuple args(static_cast<std::size_t>(m), x);
    if (op(args) != x) p.idempotent = false;
  }
  p.wnu = m >= 2;
  for (Element x = 0; x < l && p.wnu; ++x) {
    for (Element y = 0; y < l && p.wnu; ++y) {
      Tuple args(static_cast<std::size_t>(m), x);
      args[0] = y;
      const Element first = op(args);
      for (int k = 1; k < m; ++k) {
        Tuple a(static_cast<std::size_t>(m), x);
        a[static_cast<std::size_t>(k)] = y;
        if (op(a) != first) {
          p.wnu = false;
          break;
        }
      }
    }
  }
  if (p.wnu && p.idempotent) {
    p.special = true;
    for (Element x = 0; x < l && p.special; ++x) {
      for (Element y = 0; y < l; ++y) {
        Tuple a(static_cast<std::size_t>(m), x);
        a.back() = y;
        const Element inner = op(a);
        a.back() = inner;
        if (op(a) != inner) {
          p.special = false;
          break;
        }
      }
    }
  }
  return p;
}

bool is_polymorphism(const OperationTable& f, Subset unary) {
  bool ok = true;
  std::vector<Element> elems = unary.elements();
  for_each_tuple(elems, f.arity(), [&](const Tuple& args) {
    if (ok && !unary.contains(f(args))) ok = false;
  });
  return ok;
}

bool is_polymorphism(const OperationTable& f, const BinaryRelation& rel) {
  const std::vector<Pair> pairs = rel.pairs();
  if (pairs.empty()) return true;
  const int m = f.arity();
  const auto l = static_cast<std::size_t>(f.base_size());
  std::vector<std::size_t> pos(static_cast<std::size_t>(m), 0);
  while (true) {
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (int k = 0; k < m; ++k) {
      const Pair& p = pairs[pos[static_cast<std::size_t>(k)]];
      ia = ia * l + static_cast<std::size_t>(p.first);
      ib = ib * l + static_cast<std::size_t>(p.second);
    }
    if (!rel.contains(f.at(ia), f.at(ib))) return false;
    int k = m - 1;
    for (; k >= 0; --k) {
      if (++pos[static_cast<std::size_t>(k)] < pairs.size()) break;
      pos[static_cast<std::size_t>(k)] = 0;
    }
    if (k < 0) return true;
  }
}

bool is_subuniverse(const OperationTable& op, Subset s) { return is_polymorphism(op, s); }

// ---------------------------------------------------------------- closure

VectorClosure::VectorClosure(const OperationTable& op, std::size_t width) : op_(op), width_(width) {}

std::string VectorClosure::key(const Tuple& v) const {
  std::string k(width_, '\0');
  for (std::size_t c = 0; c < width_; ++c) k[c] = static_cast<char>(v[c]);
  return k;
}

bool VectorClosure::add(const Tuple& v) {
  std::string k = key(v);
  if (!seen_.insert(k).second) return false;
  items_.push_back(std::move(k));
  return true;
}

Tuple VectorClosure::item(std::size_t k) const {
  const std::string& s = items_[k];
  Tuple t(width_);
  for (std::size_t c = 0; c < width_; ++c) t[c] = static_cast<unsigned char>(s[c]);
  return t;
}

std::vector<Tuple> VectorClosure::items() const {
  std::vector<Tuple> out;
  out.reserve(items_.size());
  for (std::size_t k = 0; k < items_.size(); ++k) out.push_back(item(k));
  return out;
}

bool VectorClosure::contains(const Tuple& v) const { return seen_.count(key(v)) != 0; }

bool VectorClosure::run(std::size_t work_cap, const std::function<bool(const Tuple&)>& stop) {
  const int m = op_.arity();
  const auto l = static_cast<std::size_t>(op_.base_size());
  const auto& table = op_.table();
  std::size_t work = 0;
  std::vector<std::size_t> lo(static_cast<std::size_t>(m));
  std::vector<std::size_t> hi(static_cast<std::size_t>(m));
  std::vector<std::size_t> idx(static_cast<std::size_t>(m));
  std::vector<const char*> rows(static_cast<std::size_t>(m));
  std::string fresh(width_, '\0');
  while (processed_ < items_.size()) {
    const std::size_t a = processed_;
    const std::size_t b = items_.size();
    ++rounds_;
    for (int j = 0; j < m; ++j) {
      bool empty_range = false;
      for (int k = 0; k < m; ++k) {
        auto uk = static_cast<std::size_t>(k);
        lo[uk] = k == j ? a : 0;
        hi[uk] = k < j ? a : b;
        if (lo[uk] >= hi[uk]) empty_range = true;
      }
      if (empty_range) continue;
      idx = lo;
      while (true) {
        work += width_ * static_cast<std::size_t>(m);
        if (work > work_cap) throw CapacityError("closure exceeded its work cap");
        for (std::size_t k = 0; k < static_cast<std::size_t>(m); ++k) rows[k] = items_[idx[k]].data();
        for (std::size_t c = 0; c < width_; ++c) {
          std::size_t s = 0;
          for (std::size_t k = 0; k < static_cast<std::size_t>(m); ++k)
            s = s * l + static_cast<unsigned char>(rows[k][c]);
          fresh[c] = static_cast<char>(table[s]);
        }
        if (seen_.insert(fresh).second) {
          items_.push_back(fresh);
          if (stop && stop(item(items_.size() - 1))) return true;
        }
        int k = m - 1;
        for (; k >= 0; --k) {
          auto uk = static_cast<std::size_t>(k);
          if (++idx[uk] < hi[uk]) break;
          idx[uk] = lo[uk];
        }
        if (k < 0) break;
      }
    }
    processed_ = b;
  }
  return false;
}

std::vector<Tuple> sg_closure(const OperationTable& op, const std::vector<Tuple>& generators) {
  if (generators.empty()) return {};
  VectorClosure cl(op, generators.front().size());
  for (const Tuple& t : generators) {
    if (t.size() != generators.front().size()) throw PreconditionError("tuples of mixed length");
    cl.add(t);
  }
  cl.run(kDefaultWorkCap);
  std::vector<Tuple> out = cl.items();
  std::sort(out.begin(), out.end());
  return out;
}

Subset sg_closure(const OperationTable& op, Subset generators) {
  std::vector<Tuple> gens;
  for (Element a : generators.elements()) gens.push_back({a});
  Subset out;
  for (const Tuple& t : sg_closure(op, gens)) out.insert(t[0]);
  return out;
}

BinaryRelation sg_closure(const OperationTable& op, const BinaryRelation& generators) {
  std::vector<Tuple> gens;
  for (auto [a, b] : generators.pairs()) gens.push_back({a, b});
  BinaryRelation out(op.base_size());
  for (const Tuple& t : sg_closure(op, gens)) out.insert(t[0], t[1]);
  return out;
}

namespace {

// Closure of a binary relation over a base of at most 4 elements, cells a*l+b as bits.
// `closed` must already be invariant; `extra` holds the new cells.
std::uint64_t close_cells(const OperationTable& op, std::uint64_t closed, std::uint64_t extra) {
  const int m = op.arity();
  const int l = op.base_size();
  const auto& table = op.table();
  std::vector<int> items;
  for (int c = 0; c < l * l; ++c)
    if ((closed >> c) & 1U) items.push_back(c);
  std::uint64_t all = closed;
  std::size_t a = items.size();
  for (int c = 0; c < l * l; ++c)
    if (((extra & ~closed) >> c) & 1U) {
      items.push_back(c);
      all |= std::uint64_t{1} << c;
    }
  std::vector<std::size_t> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
  while (a < items.size()) {
    const std::size_t b = items.size();
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        lo[static_cast<std::size_t>(k)] = k == j ? a : 0;
        hi[static_cast<std::size_t>(k)] = k < j ? a : b;
      }
      auto rec = [&](auto&& self, int k, std::size_t sa, std::size_t sb) -> void {
        if (k == m) {
          const int cell = table[sa] * l + table[sb];
          if (!((all >> cell) & 1U)) {
            all |= std::uint64_t{1} << cell;
            items.push_back(cell);
          }
          return;
        }
        for (std::size_t t = lo[static_cast<std::size_t>(k)]; t < hi[static_cast<std::size_t>(k)]; ++t) {
          const int c = items[t];
          self(self, k + 1, sa * static_cast<std::size_t>(l) + static_cast<std::size_t>(c / l),
               sb * static_cast<std::size_t>(l) + static_cast<std::size_t>(c % l));
        }
      };
      rec(rec, 0, 0, 0);
    }
    a = b;
  }
  return all;
}

}  // namespace

Language build_invariant_language(int base_size, const OperationTable& op, std::vector<std::string> names) {
  if (base_size > 4)
    throw CapacityError("invariant-language enumeration is limited to base size 4; list relations explicitly");
  if (op.base_size() != base_size) throw PreconditionError("operation over a different base");
  Language lang;
  lang.base_size = base_size;
  lang.wnu = op;
  lang.generated = true;
  if (names.empty())
    for (int a = 0; a < base_size; ++a) names.push_back(std::to_string(a));
  lang.element_names = std::move(names);

  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << base_size); ++bits)
    if (is_subuniverse(op, Subset(bits))) lang.unary.push_back(Subset(bits));
  std::sort(lang.unary.begin(), lang.unary.end(), canonical_less);

  const int cells = base_size * base_size;
  auto from_mask = [&](std::uint64_t m) {
    BinaryRelation r(base_size);
    for (int c = 0; c < cells; ++c)
      if ((m >> c) & 1U) r.insert(c / base_size, c % base_size);
    return r;
  };
  std::set<std::uint64_t> found;
  std::vector<std::uint64_t> queue;
  for (int c = 0; c < cells; ++c) {
    std::uint64_t m = close_cells(op, 0, std::uint64_t{1} << c);
    if (found.insert(m).second) queue.push_back(m);
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::uint64_t cur = queue[q];
    for (int c = 0; c < cells; ++c) {
      if ((cur >> c) & 1U) continue;
      std::uint64_t m = close_cells(op, cur, std::uint64_t{1} << c);
      if (found.insert(m).second) queue.push_back(m);
    }
  }
  for (std::uint64_t m : found) lang.binary.push_back(from_mask(m));
  std::sort(lang.binary.begin(), lang.binary.end(), [](const BinaryRelation& a, const BinaryRelation& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return a < b;
  });
  return lang;
}

// ---------------------------------------------------------------- congruences

Congruence::Congruence(Subset carrier, std::vector<Subset> blocks) : carrier_(carrier), blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(), [](Subset a, Subset b) { return a.min() < b.min(); });
  Subset covered;
  int top = carrier.empty() ? 0 : std::bit_width(carrier.bits());
  index_.assign(static_cast<std::size_t>(top), -1);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].empty()) throw PreconditionError("empty congruence block");
    if (!(blocks_[k] & covered).empty()) throw PreconditionError("congruence blocks overlap");
    covered = covered | blocks_[k];
    for (Element a : blocks_[k].elements()) {
      if (a >= top) throw PreconditionError("congruence block outside carrier");
      index_[static_cast<std::size_t>(a)] = static_cast<int>(k);
    }
  }
  if (covered != carrier) throw PreconditionError("congruence blocks do not cover the carrier");
}

Congruence Congruence::diagonal(Subset carrier) {
  std::vector<Subset> blocks;
  for (Element a : carrier.elements()) blocks.push_back(Subset::singleton(a));
  return Congruence(carrier, std::move(blocks));
}

Congruence Congruence::full(Subset carrier) { return Congruence(carrier, {carrier}); }

int Congruence::block_index(Element a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= index_.size() || index_[static_cast<std::size_t>(a)] < 0)
    throw PreconditionError("element outside congruence carrier");
  return index_[static_cast<std::size_t>(a)];
}

std::vector<Element> Congruence::representatives() const {
  std::vector<Element> out;
  for (Subset b : blocks_) out.push_back(b.min());
  return out;
}

bool Congruence::refines(const Congruence& coarser) const {
  return std::all_of(blocks_.begin(), blocks_.end(), [&](Subset b) {
    return b.is_subset_of(coarser.block_of(b.min()));
  });
}

BinaryRelation Congruence::pair_relation(int base_size) const {
  BinaryRelation r(base_size);
  for (Subset b : blocks_) r = r | BinaryRelation::product(base_size, b, b);
  return r;
}

bool is_compatible(const OperationTable& op, const Congruence& c) {
  const std::vector<Element> elems = c.carrier().elements();
  const int m = op.arity();
  for (int pos = 0; pos < m; ++pos) {
    bool ok = true;
    for_each_tuple(elems, m - 1, [&](const Tuple& rest) {
      if (!ok) return;
      Tuple args(static_cast<std::size_t>(m));
      for (int k = 0, r = 0; k < m; ++k)
        if (k != pos) args[static_cast<std::size_t>(k)] = rest[static_cast<std::size_t>(r++)];
      for (Subset block : c.blocks()) {
        if (block.size() < 2) continue;
        args[static_cast<std::size_t>(pos)] = block.min();
        const int target = c.block_index(op(args));
        for (Element b : block.elements()) {
          args[static_cast<std::size_t>(pos)] = b;
          if (c.block_index(op(args)) != target) {
            ok = false;
            return;
          }
        }
      }
    });
    if (!ok) return false;
  }
  return true;
}

std::vector<CongruenceInfo> enumerate_congruences(Subset d, const OperationTable& op) {
  const std::vector<Element> elems = d.elements();
  if (elems.size() > 10) throw CapacityError("congruence enumeration is limited to 10-element carriers");
  std::vector<CongruenceInfo> out;
  std::vector<std::vector<int>> labels;
  if (elems.empty()) return out;
  // Restricted growth strings enumerate each partition once.
  std::vector<int> rg(elems.size(), 0);
  std::vector<int> mx(elems.size(), 0);
  while (true) {
    int nb = *std::max_element(rg.begin(), rg.end()) + 1;
    std::vector<Subset> blocks(static_cast<std::size_t>(nb));
    for (std::size_t k = 0; k < elems.size(); ++k) blocks[static_cast<std::size_t>(rg[k])].insert(elems[k]);
    Congruence c(d, blocks);
    if (is_compatible(op, c)) {
      out.push_back({c, false, false});
      labels.push_back(rg);
    }
    std::size_t k = elems.size() - 1;
    while (k > 0 && rg[k] == mx[k - 1] + 1) --k;
    if (k == 0) break;
    ++rg[k];
    mx[k] = std::max(mx[k - 1], rg[k]);
    for (std::size_t t = k + 1; t < elems.size(); ++t) {
      rg[t] = 0;
      mx[t] = mx[k];
    }
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].congruence.block_count() != out[b].congruence.block_count())
      return out[a].congruence.block_count() > out[b].congruence.block_count();
    return labels[a] < labels[b];
  });
  std::vector<CongruenceInfo> sorted;
  for (std::size_t k : order) sorted.push_back(out[k]);
  for (auto& ci : sorted) {
    const Congruence& c = ci.congruence;
    ci.proper = !c.is_diagonal() && !c.is_full();
    if (c.is_full()) continue;
    ci.maximal = std::none_of(sorted.begin(), sorted.end(), [&](const CongruenceInfo& other) {
      const Congruence& o = other.congruence;
      return !o.is_full() && !(o == c) && c.refines(o);
    });
  }
  return sorted;
}

FactorAlgebra factor_algebra(Subset d, const OperationTable& op, const Congruence& c) {
  if (c.carrier() != d) throw PreconditionError("congruence carrier differs from the algebra");
  const int k = c.block_count();
  const int m = op.arity();
  const std::vector<Element> reps = c.representatives();
  std::vector<Element> table(ipow(static_cast<std::size_t>(k), m));
  std::vector<Element> block_ids(static_cast<std::size_t>(k));
  std::iota(block_ids.begin(), block_ids.end(), 0);
  std::size_t idx = 0;
  for_each_tuple(block_ids, m, [&](const Tuple& bt) {
    Tuple args(bt.size());
    for (std::size_t t = 0; t < bt.size(); ++t) args[t] = reps[static_cast<std::size_t>(bt[t])];
    table[idx++] = c.block_index(op(args));
  });
  OperationTable f(k, m, std::move(table));
  bool ok = true;
  for_each_tuple(d.elements(), m, [&](const Tuple& args) {
    if (!ok) return;
    Tuple bt(args.size());
    for (std::size_t t = 0; t < args.size(); ++t) bt[t] = c.block_index(args[t]);
    if (f(bt) != c.block_index(op(args))) ok = false;
  });
  if (!ok) throw PreconditionError("not a congruence");
  return {c, reps, std::move(f)};
}

// ---------------------------------------------------------------- special WNU search

SpecialWnuResult derive_special_wnu(const OperationTable& op, int max_arity, int max_depth) {
  WnuProfile prof = wnu_profile(op);
  if (!prof.idempotent || !prof.wnu) throw PreconditionError("derive_special_wnu needs an idempotent WNU");
  if (prof.special) return {op, op.arity(), 0};
  const int l = op.base_size();
  for (int a = op.arity(); a <= max_arity; ++a) {
    const std::size_t width = ipow(static_cast<std::size_t>(l), a);
    if (width > 4096) break;
    std::vector<Element> base(static_cast<std::size_t>(l));
    std::iota(base.begin(), base.end(), 0);
    std::vector<std::vector<Element>> level;
    std::set<std::vector<Element>> seen;
    for (int p = 0; p < a; ++p) {
      std::vector<Element> proj;
      for_each_tuple(base, a, [&](const Tuple& t) { proj.push_back(t[static_cast<std::size_t>(p)]); });
      if (seen.insert(proj).second) level.push_back(proj);
    }
    for (int depth = 1; depth <= max_depth; ++depth) {
      std::vector<std::vector<Element>> next = level;
      std::vector<std::vector<Element>> fresh;
      std::vector<std::size_t> pos(static_cast<std::size_t>(op.arity()), 0);
      if (ipow(level.size(), op.arity()) > 2'000'000) break;
      while (true) {
        std::vector<Element> v(width);
        for (std::size_t c = 0; c < width; ++c) {
          std::size_t s = 0;
          for (std::size_t k = 0; k < pos.size(); ++k)
            s = s * static_cast<std::size_t>(l) + static_cast<std::size_t>(level[pos[k]][c]);
          v[c] = op.at(s);
        }
        if (seen.insert(v).second) fresh.push_back(v);
        int k = static_cast<int>(pos.size()) - 1;
        for (; k >= 0; --k) {
          if (++pos[static_cast<std::size_t>(k)] < level.size()) break;
          pos[static_cast<std::size_t>(k)] = 0;
        }
        if (k < 0) break;
      }
      std::sort(fresh.begin(), fresh.end());
      for (const auto& v : fresh) {
        OperationTable cand(l, a, v);
        if (wnu_profile(cand).special) return {cand, a, depth};
      }
      if (fresh.empty()) break;
      next.insert(next.end(), fresh.begin(), fresh.end());
      level = std::move(next);
    }
  }
  return {};
}

// ---------------------------------------------------------------- local algebras

LocalAlgebra::LocalAlgebra(const Language& lang, Subset d)
    : domain_(d), base_size_(lang.base_size), elements_(d.elements()), global_op_(&lang.wnu) {
  if (d.empty()) throw PreconditionError("empty subalgebra");
  if (!is_subuniverse(lang.wnu, d)) throw PreconditionError("domain is not a subuniverse");
  local_of_.assign(static_cast<std::size_t>(base_size_), -1);
  for (std::size_t k = 0; k < elements_.size(); ++k) local_of_[static_cast<std::size_t>(elements_[k])] = static_cast<int>(k);
  const int s = size();
  const int m = lang.wnu.arity();
  std::vector<Element> locals(static_cast<std::size_t>(s));
  std::iota(locals.begin(), locals.end(), 0);
  std::vector<Element> table;
  table.reserve(ipow(static_cast<std::size_t>(s), m));
  for_each_tuple(locals, m, [&](const Tuple& t) {
    Tuple g(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) g[k] = to_global(t[k]);
    table.push_back(to_local(lang.wnu(g)));
  });
  op_ = OperationTable(s, m, std::move(table));
  for (Subset u : lang.unary) {
    Subset r = to_local(u & d);
    if (!r.empty() && std::find(unary_.begin(), unary_.end(), r) == unary_.end()) unary_.push_back(r);
  }
  for (const BinaryRelation& rel : lang.binary) {
    BinaryRelation r(s);
    for (auto [a, b] : rel.restricted(d, d).pairs()) r.insert(to_local(a), to_local(b));
    if (!r.empty() && std::find(binary_.begin(), binary_.end(), r) == binary_.end()) binary_.push_back(r);
  }
}

int LocalAlgebra::to_local(Element global) const {
  int v = global >= 0 && global < base_size_ ? local_of_[static_cast<std::size_t>(global)] : -1;
  if (v < 0) throw PreconditionError("element outside the subalgebra");
  return v;
}

Subset LocalAlgebra::to_global(Subset local) const {
  Subset out;
  for (Element a : local.elements()) out.insert(to_global(a));
  return out;
}

Subset LocalAlgebra::to_local(Subset global) const {
  Subset out;
  for (Element a : global.elements()) out.insert(to_local(a));
  return out;
}

BinaryRelation LocalAlgebra::to_global(const BinaryRelation& local) const {
  BinaryRelation out(base_size_);
  for (auto [a, b] : local.pairs()) out.insert(to_global(a), to_global(b));
  return out;
}

bool LocalAlgebra::preserves_language(const OperationTable& f) const {
  for (Subset u : unary_)
    if (!is_polymorphism(f, u)) return false;
  for (const BinaryRelation& r : binary_)
    if (!is_polymorphism(f, r)) return false;
  return true;
}

std::vector<Tuple> LocalAlgebra::term_clone(int arity, bool with_constants, std::size_t work_cap) const {
  const int s = size();
  const std::size_t width = ipow(static_cast<std::size_t>(s), arity);
  VectorClosure cl(op_, width);
  std::vector<Element> locals(static_cast<std::size_t>(s));
  std::iota(locals.begin(), locals.end(), 0);
  for (int p = 0; p < arity; ++p) {
    Tuple proj;
    for_each_tuple(locals, arity, [&](const Tuple& t) { proj.push_back(t[static_cast<std::size_t>(p)]); });
    cl.add(proj);
  }
  if (with_constants)
    for (Element c = 0; c < s; ++c) cl.add(Tuple(width, c));
  cl.run(work_cap);
  std::vector<Tuple> out = cl.items();
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- detectors

namespace {

// Proper nonempty subuniverses of the local algebra in canonical order.
std::vector<Subset> proper_subuniverses(const LocalAlgebra& alg) {
  std::vector<Subset> out;
  const Subset all = Subset::full(alg.size());
  for (std::uint64_t bits = 1; bits < all.bits(); ++bits)
    if (is_subuniverse(alg.op(), Subset(bits))) out.push_back(Subset(bits));
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

// Cells whose arguments contain at least `need` members of `s`.
std::vector<bool> cells_hitting(int size, int arity, Subset s, int need) {
  std::vector<Element> locals(static_cast<std::size_t>(size));
  std::iota(locals.begin(), locals.end(), 0);
  std::vector<bool> out;
  for_each_tuple(locals, arity, [&](const Tuple& t) {
    int c = 0;
    for (Element a : t) c += s.contains(a) ? 1 : 0;
    out.push_back(c >= need);
  });
  return out;
}

// Lexicographically least table preserving every relation of the local language, each
// cell confined to its allowed values. Forward checking over binary constraints.
std::optional<OperationTable> synthesize(const LocalAlgebra& alg, int arity, std::vector<Subset> dom,
                                         std::size_t node_cap) {
  const int s = alg.size();
  const std::size_t cells = ipow(static_cast<std::size_t>(s), arity);
  std::vector<Element> locals(static_cast<std::size_t>(s));
  std::iota(locals.begin(), locals.end(), 0);
  for (Subset u : alg.unary()) {
    std::size_t idx = 0;
    for_each_tuple(locals, arity, [&](const Tuple& t) {
      bool inside = std::all_of(t.begin(), t.end(), [&](Element a) { return u.contains(a); });
      if (inside) dom[idx] = dom[idx] & u;
      ++idx;
    });
  }
  struct Arc {
    std::size_t other;
    std::size_t rel;
    bool forward;
  };
  std::vector<std::vector<Arc>> arcs(cells);
  const auto& rels = alg.binary();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const std::vector<Pair> pairs = rels[r].pairs();
    if (ipow(pairs.size(), arity) > 4'000'000) throw CapacityError("operation synthesis too large");
    std::vector<std::size_t> pos(static_cast<std::size_t>(arity), 0);
    while (true) {
      std::size_t x = 0;
      std::size_t y = 0;
      for (std::size_t k : pos) {
        x = x * static_cast<std::size_t>(s) + static_cast<std::size_t>(pairs[k].first);
        y = y * static_cast<std::size_t>(s) + static_cast<std::size_t>(pairs[k].second);
      }
      if (x == y) {
        Subset keep;
        for (Element v : dom[x].elements())
          if (rels[r].contains(v, v)) keep.insert(v);
        dom[x] = keep;
      } else {
        arcs[x].push_back({y, r, true});
        arcs[y].push_back({x, r, false});
      }
      int k = arity - 1;
      for (; k >= 0; --k) {
        if (++pos[static_cast<std::size_t>(k)] < pairs.size()) break;
        pos[static_cast<std::size_t>(k)] = 0;
      }
      if (k < 0) break;
    }
  }
  std::vector<Element> value(cells, -1);
  std::size_t nodes = 0;
  std::function<bool(std::size_t, std::vector<Subset>&)> dfs = [&](std::size_t cell, std::vector<Subset>& d) {
    if (cell == cells) return true;
    for (Element v : d[cell].elements()) {
      if (++nodes > node_cap) throw CapacityError("operation synthesis exceeded its node cap");
      std::vector<Subset> next = d;
      next[cell] = Subset::singleton(v);
      bool ok = true;
      for (const Arc& a : arcs[cell]) {
        const BinaryRelation& rel = rels[a.rel];
        Subset allowed = a.forward ? rel.row(v) : rel.column(v);
        next[a.other] = next[a.other] & allowed;
        if (next[a.other].empty()) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      value[cell] = v;
      if (dfs(cell + 1, next)) return true;
    }
    return false;
  };
  for (Subset c : dom)
    if (c.empty()) return std::nullopt;
  if (!dfs(0, dom)) return std::nullopt;
  return OperationTable(s, arity, value);
}

bool absorbs_binary(const OperationTable& t, Subset b, int s) {
  for (Element a = 0; a < s; ++a)
    for (Element x : b.elements())
      if (!b.contains(t({a, x})) || !b.contains(t({x, a}))) return false;
  return true;
}

bool absorbs_ternary(const OperationTable& t, Subset c, int s) {
  for (Element a = 0; a < s; ++a)
    for (Element x : c.elements())
      for (Element y : c.elements())
        if (!c.contains(t({x, y, a})) || !c.contains(t({x, a, y})) || !c.contains(t({a, x, y}))) return false;
  return true;
}

BinaryRelation sg_star(const OperationTable& op, Element a, Subset c) {
  BinaryRelation gens(op.base_size());
  for (Element x : c.elements()) {
    gens.insert(a, x);
    gens.insert(x, a);
  }
  return sg_closure(op, gens);
}

std::optional<std::vector<Tuple>> clone_or_none(const LocalAlgebra& alg, int arity, const DetectorLimits& lim) {
  try {
    return alg.term_clone(arity, false, lim.work_cap);
  } catch (const CapacityError&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<BinaryAbsorbing> find_binary_absorption(const LocalAlgebra& alg, const DetectorLimits& lim) {
  const int s = alg.size();
  if (s < 2) return std::nullopt;
  if (s > 4) throw CapacityError("binary-absorption search is limited to 4-element domains");
  const std::vector<Subset> subs = proper_subuniverses(alg);
  if (subs.empty()) return std::nullopt;
  const auto clone = clone_or_none(alg, 2, lim);
  for (Subset b : subs) {
    if (clone) {
      for (const Tuple& t : *clone) {
        OperationTable op(s, 2, t);
        if (absorbs_binary(op, b, s) && alg.preserves_language(op)) return BinaryAbsorbing{alg.to_global(b), op};
      }
      continue;
    }
    std::vector<Subset> dom(static_cast<std::size_t>(s * s), Subset::full(s));
    const std::vector<bool> hit = cells_hitting(s, 2, b, 1);
    for (std::size_t k = 0; k < dom.size(); ++k)
      if (hit[k]) dom[k] = b;
    if (auto t = synthesize(alg, 2, dom, lim.backtrack_nodes)) return BinaryAbsorbing{alg.to_global(b), *t};
  }
  return std::nullopt;
}

std::optional<Central> find_central_subuniverse(const LocalAlgebra& alg, const DetectorLimits& lim) {
  const int s = alg.size();
  if (s < 2) return std::nullopt;
  if (s > 4) throw CapacityError("central-subuniverse search is limited to 4-element domains");
  const std::vector<Subset> subs = proper_subuniverses(alg);
  if (subs.empty()) return std::nullopt;
  std::optional<std::optional<std::vector<Tuple>>> clone;
  for (Subset c : subs) {
    const Subset cg = alg.to_global(c);
    std::vector<SgTranscript> transcripts;
    bool excluded = true;
    for (Element a : (alg.domain() - cg).elements()) {
      BinaryRelation sg = sg_star(alg.global_op(), a, cg);
      if (sg.contains(a, a)) {
        excluded = false;
        break;
      }
      transcripts.push_back({a, std::move(sg)});
    }
    if (!excluded) continue;
    if (!clone) clone = clone_or_none(alg, 3, lim);
    if (*clone) {
      for (const Tuple& t : **clone) {
        OperationTable op(s, 3, t);
        if (absorbs_ternary(op, c, s) && alg.preserves_language(op)) return Central{cg, op, std::move(transcripts)};
      }
      continue;
    }
    std::vector<Subset> dom(static_cast<std::size_t>(s * s * s), Subset::full(s));
    const std::vector<bool> hit = cells_hitting(s, 3, c, 2);
    for (std::size_t k = 0; k < dom.size(); ++k)
      if (hit[k]) dom[k] = c;
    if (auto t = synthesize(alg, 3, dom, lim.backtrack_nodes)) return Central{cg, *t, std::move(transcripts)};
  }
  return std::nullopt;
}

OperationTable discriminator(int size) {
  return OperationTable::from_function(size, 3, [](std::span<const Element> a) { return a[0] == a[1] ? a[2] : a[0]; });
}

namespace {

// x+y = F(x,y,z,...,z) for the first z making (A,+) an abelian group with F the m-fold sum.
std::optional<Element> affine_zero(const OperationTable& op, int k) {
  const int m = op.arity();
  if (m < 2) return std::nullopt;
  std::vector<Element> ids(static_cast<std::size_t>(k));
  std::iota(ids.begin(), ids.end(), 0);
  for (Element z = 0; z < k; ++z) {
    auto add = [&](Element x, Element y) {
      Tuple a(static_cast<std::size_t>(m), z);
      a[0] = x;
      a[1] = y;
      return op(a);
    };
    bool group = true;
    for (Element x = 0; x < k && group; ++x) {
      if (add(x, z) != x || add(z, x) != x) group = false;
      bool has_inverse = false;
      for (Element y = 0; y < k && group; ++y) {
        if (add(x, y) != add(y, x)) group = false;
        if (add(x, y) == z) has_inverse = true;
        for (Element w = 0; w < k && group; ++w)
          if (add(add(x, y), w) != add(x, add(y, w))) group = false;
      }
      if (!has_inverse) group = false;
    }
    if (!group) continue;
    bool sum = true;
    for_each_tuple(ids, m, [&](const Tuple& t) {
      if (!sum) return;
      Element acc = z;
      for (Element x : t) acc = add(acc, x);
      if (acc != op(t)) sum = false;
    });
    if (sum) return z;
  }
  return std::nullopt;
}

}  // namespace

namespace {

Congruence localize(const LocalAlgebra& alg, const Congruence& c) {
  std::vector<Subset> blocks;
  for (Subset b : c.blocks()) blocks.push_back(alg.to_local(b));
  return Congruence(Subset::full(alg.size()), std::move(blocks));
}

bool relational_pc(const LocalAlgebra& alg, const Congruence& local, const OperationTable& p) {
  const int s = alg.size();
  const BinaryRelation diag = BinaryRelation::diagonal(s, Subset::full(s));
  for (const BinaryRelation& r : alg.binary()) {
    if (!diag.is_subset_of(r)) continue;
    BinaryRelation q(local.block_count());
    for (auto [a, b] : r.pairs()) q.insert(local.block_index(a), local.block_index(b));
    if (!is_polymorphism(p, q)) return false;
  }
  return true;
}

bool clone_pc(const FactorAlgebra& f, const OperationTable& p, std::size_t work_cap) {
  const int k = f.congruence.block_count();
  // Polynomials of an affine algebra are affine maps; the discriminator is not.
  if (affine_zero(f.operation, k)) return false;
  std::vector<Element> ids(static_cast<std::size_t>(k));
  std::iota(ids.begin(), ids.end(), 0);
  if (k >= 3) {
    // Slupecki: the factor operation is essential and onto, so the polynomial clone is
    // complete exactly when every unary map is a polynomial.
    const std::size_t all = ipow(static_cast<std::size_t>(k), k);
    VectorClosure cl(f.operation, static_cast<std::size_t>(k));
    cl.add(ids);
    for (Element c = 0; c < k; ++c) cl.add(Tuple(static_cast<std::size_t>(k), c));
    cl.run(work_cap, [&](const Tuple&) { return cl.size() == all; });
    return cl.size() == all;
  }
  const std::size_t width = ipow(static_cast<std::size_t>(k), 3);
  VectorClosure cl(f.operation, width);
  for (int pos = 0; pos < 3; ++pos) {
    Tuple proj;
    for_each_tuple(ids, 3, [&](const Tuple& t) { proj.push_back(t[static_cast<std::size_t>(pos)]); });
    cl.add(proj);
  }
  for (Element c = 0; c < k; ++c) cl.add(Tuple(width, c));
  const Tuple& target = p.table();
  if (cl.contains(target)) return true;
  return cl.run(work_cap, [&](const Tuple& v) { return v == target; });
}

}  // namespace

PcChecks pc_checks(const LocalAlgebra& alg, const Congruence& c, const DetectorLimits& lim) {
  const Congruence local = localize(alg, c);
  const FactorAlgebra f = factor_algebra(Subset::full(alg.size()), alg.op(), local);
  const OperationTable p = discriminator(local.block_count());
  return {relational_pc(alg, local, p), clone_pc(f, p, lim.work_cap)};
}

std::optional<PcQuotient> find_pc_quotient(const LocalAlgebra& alg, const DetectorLimits& lim) {
  if (alg.size() < 2) return std::nullopt;
  std::vector<CongruenceInfo> cons = enumerate_congruences(alg.domain(), alg.global_op());
  std::stable_sort(cons.begin(), cons.end(), [](const CongruenceInfo& a, const CongruenceInfo& b) {
    return a.congruence.block_count() < b.congruence.block_count();
  });
  for (const CongruenceInfo& ci : cons) {
    if (ci.congruence.is_full()) continue;
    const Congruence local = localize(alg, ci.congruence);
    const OperationTable p = discriminator(local.block_count());
    if (!relational_pc(alg, local, p)) continue;
    const FactorAlgebra f = factor_algebra(Subset::full(alg.size()), alg.op(), local);
    if (clone_pc(f, p, lim.work_cap)) return PcQuotient{ci.congruence, p};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- linear quotients

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace


std::optional<LinearQuotient> linear_structure(const FactorAlgebra& f, const Congruence& c) {
  const int k = f.congruence.block_count();
  const OperationTable& op = f.operation;
  const int m = op.arity();
  if (k == 1) return LinearQuotient{c, {}, {{}}, false};
  if (m < 3) return std::nullopt;
  const std::optional<Element> zero = affine_zero(op, k);
  if (!zero) return std::nullopt;
  {
    const Element z = *zero;
    auto add = [&](Element x, Element y) {
      Tuple a(static_cast<std::size_t>(m), z);
      a[0] = x;
      a[1] = y;
      return op(a);
    };
    auto times = [&](int n, Element x) {
      Element acc = z;
      for (int t = 0; t < n; ++t) acc = add(acc, x);
      return acc;
    };
    std::vector<int> primes;
    std::vector<std::vector<Element>> basis_per_prime;
    int rest = k;
    bool ok = true;
    for (int p = 2; p <= rest && ok; ++p) {
      if (!is_prime(p) || rest % p != 0) continue;
      while (rest % p == 0) rest /= p;
      std::vector<Element> basis;
      std::set<Element> span{z};
      for (Element x = 0; x < k; ++x) {
        if (times(p, x) != z || span.count(x)) continue;
        basis.push_back(x);
        std::set<Element> grown;
        for (Element s0 : span)
          for (int t = 0; t < p; ++t) grown.insert(add(s0, times(t, x)));
        span = std::move(grown);
      }
      for (std::size_t t = 0; t < basis.size(); ++t) primes.push_back(p);
      basis_per_prime.push_back(basis);
    }
    // Enumerate all coordinate vectors; the group is a product of prime fields exactly
    // when this map is a bijection.
    std::vector<Element> flat_basis;
    for (const auto& b : basis_per_prime) flat_basis.insert(flat_basis.end(), b.begin(), b.end());
    std::vector<std::vector<int>> iso(static_cast<std::size_t>(k));
    std::vector<bool> hit(static_cast<std::size_t>(k), false);
    std::vector<int> coord(primes.size(), 0);
    std::size_t combos = 0;
    while (ok) {
      Element g = z;
      for (std::size_t t = 0; t < primes.size(); ++t) g = add(g, times(coord[t], flat_basis[t]));
      if (hit[static_cast<std::size_t>(g)]) {
        ok = false;
        break;
      }
      hit[static_cast<std::size_t>(g)] = true;
      iso[static_cast<std::size_t>(g)] = coord;
      ++combos;
      bool carry = true;
      for (std::size_t t = primes.size(); t > 0 && carry;) {
        --t;
        if (++coord[t] < primes[t]) carry = false;
        else coord[t] = 0;
      }
      if (carry) break;
    }
    if (!ok || combos != static_cast<std::size_t>(k)) return std::nullopt;
    if (std::any_of(primes.begin(), primes.end(), [&](int p) { return (m - 1) % p != 0; })) return std::nullopt;
    return LinearQuotient{c, primes, iso, false};
  }
  return std::nullopt;
}

std::optional<LinearQuotient> find_linear_quotient(Subset d, const OperationTable& op) {
  const std::vector<CongruenceInfo> cons = enumerate_congruences(d, op);
  std::vector<LinearQuotient> found;
  for (const CongruenceInfo& ci : cons) {
    FactorAlgebra f = factor_algebra(d, op, ci.congruence);
    if (auto lq = linear_structure(f, ci.congruence)) found.push_back(*lq);
  }
  if (found.empty()) return std::nullopt;
  LinearQuotient best = found.front();
  for (const LinearQuotient& other : found)
    if (!best.congruence.refines(other.congruence)) best.ambiguous = true;
  return best;
}

// ---------------------------------------------------------------- classification

FourCaseWitness classify_four_cases(const LocalAlgebra& alg, const DetectorLimits& lim) {
  if (alg.size() < 2) throw PreconditionError("four-case classification needs a nontrivial algebra");
  if (auto ba = find_binary_absorption(alg, lim)) return *ba;
  if (auto cr = find_central_subuniverse(alg, lim)) return *cr;
  if (auto pc = find_pc_quotient(alg, lim)) return *pc;
  if (auto lin = find_linear_quotient(alg.domain(), alg.global_op()); lin && lin->congruence.block_count() >= 2)
    return *lin;
  throw InternalInconsistency("no binary absorbing, central, PC or linear case found");
}

std::optional<std::string> check_binary_absorbing(const LocalAlgebra& alg, const BinaryAbsorbing& w) {
  if (!w.absorbing.is_subset_of(alg.domain())) return "B is not inside D";
  if (w.absorbing.empty() || w.absorbing == alg.domain()) return "B is not a proper nonempty subset";
  if (!is_subuniverse(alg.global_op(), w.absorbing)) return "B is not a subuniverse";
  const int s = alg.size();
  if (w.term.arity() != 2 || w.term.base_size() != s) return "T has the wrong shape";
  if (!alg.preserves_language(w.term)) return "T is not a polymorphism";
  if (!absorbs_binary(w.term, alg.to_local(w.absorbing), s)) return "absorption violated";
  return std::nullopt;
}

std::optional<std::string> check_central(const LocalAlgebra& alg, const Central& w) {
  if (!w.center.is_subset_of(alg.domain())) return "C is not inside D";
  if (w.center.empty() || w.center == alg.domain()) return "C is not a proper nonempty subset";
  if (!is_subuniverse(alg.global_op(), w.center)) return "C is not a subuniverse";
  const int s = alg.size();
  if (w.term.arity() != 3 || w.term.base_size() != s) return "S has the wrong shape";
  if (!alg.preserves_language(w.term)) return "S is not a polymorphism";
  if (!absorbs_ternary(w.term, alg.to_local(w.center), s)) return "ternary absorption violated";
  const Subset outside = alg.domain() - w.center;
  if (static_cast<int>(w.transcripts.size()) != outside.size()) return "transcript count mismatch";
  for (const SgTranscript& t : w.transcripts) {
    if (!outside.contains(t.element)) return "transcript for an element of C";
    if (!(sg_star(alg.global_op(), t.element, w.center) == t.closure)) return "Sg transcript does not replay";
    if (t.closure.contains(t.element, t.element)) return "(a,a) lies in Sg";
  }
  return std::nullopt;
}

std::optional<std::string> check_pc_quotient(const LocalAlgebra& alg, const PcQuotient& w) {
  if (w.congruence.carrier() != alg.domain()) return "σ has the wrong carrier";
  if (!is_compatible(alg.global_op(), w.congruence)) return "σ is not a congruence";
  if (w.congruence.block_count() < 2) return "trivial factor";
  if (!(w.discriminator == discriminator(w.congruence.block_count()))) return "P is not the discriminator";
  const Congruence local = localize(alg, w.congruence);
  if (!relational_pc(alg, local, w.discriminator)) return "P does not preserve the reflexive relations";
  return std::nullopt;
}

std::optional<std::string> check_linear_quotient(const LocalAlgebra& alg, const LinearQuotient& w) {
  if (w.congruence.carrier() != alg.domain()) return "σ has the wrong carrier";
  if (!is_compatible(alg.global_op(), w.congruence)) return "σ is not a congruence";
  const FactorAlgebra f = factor_algebra(alg.domain(), alg.global_op(), w.congruence);
  const int k = w.congruence.block_count();
  const int m = f.operation.arity();
  if (static_cast<int>(w.iso.size()) != k) return "iso has the wrong size";
  std::set<std::vector<int>> image;
  for (const auto& v : w.iso) {
    if (v.size() != w.primes.size()) return "iso coordinate length mismatch";
    for (std::size_t t = 0; t < v.size(); ++t)
      if (v[t] < 0 || v[t] >= w.primes[t]) return "iso coordinate out of range";
    image.insert(v);
  }
  std::size_t order = 1;
  for (int p : w.primes) {
    if (!is_prime(p)) return "signature entry is not prime";
    if ((m - 1) % p != 0) return "prime does not divide m-1";
    order *= static_cast<std::size_t>(p);
  }
  if (image.size() != static_cast<std::size_t>(k) || order != static_cast<std::size_t>(k)) return "iso is not a bijection";
  std::vector<Element> ids(static_cast<std::size_t>(k));
  std::iota(ids.begin(), ids.end(), 0);
  bool ok = true;
  for_each_tuple(ids, m, [&](const Tuple& t) {
    if (!ok) return;
    const auto& out = w.iso[static_cast<std::size_t>(f.operation(t))];
    for (std::size_t c = 0; c < w.primes.size(); ++c) {
      int s = 0;
      for (Element x : t) s += w.iso[static_cast<std::size_t>(x)][c];
      if (s % w.primes[c] != out[c]) ok = false;
    }
  });
  if (!ok) return "Ω/σ is not the modular sum";
  return std::nullopt;
}

namespace {

std::string format_congruence(const Congruence& c, const Language& lang) {
  if (c.is_diagonal()) return "Δ";
  if (c.is_full()) return "∇";
  std::string out = "{";
  for (std::size_t k = 0; k < c.blocks().size(); ++k) out += (k ? "," : "") + format_subset(c.blocks()[k], lang);
  return out + "}";
}

std::string format_list(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + std::to_string(v[k]);
  return out + "]";
}

}  // namespace

std::string describe(const FourCaseWitness& w, const Language& lang) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BinaryAbsorbing>) {
          return "BinaryAbsorbing(" + format_subset(x.absorbing, lang) + ", " + format_list(x.term.table()) + ")";
        } else if constexpr (std::is_same_v<T, Central>) {
          return "Central(" + format_subset(x.center, lang) + ", " + format_list(x.term.table()) + ")";
        } else if constexpr (std::is_same_v<T, PcQuotient>) {
          return "PCQuotient(" + format_congruence(x.congruence, lang) + ")";
        } else {
          return "LinearQuotient(" + format_congruence(x.congruence, lang) + ", " + format_list(x.primes) + ")";
        }
      },
      w);
}

// ---------------------------------------------------------------- cache

AlgebraCache::AlgebraCache(const Language& lang, DetectorLimits lim) : lang_(lang), lim_(lim) {}

AlgebraCache::Entry& AlgebraCache::entry(Subset d) {
  Entry& e = entries_[d.bits()];
  if (!e.local) e.local = std::make_unique<LocalAlgebra>(lang_, d);
  return e;
}

const LocalAlgebra& AlgebraCache::local(Subset d) { return *entry(d).local; }

const std::vector<CongruenceInfo>& AlgebraCache::congruences(Subset d) {
  Entry& e = entry(d);
  if (!e.congruences) e.congruences = enumerate_congruences(d, lang_.wnu);
  return *e.congruences;
}

const std::optional<BinaryAbsorbing>& AlgebraCache::binary_absorption(Subset d) {
  Entry& e = entry(d);
  if (!e.ba) e.ba = find_binary_absorption(*e.local, lim_);
  return *e.ba;
}

const std::optional<Central>& AlgebraCache::central(Subset d) {
  Entry& e = entry(d);
  if (!e.cr) e.cr = find_central_subuniverse(*e.local, lim_);
  return *e.cr;
}

const std::optional<PcQuotient>& AlgebraCache::pc_quotient(Subset d) {
  Entry& e = entry(d);
  if (!e.pc) e.pc = find_pc_quotient(*e.local, lim_);
  return *e.pc;
}

const std::optional<LinearQuotient>& AlgebraCache::linear_quotient(Subset d) {
  Entry& e = entry(d);
  if (!e.lin) e.lin = find_linear_quotient(d, lang_.wnu);
  return *e.lin;
}

}  // namespace zhuk
