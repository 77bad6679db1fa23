#pragma once

#include <random>
#include <string>
#include <vector>

#include "zhuk/consistency.hpp"
#include "zhuk/core.hpp"
#include "zhuk/solver.hpp"

namespace zhuk::testing {

inline std::string data_path(const std::string& name) { return std::string(ZHUK_DATA_DIR) + "/" + name; }

inline ParsedFile load(const std::string& name) { return load_instance_file(data_path(name)); }

inline SubSolver brute() {
  return [](const Instance& x) { return brute_force_first(x); };
}

inline BinaryRelation relation(int l, std::vector<Pair> pairs) { return BinaryRelation::from_pairs(l, pairs); }

inline Instance full_instance(int l, int n) {
  Instance inst;
  inst.base_size = l;
  inst.n = n;
  inst.domains.assign(static_cast<std::size_t>(n), Subset::full(l));
  return inst;
}

// x_j = x_i + k over Z_l
inline BinaryRelation shift(int l, int k) {
  BinaryRelation r(l);
  for (int a = 0; a < l; ++a) r.insert(a, (a + k) % l);
  return r;
}

// Full-domain instances over z4_5ary with subdirect proper relations.
inline Instance random_z4(const Language& lang, std::mt19937_64& rng, int n) {
  std::vector<BinaryRelation> subdirect;
  for (const BinaryRelation& r : lang.binary)
    if (r.left_projection() == Subset::full(4) && r.right_projection() == Subset::full(4) && r.count() < 16)
      subdirect.push_back(r);
  Instance inst = full_instance(4, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 4 != 0) inst.edges.emplace(EdgeKey{i, j}, subdirect[rng() % subdirect.size()]);
  return inst;
}

}  // namespace zhuk::testing
