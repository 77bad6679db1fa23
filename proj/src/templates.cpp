#include "zhuk/templates.hpp"

#include <map>
#include <mutex>
#include <random>

#include "zhuk/algebra.hpp"

namespace zhuk {

std::vector<std::string> template_names() { return {"z2", "z3", "semilattice2", "z2xz2", "z4_5ary", "rps"}; }

OperationTable template_operation(const std::string& name) {
  auto sum_mod = [](int size, int arity, int modulus) {
    return OperationTable::from_function(size, arity, [modulus](std::span<const Element> x) {
      int s = 0;
      for (Element v : x) s += v;
      return s % modulus;
    });
  };
  if (name == "z2") return sum_mod(2, 3, 2);
  if (name == "z3") return sum_mod(3, 4, 3);
  if (name == "z4_5ary") return sum_mod(4, 5, 4);
  if (name == "semilattice2")
    return OperationTable::from_function(2, 3, [](std::span<const Element> x) { return x[0] & x[1] & x[2]; });
  if (name == "z2xz2")
    return OperationTable::from_function(4, 3, [](std::span<const Element> x) { return x[0] ^ x[1] ^ x[2]; });
  if (name == "rps")
    return OperationTable::from_function(3, 2, [](std::span<const Element> x) -> Element {
      return (x[0] + 1) % 3 == x[1] ? x[1] : x[0];
    });
  throw PreconditionError("unknown template '" + name + "'");
}

Language template_language(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, Language> built;
  const OperationTable op = template_operation(name);
  std::lock_guard<std::mutex> lock(mu);
  auto it = built.find(name);
  if (it == built.end()) it = built.emplace(name, build_invariant_language(op.base_size(), op)).first;
  return it->second;
}

Instance generate_instance(const Language& lang, const GenOptions& opt) {
  if (opt.n < 0) throw PreconditionError("n must be nonnegative");
  if (lang.unary.empty() || lang.binary.empty()) throw PreconditionError("language has no relations to sample");
  std::mt19937_64 rng(opt.seed);
  auto pick = [&rng](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };
  const auto threshold = static_cast<std::uint64_t>(opt.density * 1'000'000.0);

  Instance inst;
  inst.base_size = lang.base_size;
  inst.n = opt.n;
  for (int i = 0; i < opt.n; ++i)
    inst.domains.push_back(rng() % 2 == 0 ? Subset::full(lang.base_size) : lang.unary[pick(lang.unary.size())]);
  for (int i = 0; i < opt.n; ++i)
    for (int j = i + 1; j < opt.n; ++j) {
      if (rng() % 1'000'000 >= threshold) continue;
      const Subset di = inst.domains[static_cast<std::size_t>(i)];
      const Subset dj = inst.domains[static_cast<std::size_t>(j)];
      for (int attempt = 0; attempt < 8; ++attempt) {
        BinaryRelation r = lang.binary[pick(lang.binary.size())].restricted(di, dj);
        if (r.empty()) continue;
        inst.edges[{i, j}] = r;
        break;
      }
    }
  return inst;
}

}  // namespace zhuk
