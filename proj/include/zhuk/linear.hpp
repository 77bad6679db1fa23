#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "zhuk/algebra.hpp"
#include "zhuk/consistency.hpp"
#include "zhuk/core.hpp"

namespace zhuk {

using ModMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using ModVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

inline int mod_p(long long x, int p) {
  long long r = x % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

int mod_inverse(int a, int p);

// The three elementary row operations over Z_p.
template <class Derived>
void row_switch(Eigen::MatrixBase<Derived>& m, Eigen::Index a, Eigen::Index b) {
  if (a != b) m.row(a).swap(m.row(b));
}

template <class Derived>
void row_scale(Eigen::MatrixBase<Derived>& m, Eigen::Index r, int c, int p) {
  if (mod_p(c, p) == 0) throw PreconditionError("row scaling by zero");
  for (Eigen::Index k = 0; k < m.cols(); ++k) m(r, k) = mod_p(static_cast<long long>(m(r, k)) * c, p);
}

template <class Derived>
void row_add(Eigen::MatrixBase<Derived>& m, Eigen::Index dst, Eigen::Index src, int c, int p) {
  if (dst == src) throw PreconditionError("row addition needs distinct rows");
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    m(dst, k) = mod_p(static_cast<long long>(m(dst, k)) + static_cast<long long>(c) * m(src, k), p);
}

struct EchelonForm {
  ModMatrix reduced;        // reduced row-echelon form, zero rows dropped
  std::vector<int> pivots;  // pivot column of each row
  bool consistent = true;
};

// Reduced row-echelon form of an augmented matrix [A | b] over Z_p.
EchelonForm row_echelon(const ModMatrix& augmented, int p);

struct AffineSpace {
  int p = 2;
  bool empty = false;
  ModVector point;
  std::vector<ModVector> basis;
  int dimension() const { return static_cast<int>(basis.size()); }
  std::size_t cardinality() const;
  bool contains(const ModVector& v) const;
  std::vector<ModVector> points() const;
};

struct AffineHull {
  AffineSpace space;
  ModMatrix equations;  // rows [w | w·a]
  bool closed = false;  // the input already was the whole hull
};

AffineHull affine_hull(const std::vector<ModVector>& points, int p, int dim);

// Solutions of an augmented matrix over Z_p; leftmost pivots, free columns set to zero
// in the particular solution.
std::optional<AffineSpace> solve_mod_p(const ModMatrix& augmented, int p);

struct ZVar {
  int variable = 0;
  int coordinate = 0;
  friend bool operator==(const ZVar&, const ZVar&) = default;
};

struct PrimeSystem {
  int p = 2;
  std::vector<ZVar> columns;
  ModMatrix augmented;  // rows x (columns + 1)
};

struct LinearSystem {
  std::vector<PrimeSystem> systems;  // ascending prime
};

// One affine space per prime; the solution set is their product.
struct AffineSet {
  std::vector<AffineSpace> spaces;
  bool empty() const;
  int dimension() const;
  std::size_t cardinality() const;
};

std::optional<AffineSet> gauss_solve(const LinearSystem& sys);

struct FactorizedInstance {
  Instance base;
  std::vector<LinearQuotient> quotients;  // per variable
  Instance factor;                        // domains and relations over block representatives
  LinearSystem layout;                    // columns per prime, no rows

  // Coordinates of a base element of D_i in the iso of variable i.
  const std::vector<int>& coordinates(int i, Element a) const;
  Element representative(int i, Element a) const;
  // Image of an assignment as one vector per prime system.
  std::vector<ModVector> image(const Assignment& h) const;
  // Block of D_i picked out by a per-prime point.
  Subset block(int i, const std::vector<ModVector>& z) const;
  Instance block_restricted(const Instance& inst, const std::vector<ModVector>& z) const;
};

FactorizedInstance factorize_instance(const Instance& inst, const std::vector<LinearQuotient>& quotients);
LinearSystem build_linear_system(const FactorizedInstance& fi);

// Equations of the affine hull of a set of per-prime points, as rows for each system.
LinearSystem hull_equations(const FactorizedInstance& fi, const std::vector<std::vector<ModVector>>& points);
LinearSystem append_rows(const LinearSystem& a, const LinearSystem& b);
std::vector<std::vector<ModVector>> enumerate_points(const AffineSet& s);

struct LinearEvent {
  std::string kind;
  nlohmann::json witness;
};

struct LinearResult {
  std::optional<Assignment> solution;
  std::string reason;  // why no solution
};

std::vector<LinearQuotient> minimal_linear_congruences(const Instance& inst, AlgebraCache& cache);

LinearResult linear_case_solve(const Instance& inst, AlgebraCache& cache, const SubSolver& solve,
                               const std::function<void(LinearEvent)>& observe = {});

nlohmann::json to_json(const ModMatrix& m);
nlohmann::json to_json(const ModVector& v);

}  // namespace zhuk
