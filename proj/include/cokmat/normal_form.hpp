#pragma once

#include <optional>
#include <vector>

#include "cokmat/matrix.hpp"
#include "cokmat/module_type.hpp"

// Smith normal form over chain rings.  Every nonzero element is unit * p^v,
// so a single pass per pivot (minimal-valuation entry, row-major tie-break)
// diagonalizes any square matrix; the diagonal is p^{d_1}, ..., p^{d_n} with
// d_1 <= ... <= d_n and d_i = k standing for a zero diagonal entry at ring
// precision.  From the exponents we read off the cokernel as a module over
// the underlying discrete valuation ring.

namespace cokmat {

struct SNFResult {
  // d_i in [0, k], nondecreasing; diagonal entries are p^{d_i}.
  std::vector<unsigned> exponents;
  // When requested: invertible transforms with left * X * right diagonal.
  std::optional<RingMatrix> left, right;
};

SNFResult smith_normal_form(const RingMatrix& x, bool with_transforms = false);

// Exponents-only kernel for enumeration loops: `x` is an n x n flat digit
// buffer in `ring` layout, `work` holds n*n*deg words of scratch, `out`
// receives n exponents.  No allocation.
void snf_exponents(const ChainRing& ring, const std::uint64_t* x, unsigned n,
                   std::uint64_t* work, unsigned* out);

// Cokernel of a square matrix, with the precision caveat made explicit: an
// invariant factor p^k is zero at ring precision, so the true cokernel of
// any higher-precision preimage is only bounded below by `type`.  Counting
// callers that need an exact module identification must treat saturated
// classes as "not isomorphic to any module of exponent < k".
struct CokernelClass {
  ModuleType type;
  bool saturated = false;
  bool is(const ModuleType& g) const { return !saturated && type == g; }
};

CokernelClass classify_exponents(const ChainRing& ring, const unsigned* exps, unsigned n);
CokernelClass cokernel_type(const RingMatrix& x);

// v_i = minimum p-valuation over all i x i minors of the canonical lift of
// X, capped at k*i (the all-minors-zero convention).  Minors are computed
// exactly (big-integer coefficients, reduction by the monic modulus), so
// zero divisors cause no ambiguity.  Supports n <= 6 only.
std::vector<unsigned> minor_gcd_valuations(const RingMatrix& x);

// Transport between scalar and extension rings: for X over Z/p^m and P
// irreducible mod p, cok(P(X)) with its (Z/p^m)[t]/(P)-module structure is
// the cokernel of X - tbar*I over that extension ring.  shift_matrix builds
// X - tbar*I; cokernel_via_shift classifies its cokernel.
RingMatrix shift_matrix(const RingMatrix& x, const PolySpec& P);
CokernelClass cokernel_via_shift(const RingMatrix& x, const PolySpec& P);

// Forget the t-action: S/p^e is (Z/p^e)^d as an abelian group, d = residue
// degree, so every multiplicity gets scaled by d.
ModuleType underlying_group(const ModuleType& g);

}  // namespace cokmat
