#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "cokmat/module_type.hpp"
#include "cokmat/ring.hpp"

// Closed-form counts and probabilities for cokernels of random matrices over
// Z/p^k and its unramified extensions.  Everything finite is evaluated in
// exact rational arithmetic and asserted to reduce to an integer where the
// theory says it must; only the two infinite products go through floating
// point, with an explicit truncation bound.

namespace cokmat {

using ExactInteger = mpz_class;
using ExactRational = mpq_class;

// A counting problem: for each j, ask that the cokernel of P_j evaluated at
// a random matrix (mod p^{N+1}) be the module G_j over the extension ring of
// P_j.  The polynomials must stay pairwise distinct and irreducible mod p,
// and p^N must annihilate every target.
struct ProblemInstance {
  std::uint64_t p = 0;
  std::vector<PolySpec> polys;
  std::vector<ModuleType> targets;  // aligned with polys
  unsigned n = 0;                   // matrix dimension
  unsigned N = 0;                   // lift depth: matrices live over Z/p^{N+1}

  // Throws std::invalid_argument on any violated invariant.  Returns
  // human-readable warnings for legal-but-degenerate instances (currently:
  // n too small for any admissible residue matrix, making every count 0).
  std::vector<std::string> validate() const;

  std::uint64_t q(unsigned j) const;  // p^{deg P_j}
  // Residue ranks r_j of the targets.
  std::vector<unsigned> target_ranks() const;
};

// |Aut_R(G)| for G = sum (S/p^{e_i})^{r_i} over a ring with residue field
// F_q: prod_i q^{-r_i^2} |GL_{r_i}(F_q)| * prod_{i,j} q^{min(e_i,e_j) r_i r_j}.
ExactInteger aut_count_formula(const ModuleType& g, std::uint64_t q);

// Number of n x n matrices of rank r over F_q.
ExactInteger rank_count_formula(unsigned n, unsigned r, std::uint64_t q);

// Number of lifts X over Z/p^{N+1} of one admissible residue matrix with
// cok(P_j(X)) isomorphic to G_j for every j:
//   p^{N n^2} * prod_j q_j^{r_j^2} prod_{i=1}^{r_j} (1 - q_j^{-i})^2 / |Aut(G_j)|.
// Independent of which admissible residue matrix is lifted.
ExactInteger lift_count_formula(const ProblemInstance& inst);

// The same expression without the p^{N n^2} factor: the constant relating
// the probability of hitting the targets over Z/p^{N+1} to the probability
// that the residue matrix is admissible.
ExactRational lift_match_fraction(const ProblemInstance& inst);

// lift_match_fraction * residue_prob: the predicted probability that a
// uniform matrix over Z/p^{N+1} hits every target, given the exact
// probability that its reduction mod p is admissible.
ExactRational predicted_probability(const ProblemInstance& inst,
                                    const ExactRational& residue_prob);

struct LimitValue {
  double value = 0.0;
  unsigned truncation_index = 0;  // largest factor index kept in the products
};

// n -> infinity probability that all targets are hit:
//   prod_j |Aut(G_j)|^{-1} prod_{i=1}^inf (1 - q_j^{-i}),
// truncated so the total tail error stays below tol.
LimitValue limit_probability(const ProblemInstance& inst, double tol);

// Limiting joint distribution of the corank statistics r_j alone:
//   prod_j q_j^{-r_j^2} prod_{i=1}^inf (1 - q_j^{-i}) / prod_{i=1}^{r_j} (1 - q_j^{-i})^2
// with q_j = p^{degs[j]}.
LimitValue rank_limit_distribution(std::uint64_t p, const std::vector<unsigned>& degs,
                                   const std::vector<unsigned>& ranks, double tol);

// Single-polynomial count directly over a ring with residue field F_q (the
// general-q form of lift_count_formula; the two agree when q = p):
//   q^{N n^2} * q^{r^2} prod_{i=1}^{r} (1 - q^{-i})^2 / |Aut_R(G)|.
ExactInteger extension_lift_count(const ModuleType& g, std::uint64_t q, unsigned N,
                                  unsigned n);

}  // namespace cokmat
