#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Isomorphism classes of finite modules over the valuation ring behind a
// chain ring: G = (S/p^{e_1})^{r_1} + ... + (S/p^{e_k})^{r_k} with
// e_1 > e_2 > ... > e_k >= 1, where S has residue field F_q, q = p^d.
// The canonical form makes isomorphism testing plain structural equality.

namespace cokmat {

// Thrown by the brute-force automorphism oracle when the enumeration would
// exceed its work budget.
class ScaleExceeded : public std::runtime_error {
 public:
  explicit ScaleExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct ModuleType {
  // (exponent, multiplicity) pairs, exponents strictly decreasing.
  std::vector<std::pair<unsigned, unsigned>> parts;
  // d = deg P of the ring the module lives over; 1 for plain Z/p^k modules.
  unsigned residue_degree = 1;

  ModuleType() = default;
  explicit ModuleType(unsigned residue_degree_) : residue_degree(residue_degree_) {}
  // Canonicalizes: sorts descending, merges equal exponents, checks e, r >= 1.
  ModuleType(std::vector<std::pair<unsigned, unsigned>> parts_, unsigned residue_degree_);

  // One part per nonzero entry of an exponent list (e.g. SNF output).
  static ModuleType from_exponents(const std::vector<unsigned>& exps, unsigned residue_degree);
  // Grammar "e1^r1,e2^r2,..." with "^1" optional; "0" is the trivial module.
  static ModuleType parse(const std::string& text, unsigned residue_degree = 1);

  bool trivial() const { return parts.empty(); }
  // Minimal generator count = dim of G/pG over F_q.
  unsigned residue_rank() const;
  // log_q |G| = sum e_i r_i.
  unsigned order_log_q() const;
  // Largest exponent (0 for trivial).
  unsigned exponent() const;
  // p^N G = 0, i.e. exponent <= N.
  bool annihilated_by(unsigned n) const;
  // G/pG: everything collapses to exponent 1.
  ModuleType quotient_mod_p() const;

  std::string str() const;
  bool operator==(const ModuleType&) const = default;
  // Lexicographic, for use as an ordered-map key.
  bool operator<(const ModuleType& o) const;
};

// Automorphism count of G by direct enumeration, independent of the closed
// formula it serves as oracle for.  Endomorphisms are (t x t) matrices over
// the component decomposition whose (a,b) entry is multiplication by an
// element of p^{max(0, e_a - e_b)} S / p^{e_a} S; each candidate is applied
// to every element of G and counted when the images are pairwise distinct.
// q must be a prime power; throws ScaleExceeded when candidates * |G| * t^2
// passes the budget (the candidate count grows like q^(sum of min(e_a,e_b)),
// so high-multiplicity types are out of reach by design).
unsigned long long brute_force_aut_count(const ModuleType& g, std::uint64_t q);

// Every module type with order_log_q <= max_log; exponent capped by
// max_exponent when nonzero.  Ordered deterministically.
std::vector<ModuleType> all_module_types(unsigned max_log, unsigned max_exponent,
                                         unsigned residue_degree);

}  // namespace cokmat
