#include "cokmat/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cokmat {

namespace {

mpz_class pow_u(std::uint64_t base, unsigned long long e) {
  mpz_class b = static_cast<unsigned long>(base), r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// 1 - q^{-i} as an exact rational.
mpq_class one_minus_qinv(std::uint64_t q, unsigned i) {
  mpz_class qi = pow_u(q, i);
  return mpq_class(qi - 1) / mpq_class(qi);
}

mpz_class require_integer(const mpq_class& v, const char* what) {
  if (v.get_den() != 1)
    throw std::logic_error(std::string(what) + ": expression did not reduce to an integer");
  return v.get_num();
}

void require_q(std::uint64_t q) {
  if (q < 2) throw std::invalid_argument("residue field size must be >= 2");
}

}  // namespace

std::uint64_t ProblemInstance::q(unsigned j) const {
  std::uint64_t v = 1;
  for (unsigned i = 0; i < polys[j].degree(); ++i) v *= p;
  return v;
}

std::vector<unsigned> ProblemInstance::target_ranks() const {
  std::vector<unsigned> r;
  for (const ModuleType& g : targets) r.push_back(g.residue_rank());
  return r;
}

std::vector<std::string> ProblemInstance::validate() const {
  PrimePowerModulus check_p(p, 1);  // rejects non-primes
  if (polys.empty()) throw std::invalid_argument("instance needs at least one polynomial");
  if (polys.size() != targets.size())
    throw std::invalid_argument("polynomial and target lists must be aligned");
  if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  for (std::size_t j = 0; j < polys.size(); ++j) {
    if (polys[j].p != p)
      throw std::invalid_argument("polynomial " + std::to_string(j) + " names a different prime");
    // q_j must stay a machine word; matches the ring constructibility bound.
    unsigned __int128 qj = 1;
    for (unsigned i = 0; i < polys[j].degree(); ++i) {
      qj *= p;
      if (qj >= (static_cast<unsigned __int128>(1) << 62))
        throw std::invalid_argument("residue field size p^deg exceeds 2^62");
    }
    if (targets[j].residue_degree != polys[j].degree())
      throw std::invalid_argument("target " + std::to_string(j) +
                                  " has residue degree " +
                                  std::to_string(targets[j].residue_degree) +
                                  " but its polynomial has degree " +
                                  std::to_string(polys[j].degree()));
    if (!targets[j].annihilated_by(N))
      throw std::invalid_argument("target " + std::to_string(j) +
                                  " is not annihilated by p^" + std::to_string(N));
    for (std::size_t i = 0; i < j; ++i)
      if (polys[i].residue_coeffs() == polys[j].residue_coeffs())
        throw std::invalid_argument("polynomials " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide mod p");
  }
  std::vector<std::string> warnings;
  unsigned long long need = 0;
  for (std::size_t j = 0; j < polys.size(); ++j)
    need += static_cast<unsigned long long>(polys[j].degree()) * targets[j].residue_rank();
  if (n < need)
    warnings.push_back("no admissible residue matrix exists: n = " + std::to_string(n) +
                       " < " + std::to_string(need) +
                       " = sum of deg(P_j) * rank(G_j); every count is 0");
  return warnings;
}

ExactInteger aut_count_formula(const ModuleType& g, std::uint64_t q) {
  require_q(q);
  mpq_class acc = 1;
  for (const auto& [e, r] : g.parts) {
    (void)e;
    // q^{-r^2} |GL_r(F_q)| = prod_{i=1}^{r} (1 - q^{-i})
    for (unsigned i = 1; i <= r; ++i) acc *= one_minus_qinv(q, i);
  }
  unsigned long long exp_sum = 0;
  for (const auto& [ei, ri] : g.parts)
    for (const auto& [ej, rj] : g.parts)
      exp_sum += static_cast<unsigned long long>(std::min(ei, ej)) * ri * rj;
  acc *= mpq_class(pow_u(q, exp_sum));
  return require_integer(acc, "aut_count_formula");
}

ExactInteger rank_count_formula(unsigned n, unsigned r, std::uint64_t q) {
  require_q(q);
  if (r > n) throw std::invalid_argument("rank exceeds matrix dimension");
  mpq_class acc = mpq_class(pow_u(q, static_cast<unsigned long long>(n) * n -
                                         static_cast<unsigned long long>(n - r) * (n - r)));
  for (unsigned i = 1; i <= n; ++i) acc *= one_minus_qinv(q, i);
  for (unsigned i = n - r + 1; i <= n; ++i) acc *= one_minus_qinv(q, i);
  for (unsigned i = 1; i <= n - r; ++i) acc /= one_minus_qinv(q, i);
  for (unsigned i = 1; i <= r; ++i) acc /= one_minus_qinv(q, i);
  return require_integer(acc, "rank_count_formula");
}

ExactRational lift_match_fraction(const ProblemInstance& inst) {
  inst.validate();
  mpq_class acc = 1;
  for (std::size_t j = 0; j < inst.targets.size(); ++j) {
    const std::uint64_t qj = inst.q(static_cast<unsigned>(j));
    const unsigned r = inst.targets[j].residue_rank();
    acc *= mpq_class(pow_u(qj, static_cast<unsigned long long>(r) * r));
    for (unsigned i = 1; i <= r; ++i) {
      mpq_class f = one_minus_qinv(qj, i);
      acc *= f * f;
    }
    acc /= mpq_class(aut_count_formula(inst.targets[j], qj));
  }
  return acc;
}

ExactInteger lift_count_formula(const ProblemInstance& inst) {
  mpq_class acc = lift_match_fraction(inst);
  acc *= mpq_class(pow_u(inst.p, static_cast<unsigned long long>(inst.N) * inst.n * inst.n));
  // Integrality is a theorem whenever n clears the total target rank; below
  // that threshold no admissible residue matrix exists and the product can
  // fail to reduce.  Signal that instead of returning a truncated value.
  if (acc.get_den() != 1)
    throw std::domain_error(
        "lift count does not reduce to an integer: n is below the total target "
        "rank, so the counting formula is vacuous here (see validate())");
  return acc.get_num();
}

ExactRational predicted_probability(const ProblemInstance& inst,
                                    const ExactRational& residue_prob) {
  return lift_match_fraction(inst) * residue_prob;
}

namespace {

// Truncation point: q^{-M} / (1 - q^{-1}) < tol, i.e. the tail of
// sum q^{-i} past M stays below tol.
unsigned truncation_for(std::uint64_t q, double tol) {
  unsigned m = 1;
  double term = 1.0 / static_cast<double>(q);
  double factor = term;  // q^{-m}
  double bound = 1.0 - term;
  while (factor / bound >= tol && m < 4096) {
    factor *= term;
    ++m;
  }
  return m;
}

double truncated_euler(std::uint64_t q, unsigned m) {
  double acc = 1.0;
  double qinv = 1.0 / static_cast<double>(q);
  double pw = 1.0;
  for (unsigned i = 1; i <= m; ++i) {
    pw *= qinv;
    acc *= 1.0 - pw;
  }
  return acc;
}

}  // namespace

LimitValue limit_probability(const ProblemInstance& inst, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  inst.validate();
  const double per = tol / (2.0 * static_cast<double>(inst.polys.size()));
  LimitValue out;
  double acc = 1.0;
  for (std::size_t j = 0; j < inst.polys.size(); ++j) {
    const std::uint64_t qj = inst.q(static_cast<unsigned>(j));
    unsigned m = truncation_for(qj, per);
    out.truncation_index = std::max(out.truncation_index, m);
    acc *= truncated_euler(qj, m) /
           mpq_class(aut_count_formula(inst.targets[j], qj)).get_d();
  }
  out.value = acc;
  return out;
}

LimitValue rank_limit_distribution(std::uint64_t p, const std::vector<unsigned>& degs,
                                   const std::vector<unsigned>& ranks, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (degs.size() != ranks.size())
    throw std::invalid_argument("degree and rank lists must be aligned");
  if (degs.empty()) throw std::invalid_argument("need at least one polynomial degree");
  PrimePowerModulus check_p(p, 1);
  const double per = tol / (2.0 * static_cast<double>(degs.size()));
  LimitValue out;
  double acc = 1.0;
  for (std::size_t j = 0; j < degs.size(); ++j) {
    if (degs[j] < 1 || degs[j] > kMaxPolyDegree)
      throw std::invalid_argument("polynomial degree out of range");
    std::uint64_t qj = 1;
    for (unsigned i = 0; i < degs[j]; ++i) qj *= p;
    const unsigned r = ranks[j];
    unsigned m = truncation_for(qj, per);
    out.truncation_index = std::max(out.truncation_index, m);
    double v = truncated_euler(qj, m);
    // q^{-r^2} / prod_{i<=r} (1-q^{-i})^2
    v *= std::pow(static_cast<double>(qj), -static_cast<double>(r) * r);
    double denom = 1.0;
    double pw = 1.0;
    for (unsigned i = 1; i <= r; ++i) {
      pw /= static_cast<double>(qj);
      denom *= (1.0 - pw) * (1.0 - pw);
    }
    acc *= v / denom;
  }
  out.value = acc;
  return out;
}

ExactInteger extension_lift_count(const ModuleType& g, std::uint64_t q, unsigned N,
                                  unsigned n) {
  require_q(q);
  if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  if (!g.annihilated_by(N))
    throw std::invalid_argument("target is not annihilated by p^" + std::to_string(N));
  const unsigned r = g.residue_rank();
  mpq_class acc = mpq_class(pow_u(q, static_cast<unsigned long long>(N) * n * n +
                                         static_cast<unsigned long long>(r) * r));
  for (unsigned i = 1; i <= r; ++i) {
    mpq_class f = one_minus_qinv(q, i);
    acc *= f * f;
  }
  acc /= mpq_class(aut_count_formula(g, q));
  // Same vacuity threshold as lift_count_formula: below n = residue rank the
  // value need not be an integer because the count it names is empty.
  if (acc.get_den() != 1)
    throw std::domain_error(
        "lift count does not reduce to an integer: n is below the target's "
        "residue rank, so the counting formula is vacuous here");
  return acc.get_num();
}

}  // namespace cokmat
