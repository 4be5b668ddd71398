#include "cokmat/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cokmat/formulas.hpp"
#include "cokmat/matrix.hpp"
#include "cokmat/normal_form.hpp"

namespace cokmat {

namespace {

// Deterministic splitmix64 stream for the randomized criteria; the suite
// must produce identical output on every run.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t m) {
    std::uint64_t lim = ~0ULL - ~0ULL % m;
    for (;;) {
      std::uint64_t v = next();
      if (v < lim) return v % m;
    }
  }
};

ProblemInstance make_instance(std::uint64_t p, std::vector<PolySpec> polys,
                              std::vector<ModuleType> targets, unsigned N, unsigned n) {
  ProblemInstance inst;
  inst.p = p;
  inst.polys = std::move(polys);
  inst.targets = std::move(targets);
  inst.N = N;
  inst.n = n;
  return inst;
}

long double pow_ld(std::uint64_t p, unsigned e) {
  long double r = 1;
  for (unsigned i = 0; i < e; ++i) r *= static_cast<long double>(p);
  return r;
}

mpz_class to_mpz(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

RingMatrix random_matrix(const RingPtr& ring, unsigned rows, unsigned cols, Rng& rng) {
  RingMatrix m(ring, rows, cols);
  for (auto& w : m.raw()) w = rng.below(ring->pk);
  return m;
}

RingMatrix random_invertible(const RingPtr& ring, unsigned n, Rng& rng) {
  for (;;) {
    RingMatrix m = random_matrix(ring, n, n, rng);
    if (is_invertible(m)) return m;
  }
}

std::string describe(const ProblemInstance& inst) {
  std::ostringstream s;
  s << "p=" << inst.p << " N=" << inst.N << " n=" << inst.n;
  for (std::size_t j = 0; j < inst.polys.size(); ++j)
    s << "; " << inst.polys[j].str() << " -> " << inst.targets[j].str();
  return s.str();
}

// ---- criterion 1: degree-1 lift counts, exhaustive over residue matrices --

std::pair<bool, std::string> criterion_degree1() {
  const ModuleType z2({{1, 1}}, 1);
  unsigned instances = 0, skipped = 0;
  std::uint64_t pairs = 0;
  bool worked_value = false;
  for (std::uint64_t p : {2ull, 3ull}) {
    for (unsigned n = 1; n <= 3; ++n) {
      for (unsigned N = 1; N <= 2; ++N) {
        // Per-residue-matrix lift space must fit the enumeration budget.
        if (pow_ld(p, N * n * n) > static_cast<long double>(kLiftBudget)) {
          ++skipped;
          continue;
        }
        std::map<unsigned, std::vector<ModuleType>> by_rank;
        for (const ModuleType& g : all_module_types(N * n, N, 1))
          if (g.residue_rank() <= n) by_rank[g.residue_rank()].push_back(g);
        for (const auto& [rank, targets] : by_rank) {
          ProblemInstance base =
              make_instance(p, {PolySpec(p, {0})}, {targets.front()}, N, n);
          std::vector<RingMatrix> adm = admissible_residues(base);
          for (const ModuleType& g : targets) {
            ProblemInstance inst = make_instance(p, {PolySpec(p, {0})}, {g}, N, n);
            mpz_class expect = lift_count_formula(inst);
            for (const RingMatrix& xbar : adm) {
              std::uint64_t got = enumerate_lifts(xbar, inst);
              if (to_mpz(got) != expect) {
                std::ostringstream err;
                err << describe(inst) << ": counted " << got << ", formula "
                    << expect.get_str();
                return {false, err.str()};
              }
              ++pairs;
              if (p == 2 && N == 1 && n == 1 && g == z2 && got == 1) worked_value = true;
            }
            ++instances;
          }
        }
      }
    }
  }
  if (!worked_value)
    return {false, "worked value (p=2, N=1, n=1, G=Z/2) -> 1 never reproduced"};
  std::ostringstream d;
  d << instances << " instances, " << pairs
    << " (target, residue-matrix) pairs, worked value 1 confirmed; " << skipped
    << " parameter set over budget, skipped";
  return {true, d.str()};
}

// ---- criterion 2: degree-2 lift counts ------------------------------------

std::pair<bool, std::string> criterion_degree2() {
  const PolySpec quad(2, {1, 1});
  RingPtr f2 = make_ring(2, 1);
  ProblemInstance rp = make_instance(2, {quad}, {ModuleType({{1, 1}}, 2)}, 1, 2);
  std::uint64_t companion_count = enumerate_lifts(RingMatrix::companion(f2, quad), rp);
  if (companion_count != 12 || lift_count_formula(rp) != 12)
    return {false, "companion residue matrix: counted " +
                       std::to_string(companion_count) + ", frozen value 12"};

  struct Case {
    ModuleType g;
    unsigned N;
  };
  std::vector<Case> cases = {{ModuleType({{1, 1}}, 2), 1},
                             {ModuleType(2), 1},
                             {ModuleType({{2, 1}}, 2), 2}};
  std::ostringstream d;
  d << "companion count 12";
  for (const Case& c : cases) {
    ProblemInstance inst = make_instance(2, {quad}, {c.g}, c.N, 2);
    mpz_class expect = lift_count_formula(inst);
    std::vector<RingMatrix> adm = admissible_residues(inst);
    if (adm.empty()) return {false, describe(inst) + ": no admissible residue matrix"};
    for (const RingMatrix& xbar : adm) {
      std::uint64_t got = enumerate_lifts(xbar, inst);
      if (to_mpz(got) != expect)
        return {false, describe(inst) + ": counted " + std::to_string(got) +
                           ", formula " + expect.get_str()};
    }
    d << "; " << c.g.str() << " (N=" << c.N << ") -> " << expect.get_str() << " on "
      << adm.size() << " residue matrices";
  }
  return {true, d.str()};
}

// ---- criterion 3: joint lift counts ---------------------------------------

std::pair<bool, std::string> criterion_joint() {
  RingPtr f2 = make_ring(2, 1);
  ProblemInstance pair2 =
      make_instance(2, {PolySpec(2, {0}), PolySpec(2, {-1})},
                    {ModuleType({{1, 1}}, 1), ModuleType({{1, 1}}, 1)}, 1, 2);
  std::uint64_t diag_count =
      enumerate_lifts(RingMatrix::from_ints(f2, {{0, 0}, {0, 1}}), pair2);
  if (diag_count != 4 || lift_count_formula(pair2) != 4)
    return {false, "diag(0,1): counted " + std::to_string(diag_count) +
                       ", frozen value 4"};
  std::ostringstream d;
  d << "diag(0,1) count 4";
  const PolySpec quad(2, {1, 1});
  for (unsigned n = 2; n <= 3; ++n) {
    ProblemInstance mixed =
        make_instance(2, {PolySpec(2, {0}), quad},
                      {ModuleType(1), ModuleType({{1, 1}}, 2)}, 1, n);
    mpz_class expect = lift_count_formula(mixed);
    std::vector<RingMatrix> adm = admissible_residues(mixed);
    if (adm.empty()) return {false, describe(mixed) + ": no admissible residue matrix"};
    for (const RingMatrix& xbar : adm) {
      std::uint64_t got = enumerate_lifts(xbar, mixed);
      if (to_mpz(got) != expect)
        return {false, describe(mixed) + ": counted " + std::to_string(got) +
                           ", formula " + expect.get_str()};
    }
    d << "; mixed n=" << n << " -> " << expect.get_str() << " on " << adm.size()
      << " residue matrices";
  }
  return {true, d.str()};
}

// ---- criterion 4: residue-matrix independence -----------------------------

std::pair<bool, std::string> criterion_independence() {
  ProblemInstance inst =
      make_instance(2, {PolySpec(2, {0})}, {ModuleType({{1, 1}}, 1)}, 1, 2);
  std::vector<RingMatrix> adm = admissible_residues(inst);
  if (adm.size() != 9)
    return {false, "expected 9 rank-1 residue matrices, found " +
                       std::to_string(adm.size())};
  std::set<std::uint64_t> counts;
  for (const RingMatrix& xbar : adm) counts.insert(enumerate_lifts(xbar, inst));
  if (counts.size() != 1)
    return {false, std::to_string(counts.size()) + " distinct lift counts across the 9 residue matrices"};
  if (to_mpz(*counts.begin()) != lift_count_formula(inst))
    return {false, "common count " + std::to_string(*counts.begin()) +
                       " differs from the formula"};
  return {true, "all 9 rank-1 residue matrices give the single count " +
                    std::to_string(*counts.begin())};
}

// ---- criterion 5: probability factorization identity ----------------------

std::pair<bool, std::string> criterion_factorization() {
  struct Family {
    std::uint64_t p;
    std::vector<PolySpec> polys;
  };
  const PolySpec t2(2, {0}), tm1_2(2, {-1}), quad(2, {1, 1}), cubic(2, {1, 1, 0});
  const PolySpec t3(3, {0}), tm1_3(3, {-1});
  std::vector<Family> fams = {{2, {t2}},        {3, {t3}},        {2, {quad}},
                              {2, {t2, tm1_2}}, {3, {t3, tm1_3}}, {2, {cubic}},
                              {2, {t2, quad}}};
  unsigned verified = 0, skipped = 0;
  for (const Family& fam : fams) {
    for (unsigned n = 1; n <= 3; ++n) {
      for (unsigned N = 1; N <= 2; ++N) {
        if (pow_ld(fam.p, (N + 1) * n * n) > static_cast<long double>(kFullBudget)) {
          ++skipped;
          continue;
        }
        std::vector<std::vector<ModuleType>> lists;
        for (const PolySpec& P : fam.polys) {
          unsigned deg = P.degree();
          std::vector<ModuleType> list;
          for (const ModuleType& g : all_module_types(N * (n / deg), N, deg))
            if (g.residue_rank() * deg <= n) list.push_back(g);
          lists.push_back(std::move(list));
        }
        std::vector<std::size_t> idx(lists.size(), 0);
        for (;;) {
          std::vector<ModuleType> targets;
          for (std::size_t j = 0; j < lists.size(); ++j)
            targets.push_back(lists[j][idx[j]]);
          ProblemInstance inst = make_instance(fam.p, fam.polys, targets, N, n);
          FullEnumeration fe = enumerate_full(inst);
          mpq_class lhs = mpq_class(to_mpz(fe.matches)) / mpq_class(to_mpz(fe.total));
          mpq_class rhs = lift_match_fraction(inst) *
                          mpq_class(to_mpz(fe.residue_matches)) /
                          mpq_class(to_mpz(fe.residue_total));
          if (lhs != rhs)
            return {false, describe(inst) + ": " + std::to_string(fe.matches) + "/" +
                               std::to_string(fe.total) +
                               " != fraction * " + std::to_string(fe.residue_matches) +
                               "/" + std::to_string(fe.residue_total)};
          ++verified;
          std::size_t j = 0;
          for (; j < lists.size(); ++j) {
            if (++idx[j] < lists[j].size()) break;
            idx[j] = 0;
          }
          if (j == lists.size()) break;
        }
      }
    }
  }
  // Below the total-rank threshold both sides of the identity vanish.
  std::vector<ProblemInstance> degenerate;
  degenerate.push_back(make_instance(
      2, {t2, tm1_2}, {ModuleType({{1, 1}}, 1), ModuleType({{1, 1}}, 1)}, 1, 1));
  degenerate.push_back(make_instance(2, {quad}, {ModuleType({{1, 1}}, 2)}, 1, 1));
  for (const ProblemInstance& inst : degenerate) {
    FullEnumeration fe = enumerate_full(inst);
    if (fe.matches != 0 || fe.residue_matches != 0)
      return {false, describe(inst) + ": degenerate instance produced nonzero counts"};
    ++verified;
  }
  std::ostringstream d;
  d << verified << " instances verified as exact rationals (incl. 2 vanishing degenerate ones); "
    << skipped << " parameter sets over the full-enumeration budget";
  return {true, d.str()};
}

// ---- criterion 6: automorphism counts vs enumeration oracle ---------------

std::pair<bool, std::string> criterion_aut() {
  struct Field {
    std::uint64_t q;
    unsigned d;
    unsigned max_log;  // largest log_q |G| with |G| <= 2^12
  };
  std::vector<Field> fields = {{2, 1, 12}, {3, 1, 7}, {4, 2, 6}};
  unsigned verified = 0, skipped = 0;
  for (const Field& f : fields) {
    for (const ModuleType& g : all_module_types(f.max_log, f.max_log, f.d)) {
      unsigned long long oracle;
      try {
        oracle = brute_force_aut_count(g, f.q);
      } catch (const ScaleExceeded&) {
        ++skipped;
        continue;
      }
      mpz_class formula = aut_count_formula(g, f.q);
      if (formula != to_mpz(oracle))
        return {false, "type " + g.str() + ", q=" + std::to_string(f.q) +
                           ": formula " + formula.get_str() + ", oracle " +
                           std::to_string(oracle)};
      ++verified;
    }
  }
  std::ostringstream d;
  d << verified << " module types (|G| <= 4096, q in {2,3,4}) match the enumeration oracle; "
    << skipped << " beyond the oracle's work budget, skipped";
  return {true, d.str()};
}

// ---- criterion 7: rank census vs formula ----------------------------------

std::pair<bool, std::string> criterion_rank_census() {
  struct Setup {
    RingPtr ring;
    unsigned n;
    std::uint64_t q;
  };
  std::vector<Setup> setups;
  for (unsigned n = 1; n <= 3; ++n) {
    setups.push_back({make_ring(2, 1), n, 2});
    setups.push_back({make_ring(3, 1), n, 3});
  }
  setups.push_back({make_ring(2, 1, PolySpec(2, {1, 1})), 2, 4});
  unsigned censuses = 0;
  for (const Setup& s : setups) {
    std::vector<std::uint64_t> tally(s.n + 1, 0);
    RingMatrix m(s.ring, s.n, s.n);
    std::vector<std::uint64_t>& raw = m.raw();
    for (;;) {
      ++tally[residue_rank(m)];
      std::size_t c = 0;
      for (; c < raw.size(); ++c) {
        if (++raw[c] < s.ring->p) break;
        raw[c] = 0;
      }
      if (c == raw.size()) break;
    }
    mpz_class total = 0, qn2;
    for (unsigned r = 0; r <= s.n; ++r) {
      mpz_class expect = rank_count_formula(s.n, r, s.q);
      if (to_mpz(tally[r]) != expect) {
        std::ostringstream err;
        err << "n=" << s.n << " q=" << s.q << " rank " << r << ": census "
            << tally[r] << ", formula " << expect.get_str();
        return {false, err.str()};
      }
      total += to_mpz(tally[r]);
    }
    mpz_ui_pow_ui(qn2.get_mpz_t(), static_cast<unsigned long>(s.q), s.n * s.n);
    if (total != qn2)
      return {false, "row sums differ from q^(n^2) at n=" + std::to_string(s.n) +
                         ", q=" + std::to_string(s.q)};
    ++censuses;
  }
  return {true, std::to_string(censuses) +
                    " full censuses (n <= 3 with q in {2,3}; n=2 with q=4) match the "
                    "formula, row sums q^(n^2) confirmed"};
}

// ---- criterion 8: shift transport vs direct evaluation --------------------

PolySpec random_irreducible_cubic(std::uint64_t p, Rng& rng) {
  for (;;) {
    std::vector<long long> a = {static_cast<long long>(rng.below(p)),
                                static_cast<long long>(rng.below(p)),
                                static_cast<long long>(rng.below(p))};
    // A cubic with no root in F_p is irreducible over F_p.
    bool has_root = false;
    for (std::uint64_t x = 0; x < p; ++x) {
      std::uint64_t v =
          ((x + static_cast<std::uint64_t>(a[2])) % p * x +
           static_cast<std::uint64_t>(a[1])) % p * x + static_cast<std::uint64_t>(a[0]);
      if (v % p == 0) has_root = true;
    }
    if (!has_root) return PolySpec(p, a);
  }
}

std::pair<bool, std::string> criterion_shift_transport() {
  const PolySpec quad(2, {1, 1});
  auto agree = [](const RingMatrix& x, const PolySpec& P) {
    CokernelClass via = cokernel_via_shift(x, P);
    CokernelClass dir = cokernel_type(poly_eval(P, x));
    return via.saturated == dir.saturated && underlying_group(via.type) == dir.type;
  };
  std::uint64_t exhaustive = 0;
  for (unsigned m : {2u, 4u}) {
    RingPtr ring = make_ring(2, m);
    RingMatrix x(ring, 2, 2);
    std::vector<std::uint64_t>& raw = x.raw();
    for (;;) {
      if (!agree(x, quad))
        return {false, "mismatch at X=" + x.str() + " over Z/" +
                           std::to_string(ring->pk)};
      ++exhaustive;
      std::size_t c = 0;
      for (; c < raw.size(); ++c) {
        if (++raw[c] < ring->pk) break;
        raw[c] = 0;
      }
      if (c == raw.size()) break;
    }
  }
  Rng rng(0xC0FFEE5EEDULL);
  unsigned randomized = 0;
  for (unsigned iter = 0; iter < 1000; ++iter) {
    std::uint64_t p = (iter % 2) ? 3 : 2;
    PolySpec P = random_irreducible_cubic(p, rng);
    unsigned m = 1 + static_cast<unsigned>(rng.below(3));
    unsigned n = 1 + static_cast<unsigned>(rng.below(3));
    RingMatrix x = random_matrix(make_ring(p, m), n, n, rng);
    if (!agree(x, P))
      return {false, "mismatch at X=" + x.str() + " for P=" + P.str() +
                         " over Z/" + std::to_string(x.ring()->pk)};
    ++randomized;
  }
  return {true, std::to_string(exhaustive) +
                    " exhaustive 2x2 cases (over Z/4 and Z/16, quadratic modulus) and " +
                    std::to_string(randomized) + " randomized degree-3 cases agree"};
}

// ---- criterion 9: minor-gcd valuations and block invariance ---------------

std::pair<bool, std::string> criterion_minor_gcd() {
  std::vector<RingPtr> rings = {make_ring(2, 3), make_ring(2, 2, PolySpec(2, {1, 1}))};
  Rng rng(0xABCD1234FEDCULL);
  for (unsigned iter = 0; iter < 1000; ++iter) {
    const RingPtr& R = rings[iter % 2];
    unsigned n = 1 + static_cast<unsigned>(rng.below(4));
    RingMatrix x = random_matrix(R, n, n, rng);
    std::vector<unsigned> v = minor_gcd_valuations(x);
    std::vector<unsigned> d = smith_normal_form(x).exponents;
    unsigned prev = 0;
    for (unsigned i = 0; i < n; ++i) {
      if (v[i] < prev || d[i] != std::min(v[i] - prev, R->k))
        return {false, "minor-gcd valuations disagree with invariant factors at X=" +
                           x.str()};
      prev = v[i];
    }
  }
  for (unsigned iter = 0; iter < 1000; ++iter) {
    const RingPtr& R = rings[iter % 2];
    unsigned n = 2 + static_cast<unsigned>(rng.below(3));
    RingMatrix x = random_matrix(R, n, n, rng);
    std::vector<unsigned> base = smith_normal_form(x).exponents;
    BlockPartition part;
    for (unsigned left = n; left > 0;) {
      unsigned s = 1 + static_cast<unsigned>(rng.below(left));
      part.sizes.push_back(s);
      left -= s;
    }
    unsigned blocks = static_cast<unsigned>(part.sizes.size());
    RingMatrix y = x;
    if (blocks == 1) {
      y = block_row_op(x, part, BlockOp::scale_block(0, random_invertible(R, n, rng)));
    } else {
      unsigned i = static_cast<unsigned>(rng.below(blocks));
      unsigned j = (i + 1 + static_cast<unsigned>(rng.below(blocks - 1))) % blocks;
      bool row = rng.below(2) != 0;
      switch (rng.below(3)) {
        case 0: {
          BlockOp op = BlockOp::swap_blocks(i, j);
          y = row ? block_row_op(x, part, op) : block_col_op(x, part, op);
          break;
        }
        case 1: {
          BlockOp op =
              BlockOp::scale_block(i, random_invertible(R, part.sizes[i], rng));
          y = row ? block_row_op(x, part, op) : block_col_op(x, part, op);
          break;
        }
        default: {
          if (row) {
            y = block_row_op(x, part,
                             BlockOp::add_multiple(
                                 i, j, random_matrix(R, part.sizes[i], part.sizes[j], rng)));
          } else {
            y = block_col_op(x, part,
                             BlockOp::add_multiple(
                                 i, j, random_matrix(R, part.sizes[j], part.sizes[i], rng)));
          }
          break;
        }
      }
    }
    if (smith_normal_form(y).exponents != base)
      return {false, "a block operation changed the invariant factors at X=" + x.str()};
  }
  return {true, "1000 random matrices (n <= 4, over Z/8 and the quadratic extension of "
                "Z/4) match minor-gcd valuations; 1000 random block operations preserve "
                "the invariant factors"};
}

// ---- criterion 10: statistical limit check --------------------------------

std::pair<bool, std::string> criterion_statistics(std::vector<ExperimentReport>* archive) {
  // At n=8 the finite-size deviation from the limit is of order 2^-n ~ 0.004,
  // larger than 3 sigma at 10^6 samples, so the band is widened to 0.005.
  const double kBias = 0.005;
  const double kLimitSingle = 0.288788;  // prod_{i>=1} (1 - 2^-i)
  const double kLimitJoint = 0.083400;   // square of the above
  SamplerConfig cfg;
  cfg.seed = 20260823;
  cfg.samples = 1000000;
  cfg.workers = 0;

  FrequencyTable single = sample_joint_distribution(2, 8, 2, {PolySpec(2, {0})}, cfg);
  ExperimentReport trivial_rep = make_sampled_report(
      "p=2 n=8 N=2, P=t: empirical P(trivial cokernel) vs limit value",
      single.frequency(OutcomeKey::of_targets({ModuleType(1)})), kLimitSingle,
      cfg.samples, cfg.seed, kBias);
  ExperimentReport z2_rep = make_sampled_report(
      "p=2 n=8 N=2, P=t: empirical P(cokernel = Z/2) vs limit value",
      single.frequency(OutcomeKey::of_targets({ModuleType({{1, 1}}, 1)})), kLimitSingle,
      cfg.samples, cfg.seed, kBias);

  FrequencyTable joint =
      sample_joint_distribution(2, 8, 2, {PolySpec(2, {0}), PolySpec(2, {-1})}, cfg);
  ExperimentReport joint_rep = make_sampled_report(
      "p=2 n=8 N=2, P1=t, P2=t-1: empirical P(both cokernels trivial) vs product of limits",
      joint.frequency(OutcomeKey::of_targets({ModuleType(1), ModuleType(1)})),
      kLimitJoint, cfg.samples, cfg.seed, kBias);

  std::ostringstream d;
  d << "10^6 samples, seed " << cfg.seed << ":";
  for (const ExperimentReport* r : {&trivial_rep, &z2_rep, &joint_rep}) {
    archive->push_back(*r);
    if (r->verdict == "MISMATCH")
      return {false, r->description + ": observed " + r->observed + " vs " +
                         r->predicted + ", band " + std::to_string(r->band)};
    d << " " << r->observed.substr(0, 8) << " vs " << r->predicted.substr(0, 8) << ";";
  }
  d << " all within band max(3 sigma, 0.005)";
  return {true, d.str()};
}

// ---- criterion 11: degree-3 conjecture probe (non-blocking) ---------------

std::pair<bool, std::string> criterion_probe(std::vector<ExperimentReport>* archive) {
  const PolySpec cubic(2, {1, 1, 0});
  ProblemInstance inst = make_instance(2, {cubic}, {ModuleType({{1, 1}}, 3)}, 1, 3);
  ExperimentReport per =
      probe_conjecture(inst, RingMatrix::companion(make_ring(2, 1), cubic));
  ExperimentReport full = probe_conjecture(inst, std::nullopt);
  archive->push_back(per);
  archive->push_back(full);
  bool ok = per.verdict == "exact-match" && full.verdict == "exact-match";
  std::ostringstream d;
  d << "companion residue matrix: " << per.observed << " vs predicted " << per.predicted
    << " (" << per.verdict << "); full space: " << full.observed << " vs predicted "
    << full.predicted << " (" << full.verdict << ")";
  return {ok, d.str()};
}

// ---- runner ---------------------------------------------------------------

class Runner {
 public:
  Runner(std::ostream& out, AcceptanceSummary& summary) : out_(out), summary_(summary) {}

  void run(unsigned id, const std::string& name, bool blocking,
           const std::function<std::pair<bool, std::string>()>& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.blocking = blocking;
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = body();
      r.passed = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("unexpected exception: ") + e.what();
    }
    r.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char line[32];
    std::snprintf(line, sizeof line, "(%.1f s)", r.runtime_seconds);
    const char* status = r.passed ? "PASS" : (r.blocking ? "FAIL" : "MISMATCH");
    out_ << "[" << (r.id < 10 ? " " : "") << r.id << "] " << status << "  " << r.name
         << " -- " << r.detail << " " << line << std::endl;
    if (!r.passed && !r.blocking)
      out_ << "     *** non-blocking criterion did not match: recorded as evidence, "
              "build not failed ***"
           << std::endl;
    summary_.criteria.push_back(std::move(r));
  }

 private:
  std::ostream& out_;
  AcceptanceSummary& summary_;
};

}  // namespace

bool AcceptanceSummary::all_passed() const {
  for (const CriterionResult& r : criteria)
    if (r.blocking && !r.passed) return false;
  return true;
}

AcceptanceSummary run_acceptance(std::ostream& out) {
  AcceptanceSummary summary;
  Runner runner(out, summary);
  runner.run(1, "degree-1 lift counts, exhaustive", true, criterion_degree1);
  runner.run(2, "degree-2 lift counts", true, criterion_degree2);
  runner.run(3, "joint lift counts", true, criterion_joint);
  runner.run(4, "residue-matrix independence", true, criterion_independence);
  runner.run(5, "probability factorization identity", true, criterion_factorization);
  runner.run(6, "automorphism counts vs enumeration oracle", true, criterion_aut);
  runner.run(7, "rank census vs formula", true, criterion_rank_census);
  runner.run(8, "shift transport vs direct evaluation", true, criterion_shift_transport);
  runner.run(9, "minor-gcd valuations and block invariance", true, criterion_minor_gcd);
  runner.run(10, "statistical limit check", true,
             [&summary] { return criterion_statistics(&summary.probe_reports); });
  runner.run(11, "degree-3 conjecture probe", false,
             [&summary] { return criterion_probe(&summary.probe_reports); });
  unsigned blocking_pass = 0, blocking_total = 0;
  for (const CriterionResult& r : summary.criteria) {
    if (!r.blocking) continue;
    ++blocking_total;
    if (r.passed) ++blocking_pass;
  }
  out << "acceptance: " << blocking_pass << "/" << blocking_total
      << " blocking criteria passed" << (summary.all_passed() ? "" : " -- FAILURE")
      << std::endl;
  return summary;
}

}  // namespace cokmat
