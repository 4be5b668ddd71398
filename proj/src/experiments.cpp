#include "cokmat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace cokmat {

// ---------- OutcomeKey ------------------------------------------------------

bool OutcomeKey::operator<(const OutcomeKey& o) const {
  if (parts.size() != o.parts.size()) return parts.size() < o.parts.size();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& a = parts[i];
    const auto& b = o.parts[i];
    if (a.has_value() != b.has_value()) return !a.has_value();  // overflow first
    if (a && !(*a == *b)) return *a < *b;
  }
  return false;
}

std::string OutcomeKey::str() const {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ';';
    s += parts[i] ? parts[i]->str() : "overflow";
  }
  return s;
}

OutcomeKey OutcomeKey::parse(const std::string& text, const std::vector<unsigned>& degrees) {
  OutcomeKey key;
  std::size_t pos = 0, comp = 0;
  for (;;) {
    std::size_t next = text.find(';', pos);
    std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
    if (comp >= degrees.size())
      throw std::invalid_argument("outcome '" + text + "' has more components than polynomials");
    if (tok == "overflow")
      key.parts.push_back(std::nullopt);
    else
      key.parts.push_back(ModuleType::parse(tok, degrees[comp]));
    ++comp;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (comp != degrees.size())
    throw std::invalid_argument("outcome '" + text + "' has fewer components than polynomials");
  return key;
}

OutcomeKey OutcomeKey::of_targets(const std::vector<ModuleType>& targets) {
  OutcomeKey key;
  for (const ModuleType& g : targets) key.parts.emplace_back(g);
  return key;
}

// ---------- shared evaluation engine ----------------------------------------

namespace {

// p^e with the budget enforced before any multiplication can overflow.
std::uint64_t checked_pow(std::uint64_t base, unsigned long long e, std::uint64_t budget,
                          const char* what) {
  std::uint64_t total = 1;
  while (e--) {
    if (total > budget / base)
      throw BudgetExceeded(std::string(what) + " exceeds the work budget " +
                           std::to_string(budget));
    total *= base;
  }
  return total;
}

// Per-polynomial state for evaluating shifted cokernels of scalar matrices.
// The shift matrix over (Z/p^k)[t]/(P_j) differs from candidate to candidate
// only in the constant digits, so those are the only words rewritten in the
// hot loop; the -t diagonal contribution is set up once.
struct Lane {
  RingPtr ring;
  unsigned deg = 1;
  std::uint64_t tbar = 0;  // deg == 1 only: subtracted from the diagonal
  std::vector<std::uint64_t> shift, work;
  std::vector<unsigned> exps;
  std::vector<unsigned> expected;  // target exponents, nondecreasing
  bool impossible = false;         // target rank exceeds n: nothing matches
};

class JointEvaluator {
 public:
  JointEvaluator(std::uint64_t p, unsigned k, unsigned n, const std::vector<PolySpec>& polys,
                 const std::vector<ModuleType>* targets)
      : n_(n) {
    for (std::size_t j = 0; j < polys.size(); ++j) {
      Lane lane;
      lane.ring = make_ring(p, k, polys[j]);
      lane.deg = lane.ring->deg;
      lane.shift.assign(static_cast<std::size_t>(n) * n * lane.deg, 0);
      lane.work.resize(lane.shift.size());
      lane.exps.resize(n);
      if (lane.deg == 1) {
        lane.tbar = lane.ring->tbar();
      } else {
        for (unsigned i = 0; i < n; ++i)
          lane.shift[(static_cast<std::size_t>(i) * n + i) * lane.deg + 1] =
              lane.ring->pk - 1;  // minus t
      }
      if (targets) {
        const ModuleType& g = (*targets)[j];
        if (g.residue_rank() > n) {
          lane.impossible = true;
        } else {
          lane.expected.assign(n, 0);
          unsigned pos = n - g.residue_rank();
          for (auto it = g.parts.rbegin(); it != g.parts.rend(); ++it)
            for (unsigned c = 0; c < it->second; ++c) lane.expected[pos++] = it->first;
        }
      }
      lanes_.push_back(std::move(lane));
    }
  }

  std::size_t lane_count() const { return lanes_.size(); }

  // True iff every lane's invariant-factor exponents equal its target's.
  // Saturated runs can never match: targets are annihilated by p^{k-1}, so
  // their exponents stay below k.
  bool match_all(const std::uint64_t* x) {
    for (Lane& lane : lanes_) {
      if (lane.impossible) return false;
      run(lane, x);
      if (!std::equal(lane.exps.begin(), lane.exps.end(), lane.expected.begin()))
        return false;
    }
    return true;
  }

  OutcomeKey outcome(const std::uint64_t* x) {
    OutcomeKey key;
    for (Lane& lane : lanes_) {
      run(lane, x);
      CokernelClass c = classify_exponents(*lane.ring, lane.exps.data(), n_);
      if (c.saturated)
        key.parts.push_back(std::nullopt);
      else
        key.parts.push_back(std::move(c.type));
    }
    return key;
  }

  // Number of nonzero invariant factors of lane j at x.
  unsigned corank(std::size_t j, const std::uint64_t* x) {
    Lane& lane = lanes_[j];
    run(lane, x);
    unsigned c = 0;
    for (unsigned e : lane.exps)
      if (e > 0) ++c;
    return c;
  }

 private:
  void run(Lane& lane, const std::uint64_t* x) {
    const unsigned n = n_;
    if (lane.deg == 1) {
      const ChainRing& ring = *lane.ring;
      for (unsigned i = 0, c = 0; i < n; ++i)
        for (unsigned l = 0; l < n; ++l, ++c)
          lane.shift[c] = i == l ? ring.submod(x[c], lane.tbar) : x[c];
    } else {
      for (unsigned c = 0; c < n * n; ++c) lane.shift[c * lane.deg] = x[c];
    }
    snf_exponents(*lane.ring, lane.shift.data(), n, lane.work.data(), lane.exps.data());
  }

  unsigned n_;
  std::vector<Lane> lanes_;
};

// Base-`radix` odometer over `cells` slots; returns false when it wraps.
bool step_odometer(std::vector<std::uint64_t>& digits, std::uint64_t radix) {
  for (std::size_t c = 0; c < digits.size(); ++c) {
    if (++digits[c] < radix) return true;
    digits[c] = 0;
  }
  return false;
}

void check_residue_matrix(const RingMatrix& xbar, const ProblemInstance& inst) {
  const ChainRing& ring = *xbar.ring();
  if (ring.p != inst.p || ring.k != 1 || ring.deg != 1)
    throw std::invalid_argument("residue matrix must live over Z/" + std::to_string(inst.p));
  if (xbar.rows() != inst.n || xbar.cols() != inst.n)
    throw std::invalid_argument("residue matrix shape does not match the instance dimension");
}

}  // namespace

// ---------- enumeration -----------------------------------------------------

std::uint64_t enumerate_lifts(const RingMatrix& xbar, const ProblemInstance& inst,
                              std::uint64_t budget) {
  inst.validate();
  check_residue_matrix(xbar, inst);
  const unsigned n = inst.n;

  // Rank hypothesis: the residue cokernel of every P_j(xbar) must already
  // have the target's minimal generator count.  Violations are collected so
  // the error names every offending polynomial at once.
  JointEvaluator residue(inst.p, 1, n, inst.polys, nullptr);
  std::string bad;
  for (std::size_t j = 0; j < inst.polys.size(); ++j) {
    unsigned have = residue.corank(j, xbar.raw().data());
    unsigned want = inst.targets[j].residue_rank();
    if (have != want) {
      if (!bad.empty()) bad += "; ";
      bad += "polynomial " + std::to_string(j) + " (" + inst.polys[j].str() +
             "): residue cokernel rank " + std::to_string(have) + ", target needs " +
             std::to_string(want);
    }
  }
  if (!bad.empty()) throw std::invalid_argument("rank hypothesis violated: " + bad);

  checked_pow(inst.p, static_cast<unsigned long long>(inst.N) * n * n, budget,
              "lift enumeration p^(N n^2)");
  std::uint64_t radix = 1;
  for (unsigned i = 0; i < inst.N; ++i) radix *= inst.p;

  JointEvaluator eval(inst.p, inst.N + 1, n, inst.polys, &inst.targets);
  const unsigned cells = n * n;
  std::vector<std::uint64_t> x(xbar.raw());
  std::vector<std::uint64_t> a(cells, 0);
  std::uint64_t matches = 0;
  for (;;) {
    if (eval.match_all(x.data())) ++matches;
    // Bump one lift digit: X_c = xbar_c + p * a_c.
    std::size_t c = 0;
    for (; c < cells; ++c) {
      if (++a[c] < radix) {
        x[c] += inst.p;
        break;
      }
      a[c] = 0;
      x[c] = xbar.raw()[c];
    }
    if (c == cells) break;
  }
  return matches;
}

std::map<OutcomeKey, std::uint64_t> lift_distribution(const RingMatrix& xbar,
                                                      const ProblemInstance& inst,
                                                      std::uint64_t budget) {
  inst.validate();
  check_residue_matrix(xbar, inst);
  const unsigned n = inst.n;
  checked_pow(inst.p, static_cast<unsigned long long>(inst.N) * n * n, budget,
              "lift enumeration p^(N n^2)");
  std::uint64_t radix = 1;
  for (unsigned i = 0; i < inst.N; ++i) radix *= inst.p;

  JointEvaluator eval(inst.p, inst.N + 1, n, inst.polys, nullptr);
  const unsigned cells = n * n;
  std::vector<std::uint64_t> x(xbar.raw());
  std::vector<std::uint64_t> a(cells, 0);
  std::map<OutcomeKey, std::uint64_t> dist;
  for (;;) {
    ++dist[eval.outcome(x.data())];
    std::size_t c = 0;
    for (; c < cells; ++c) {
      if (++a[c] < radix) {
        x[c] += inst.p;
        break;
      }
      a[c] = 0;
      x[c] = xbar.raw()[c];
    }
    if (c == cells) break;
  }
  return dist;
}

std::vector<RingMatrix> admissible_residues(const ProblemInstance& inst,
                                            std::uint64_t budget) {
  inst.validate();
  const unsigned n = inst.n;
  checked_pow(inst.p, static_cast<unsigned long long>(n) * n, budget,
              "residue scan p^(n^2)");
  JointEvaluator residue(inst.p, 1, n, inst.polys, nullptr);
  const std::vector<unsigned> want = inst.target_ranks();
  RingMatrix m(make_ring(inst.p, 1), n, n);
  std::vector<RingMatrix> out;
  for (;;) {
    bool ok = true;
    for (std::size_t j = 0; j < want.size() && ok; ++j)
      ok = residue.corank(j, m.raw().data()) == want[j];
    if (ok) out.push_back(m);
    if (!step_odometer(m.raw(), inst.p)) break;
  }
  return out;
}

FullEnumeration enumerate_full(const ProblemInstance& inst, std::uint64_t budget) {
  inst.validate();
  const unsigned n = inst.n;
  const unsigned cells = n * n;
  FullEnumeration fe;
  fe.total = checked_pow(inst.p, static_cast<unsigned long long>(inst.N + 1) * cells,
                         budget, "full enumeration p^((N+1) n^2)");
  fe.residue_total = 1;
  for (unsigned c = 0; c < cells; ++c) fe.residue_total *= inst.p;

  // Residue pass: admissibility means cok(P_j(xbar)) = G_j/pG_j for all j.
  std::vector<ModuleType> residue_targets;
  for (const ModuleType& g : inst.targets) residue_targets.push_back(g.quotient_mod_p());
  JointEvaluator residue(inst.p, 1, n, inst.polys, &residue_targets);
  std::vector<std::uint64_t> xb(cells, 0);
  do {
    if (residue.match_all(xb.data())) ++fe.residue_matches;
  } while (step_odometer(xb, inst.p));

  // Full pass over Z/p^{N+1}.
  std::uint64_t pk = 1;
  for (unsigned i = 0; i <= inst.N; ++i) pk *= inst.p;
  JointEvaluator eval(inst.p, inst.N + 1, n, inst.polys, &inst.targets);
  std::vector<std::uint64_t> x(cells, 0);
  do {
    if (eval.match_all(x.data())) ++fe.matches;
  } while (step_odometer(x, pk));
  return fe;
}

// ---------- sampling --------------------------------------------------------

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the state is a pure function of (seed, index), so a
// sample's draws do not depend on which worker runs it or what ran before.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1))) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix64(z);
  }

  std::uint64_t below(std::uint64_t m) {
    const std::uint64_t lim = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= lim);
    return v % m;
  }

 private:
  std::uint64_t state_;
};

}  // namespace

double FrequencyTable::frequency(const OutcomeKey& key) const {
  auto it = counts.find(key);
  if (it == counts.end() || samples == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(samples);
}

FrequencyTable sample_joint_distribution(std::uint64_t p, unsigned n, unsigned N,
                                         const std::vector<PolySpec>& polys,
                                         const SamplerConfig& cfg) {
  // Reuse the instance validation with placeholder trivial targets (always
  // annihilated; ranks are irrelevant to sampling).
  ProblemInstance inst;
  inst.p = p;
  inst.n = n;
  inst.N = N;
  inst.polys = polys;
  for (const PolySpec& P : polys) inst.targets.push_back(ModuleType(P.degree()));
  inst.validate();

  std::uint64_t pk = 1;
  for (unsigned i = 0; i <= N; ++i) {
    if (pk >= (std::uint64_t{1} << 62) / p)
      throw std::invalid_argument("p^(N+1) exceeds the representable modulus range");
    pk *= p;
  }

  unsigned workers = cfg.workers ? cfg.workers
                                 : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::map<OutcomeKey, std::uint64_t>> partial(workers);

  auto run = [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
    JointEvaluator eval(p, N + 1, n, polys, nullptr);
    std::vector<std::uint64_t> x(static_cast<std::size_t>(n) * n);
    for (std::uint64_t s = lo; s < hi; ++s) {
      SampleStream rng(cfg.seed, s);
      for (std::uint64_t& c : x) c = rng.below(pk);
      ++partial[w][eval.outcome(x.data())];
    }
  };

  const std::uint64_t base = cfg.samples / workers;
  const std::uint64_t rem = cfg.samples % workers;
  std::vector<std::thread> threads;
  std::uint64_t lo = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t hi = lo + base + (w < rem ? 1 : 0);
    if (workers == 1)
      run(w, lo, hi);
    else
      threads.emplace_back(run, w, lo, hi);
    lo = hi;
  }
  for (std::thread& t : threads) t.join();

  FrequencyTable table;
  table.samples = cfg.samples;
  for (const auto& m : partial)
    for (const auto& [key, count] : m) table.counts[key] += count;
  return table;
}

std::map<std::vector<unsigned>, std::uint64_t> residue_rank_census(
    std::uint64_t p, unsigned n, const std::vector<PolySpec>& polys,
    std::uint64_t budget) {
  ProblemInstance inst;
  inst.p = p;
  inst.n = n;
  inst.N = 0;
  inst.polys = polys;
  for (const PolySpec& P : polys) inst.targets.push_back(ModuleType(P.degree()));
  inst.validate();
  checked_pow(p, static_cast<unsigned long long>(n) * n, budget, "residue scan p^(n^2)");

  JointEvaluator eval(p, 1, n, polys, nullptr);
  std::vector<std::uint64_t> xb(static_cast<std::size_t>(n) * n, 0);
  std::map<std::vector<unsigned>, std::uint64_t> census;
  std::vector<unsigned> key(polys.size());
  do {
    for (std::size_t j = 0; j < polys.size(); ++j)
      key[j] = eval.corank(j, xb.data());
    ++census[key];
  } while (step_odometer(xb, p));
  return census;
}

// ---------- reports ---------------------------------------------------------

std::string recompute_verdict(const ExperimentReport& r) {
  if (r.sample_size == 0) return r.observed == r.predicted ? "exact-match" : "MISMATCH";
  const double obs = std::stod(r.observed);
  const double pred = std::stod(r.predicted);
  return std::abs(obs - pred) <= r.band ? "within-3sigma" : "MISMATCH";
}

ExperimentReport make_sampled_report(std::string description, double observed_freq,
                                     double predicted, std::uint64_t samples,
                                     std::uint64_t seed, double min_band) {
  ExperimentReport r;
  r.description = std::move(description);
  std::ostringstream o;
  o << std::setprecision(17) << observed_freq;
  r.observed = o.str();
  std::ostringstream q;
  q << std::setprecision(17) << predicted;
  r.predicted = q.str();
  r.sample_size = samples ? samples : 1;
  const double sigma =
      std::sqrt(std::max(predicted * (1.0 - predicted), 0.0) /
                static_cast<double>(r.sample_size));
  r.band = std::max(3.0 * sigma, min_band);
  r.seed = seed;
  r.verdict = recompute_verdict(r);
  return r;
}

ExperimentReport probe_conjecture(const ProblemInstance& inst,
                                  const std::optional<RingMatrix>& xbar,
                                  std::uint64_t budget) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream d;
  d << "p=" << inst.p << " N=" << inst.N << " n=" << inst.n;
  for (std::size_t j = 0; j < inst.polys.size(); ++j)
    d << "; P" << j + 1 << "=" << inst.polys[j].str() << " -> " << inst.targets[j].str()
      << " (q=" << inst.q(static_cast<unsigned>(j)) << ")";

  mpz_class observed, predicted;
  if (xbar) {
    d << "; lift enumeration over one admissible residue matrix";
    observed = static_cast<unsigned long>(enumerate_lifts(*xbar, inst, budget));
    predicted = lift_count_formula(inst);
  } else {
    d << "; full enumeration over all matrices mod p^" << inst.N + 1;
    FullEnumeration fe = enumerate_full(inst, budget);
    observed = static_cast<unsigned long>(fe.matches);
    predicted = lift_count_formula(inst) *
                mpz_class(static_cast<unsigned long>(fe.residue_matches));
  }

  ExperimentReport r;
  r.description = d.str();
  r.observed = observed.get_str();
  r.predicted = predicted.get_str();
  r.verdict = recompute_verdict(r);
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace cokmat
