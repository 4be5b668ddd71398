#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cokmat/formulas.hpp"
#include "cokmat/matrix.hpp"
#include "cokmat/normal_form.hpp"

// Ground-truth engines: exhaustive enumeration over lifts or over whole
// matrix spaces, and Monte Carlo sampling with counter-based per-sample
// streams.  Everything here measures; the closed forms it gets compared
// against live in formulas.hpp.

namespace cokmat {

// Thrown before any work starts when an enumeration would exceed its cap.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Default work caps, in matrices examined.  Callers (and the CLI) may raise
// them explicitly; the defaults keep any single call interactive.
inline constexpr std::uint64_t kLiftBudget = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kFullBudget = std::uint64_t{1} << 26;
inline constexpr std::uint64_t kCensusBudget = std::uint64_t{1} << 26;

// Joint outcome of one matrix: for each polynomial, the cokernel type of the
// shifted matrix over that polynomial's extension ring, or nullopt when the
// exponents saturated the working precision (the module is not annihilated
// by p^N, so it matches no admissible target).
struct OutcomeKey {
  std::vector<std::optional<ModuleType>> parts;

  bool operator==(const OutcomeKey&) const = default;
  bool operator<(const OutcomeKey& o) const;

  // Components joined with ';', saturation rendered as "overflow",
  // e.g. "1^1;overflow".
  std::string str() const;
  // Inverse of str; `degrees` supplies the residue degree per component.
  static OutcomeKey parse(const std::string& text, const std::vector<unsigned>& degrees);
  // The key a matrix hitting every target produces.
  static OutcomeKey of_targets(const std::vector<ModuleType>& targets);
};

// Number of matrices X over Z/p^{N+1} with X = xbar (mod p) and
// cok(P_j(X)) = G_j over the j-th extension ring for every j.  xbar must be
// n x n over the plain residue ring Z/p and satisfy the rank hypothesis
// dim cok(P_j(xbar)) = residue_rank(G_j) for every j (invalid_argument
// naming the offending polynomials otherwise).  Throws BudgetExceeded when
// p^{N n^2} > budget.
std::uint64_t enumerate_lifts(const RingMatrix& xbar, const ProblemInstance& inst,
                              std::uint64_t budget = kLiftBudget);

// Outcome histogram over all p^{N n^2} lifts of xbar; counts sum to the
// number of lifts.  inst.targets only contribute validation (ranks are not
// checked against xbar here -- every residue matrix has a distribution).
std::map<OutcomeKey, std::uint64_t> lift_distribution(const RingMatrix& xbar,
                                                      const ProblemInstance& inst,
                                                      std::uint64_t budget = kLiftBudget);

// Every residue matrix in M_n(F_p) satisfying the rank hypothesis of inst.
std::vector<RingMatrix> admissible_residues(const ProblemInstance& inst,
                                            std::uint64_t budget = kCensusBudget);

struct FullEnumeration {
  std::uint64_t matches = 0;         // X over Z/p^{N+1} hitting every target
  std::uint64_t total = 0;           // p^{(N+1) n^2}
  std::uint64_t residue_matches = 0; // xbar with cok(P_j(xbar)) = G_j/pG_j for all j
  std::uint64_t residue_total = 0;   // p^{n^2}
};

// Joint-match count over the whole matrix space mod p^{N+1}, plus the
// residue-level admissibility count the probability identity needs.  Throws
// BudgetExceeded when p^{(N+1) n^2} > budget.
FullEnumeration enumerate_full(const ProblemInstance& inst,
                               std::uint64_t budget = kFullBudget);

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  unsigned workers = 1;  // 0 = available hardware parallelism
};

struct FrequencyTable {
  std::map<OutcomeKey, std::uint64_t> counts;
  std::uint64_t samples = 0;

  double frequency(const OutcomeKey& key) const;
  bool operator==(const FrequencyTable&) const = default;
};

// Outcome frequencies over `cfg.samples` uniform matrices in M_n(Z/p^{N+1}).
// Each sample draws from its own stream keyed by (seed, sample index), so
// the table is a pure function of (inputs, seed) -- worker count and
// scheduling cannot change it.
FrequencyTable sample_joint_distribution(std::uint64_t p, unsigned n, unsigned N,
                                         const std::vector<PolySpec>& polys,
                                         const SamplerConfig& cfg);

// Exact joint distribution of the residue coranks (dim cok(P_j(xbar)) over
// F_{q_j}) across all xbar in M_n(F_p).  Throws BudgetExceeded when
// p^{n^2} > budget.
std::map<std::vector<unsigned>, std::uint64_t> residue_rank_census(
    std::uint64_t p, unsigned n, const std::vector<PolySpec>& polys,
    std::uint64_t budget = kCensusBudget);

// One measurement compared against its closed-form prediction.  For
// enumerated comparisons observed/predicted are exact decimal strings and
// the verdict is equality; for sampled comparisons observed is an empirical
// frequency, predicted a limit value, and the verdict a 3-sigma band (the
// band may be widened by `band` to absorb finite-n bias).  The verdict is
// always recomputable from the payload fields alone: see recompute_verdict.
struct ExperimentReport {
  std::string description;
  std::string observed;
  std::string predicted;
  std::string verdict;  // "exact-match" | "within-3sigma" | "MISMATCH"
  std::uint64_t sample_size = 0;  // 0 for exact enumeration
  double band = 0.0;              // acceptance half-width for sampled runs
  double runtime_seconds = 0.0;
  std::optional<std::uint64_t> seed;
};

std::string recompute_verdict(const ExperimentReport& r);

// Builds a sampled-comparison report with the 3-sigma verdict, widening the
// band to min_band when the binomial sigma is smaller.
ExperimentReport make_sampled_report(std::string description, double observed_freq,
                                     double predicted, std::uint64_t samples,
                                     std::uint64_t seed, double min_band = 0.0);

// Compares enumeration against the counting formula on an instance the
// theorems do not necessarily cover (any polynomial degrees).  With xbar:
// counts lifts of that residue matrix; without: full-space enumeration, with
// the prediction scaled by the measured number of admissible residue
// matrices.  The report is evidence either way -- exact-match supports the
// formula in the unproven regime, MISMATCH is a falsification datum; nothing
// is asserted.
ExperimentReport probe_conjecture(const ProblemInstance& inst,
                                  const std::optional<RingMatrix>& xbar,
                                  std::uint64_t budget = kFullBudget);

}  // namespace cokmat
