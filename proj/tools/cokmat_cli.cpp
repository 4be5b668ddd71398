// Command-line surface for the chain-ring cokernel toolkit.  Every library
// operation is reachable as a subcommand with machine-readable output.
//
// Exit codes: 0 success, 1 invalid input, 2 budget or oracle scale exceeded,
// 3 blocking failure from `verify`.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cokmat/formulas.hpp"
#include "cokmat/json_io.hpp"
#include "cokmat/matrix.hpp"
#include "cokmat/normal_form.hpp"
#include "cokmat/verify.hpp"

using nlohmann::json;

namespace {

// ---- output formatting ----------------------------------------------------

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  bool quote = s.find_first_of(",\"\n") != std::string::npos;
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void emit(const json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (format == "plain") {
    if (j.is_object()) {
      for (const auto& [key, value] : j.items())
        std::cout << key << ": "
                  << (value.is_string() ? value.get<std::string>() : value.dump())
                  << "\n";
    } else {
      std::cout << j.dump(2) << "\n";
    }
    return;
  }
  // csv: arrays of flat objects become header + rows; objects become
  // key,value lines; a nested array value under "counts"/"census"/"results"
  // is promoted to the tabular part.
  const json* table = nullptr;
  if (j.is_array()) {
    table = &j;
  } else if (j.is_object()) {
    for (const char* key : {"counts", "census", "distribution", "results"})
      if (j.contains(key) && j.at(key).is_array()) table = &j.at(key);
    for (const auto& [key, value] : j.items())
      if (!table || &value != table)
        std::cout << csv_cell(key) << "," << csv_cell(value) << "\n";
  }
  if (table && !table->empty() && table->front().is_object()) {
    std::vector<std::string> cols;
    for (const auto& [key, value] : table->front().items()) cols.push_back(key);
    for (std::size_t i = 0; i < cols.size(); ++i)
      std::cout << (i ? "," : "") << csv_cell(cols[i]);
    std::cout << "\n";
    for (const json& row : *table) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        std::cout << (i ? "," : "")
                  << (row.contains(cols[i]) ? csv_cell(row.at(cols[i])) : "");
      std::cout << "\n";
    }
  } else if (j.is_array()) {
    std::cout << j.dump() << "\n";
  }
}

// ---- shared argument bundles ----------------------------------------------

struct InstanceArgs {
  std::uint64_t p = 2;
  unsigned N = 1;
  unsigned n = 1;
  std::vector<std::string> polys;
  std::vector<std::string> targets;

  void attach(CLI::App* cmd, bool with_targets) {
    cmd->add_option("--p", p, "prime base of the modulus")->required();
    cmd->add_option("--N", N, "lift depth; matrices are taken mod p^(N+1)")->required();
    cmd->add_option("--n", n, "matrix size")->required();
    cmd->add_option("--poly", polys,
                    "monic polynomial, coefficients low to high including the "
                    "leading 1 (repeat for joint instances)")
        ->required();
    if (with_targets)
      cmd->add_option("--target", targets,
                      "target module type \"e1^r1,e2^r2\" or \"0\", one per --poly")
          ->required();
  }

  std::vector<cokmat::PolySpec> parse_polys() const {
    cokmat::PrimePowerModulus check(p, 1);  // reject composite p before parsing
    std::vector<cokmat::PolySpec> out;
    for (const std::string& s : polys) out.push_back(cokmat::PolySpec::parse(p, s));
    return out;
  }

  cokmat::ProblemInstance build() const {
    cokmat::ProblemInstance inst;
    inst.p = p;
    inst.N = N;
    inst.n = n;
    inst.polys = parse_polys();
    if (targets.size() != inst.polys.size())
      throw std::invalid_argument("need exactly one --target per --poly");
    for (std::size_t j = 0; j < targets.size(); ++j)
      inst.targets.push_back(
          cokmat::ModuleType::parse(targets[j], inst.polys[j].degree()));
    for (const std::string& w : inst.validate()) std::cerr << "warning: " << w << "\n";
    return inst;
  }
};

std::vector<unsigned> degrees_of(const std::vector<cokmat::PolySpec>& polys) {
  std::vector<unsigned> degs;
  for (const cokmat::PolySpec& P : polys) degs.push_back(P.degree());
  return degs;
}

// Residue matrix argument: either an explicit matrix literal over F_p, or
// the word "companion" for the companion matrix of the (single) polynomial.
cokmat::RingMatrix parse_residue_matrix(const std::string& text,
                                        const cokmat::ProblemInstance& inst) {
  cokmat::RingPtr fp = cokmat::make_ring(inst.p, 1);
  if (text == "companion") {
    if (inst.polys.size() != 1 || inst.polys[0].degree() != inst.n)
      throw std::invalid_argument(
          "--matrix companion needs a single polynomial with degree equal to n");
    return cokmat::RingMatrix::companion(fp, inst.polys[0]);
  }
  return cokmat::RingMatrix::parse(fp, text);
}

std::string rational_str(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

json frequency_table_json(const cokmat::FrequencyTable& table,
                          const std::vector<unsigned>& degrees, std::uint64_t seed,
                          unsigned workers) {
  json rows = json::array();
  for (const auto& [key, count] : table.counts)
    rows.push_back({{"outcome", key.str()},
                    {"count", count},
                    {"frequency", table.frequency(key)}});
  return json{{"samples", table.samples},
              {"seed", seed},
              {"workers", workers},
              {"degrees", degrees},
              {"counts", rows}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cokernels of random matrices over Z/p^k and its unramified extensions"};
  app.require_subcommand(1);

  std::string format = "plain";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv", "plain"}))
      ->capture_default_str();
  std::uint64_t budget_flag = 0;
  CLI::Option* budget_opt =
      app.add_option("--budget", budget_flag,
                     "work budget override for enumerations (default: per-operation "
                     "limits; also settable via COKMAT_BUDGET)");
  auto budget_or = [&budget_opt, &budget_flag](std::uint64_t fallback) -> std::uint64_t {
    if (budget_opt->count() > 0) return budget_flag;
    if (const char* env = std::getenv("COKMAT_BUDGET")) return std::stoull(env);
    return fallback;
  };

  json output;
  int exit_code = 0;
  bool emit_output = true;

  // ---- snf ----------------------------------------------------------------
  auto* snf_cmd = app.add_subcommand(
      "snf", "Smith normal form of a square matrix over Z/p^k (with --poly: over "
             "the unramified extension by that modulus)");
  snf_cmd->fallthrough();
  struct {
    std::uint64_t p = 2;
    unsigned k = 1;
    std::string poly, matrix;
    bool transforms = false;
  } snf_args;
  snf_cmd->add_option("--p", snf_args.p, "prime base")->required();
  snf_cmd->add_option("--mod-exp", snf_args.k, "precision exponent k")->required();
  snf_cmd->add_option("--poly", snf_args.poly,
                      "optional extension modulus, coefficients low to high "
                      "including the leading 1");
  snf_cmd->add_option("--matrix", snf_args.matrix,
                      "matrix literal \"a,b;c,d\" (entry grammar from the ring)")
      ->required();
  snf_cmd->add_flag("--transforms", snf_args.transforms,
                    "also return invertible left/right transforms");
  snf_cmd->callback([&] {
    cokmat::PrimePowerModulus check(snf_args.p, snf_args.k);
    cokmat::RingPtr ring =
        snf_args.poly.empty()
            ? cokmat::make_ring(snf_args.p, snf_args.k)
            : cokmat::make_ring(snf_args.p, snf_args.k,
                                cokmat::PolySpec::parse(snf_args.p, snf_args.poly));
    cokmat::RingMatrix x = cokmat::RingMatrix::parse(ring, snf_args.matrix);
    cokmat::SNFResult s = cokmat::smith_normal_form(x, snf_args.transforms);
    json diag = json::array();
    for (unsigned d : s.exponents) {
      if (d >= ring->k) {
        diag.push_back("0");
      } else {
        std::uint64_t v = 1;
        for (unsigned i = 0; i < d; ++i) v *= ring->p;
        diag.push_back(std::to_string(v));
      }
    }
    cokmat::CokernelClass c = cokmat::cokernel_type(x);
    output = {{"exponents", s.exponents},
              {"diagonal", diag},
              {"cokernel_type", c.type.str()},
              {"saturated", c.saturated}};
    if (s.left) output["left"] = s.left->str();
    if (s.right) output["right"] = s.right->str();
  });

  // ---- cok ----------------------------------------------------------------
  auto* cok_cmd = app.add_subcommand(
      "cok", "cokernel of P(X) as a module over the extension ring, for X over Z/p^k");
  cok_cmd->fallthrough();
  struct {
    std::uint64_t p = 2;
    unsigned k = 1;
    std::string poly, matrix;
  } cok_args;
  cok_cmd->add_option("--p", cok_args.p, "prime base")->required();
  cok_cmd->add_option("--mod-exp", cok_args.k, "precision exponent k")->required();
  cok_cmd->add_option("--poly", cok_args.poly,
                      "monic polynomial, coefficients low to high including the leading 1")
      ->required();
  cok_cmd->add_option("--matrix", cok_args.matrix, "matrix literal over Z/p^k")
      ->required();
  cok_cmd->callback([&] {
    cokmat::PrimePowerModulus check(cok_args.p, cok_args.k);
    cokmat::RingPtr ring = cokmat::make_ring(cok_args.p, cok_args.k);
    cokmat::RingMatrix x = cokmat::RingMatrix::parse(ring, cok_args.matrix);
    cokmat::PolySpec P = cokmat::PolySpec::parse(cok_args.p, cok_args.poly);
    cokmat::CokernelClass c = cokmat::cokernel_via_shift(x, P);
    output = {{"type", c.type.str()},
              {"residue_degree", P.degree()},
              {"saturated", c.saturated},
              {"underlying_group", cokmat::underlying_group(c.type).str()},
              {"order_log_q", c.type.order_log_q()}};
  });

  // ---- aut ----------------------------------------------------------------
  auto* aut_cmd =
      app.add_subcommand("aut", "automorphism count of a module type over residue field F_q");
  aut_cmd->fallthrough();
  struct {
    std::uint64_t q = 2;
    std::string type;
    bool oracle = false;
  } aut_args;
  aut_cmd->add_option("--q", aut_args.q, "residue field size (prime power)")->required();
  aut_cmd->add_option("--type", aut_args.type, "module type \"e1^r1,e2^r2\" or \"0\"")
      ->required();
  aut_cmd->add_flag("--oracle", aut_args.oracle,
                    "cross-check against the brute-force enumeration oracle");
  aut_cmd->callback([&] {
    std::uint64_t rest = aut_args.q, base = 0;
    for (std::uint64_t f = 2; f * f <= rest && base == 0; ++f)
      if (rest % f == 0) base = f;
    if (base == 0) base = rest;
    while (base > 1 && rest % base == 0) rest /= base;
    if (aut_args.q < 2 || rest != 1)
      throw std::invalid_argument("--q must be a prime power >= 2");
    cokmat::ModuleType g = cokmat::ModuleType::parse(aut_args.type, 1);
    mpz_class count = cokmat::aut_count_formula(g, aut_args.q);
    output = {{"q", aut_args.q}, {"type", g.str()}, {"count", count.get_str()}};
    if (aut_args.oracle) {
      unsigned long long oracle = cokmat::brute_force_aut_count(g, aut_args.q);
      output["oracle"] = oracle;
      output["match"] = (count == mpz_class(static_cast<unsigned long>(oracle)));
    }
  });

  // ---- rank-census --------------------------------------------------------
  auto* census_cmd = app.add_subcommand(
      "rank-census",
      "exhaustive census of residue cokernel ranks over all matrices in M_n(F_p)");
  census_cmd->fallthrough();
  struct {
    std::uint64_t p = 2;
    unsigned n = 1;
    std::vector<std::string> polys;
  } census_args;
  census_cmd->add_option("--p", census_args.p, "prime base")->required();
  census_cmd->add_option("--n", census_args.n, "matrix size")->required();
  census_cmd->add_option("--poly", census_args.polys,
                         "polynomial (repeat for joint censuses), coefficients low "
                         "to high including the leading 1")
      ->required();
  census_cmd->callback([&] {
    cokmat::PrimePowerModulus check(census_args.p, 1);
    std::vector<cokmat::PolySpec> polys;
    for (const std::string& s : census_args.polys)
      polys.push_back(cokmat::PolySpec::parse(census_args.p, s));
    auto census = cokmat::residue_rank_census(census_args.p, census_args.n, polys,
                                              budget_or(cokmat::kCensusBudget));
    json rows = json::array();
    for (const auto& [ranks, count] : census) {
      json row = {{"ranks", ranks}, {"count", count}};
      // A single degree-1 polynomial shifts by a scalar, so the corank census
      // is the invertible-rank census reversed; attach the formula value.
      if (polys.size() == 1 && polys[0].degree() == 1)
        row["formula"] =
            cokmat::rank_count_formula(census_args.n, census_args.n - ranks[0],
                                       census_args.p)
                .get_str();
      rows.push_back(row);
    }
    output = {{"p", census_args.p},
              {"n", census_args.n},
              {"census", rows}};
  });

  // ---- count --------------------------------------------------------------
  auto* count_cmd = app.add_subcommand(
      "count", "closed-form count of matching lifts (with --extension: count of "
               "matching matrices over the extension ring)");
  count_cmd->fallthrough();
  InstanceArgs count_inst;
  struct {
    bool extension = false;
    std::uint64_t q = 2;
    unsigned N = 1, n = 1;
    std::string target;
  } ext_args;
  count_cmd->add_option("--p", count_inst.p, "prime base (lift mode)");
  count_cmd->add_option("--N", count_inst.N, "lift depth");
  count_cmd->add_option("--n", count_inst.n, "matrix size");
  count_cmd->add_option("--poly", count_inst.polys, "polynomial, repeatable (lift mode)");
  count_cmd->add_option("--target", count_inst.targets, "target type per polynomial");
  count_cmd->add_flag("--extension", ext_args.extension,
                      "count n x n matrices over the extension ring with the given "
                      "cokernel (uses --q and a single --target)");
  count_cmd->add_option("--q", ext_args.q, "residue field size (extension mode)");
  count_cmd->callback([&] {
    if (ext_args.extension) {
      if (count_inst.targets.size() != 1)
        throw std::invalid_argument("--extension needs exactly one --target");
      cokmat::ModuleType g = cokmat::ModuleType::parse(count_inst.targets[0], 1);
      mpz_class count =
          cokmat::extension_lift_count(g, ext_args.q, count_inst.N, count_inst.n);
      output = {{"q", ext_args.q},
                {"N", count_inst.N},
                {"n", count_inst.n},
                {"target", g.str()},
                {"count", count.get_str()}};
      return;
    }
    cokmat::ProblemInstance inst = count_inst.build();
    mpq_class fraction = cokmat::lift_match_fraction(inst);
    output = {{"fraction", rational_str(fraction)},
              {"count", cokmat::lift_count_formula(inst).get_str()}};
  });

  // ---- limit --------------------------------------------------------------
  auto* limit_cmd = app.add_subcommand(
      "limit", "large-size limit of the joint cokernel probability (with --cl: "
               "limiting rank distribution value)");
  limit_cmd->fallthrough();
  struct {
    std::uint64_t p = 2;
    unsigned N = 0;  // 0 = derive from the targets
    unsigned n = 1;
    std::vector<std::string> polys, targets;
    std::vector<unsigned> ranks;
    double tol = 1e-9;
    bool cl = false;
  } limit_args;
  limit_cmd->add_option("--p", limit_args.p, "prime base")->required();
  limit_cmd->add_option("--poly", limit_args.polys, "polynomial, repeatable")->required();
  limit_cmd->add_option("--target", limit_args.targets, "target type per polynomial");
  limit_cmd->add_option("--rank", limit_args.ranks,
                        "residue rank per polynomial (--cl mode)");
  limit_cmd->add_option("--tol", limit_args.tol, "truncation tolerance")
      ->capture_default_str();
  limit_cmd->add_option("--N", limit_args.N,
                        "lift depth used for validation (default: largest target exponent)");
  limit_cmd->add_option("--n", limit_args.n, "matrix size used for validation")
      ->capture_default_str();
  limit_cmd->add_flag("--cl", limit_args.cl, "limiting probability that the residue "
                                             "ranks equal the given --rank list");
  limit_cmd->callback([&] {
    cokmat::PrimePowerModulus check(limit_args.p, 1);
    std::vector<cokmat::PolySpec> polys;
    for (const std::string& s : limit_args.polys)
      polys.push_back(cokmat::PolySpec::parse(limit_args.p, s));
    if (limit_args.cl) {
      cokmat::LimitValue v = cokmat::rank_limit_distribution(
          limit_args.p, degrees_of(polys), limit_args.ranks, limit_args.tol);
      output = {{"value", v.value}, {"truncation_index", v.truncation_index}};
      return;
    }
    cokmat::ProblemInstance inst;
    inst.p = limit_args.p;
    inst.polys = polys;
    if (limit_args.targets.size() != polys.size())
      throw std::invalid_argument("need exactly one --target per --poly");
    for (std::size_t j = 0; j < polys.size(); ++j)
      inst.targets.push_back(
          cokmat::ModuleType::parse(limit_args.targets[j], polys[j].degree()));
    unsigned max_exp = 1;
    for (const cokmat::ModuleType& g : inst.targets)
      max_exp = std::max(max_exp, g.exponent());
    inst.N = limit_args.N ? limit_args.N : max_exp;
    // The limit is over n -> infinity; n only has to make the instance valid.
    unsigned min_n = 0;
    for (std::size_t j = 0; j < polys.size(); ++j)
      min_n += polys[j].degree() * inst.targets[j].residue_rank();
    inst.n = std::max(limit_args.n, std::max(min_n, 1u));
    cokmat::LimitValue v = cokmat::limit_probability(inst, limit_args.tol);
    output = {{"value", v.value}, {"truncation_index", v.truncation_index}};
  });

  // ---- enumerate ----------------------------------------------------------
  auto* enum_cmd = app.add_subcommand(
      "enumerate", "exact enumeration: lifts of one residue matrix (--matrix) or "
                   "the full matrix space (--full)");
  enum_cmd->fallthrough();
  InstanceArgs enum_inst;
  enum_inst.attach(enum_cmd, /*with_targets=*/true);
  struct {
    std::string matrix;
    bool full = false;
    bool distribution = false;
  } enum_args;
  enum_cmd->add_option("--matrix", enum_args.matrix,
                       "residue matrix over F_p (\"a,b;c,d\" or \"companion\")");
  enum_cmd->add_flag("--full", enum_args.full, "enumerate all matrices mod p^(N+1)");
  enum_cmd->add_flag("--distribution", enum_args.distribution,
                     "with --matrix: also return the full outcome distribution");
  enum_cmd->callback([&] {
    cokmat::ProblemInstance inst = enum_inst.build();
    if (enum_args.full == !enum_args.matrix.empty())
      throw std::invalid_argument("pass exactly one of --matrix or --full");
    if (enum_args.full) {
      cokmat::FullEnumeration fe =
          cokmat::enumerate_full(inst, budget_or(cokmat::kFullBudget));
      mpq_class lhs = mpq_class(static_cast<unsigned long>(fe.matches)) /
                      mpq_class(static_cast<unsigned long>(fe.total));
      mpq_class rhs = cokmat::lift_match_fraction(inst) *
                      mpq_class(static_cast<unsigned long>(fe.residue_matches)) /
                      mpq_class(static_cast<unsigned long>(fe.residue_total));
      output = {{"matches", fe.matches},
                {"total", fe.total},
                {"residue_matches", fe.residue_matches},
                {"residue_total", fe.residue_total},
                {"probability", rational_str(lhs)},
                {"predicted_probability", rational_str(rhs)},
                {"identity_holds", lhs == rhs}};
      return;
    }
    cokmat::RingMatrix xbar = parse_residue_matrix(enum_args.matrix, inst);
    std::uint64_t count =
        cokmat::enumerate_lifts(xbar, inst, budget_or(cokmat::kLiftBudget));
    output = {{"count", count}};
    try {
      mpz_class formula = cokmat::lift_count_formula(inst);
      output["formula"] = formula.get_str();
      output["match"] = (formula == mpz_class(static_cast<unsigned long>(count)));
    } catch (const std::domain_error& e) {
      output["formula"] = nullptr;
      output["note"] = e.what();
    }
    if (enum_args.distribution) {
      json rows = json::array();
      for (const auto& [key, c] :
           cokmat::lift_distribution(xbar, inst, budget_or(cokmat::kLiftBudget)))
        rows.push_back({{"outcome", key.str()}, {"count", c}});
      output["distribution"] = rows;
    }
  });

  // ---- sample -------------------------------------------------------------
  auto* sample_cmd = app.add_subcommand(
      "sample", "Monte Carlo outcome frequencies over uniform matrices mod p^(N+1)");
  sample_cmd->fallthrough();
  InstanceArgs sample_inst;
  sample_inst.attach(sample_cmd, /*with_targets=*/false);
  cokmat::SamplerConfig sampler_cfg;
  sample_cmd->add_option("--samples", sampler_cfg.samples, "number of samples")
      ->required();
  sample_cmd->add_option("--seed", sampler_cfg.seed, "RNG seed")->capture_default_str();
  sample_cmd->add_option("--workers", sampler_cfg.workers,
                         "worker threads (0 = hardware); results do not depend on this")
      ->capture_default_str();
  sample_cmd->callback([&] {
    std::vector<cokmat::PolySpec> polys = sample_inst.parse_polys();
    cokmat::FrequencyTable table = cokmat::sample_joint_distribution(
        sample_inst.p, sample_inst.n, sample_inst.N, polys, sampler_cfg);
    output = frequency_table_json(table, degrees_of(polys), sampler_cfg.seed,
                                  sampler_cfg.workers);
  });

  // ---- probe-conjecture ---------------------------------------------------
  auto* probe_cmd = app.add_subcommand(
      "probe-conjecture", "compare enumeration against the counting formula on an "
                          "instance outside the proven range");
  probe_cmd->fallthrough();
  InstanceArgs probe_inst;
  probe_inst.attach(probe_cmd, /*with_targets=*/true);
  std::string probe_matrix;
  probe_cmd->add_option("--matrix", probe_matrix,
                        "residue matrix over F_p (\"a,b;c,d\" or \"companion\"); "
                        "omit to enumerate the full matrix space");
  probe_cmd->callback([&] {
    cokmat::ProblemInstance inst = probe_inst.build();
    std::optional<cokmat::RingMatrix> xbar;
    if (!probe_matrix.empty()) xbar = parse_residue_matrix(probe_matrix, inst);
    cokmat::ExperimentReport report =
        cokmat::probe_conjecture(inst, xbar, budget_or(cokmat::kFullBudget));
    output = cokmat::to_json(report);
  });

  // ---- verify -------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand(
      "verify", "run the full acceptance suite and print the scoreboard");
  verify_cmd->fallthrough();
  std::string archive_path = "acceptance_report.json";
  verify_cmd->add_option("--archive", archive_path, "where to write the JSON archive")
      ->capture_default_str();
  verify_cmd->callback([&] {
    emit_output = false;
    cokmat::AcceptanceSummary summary = cokmat::run_acceptance(std::cout);
    json archive;
    archive["criteria"] = json::array();
    for (const cokmat::CriterionResult& r : summary.criteria)
      archive["criteria"].push_back(cokmat::to_json(r));
    archive["reports"] = json::array();
    for (const cokmat::ExperimentReport& r : summary.probe_reports)
      archive["reports"].push_back(cokmat::to_json(r));
    std::ofstream out(archive_path);
    out << archive.dump(2) << "\n";
    if (!out) throw std::invalid_argument("cannot write archive file " + archive_path);
    std::cout << "archive written to " << archive_path << "\n";
    if (!summary.all_passed()) exit_code = 3;
  });

  // ---- sweep --------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "run a declarative list of experiments from a JSON config file");
  sweep_cmd->fallthrough();
  std::string sweep_config;
  sweep_cmd->add_option("--config", sweep_config,
                        "JSON array of entries {mode: sample|enumerate-full|probe, "
                        "p, n, N, polys, targets?, matrix?, samples?, seed?, "
                        "workers?, budget?}")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->callback([&] {
    std::ifstream in(sweep_config);
    json config = json::parse(in);
    if (!config.is_array())
      throw std::invalid_argument("sweep config must be a JSON array");
    json results = json::array();
    for (const json& entry : config) {
      InstanceArgs args;
      args.p = entry.at("p").get<std::uint64_t>();
      args.n = entry.at("n").get<unsigned>();
      args.N = entry.at("N").get<unsigned>();
      args.polys = entry.at("polys").get<std::vector<std::string>>();
      if (entry.contains("targets"))
        args.targets = entry.at("targets").get<std::vector<std::string>>();
      std::uint64_t entry_budget =
          entry.contains("budget") ? entry.at("budget").get<std::uint64_t>()
                                   : budget_or(cokmat::kFullBudget);
      const std::string mode = entry.at("mode").get<std::string>();
      json result = {{"mode", mode}};
      if (mode == "sample") {
        cokmat::SamplerConfig cfg;
        cfg.samples = entry.at("samples").get<std::uint64_t>();
        cfg.seed = entry.contains("seed") ? entry.at("seed").get<std::uint64_t>() : 0;
        cfg.workers = entry.contains("workers") ? entry.at("workers").get<unsigned>() : 0;
        std::vector<cokmat::PolySpec> polys = args.parse_polys();
        result["table"] = frequency_table_json(
            cokmat::sample_joint_distribution(args.p, args.n, args.N, polys, cfg),
            degrees_of(polys), cfg.seed, cfg.workers);
      } else if (mode == "enumerate-full") {
        cokmat::FullEnumeration fe = cokmat::enumerate_full(args.build(), entry_budget);
        result["matches"] = fe.matches;
        result["total"] = fe.total;
        result["residue_matches"] = fe.residue_matches;
        result["residue_total"] = fe.residue_total;
      } else if (mode == "probe") {
        cokmat::ProblemInstance inst = args.build();
        std::optional<cokmat::RingMatrix> xbar;
        if (entry.contains("matrix"))
          xbar = parse_residue_matrix(entry.at("matrix").get<std::string>(), inst);
        result["report"] =
            cokmat::to_json(cokmat::probe_conjecture(inst, xbar, entry_budget));
      } else {
        throw std::invalid_argument("unknown sweep mode: " + mode);
      }
      results.push_back(std::move(result));
    }
    output = {{"results", results}};
  });

  // ---- selftest-json (hidden) --------------------------------------------
  auto* selftest_cmd = app.add_subcommand("selftest-json", "");
  selftest_cmd->group("");  // hidden: internal round-trip check for the test suite
  selftest_cmd->callback([&] {
    emit_output = false;
    cokmat::ExperimentReport r;
    r.description = "round-trip check";
    r.observed = "0.25";
    r.predicted = "0.2500001";
    r.verdict = "within-3sigma";
    r.sample_size = 4096;
    r.band = 0.01;
    r.runtime_seconds = 0.125;
    r.seed = 99;
    cokmat::ExperimentReport r2 =
        cokmat::report_from_json(json::parse(cokmat::to_json(r).dump()));
    if (r2.description != r.description || r2.observed != r.observed ||
        r2.predicted != r.predicted || r2.verdict != r.verdict ||
        r2.sample_size != r.sample_size || r2.band != r.band ||
        r2.runtime_seconds != r.runtime_seconds || r2.seed != r.seed)
      throw std::logic_error("report JSON round trip failed");

    cokmat::FrequencyTable t;
    t.samples = 7;
    cokmat::OutcomeKey a;
    a.parts = {cokmat::ModuleType({{1, 1}}, 1), std::nullopt};
    cokmat::OutcomeKey b;
    b.parts = {cokmat::ModuleType({{2, 1}, {1, 2}}, 1), cokmat::ModuleType(2)};
    t.counts[a] = 3;
    t.counts[b] = 4;
    std::vector<unsigned> degrees = {1, 2};
    cokmat::FrequencyTable t2 = cokmat::table_from_json(
        json::parse(cokmat::to_json(t, degrees).dump()));
    if (!(t2 == t)) throw std::logic_error("frequency table JSON round trip failed");

    cokmat::OutcomeKey a2 =
        cokmat::outcome_from_json(json::parse(cokmat::to_json(a, degrees).dump()));
    if (!(a2 == a)) throw std::logic_error("outcome key JSON round trip failed");
    std::cout << "selftest-json: ok\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cokmat::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cokmat::ScaleExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (emit_output) emit(output, format);
  return exit_code;
}
