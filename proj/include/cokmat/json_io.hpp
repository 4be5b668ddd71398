#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cokmat/experiments.hpp"
#include "cokmat/verify.hpp"

// JSON views of the result structures, shared by the command-line tool and
// the acceptance binary.  Header-only on purpose: the core library stays
// serialization-free, and every writer here has a matching reader so output
// can be fed back in (round-trip property).

namespace cokmat {

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j = {{"description", r.description},
                      {"observed", r.observed},
                      {"predicted", r.predicted},
                      {"verdict", r.verdict},
                      {"sample_size", r.sample_size},
                      {"band", r.band},
                      {"runtime_seconds", r.runtime_seconds}};
  if (r.seed.has_value())
    j["seed"] = *r.seed;
  else
    j["seed"] = nullptr;
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.description = j.at("description").get<std::string>();
  r.observed = j.at("observed").get<std::string>();
  r.predicted = j.at("predicted").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  r.sample_size = j.at("sample_size").get<std::uint64_t>();
  r.band = j.at("band").get<double>();
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

// Outcome keys serialize as their display string plus the residue degrees
// needed to parse the components back.
inline nlohmann::json to_json(const OutcomeKey& key, const std::vector<unsigned>& degrees) {
  return nlohmann::json{{"outcome", key.str()}, {"degrees", degrees}};
}

inline OutcomeKey outcome_from_json(const nlohmann::json& j) {
  return OutcomeKey::parse(j.at("outcome").get<std::string>(),
                           j.at("degrees").get<std::vector<unsigned>>());
}

inline nlohmann::json to_json(const FrequencyTable& t, const std::vector<unsigned>& degrees) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, count] : t.counts)
    rows.push_back({{"outcome", key.str()}, {"count", count}});
  return nlohmann::json{{"samples", t.samples}, {"degrees", degrees}, {"counts", rows}};
}

inline FrequencyTable table_from_json(const nlohmann::json& j) {
  FrequencyTable t;
  t.samples = j.at("samples").get<std::uint64_t>();
  const auto degrees = j.at("degrees").get<std::vector<unsigned>>();
  for (const nlohmann::json& row : j.at("counts"))
    t.counts[OutcomeKey::parse(row.at("outcome").get<std::string>(), degrees)] =
        row.at("count").get<std::uint64_t>();
  return t;
}

inline nlohmann::json to_json(const CriterionResult& r) {
  return nlohmann::json{{"id", r.id},
                        {"name", r.name},
                        {"status", r.passed ? "pass" : (r.blocking ? "FAIL" : "MISMATCH")},
                        {"blocking", r.blocking},
                        {"detail", r.detail},
                        {"runtime_seconds", r.runtime_seconds}};
}

}  // namespace cokmat
