#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeworth/evaluate.hpp"
#include "edgeworth/expansion.hpp"
#include "edgeworth/models.hpp"

namespace edgeworth {

using Json = nlohmann::json;

/// A model document resolved into library objects.
struct LoadedModel {
  std::string type;  // "markov", "iid" or "ulam"
  Json document;
  std::optional<MarkovModel> chain;  // markov, ulam, and iid given by a pmf
  std::optional<IidModel> iid;
  std::optional<UlamSpec> ulam;
};

/// Throws InvalidConfig (or the model constructors' errors) on a bad document.
/// `moments_needed` sets how many raw moments a pmf-specified i.i.d. law carries.
LoadedModel parse_model(const Json& doc, int moments_needed = 12);

struct RunConfig {
  std::string command;
  int order = 1;
  std::vector<long long> N_list;
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";
  std::string timestamp;  // file-name stamp only; never written into file contents
  Json model;
  Json run;
};

/// Validates r in [0, 8], N_list strictly increasing and positive, and a seed
/// whenever Monte Carlo is requested.
RunConfig parse_config(const Json& doc);

/// FNV-1a (64 bit) of the compact, key-sorted model document, as 16 hex digits.
std::string model_hash(const Json& model);

/// 17 significant digits.
std::string format_double(double x);

Json polynomial_json(const Polynomial& p);
Json expansion_report(const ExpansionSet& exp);

ExpansionSet expand_model(const LoadedModel& model, int r);

/// Runs cfg.command, printing the primary report to `out`. Returns the exit code.
/// Library errors propagate as Error.
int run_command(const RunConfig& cfg, std::ostream& out);

/// Wraps run_command: maps errors to exit codes and writes error JSON to `err`.
int run_command_guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace edgeworth
