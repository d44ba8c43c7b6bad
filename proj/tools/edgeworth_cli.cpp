#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgeworth/config.hpp"
#include "edgeworth/error.hpp"

namespace {

int fail(const std::string& name, const std::string& message, int code) {
  std::cerr << edgeworth::Json{{"error", name}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edgeworth expansions for sums driven by twisted transfer operators"};
  std::string command;
  std::string config_path;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<long long> n_list;

  app.add_option("command", command, "expand | verify | diagnose | moments | lclt | moddev (default: run.command)");
  app.add_option("-c,--config", config_path, "JSON config {\"model\": ..., \"run\": ...}")->required();
  app.add_option("-r,--order", order, "override run.order");
  app.add_option("-s,--seed", seed, "override run.seed");
  app.add_option("-o,--out-dir", out_dir, "override run.output_dir");
  app.add_option("-N,--N-list", n_list, "override run.N_list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("InvalidConfig", e.what(), 2);
  }

  edgeworth::Json doc;
  try {
    std::ifstream in(config_path);
    if (!in) return fail("InvalidConfig", "cannot open " + config_path, 2);
    doc = edgeworth::Json::parse(in);
    if (!doc.contains("run")) doc["run"] = edgeworth::Json::object();
    if (!command.empty()) doc["run"]["command"] = command;
    if (order) doc["run"]["order"] = *order;
    if (seed) doc["run"]["seed"] = *seed;
    if (out_dir) doc["run"]["output_dir"] = *out_dir;
    if (!n_list.empty()) doc["run"]["N_list"] = n_list;
  } catch (const edgeworth::Json::exception& e) {
    return fail("InvalidConfig", e.what(), 2);
  }

  try {
    const edgeworth::RunConfig cfg = edgeworth::parse_config(doc);
    return edgeworth::run_command_guarded(cfg, std::cout, std::cerr);
  } catch (const edgeworth::Error& e) {
    return fail(std::string(edgeworth::error_name(e.code())), e.what(), edgeworth::exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return fail("Unexpected", e.what(), 1);
  }
}
