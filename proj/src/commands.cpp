#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "edgeworth/config.hpp"
#include "edgeworth/error.hpp"
#include "edgeworth/gaussian.hpp"
#include "edgeworth/oracle.hpp"
#include "edgeworth/spectral.hpp"

namespace edgeworth {
namespace {

std::vector<double> grid_from(const Json& run, const std::string& key, double lo, double hi, int count) {
  if (!run.contains(key)) return linear_grid(lo, hi, count);
  const Json& g = run.at(key);
  if (g.is_array()) {
    std::vector<double> out;
    for (const auto& v : g) out.push_back(v.get<double>());
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, key + " is empty");
    return out;
  }
  return linear_grid(g.value("lo", lo), g.value("hi", hi), g.value("count", count));
}

std::string write_csv(const RunConfig& cfg, const std::string& body) {
  std::filesystem::create_directories(cfg.output_dir);
  const std::string name = fmt::format("{}-{}-{}.csv", cfg.command, model_hash(cfg.model), cfg.timestamp);
  const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream f(path, std::ios::binary);
  f << body;
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return path.string();
}

Json base_report(const RunConfig& cfg) {
  Json rep;
  rep["command"] = cfg.command;
  rep["model_hash"] = model_hash(cfg.model);
  rep["order"] = cfg.order;
  if (cfg.seed) rep["seed"] = *cfg.seed;
  return rep;
}

const MarkovModel& need_chain(const LoadedModel& m) {
  if (!m.chain) throw Error(ErrorCode::OracleUnavailable, "a moment-specified i.i.d. law has no exact oracle");
  return *m.chain;
}

TestFunction parse_test_function(const Json& run) {
  const Json j = run.value("test_function", Json::object());
  const std::string kind = j.value("kind", "gaussian-bump");
  const double center = j.value("center", 0.0);
  const double width = j.value("width", 2.0);
  if (kind == "gaussian-bump") return TestFunction::gaussian_bump(center, width);
  if (kind == "compact-bump") return TestFunction::compact_bump(center, width);
  if (kind == "hermite-damped") return TestFunction::hermite_damped(j.value("degree", 0), center, width);
  throw Error(ErrorCode::InvalidConfig, "unknown test function '" + kind + "'");
}

long long horizon(const RunConfig& cfg, long long fallback) {
  if (cfg.run.contains("N")) return cfg.run.at("N").get<long long>();
  if (!cfg.N_list.empty()) return cfg.N_list.back();
  return fallback;
}

int cmd_expand(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel model = parse_model(cfg.model);
  Json rep = base_report(cfg);
  rep["expansion"] = expansion_report(expand_model(model, cfg.order));
  out << rep.dump(2) << "\n";
  return 0;
}

ConvergenceReport mc_study(const ExpansionSet& exp, const UlamSpec& spec, const RunConfig& cfg) {
  if (!cfg.seed) throw Error(ErrorCode::InvalidConfig, "Monte Carlo verification needs a seed");
  const long long trials = cfg.run.value("trials", 100000LL);
  ConvergenceReport rep;
  rep.r = exp.r;
  rep.N_list = cfg.N_list;
  for (long long N : cfg.N_list) {
    const ExactDistribution dist = mc_sample(spec, static_cast<int>(N), trials, *cfg.seed);
    const ExactDistribution z = dist.standardized(static_cast<double>(N) * exp.params.A, std::sqrt(static_cast<double>(N)));
    const auto probes = linear_grid(-12.0 * exp.params.sigma(), 12.0 * exp.params.sigma(), 2401);
    const double e = kolmogorov_distance(as_query(z), continuous_query([&](double x) { return edgeworth_cdf(exp, N, x); }), probes);
    rep.raw_error.push_back(e);
    rep.scaled_error.push_back(e * std::pow(static_cast<double>(N), 0.5 * exp.r));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.scaled_error.size(); ++i)
    if (!(rep.scaled_error[i] < rep.scaled_error[i - 1])) rep.monotone = false;
  rep.endpoint = rep.scaled_error.size() >= 2 && rep.scaled_error.back() < rep.scaled_error.front();
  return rep;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.N_list.empty()) throw Error(ErrorCode::InvalidConfig, "verify needs N_list");
  const LoadedModel model = parse_model(cfg.model);
  const ExpansionSet exp = expand_model(model, cfg.order);

  std::vector<std::string> forms;
  if (cfg.run.contains("forms")) {
    for (const auto& f : cfg.run.at("forms")) forms.push_back(f.get<std::string>());
  } else if (model.ulam) {
    forms = {"classical-mc"};
  } else {
    forms = {need_chain(model).lattice ? "lattice" : "classical"};
  }
  const TestFunction f = parse_test_function(cfg.run);

  std::string csv = "form,N,raw_error,scaled_error\n";
  Json rep = base_report(cfg);
  rep["forms"] = Json::array();
  bool pass = true;
  for (const auto& form : forms) {
    ConvergenceReport cr;
    if (form == "classical-mc") {
      if (!model.ulam) throw Error(ErrorCode::InvalidConfig, "classical-mc needs an ulam model");
      cr = mc_study(exp, *model.ulam, cfg);
    } else {
      OracleKind kind;
      if (form == "classical") kind = OracleKind::Classical;
      else if (form == "lattice") kind = OracleKind::Lattice;
      else if (form == "weak-local") kind = OracleKind::WeakLocal;
      else throw Error(ErrorCode::InvalidConfig, "unknown form '" + form + "'");
      const MarkovModel& chain = need_chain(model);
      cr = convergence_study(exp, chain, kind, cfg.N_list, f);
    }
    for (std::size_t i = 0; i < cr.N_list.size(); ++i) {
      csv += fmt::format("{},{},{},{}\n", form, cr.N_list[i], format_double(cr.raw_error[i]),
                         format_double(cr.scaled_error[i]));
    }
    pass = pass && cr.monotone;
    rep["forms"].push_back({{"form", form},
                            {"N", cr.N_list},
                            {"raw_error", cr.raw_error},
                            {"scaled_error", cr.scaled_error},
                            {"monotone", cr.monotone},
                            {"endpoint", cr.endpoint},
                            {"fitted_slope", cr.fitted_slope}});
  }
  rep["pass"] = pass;
  write_csv(cfg, csv);
  out << rep.dump(2) << "\n";
  return pass ? 0 : 4;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel model = parse_model(cfg.model);
  const MarkovModel& chain = need_chain(model);
  Json rep = base_report(cfg);

  try {
    rep["gap"] = perron_base(chain.P).gap;
    rep["gap_ok"] = true;
  } catch (const Error& e) {
    rep["gap_ok"] = false;
    rep["gap_error"] = std::string(error_name(e.code()));
  }

  const auto t_grid = grid_from(cfg.run, "t_grid", 0.5, 100.0, 200);
  const int power = cfg.run.value("power", 2);
  const auto rows = norm_decay_scan(chain, t_grid, power);
  std::string csv = "t,norm,radius,lattice_resonant\n";
  Json table = Json::array();
  for (const auto& row : rows) {
    bool resonant = false;
    if (chain.lattice) {
      const double k = row.t * chain.lattice->span / (2.0 * std::numbers::pi);
      resonant = std::abs(k - std::round(k)) < 1e-9 && std::round(k) != 0.0;
    }
    csv += fmt::format("{},{},{},{}\n", format_double(row.t), format_double(row.norm), format_double(row.radius),
                       resonant ? 1 : 0);
    table.push_back({{"t", row.t}, {"norm", row.norm}, {"radius", row.radius}, {"lattice_resonant", resonant}});
  }
  rep["norm_power"] = power;
  rep["scan"] = table;

  if (chain.dim() >= 2 && chain.dim() <= 16) {
    const auto s_grid = grid_from(cfg.run, "s_grid", 1.0, 1000.0, 99901);
    const DiophantineScan scan = diophantine_scan(chain.h, s_grid);
    rep["diophantine"] = {{"K", scan.K}, {"beta", scan.beta}, {"residual", scan.residual}, {"fit_points", scan.fit_points}};
    double theta = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
      const double dv = diophantine_d(chain.h, t / (2.0 * std::numbers::pi));
      if (dv <= 0.0) continue;
      const Eigen::MatrixXcd L = operator_at(chain, t);
      const double n2 = (L * L).cwiseAbs().rowwise().sum().maxCoeff();
      theta = std::min(theta, (1.0 - n2) / (dv * dv));
    }
    if (std::isfinite(theta)) rep["diophantine"]["theta"] = theta;
  } else {
    rep["diophantine"] = "skipped";
  }
  write_csv(cfg, csv);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const int kmax = cfg.run.value("kmax", cfg.order + 2);
  if (kmax < 1 || kmax > 10) throw Error(ErrorCode::InvalidConfig, "kmax must lie in [1, 10]");
  const LoadedModel model = parse_model(cfg.model);
  const ExpansionSet exp = expand_model(model, std::max(cfg.order, kmax - 2));
  Json rep = base_report(cfg);
  Json table = Json::array();
  for (const auto& [kj, v] : exp.moments)
    if (kj.first <= kmax) table.push_back({{"k", kj.first}, {"j", kj.second}, {"value", v}});
  rep["A"] = exp.params.A;
  rep["sigma2"] = exp.params.sigma2;
  rep["moment_coefficients"] = table;

  if (!cfg.N_list.empty()) {
    const MarkovModel& chain = need_chain(model);
    std::string csv = "N,k,exact,expansion,relative_error\n";
    Json checks = Json::array();
    for (long long N : cfg.N_list) {
      const auto exact = exact_moments(chain, static_cast<int>(N), kmax, exp.params.A);
      for (int k = 0; k <= kmax; ++k) {
        double approx = 0.0;
        for (int j = 0; j <= k / 2; ++j) approx += exp.moments.at({k, j}) * std::pow(static_cast<double>(N), j);
        const double e = exact[static_cast<std::size_t>(k)];
        const double rel = std::abs(e - approx) / std::max(std::abs(e), 1e-300);
        csv += fmt::format("{},{},{},{},{}\n", N, k, format_double(e), format_double(approx), format_double(rel));
        checks.push_back({{"N", N}, {"k", k}, {"exact", e}, {"expansion", approx}, {"relative_error", rel}});
      }
    }
    rep["oracle"] = checks;
    write_csv(cfg, csv);
  }
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_lclt(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel model = parse_model(cfg.model);
  const ExpansionSet exp = expand_model(model, cfg.order);
  const long long N = horizon(cfg, 1);
  std::vector<double> us;
  const Json u = cfg.run.value("u", Json(0.0));
  if (u.is_array()) {
    for (const auto& v : u) us.push_back(v.get<double>());
  } else {
    us.push_back(u.get<double>());
  }
  Json rep = base_report(cfg);
  rep["N"] = N;
  Json rows = Json::array();
  for (double x : us) {
    Json row = {{"u", x}, {"density", lclt_estimate(exp, x, N)}};
    if (cfg.run.contains("eps")) row["window"] = lclt_window(exp, x, N, cfg.run.at("eps").get<double>());
    rows.push_back(row);
  }
  rep["estimates"] = rows;

  if (!cfg.N_list.empty() && model.chain && model.chain->lattice) {
    std::string csv = "N,sup_error\n";
    Json sup = Json::array();
    for (long long n : cfg.N_list) {
      const ExactDistribution dist = dp_pmf(*model.chain, static_cast<int>(n));
      const double root_n = std::sqrt(static_cast<double>(n));
      const double span = model.chain->lattice->span;
      double worst = 0.0;
      for (std::size_t i = 0; i < dist.support.size(); ++i) {
        const double dev = dist.support[i] - static_cast<double>(n) * exp.params.A;
        worst = std::max(worst, std::abs(root_n * dist.pmf[i] / span - lclt_estimate(exp, dev, n)));
      }
      csv += fmt::format("{},{}\n", n, format_double(worst));
      sup.push_back({{"N", n}, {"sup_error", worst}});
    }
    rep["oracle"] = sup;
    write_csv(cfg, csv);
  }
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_moddev(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel model = parse_model(cfg.model);
  const ExpansionSet exp = expand_model(model, cfg.order);
  const double c = cfg.run.value("c", 0.5);
  const long long N = horizon(cfg, 4096);
  const ModDevResult res = moddev_ratio(exp, need_chain(model), c, N);
  Json rep = base_report(cfg);
  rep["c"] = c;
  rep["N"] = N;
  rep["x"] = res.x;
  rep["exact_tail"] = res.exact_tail;
  rep["normal_tail"] = res.normal_tail;
  rep["ratio"] = res.ratio;
  rep["predicted_tail"] = res.predicted_tail;
  out << rep.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "expand") return cmd_expand(cfg, out);
  if (cfg.command == "verify") return cmd_verify(cfg, out);
  if (cfg.command == "diagnose") return cmd_diagnose(cfg, out);
  if (cfg.command == "moments") return cmd_moments(cfg, out);
  if (cfg.command == "lclt") return cmd_lclt(cfg, out);
  if (cfg.command == "moddev") return cmd_moddev(cfg, out);
  throw Error(ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
}

int run_command_guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream buffer;
    const int code = run_command(cfg, buffer);
    out << buffer.str();
    return code;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << Json{{"error", std::string(error_name(e.code()))}, {"message", e.what()}, {"exit_code", code}}.dump() << "\n";
    return code;
  } catch (const Json::exception& e) {
    err << Json{{"error", "InvalidConfig"}, {"message", e.what()}, {"exit_code", 2}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << Json{{"error", "Unexpected"}, {"message", e.what()}, {"exit_code", 1}}.dump() << "\n";
    return 1;
  }
}

}  // namespace edgeworth
