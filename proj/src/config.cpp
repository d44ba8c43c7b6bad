#include "edgeworth/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include <fmt/format.h>

#include "edgeworth/error.hpp"
#include "edgeworth/spectral.hpp"

namespace edgeworth {
namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) invalid(what + " must be a number");
  return j.get<double>();
}

Eigen::MatrixXd matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) invalid(what + " must be a non-empty nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InconsistentDimensions, what + " rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

std::vector<double> vector_of(const Json& j, const std::string& what) {
  if (!j.is_array()) invalid(what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Observable parse_observable(const Json& j) {
  if (!j.is_object()) invalid("observable must be an object");
  const std::string kind = j.value("kind", "cosine");
  if (kind == "cosine") {
    return Observable::cosine(j.value("amplitude", 1.0), j.value("frequency", 1.0), j.value("phase", 0.0));
  }
  if (kind == "constant") return Observable::constant(j.value("value", 0.0));
  if (kind == "polynomial") return {Observable::Kind::Polynomial, vector_of(j.at("coefficients"), "coefficients"), {}};
  if (kind == "step") {
    Observable g{Observable::Kind::Step, vector_of(j.at("values"), "values"), vector_of(j.at("breaks"), "breaks")};
    if (g.params.size() != g.breaks.size() + 1) invalid("step observable needs one more value than breaks");
    return g;
  }
  invalid("unknown observable kind '" + kind + "'");
}

ExpandingMap parse_map(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "doubling") return doubling_map();
    invalid("unknown map '" + j.get<std::string>() + "'");
  }
  if (!j.is_object() || !j.contains("branches")) invalid("map must be \"doubling\" or an object with branches");
  std::vector<MapBranch> branches;
  for (const auto& b : j.at("branches")) {
    branches.push_back({number(b.at("x0"), "x0"), number(b.at("x1"), "x1"), number(b.at("y0"), "y0"),
                        number(b.at("slope"), "slope")});
  }
  return piecewise_linear_map(std::move(branches));
}

}  // namespace

LoadedModel parse_model(const Json& doc, int moments_needed) {
  if (!doc.is_object() || !doc.contains("type")) invalid("model needs a \"type\"");
  LoadedModel out;
  out.type = doc.at("type").get<std::string>();
  out.document = doc;
  if (out.type == "markov") {
    Eigen::MatrixXd P = matrix(doc.at("P"), "P");
    Eigen::MatrixXd h = matrix(doc.at("h"), "h");
    Eigen::VectorXd mu0;
    if (doc.contains("mu0")) {
      const auto v = vector_of(doc.at("mu0"), "mu0");
      mu0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else {
      if (P.rows() != P.cols()) throw Error(ErrorCode::InconsistentDimensions, "P must be square");
      mu0 = perron_base(P).left;
    }
    out.chain = markov_model(std::move(P), std::move(h), std::move(mu0));
  } else if (out.type == "iid") {
    if (doc.contains("pmf")) {
      std::vector<std::pair<double, double>> pmf;
      for (const auto& atom : doc.at("pmf")) {
        if (!atom.is_array() || atom.size() != 2) invalid("pmf entries are [value, probability] pairs");
        pmf.emplace_back(number(atom[0], "pmf value"), number(atom[1], "pmf probability"));
      }
      out.iid = iid_from_pmf(std::move(pmf), moments_needed);
      out.chain = iid_embedding(*out.iid);
    } else if (doc.contains("moments")) {
      out.iid = iid_from_moments(vector_of(doc.at("moments"), "moments"));
    } else {
      invalid("iid model needs \"pmf\" or \"moments\"");
    }
  } else if (out.type == "ulam") {
    UlamSpec spec;
    spec.map = parse_map(doc.value("map", Json("doubling")));
    spec.g = parse_observable(doc.value("observable", Json::object()));
    spec.cells = doc.value("cells", 1024);
    out.ulam = spec;
    out.chain = ulam_model(spec);
  } else {
    invalid("unknown model type '" + out.type + "'");
  }
  return out;
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object() || !doc.contains("model")) invalid("config needs a \"model\" object");
  RunConfig cfg;
  cfg.model = doc.at("model");
  cfg.run = doc.value("run", Json::object());
  if (!cfg.run.is_object()) invalid("\"run\" must be an object");
  cfg.command = cfg.run.value("command", "");
  cfg.order = cfg.run.value("order", 1);
  if (cfg.order < 0 || cfg.order > 8) invalid("order must lie in [0, 8]");
  if (cfg.run.contains("N_list")) {
    for (const auto& n : cfg.run.at("N_list")) {
      if (!n.is_number_integer() || n.get<long long>() < 1) invalid("N_list entries must be positive integers");
      cfg.N_list.push_back(n.get<long long>());
    }
    for (std::size_t i = 1; i < cfg.N_list.size(); ++i) {
      if (cfg.N_list[i] <= cfg.N_list[i - 1]) invalid("N_list must be strictly increasing");
    }
  }
  if (cfg.run.contains("seed")) {
    if (!cfg.run.at("seed").is_number_unsigned()) invalid("seed must be an unsigned integer");
    cfg.seed = cfg.run.at("seed").get<std::uint64_t>();
  }
  if (cfg.run.contains("trials") && !cfg.seed) invalid("Monte Carlo runs need a seed");
  cfg.output_dir = cfg.run.value("output_dir", ".");
  cfg.timestamp = cfg.run.value("timestamp", "");
  if (cfg.timestamp.empty()) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
    cfg.timestamp = buf;
  }
  return cfg;
}

std::string model_hash(const Json& model) {
  const std::string text = model.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

Json polynomial_json(const Polynomial& p) {
  Json arr = Json::array();
  for (double c : p.coeffs()) arr.push_back(c);
  return arr;
}

Json expansion_report(const ExpansionSet& exp) {
  Json rep;
  rep["order"] = exp.r;
  rep["A"] = exp.params.A;
  rep["sigma2"] = exp.params.sigma2;
  if (exp.lattice) rep["lattice"] = {{"span", exp.lattice->span}, {"offset", exp.lattice->offset}};
  Json moments = Json::array();
  for (const auto& [kj, v] : exp.moments) moments.push_back({{"k", kj.first}, {"j", kj.second}, {"value", v}});
  rep["moment_coefficients"] = moments;
  auto list = [](const std::vector<Polynomial>& polys, std::size_t first) {
    Json arr = Json::array();
    for (std::size_t i = first; i < polys.size(); ++i) arr.push_back(polynomial_json(polys[i]));
    return arr;
  };
  rep["frequency_polys_in_it"] = list(exp.freq, 0);
  rep["R"] = list(exp.edge_r, 0);
  rep["P"] = list(exp.edge_p, 1);
  rep["P_local"] = list(exp.weak_local, 0);
  return rep;
}

ExpansionSet expand_model(const LoadedModel& model, int r) {
  if (model.iid) return expand(*model.iid, r);
  return expand(*model.chain, r);
}

}  // namespace edgeworth
