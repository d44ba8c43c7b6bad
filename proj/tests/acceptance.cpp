// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "edgeworth/config.hpp"
#include "edgeworth/error.hpp"
#include "edgeworth/evaluate.hpp"
#include "edgeworth/expansion.hpp"
#include "edgeworth/oracle.hpp"
#include "edgeworth/spectral.hpp"

using namespace edgeworth;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Json load_config(const std::string& file) {
  std::ifstream in(std::filesystem::path(EDGEWORTH_DATA_DIR) / "models" / file);
  return Json::parse(in);
}

LoadedModel load_model(const std::string& file) { return parse_model(load_config(file).at("model")); }

std::string seq(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += fmt::format("{}{:.4g}", s.empty() ? "" : " ", x);
  return s;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return !v.empty();
}

double max_jet_diff(const Jet& a, const Jet& b) {
  double d = 0.0;
  for (int m = 0; m <= a.order(); ++m) d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

Outcome series_algebra() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ord(1, 12);
  auto random_jet = [&](int s) {
    Jet j(s);
    for (int m = 0; m <= s; ++m) {
      // |c_m| <= 1
      const double r = std::abs(u(rng)), th = std::numbers::pi * u(rng);
      j[m] = std::polar(r, th);
    }
    return j;
  };
  double worst_log = 0.0, worst_sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int s = ord(rng);
    const Jet a = random_jet(s), b = random_jet(s);
    worst_log = std::max(worst_log, max_jet_diff(jet_log(jet_exp(a)), a));
    worst_sum = std::max(worst_sum, max_jet_diff(jet_exp(a + b), jet_exp(a) * jet_exp(b)));
  }
  return {worst_log <= 1e-11 && worst_sum <= 1e-11,
          fmt::format("max |log(exp a) - a| = {:.3g}, max |exp(a+b) - exp a exp b| = {:.3g}", worst_log, worst_sum)};
}

Outcome eigen_jets() {
  const MarkovModel m = *load_model("two_state_lattice.json").chain;
  const PerronBase base = perron_base(m.P);
  const SpectralJets s = eigen_perturbation(build_operator_family(m, 6), base);
  const double h = 1e-4;
  auto mu = [&](double t) { return power_iteration(operator_at(m, t)).eigenvalue; };
  const Complex fd1 = (mu(h) - mu(-h)) / (2 * h);
  const Complex fd2 = (mu(h) - 2.0 * mu(0.0) + mu(-h)) / (h * h);
  const double e1 = std::abs(fd1 - s.mu.derivative_at_zero(1)) / std::abs(s.mu.derivative_at_zero(1));
  const double e2 = std::abs(fd2 - s.mu.derivative_at_zero(2)) / std::abs(s.mu.derivative_at_zero(2));
  const double epi = std::max(std::abs(base.left(0) - 4.0 / 7.0), std::abs(base.left(1) - 3.0 / 7.0));
  return {e1 <= 1e-6 && e2 <= 1e-6 && epi <= 1e-12,
          fmt::format("rel err mu' {:.3g}, mu'' {:.3g}; |pi - (4/7,3/7)| = {:.3g}", e1, e2, epi)};
}

Outcome moment_oracle() {
  const MarkovModel m = *load_model("three_state_lattice.json").chain;
  const ExpansionSet e = expand(m, 4);
  const std::vector<int> ns{10, 20, 40};
  std::vector<std::vector<double>> rel(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::vector<double> exact = exact_moments(m, ns[i], 6, e.params.A);
    for (int k = 1; k <= 6; ++k) {
      double approx = 0.0;
      for (int j = 0; j <= k / 2; ++j) approx += e.moments.at({k, j}) * std::pow(ns[i], j);
      rel[i].push_back(std::abs(exact[k] - approx) / std::abs(exact[k]));
    }
  }
  bool pass = true;
  double worst40 = 0.0, worst_factor = 0.0;
  for (int k = 0; k < 6; ++k) {
    worst40 = std::max(worst40, rel[2][k]);
    // Geometric decay: each doubling of n shrinks the error by at least half.
    const double f1 = rel[1][k] / rel[0][k], f2 = rel[2][k] / rel[1][k];
    worst_factor = std::max({worst_factor, f1, f2});
  }
  pass = worst40 <= 1e-8 && worst_factor <= 0.5;
  return {pass, fmt::format("max rel err n=10/20/40: {:.3g} / {:.3g} / {:.3g}; worst step factor {:.3g}",
                            *std::max_element(rel[0].begin(), rel[0].end()),
                            *std::max_element(rel[1].begin(), rel[1].end()), worst40, worst_factor)};
}

// Closed forms for i.i.d. increments with central moments sigma2, k3, k4.
Outcome iid_reduction() {
  bool pass = true;
  std::string detail;
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  for (const std::string file : {"iid_moments.json", "iid_skewed.json"}) {
    const LoadedModel lm = load_model(file);
    const ExpansionSet e = expand(*lm.iid, 2);
    const auto& raw = lm.iid->moments;
    const double m1 = raw[0];
    const double s2 = raw[1] - m1 * m1;
    const double k3 = raw[2] - 3 * m1 * raw[1] + 2 * m1 * m1 * m1;
    const double k4 = raw[3] - 4 * m1 * raw[2] + 6 * m1 * m1 * raw[1] - 3 * std::pow(m1, 4);
    const double s = std::sqrt(s2);

    const Polynomial A1 = Polynomial::monomial(3, k3 / 6);
    const Polynomial P1({k3 / (6 * s2), 0.0, -k3 / (6 * s2 * s2)});
    const Polynomial R1_literal({0.0, 3 * k3 / (6 * s2 * s2), 0.0, -k3 / (6 * s2 * s2 * s2)});
    const Polynomial R1 = -1.0 * R1_literal;
    const Polynomial A2({0, 0, 0, 0, (k4 - 3 * s2 * s2) / 24, 0, k3 * k3 / 72});
    const Polynomial P0l({root2pi / s});
    const double c0 = (k4 / std::pow(s, 5) - 3 / s) / 8;
    const double skew_term = k3 * k3 / std::pow(s, 7) * 5.0 / 24;
    const Polynomial P1l_literal(
        {root2pi * (skew_term + c0), -root2pi * k3 / (2 * std::pow(s, 5)), -root2pi / (2 * s * s2)});
    const Polynomial P1l(
        {root2pi * (-skew_term + c0), -root2pi * k3 / (2 * std::pow(s, 5)), -root2pi / (2 * s * s2)});

    const double d[] = {e.freq[1].max_abs_diff(A1), e.edge_r[1].max_abs_diff(R1), e.edge_p[1].max_abs_diff(P1),
                        e.freq[2].max_abs_diff(A2), e.weak_local[0].max_abs_diff(P0l),
                        e.weak_local[1].max_abs_diff(P1l)};
    double worst = 0.0;
    for (double v : d) worst = std::max(worst, v);
    pass = pass && worst <= 1e-12;
    detail += fmt::format("{}{}: max coeff diff {:.3g} (literal R1 off by {:.3g}, literal P1l off by {:.3g})",
                          detail.empty() ? "" : "; ", file, worst, e.edge_r[1].max_abs_diff(R1_literal),
                          e.weak_local[1].max_abs_diff(P1l_literal));
  }
  detail += "; R1 and the 5/24 term of P1l use the self-consistent signs";
  return {pass, detail};
}

Outcome structural_identities() {
  bool pass = true;
  bool parity_ok = true;
  double worst_identity = 0.0, worst_quad = 0.0;
  int models = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(EDGEWORTH_DATA_DIR) / "models")) {
    if (entry.path().extension() != ".json") continue;
    const LoadedModel lm = load_model(entry.path().filename().string());
    const ExpansionSet e = expand_model(lm, 4);
    ++models;
    parity_ok = parity_ok && freq_parity_holds(e.freq, 1e-11);
    for (int p = 1; p <= e.r; ++p)
      worst_identity = std::max(worst_identity, edge_identity_defect(e.edge_r[p], e.edge_p[p], e.params.sigma2));
    const double s2 = e.params.sigma2;
    const double lim = 40.0 / std::sqrt(s2);
    for (int j = 0; j <= 8; ++j) {
      const double closed = gaussian_moment(j, s2);
      const double scale = std::max(1.0, std::abs(closed));
      const double q =
          simpson([&](double t) { return std::pow(t, j) * std::exp(-s2 * t * t / 2); }, -lim, lim, 1e-12 * scale);
      worst_quad = std::max(worst_quad, std::abs(closed - q) / scale);
    }
    for (int k = 0; k <= e.r; ++k) {
      const Polynomial& a = e.freq[static_cast<std::size_t>(k)];
      for (int j = 0; j <= 3; ++j) {
        const Complex closed = gaussian_frequency_integral(a, j, s2);
        const double scale = std::max(1.0, std::abs(closed));
        auto part = [&](bool imag) {
          return simpson(
              [&](double t) {
                Complex v = 0.0;
                for (int m = a.degree(); m >= 0; --m) v = v * Complex(0.0, t) + a.coeff(m);
                v *= std::pow(t, j) * std::exp(-s2 * t * t / 2);
                return imag ? v.imag() : v.real();
              },
              -lim, lim, 1e-12 * scale);
        };
        worst_quad = std::max(worst_quad, std::abs(closed - Complex(part(false), part(true))) / scale);
      }
    }
  }
  pass = parity_ok && worst_identity <= 1e-12 && worst_quad <= 1e-9 && models > 0;
  return {pass, fmt::format("{} models: parity {}, max identity defect {:.3g}, max moment/quadrature diff {:.3g}",
                            models, parity_ok ? "holds" : "broken", worst_identity, worst_quad)};
}

Outcome lattice_convergence() {
  const MarkovModel m = *load_model("two_state_lattice.json").chain;
  const std::vector<long long> Ns{64, 256, 1024, 4096};
  const ConvergenceReport r1 = convergence_study(expand(m, 1), m, OracleKind::Lattice, Ns);
  const ConvergenceReport r2 = convergence_study(expand(m, 2), m, OracleKind::Lattice, Ns);
  const bool pass = strictly_decreasing(r1.scaled_error) && r2.scaled_error.back() < r2.scaled_error.front();
  return {pass, fmt::format("e1*sqrt(N): {}; e2*N: {}", seq(r1.scaled_error), seq(r2.scaled_error))};
}

Outcome classical_convergence() {
  const MarkovModel m = *load_model("diophantine_two_state.json").chain;
  if (m.lattice) return {false, "model is lattice"};
  const ConvergenceReport r =
      convergence_study(expand(m, 1), m, OracleKind::Classical, {8, 10, 12, 14, 16, 18});
  return {strictly_decreasing(r.scaled_error), fmt::format("Kolmogorov*sqrt(N): {}", seq(r.scaled_error))};
}

Outcome weak_convergence() {
  const MarkovModel m = *load_model("two_state_lattice.json").chain;
  const ConvergenceReport r = convergence_study(expand(m, 2), m, OracleKind::WeakLocal, {64, 256, 1024},
                                                TestFunction::gaussian_bump(0.0, 2.0));
  return {strictly_decreasing(r.scaled_error), fmt::format("err*N: {}", seq(r.scaled_error))};
}

Outcome lclt() {
  const MarkovModel m = *load_model("two_state_lattice.json").chain;
  const ExpansionSet e = expand(m, 0);
  auto sup_err = [&](int N) {
    const ExactDistribution d = dp_pmf(m, N);
    double w = 0.0;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
      const double u = d.support[i] - N * e.params.A;
      w = std::max(w, std::abs(std::sqrt(static_cast<double>(N)) * d.pmf[i] - lclt_estimate(e, u, N)));
    }
    return w;
  };
  const double a = sup_err(256), b = sup_err(1024);
  return {b <= 0.55 * a, fmt::format("sup err N=256 {:.4g}, N=1024 {:.4g}, ratio {:.4f}", a, b, b / a)};
}

Outcome moderate_deviations() {
  const MarkovModel m = *load_model("two_state_lattice.json").chain;
  const ExpansionSet e = expand(m, 1);
  const ModDevResult r = moddev_ratio(e, m, 0.5, 4096);
  const double x = std::sqrt(0.5 * e.params.sigma2 * std::log(4096.0));
  const bool pass = std::abs(r.x - x) <= 1e-12 && r.ratio >= 0.8 && r.ratio <= 1.2;
  return {pass, fmt::format("x = {:.5f}, exact tail {:.5g}, normal tail {:.5g}, ratio {:.4f}", r.x, r.exact_tail,
                            r.normal_tail, r.ratio)};
}

Outcome diagnostics() {
  const MarkovModel m = *load_model("diophantine_two_state.json").chain;
  const auto grid = linear_grid(0.5, 100.0, 200);
  const auto rows = norm_decay_scan(m, grid, 2);
  double max_radius = 0.0;
  for (const auto& row : rows) {
    bool resonant = false;
    if (m.lattice) {
      const double k = row.t * m.lattice->span / (2 * std::numbers::pi);
      resonant = std::abs(k - std::round(k)) < 1e-9 && std::round(k) != 0.0;
    }
    if (!resonant) max_radius = std::max(max_radius, row.radius);
  }
  // Largest theta with ||L_t^2|| <= 1 - theta d(t)^2 on the grid.
  double theta = std::numeric_limits<double>::infinity();
  bool bound_holds = true;
  for (const auto& row : rows) {
    const double dv = diophantine_d(m.h, row.t / (2 * std::numbers::pi));
    if (dv > 0.0) theta = std::min(theta, (1.0 - row.norm) / (dv * dv));
    else bound_holds = bound_holds && row.norm <= 1.0;
  }
  for (const auto& row : rows) {
    const double dv = diophantine_d(m.h, row.t / (2 * std::numbers::pi));
    bound_holds = bound_holds && row.norm <= 1.0 - theta * dv * dv + 1e-15;
  }
  const bool pass = max_radius < 1.0 - 1e-6 && theta >= 1e-6 && bound_holds;
  return {pass, fmt::format("max radius {:.6f}, fitted theta {:.4g}", max_radius, theta)};
}

Outcome ulam_monte_carlo() {
  const Json cfg = load_config("doubling_cosine.json");
  const LoadedModel lm = parse_model(cfg.at("model"));
  if (lm.ulam->cells != 1024) return {false, "model does not use 1024 cells"};
  const ExpansionSet e = expand(*lm.chain, 1);
  const int N = 512;
  const ExactDistribution d = mc_sample(*lm.ulam, N, 1000000, cfg.at("run").at("seed").get<std::uint64_t>());
  const ExactDistribution z = d.standardized(N * e.params.A, std::sqrt(static_cast<double>(N)));
  const auto probes = linear_grid(-12 * e.params.sigma(), 12 * e.params.sigma(), 2401);
  const double ks = kolmogorov_distance(as_query(z), continuous_query([&](double x) { return edgeworth_cdf(e, N, x); }),
                                        probes);
  return {ks <= 0.01, fmt::format("Kolmogorov distance {:.4g} (A = {:.3g}, sigma2 = {:.6f})", ks, e.params.A,
                                  e.params.sigma2)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds; 0 for none
  };
  const std::vector<Criterion> criteria{
      {"series-algebra", series_algebra, 5},
      {"eigen-jets", eigen_jets, 0},
      {"moment-coefficients", moment_oracle, 10},
      {"iid-reduction", iid_reduction, 0},
      {"structural-identities", structural_identities, 0},
      {"lattice-convergence", lattice_convergence, 60},
      {"classical-convergence", classical_convergence, 120},
      {"weak-local-convergence", weak_convergence, 0},
      {"lclt", lclt, 0},
      {"moderate-deviations", moderate_deviations, 0},
      {"diagnostics", diagnostics, 0},
      {"ulam-monte-carlo", ulam_monte_carlo, 120},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0 && secs >= c.budget) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget);
    }
    if (!o.pass) ++failures;
    fmt::print("{} {:2d} {}: {} [{:.2f} s]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail, secs);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
