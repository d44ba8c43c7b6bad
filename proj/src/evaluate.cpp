#include "edgeworth/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "edgeworth/error.hpp"
#include "edgeworth/gaussian.hpp"
#include "edgeworth/parallel.hpp"

namespace edgeworth {
namespace {

constexpr double kCompactBumpMass = 0.44399381616807943;  // int_{-1}^{1} exp(-1/(1-x^2)) dx
constexpr double kGaussianReach = 12.0;

double sum_series(const std::vector<Polynomial>& polys, double z, double root_n, int first) {
  double acc = 0.0;
  double scale = 1.0;
  for (int p = 0; p < static_cast<int>(polys.size()); ++p) {
    if (p >= first) acc += polys[static_cast<std::size_t>(p)].eval(z) * scale;
    scale /= root_n;
  }
  return acc;
}

}  // namespace

TestFunction TestFunction::gaussian_bump(double center, double width) {
  return {Kind::GaussianBump, center, width, 0};
}

TestFunction TestFunction::compact_bump(double center, double width) {
  return {Kind::CompactBump, center, width, 0};
}

TestFunction TestFunction::hermite_damped(int degree, double center, double width) {
  return {Kind::HermiteDamped, center, width, degree};
}

double TestFunction::operator()(double x) const {
  const double u = (x - center) / width;
  switch (kind) {
    case Kind::GaussianBump:
      return std::exp(-0.5 * u * u);
    case Kind::CompactBump:
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    case Kind::HermiteDamped:
      return hermite_he(degree).eval(u) * std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double TestFunction::support_lo() const {
  return kind == Kind::CompactBump ? center - width : center - (kGaussianReach + std::sqrt(2.0 * degree)) * width;
}

double TestFunction::support_hi() const {
  return kind == Kind::CompactBump ? center + width : center + (kGaussianReach + std::sqrt(2.0 * degree)) * width;
}

double TestFunction::integral() const {
  switch (kind) {
    case Kind::GaussianBump:
      return width * std::sqrt(2.0 * std::numbers::pi);
    case Kind::CompactBump:
      return width * kCompactBumpMass;
    case Kind::HermiteDamped:
      return degree == 0 ? width * std::sqrt(2.0 * std::numbers::pi) : 0.0;
  }
  return 0.0;
}

std::optional<Complex> TestFunction::fourier(double t) const {
  if (kind == Kind::CompactBump) return std::nullopt;
  const double wt = width * t;
  Complex value = width * std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * wt * wt);
  if (kind == Kind::HermiteDamped) value *= std::pow(Complex{0.0, -wt}, degree);
  return value * std::polar(1.0, -t * center);
}

std::string TestFunction::name() const {
  switch (kind) {
    case Kind::GaussianBump: return "gaussian-bump";
    case Kind::CompactBump: return "compact-bump";
    case Kind::HermiteDamped: return "hermite-damped";
  }
  return "unknown";
}

double simpson(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  constexpr long long kMaxPanels = 1LL << 20;
  long long panels = 64;
  const double f_ends = f(lo) + f(hi);
  // Running sums of interior points with odd and even index.
  double even_sum = 0.0;
  double odd_sum = 0.0;
  {
    const double h = (hi - lo) / panels;
    for (long long i = 1; i < panels; ++i) (i % 2 ? odd_sum : even_sum) += f(lo + h * static_cast<double>(i));
  }
  double prev = (hi - lo) / panels / 3.0 * (f_ends + 4.0 * odd_sum + 2.0 * even_sum);
  while (panels < kMaxPanels) {
    panels *= 2;
    const double h = (hi - lo) / panels;
    even_sum += odd_sum;
    odd_sum = 0.0;
    for (long long i = 1; i < panels; i += 2) odd_sum += f(lo + h * static_cast<double>(i));
    const double cur = h / 3.0 * (f_ends + 4.0 * odd_sum + 2.0 * even_sum);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              fmt::format("Simpson rule on [{}, {}] did not reach {} with {} panels", lo, hi, tol, kMaxPanels));
}

double edgeworth_cdf(const ExpansionSet& exp, long long N, double z) {
  const double sigma2 = exp.params.sigma2;
  const double root_n = std::sqrt(static_cast<double>(N));
  return normal_cdf(z, sigma2) + sum_series(exp.edge_p, z, root_n, 1) * normal_pdf(z, sigma2);
}

double lattice_pmf(const ExpansionSet& exp, long long N, double x) {
  const double span = exp.lattice ? exp.lattice->span : 1.0;
  const double root_n = std::sqrt(static_cast<double>(N));
  const double z = (x - static_cast<double>(N) * exp.params.A) / root_n;
  return span / root_n * normal_pdf(z, exp.params.sigma2) * sum_series(exp.edge_r, z, root_n, 0);
}

double weak_global_from(const std::vector<Polynomial>& polys, double sigma2, const TestFunction& f, long long N) {
  const double root_n = std::sqrt(static_cast<double>(N));
  // Substituting y = z sqrt(N).
  auto integrand = [&](double y) {
    const double z = y / root_n;
    return sum_series(polys, z, root_n, 0) * normal_pdf(z, sigma2) * f(y) / root_n;
  };
  return simpson(integrand, f.support_lo(), f.support_hi());
}

double weak_global(const ExpansionSet& exp, const TestFunction& f, long long N) {
  return weak_global_from(exp.edge_r, exp.params.sigma2, f, N);
}

double weak_local(const ExpansionSet& exp, const TestFunction& f, long long N) {
  double acc = 0.0;
  double scale = 1.0;
  for (const auto& P : exp.weak_local) {
    acc += scale * simpson([&](double z) { return P.eval(z) * f(z); }, f.support_lo(), f.support_hi());
    scale /= static_cast<double>(N);
  }
  return acc / (2.0 * std::numbers::pi);
}

double averaged(const ExpansionSet& exp, const TestFunction& f, long long N, double x) {
  const double root_n = std::sqrt(static_cast<double>(N));
  const double sigma2 = exp.params.sigma2;
  auto integrand = [&](double y) {
    const double z = x + y / root_n;
    return sum_series(exp.edge_p, z, root_n, 1) * normal_pdf(z, sigma2) * f(y);
  };
  return simpson(integrand, f.support_lo(), f.support_hi());
}

double averaged_exact(const ExpansionSet& exp, const ExactDistribution& dist, const TestFunction& f, double x) {
  const double root_n = std::sqrt(static_cast<double>(dist.N));
  const double center = static_cast<double>(dist.N) * exp.params.A;
  // int 1{x + y/sqrt N >= z_i} f(y) dy for each atom z_i of the standardized law.
  auto upper_mass = [&](double a) {
    const double lo = f.support_lo();
    const double hi = f.support_hi();
    if (a <= lo) return f.integral();
    if (a >= hi) return 0.0;
    const double u = (a - f.center) / f.width;
    switch (f.kind) {
      case TestFunction::Kind::GaussianBump:
        return f.width * std::sqrt(2.0 * std::numbers::pi) * normal_cdf(-u);
      case TestFunction::Kind::HermiteDamped:
        if (f.degree == 0) return f.width * std::sqrt(2.0 * std::numbers::pi) * normal_cdf(-u);
        return f.width * hermite_he(f.degree - 1).eval(u) * std::exp(-0.5 * u * u);
      case TestFunction::Kind::CompactBump:
        return simpson(f, a, hi, 1e-13);
    }
    return 0.0;
  };
  double exact = 0.0;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    if (dist.pmf[i] == 0.0) continue;
    const double z = (dist.support[i] - center) / root_n;
    exact += dist.pmf[i] * upper_mass(root_n * (z - x));
  }
  const double sigma2 = exp.params.sigma2;
  const double gauss =
      simpson([&](double y) { return normal_cdf(x + y / root_n, sigma2) * f(y); }, f.support_lo(), f.support_hi());
  return exact - gauss;
}

std::vector<double> averaged_probes(const ExpansionSet& exp) {
  const double s = exp.params.sigma();
  return {-2.0 * s, -s, 0.0, s, 2.0 * s};
}

double lclt_estimate(const ExpansionSet& exp, double u, long long N) {
  const double sigma2 = exp.params.sigma2;
  return std::exp(-u * u / (2.0 * static_cast<double>(N) * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

double lclt_window(const ExpansionSet& exp, double u, long long N, double eps) {
  return 2.0 * eps * lclt_estimate(exp, u, N) / std::sqrt(static_cast<double>(N));
}

double moddev_tail_prediction(double c, long long N) {
  const double n = static_cast<double>(N);
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * c) / std::sqrt(std::pow(n, c) * std::log(n));
}

ExactDistribution exact_distribution(const MarkovModel& model, int N) {
  return model.lattice ? dp_pmf(model, N) : enum_distribution(model, N);
}

ModDevResult moddev_ratio(const ExpansionSet& exp, const MarkovModel& model, double c, long long N) {
  if (!(c > 0.0) || (exp.r > 0 && !(c < exp.r))) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("c = {} must lie in (0, r) for r = {}", c, exp.r));
  }
  ExactDistribution dist;
  try {
    dist = exact_distribution(model, static_cast<int>(N));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TableTooLarge || e.code() == ErrorCode::TooManyValues) {
      throw Error(ErrorCode::OracleUnavailable, fmt::format("no exact oracle at N = {}: {}", N, e.what()));
    }
    throw;
  }
  const double sigma2 = exp.params.sigma2;
  const double n = static_cast<double>(N);
  ModDevResult out;
  out.x = std::max(1.0, std::sqrt(c * sigma2 * std::log(n)));
  const double threshold = n * exp.params.A + out.x * std::sqrt(n);
  out.exact_tail = 1.0 - dist.cdf_at(threshold);
  out.normal_tail = normal_sf(out.x, sigma2);
  out.ratio = out.exact_tail / out.normal_tail;
  out.predicted_tail = moddev_tail_prediction(c, N);
  return out;
}

std::string oracle_kind_name(OracleKind kind) {
  switch (kind) {
    case OracleKind::Classical: return "classical";
    case OracleKind::Lattice: return "lattice";
    case OracleKind::WeakLocal: return "weak-local";
  }
  return "unknown";
}

double classical_error(const ExpansionSet& exp, const ExactDistribution& dist) {
  const double root_n = std::sqrt(static_cast<double>(dist.N));
  const ExactDistribution z = dist.standardized(static_cast<double>(dist.N) * exp.params.A, root_n);
  const long long N = dist.N;
  const CdfQuery expansion = continuous_query([&](double x) { return edgeworth_cdf(exp, N, x); });
  const double reach = kGaussianReach * exp.params.sigma();
  const auto probes = linear_grid(-reach, reach, 2401);
  return kolmogorov_distance(as_query(z), expansion, probes);
}

double lattice_error(const ExpansionSet& exp, const ExactDistribution& dist) {
  const double root_n = std::sqrt(static_cast<double>(dist.N));
  double worst = 0.0;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    worst = std::max(worst, root_n * std::abs(dist.pmf[i] - lattice_pmf(exp, dist.N, dist.support[i])));
  }
  return worst;
}

double weak_local_error(const ExpansionSet& exp, const ExactDistribution& dist, const TestFunction& f) {
  const double root_n = std::sqrt(static_cast<double>(dist.N));
  const double shift = static_cast<double>(dist.N) * exp.params.A;
  const double exact = root_n * dist.expectation([&](double s) { return f(s - shift); });
  return std::abs(exact - weak_local(exp, f, dist.N));
}

ConvergenceReport convergence_study(const ExpansionSet& exp, const MarkovModel& model, OracleKind kind,
                                    const std::vector<long long>& N_list, const TestFunction& f, int threads) {
  ConvergenceReport rep;
  rep.r = exp.r;
  rep.kind = kind;
  rep.N_list = N_list;
  rep.raw_error.assign(N_list.size(), 0.0);
  parallel_for(
      N_list.size(),
      [&](std::size_t i) {
        const ExactDistribution dist = exact_distribution(model, static_cast<int>(N_list[i]));
        switch (kind) {
          case OracleKind::Classical: rep.raw_error[i] = classical_error(exp, dist); break;
          case OracleKind::Lattice: rep.raw_error[i] = lattice_error(exp, dist); break;
          case OracleKind::WeakLocal: rep.raw_error[i] = weak_local_error(exp, dist, f); break;
        }
      },
      threads);
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    rep.scaled_error.push_back(rep.raw_error[i] * std::pow(static_cast<double>(N_list[i]), 0.5 * exp.r));
  }
  rep.monotone = !rep.scaled_error.empty();
  for (std::size_t i = 1; i < rep.scaled_error.size(); ++i) {
    if (!(rep.scaled_error[i] < rep.scaled_error[i - 1])) rep.monotone = false;
  }
  rep.endpoint = rep.scaled_error.size() >= 2 && rep.scaled_error.back() < rep.scaled_error.front();
  if (N_list.size() >= 2) {
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(N_list.size());
    for (std::size_t i = 0; i < N_list.size(); ++i) {
      mx += std::log(static_cast<double>(N_list[i])) / n;
      my += std::log(rep.raw_error[i]) / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
      const double dx = std::log(static_cast<double>(N_list[i])) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(rep.raw_error[i]) - my);
    }
    rep.fitted_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

}  // namespace edgeworth
