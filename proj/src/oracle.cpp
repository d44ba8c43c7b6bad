#include "edgeworth/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "edgeworth/error.hpp"
#include "edgeworth/jets.hpp"
#include "edgeworth/parallel.hpp"

namespace edgeworth {
namespace {

constexpr double kMaxCells = 1e7;
constexpr double kMaxValues = 1e6;
constexpr long long kChunk = 4096;

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

std::vector<double> running_cdf(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  Kahan acc;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc.add(pmf[i]);
    cdf[i] = acc.sum;
  }
  return cdf;
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

ExactDistribution empirical_from(std::vector<double> samples, long long N, std::string algorithm) {
  std::sort(samples.begin(), samples.end());
  ExactDistribution out;
  out.kind = ExactDistribution::Kind::Empirical;
  out.N = N;
  out.algorithm = std::move(algorithm);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    out.support.push_back(samples[i]);
    out.pmf.push_back(static_cast<double>(j - i) * w);
    i = j;
  }
  out.cdf = running_cdf(out.pmf);
  return out;
}

template <class Sampler>
std::vector<double> run_chunks(long long trials, std::uint64_t seed, int threads, Sampler&& sample_one) {
  if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be at least 1");
  std::vector<double> samples(static_cast<std::size_t>(trials));
  const auto chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        std::mt19937_64 gen(splitmix64(seed, c));
        const long long begin = static_cast<long long>(c) * kChunk;
        const long long end = std::min(trials, begin + kChunk);
        for (long long i = begin; i < end; ++i) samples[static_cast<std::size_t>(i)] = sample_one(gen);
      },
      threads);
  return samples;
}

}  // namespace

double ExactDistribution::cdf_at(double x) const {
  const auto it = std::upper_bound(support.begin(), support.end(), x);
  if (it == support.begin()) return 0.0;
  return cdf[static_cast<std::size_t>(it - support.begin()) - 1];
}

double ExactDistribution::cdf_before(double x) const {
  const auto it = std::lower_bound(support.begin(), support.end(), x);
  if (it == support.begin()) return 0.0;
  return cdf[static_cast<std::size_t>(it - support.begin()) - 1];
}

double ExactDistribution::expectation(const std::function<double(double)>& f) const {
  Kahan acc;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (pmf[i] != 0.0) acc.add(pmf[i] * f(support[i]));
  }
  return acc.sum;
}

ExactDistribution ExactDistribution::standardized(double center, double scale) const {
  ExactDistribution out = *this;
  for (auto& x : out.support) x = (x - center) / scale;
  return out;
}

double ExactDistribution::total_mass() const { return cdf.empty() ? 0.0 : cdf.back(); }

void ExactDistribution::write_csv(std::ostream& out) const {
  out << "value,pmf,cdf\n";
  for (std::size_t i = 0; i < support.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", support[i], pmf[i], cdf[i]);
  }
}

ExactDistribution dp_pmf(const MarkovModel& model, int N) {
  if (!model.lattice) throw Error(ErrorCode::InvalidConfig, "dp_pmf needs a lattice model");
  if (N < 0) throw Error(ErrorCode::InvalidConfig, "negative horizon");
  const int d = model.dim();
  const double span = model.lattice->span;
  const double offset = model.lattice->offset;

  std::vector<long long> step(static_cast<std::size_t>(d * d), 0);
  long long kmin = 0, kmax = 0;
  bool first = true;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (model.P(j, k) <= 0.0) continue;
      const long long v = std::llround((model.h(j, k) - offset) / span);
      step[static_cast<std::size_t>(j * d + k)] = v;
      kmin = first ? v : std::min(kmin, v);
      kmax = first ? v : std::max(kmax, v);
      first = false;
    }
  }
  const double width = static_cast<double>(N) * static_cast<double>(kmax - kmin) + 1.0;
  if (width * d > kMaxCells) {
    throw Error(ErrorCode::TableTooLarge,
                fmt::format("N = {} needs {:.0f} table cells (limit {:.0f})", N, width * d, kMaxCells));
  }
  const auto W = static_cast<std::size_t>(width);

  std::vector<std::vector<double>> prob(static_cast<std::size_t>(d), std::vector<double>(W, 0.0));
  for (int j = 0; j < d; ++j) prob[static_cast<std::size_t>(j)][0] = model.mu0(j);
  std::vector<std::vector<double>> next(static_cast<std::size_t>(d), std::vector<double>(W, 0.0));
  std::vector<std::vector<double>> comp(static_cast<std::size_t>(d), std::vector<double>(W, 0.0));

  for (int n = 0; n < N; ++n) {
    const auto used = static_cast<std::size_t>(static_cast<long long>(n) * (kmax - kmin)) + 1;
    for (int k = 0; k < d; ++k) {
      std::fill(next[static_cast<std::size_t>(k)].begin(), next[static_cast<std::size_t>(k)].end(), 0.0);
      std::fill(comp[static_cast<std::size_t>(k)].begin(), comp[static_cast<std::size_t>(k)].end(), 0.0);
    }
    for (int j = 0; j < d; ++j) {
      const auto& src = prob[static_cast<std::size_t>(j)];
      for (int k = 0; k < d; ++k) {
        const double p = model.P(j, k);
        if (p <= 0.0) continue;
        const auto shift = static_cast<std::size_t>(step[static_cast<std::size_t>(j * d + k)] - kmin);
        auto& dst = next[static_cast<std::size_t>(k)];
        auto& c = comp[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < used; ++i) {
          if (src[i] == 0.0) continue;
          const double y = src[i] * p - c[i + shift];
          const double t = dst[i + shift] + y;
          c[i + shift] = (t - dst[i + shift]) - y;
          dst[i + shift] = t;
        }
      }
    }
    std::swap(prob, next);
  }

  ExactDistribution out;
  out.kind = ExactDistribution::Kind::Lattice;
  out.N = N;
  out.support.resize(W);
  out.pmf.resize(W);
  for (std::size_t i = 0; i < W; ++i) {
    const long long K = static_cast<long long>(N) * kmin + static_cast<long long>(i);
    out.support[i] = static_cast<double>(N) * offset + span * static_cast<double>(K);
    Kahan acc;
    for (int j = 0; j < d; ++j) acc.add(prob[static_cast<std::size_t>(j)][i]);
    out.pmf[i] = acc.sum;
  }
  out.cdf = running_cdf(out.pmf);
  return out;
}

namespace {

using Atoms = std::vector<std::pair<double, double>>;

// Sorts by value and merges runs whose spread from the run's first value is within tol.
Atoms merge_atoms(Atoms atoms, double tol) {
  std::sort(atoms.begin(), atoms.end());
  Atoms out;
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t j = i;
    Kahan mass;
    while (j < atoms.size() && atoms[j].first - atoms[i].first <= tol) mass.add(atoms[j++].second);
    out.emplace_back(atoms[i].first, mass.sum);
    i = j;
  }
  return out;
}

double binomial(double n, double k) {
  double out = 1.0;
  for (int i = 1; i <= static_cast<int>(k); ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

ExactDistribution enum_distribution(const MarkovModel& model, int N, double merge_tol) {
  if (N < 0) throw Error(ErrorCode::InvalidConfig, "negative horizon");
  const int d = model.dim();
  std::vector<double> values;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if (model.P(j, k) > 0.0) values.push_back(model.h(j, k));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(),
                           [&](double a, double b) { return std::abs(a - b) <= merge_tol; }),
               values.end());
  const double u = static_cast<double>(values.size());
  const double estimate = binomial(N + u - 1.0, u - 1.0);
  if (estimate > kMaxValues) {
    throw Error(ErrorCode::TooManyValues,
                fmt::format("N = {} may produce {:.3g} distinct sums (limit {:.0f})", N, estimate, kMaxValues));
  }

  std::vector<Atoms> state(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    if (model.mu0(j) > 0.0) state[static_cast<std::size_t>(j)] = {{0.0, model.mu0(j)}};

  for (int n = 0; n < N; ++n) {
    std::vector<Atoms> next(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const double p = model.P(j, k);
        if (p <= 0.0) continue;
        for (const auto& [v, q] : state[static_cast<std::size_t>(j)]) {
          next[static_cast<std::size_t>(k)].emplace_back(v + model.h(j, k), q * p);
        }
      }
    }
    for (auto& atoms : next) {
      atoms = merge_atoms(std::move(atoms), merge_tol);
      if (static_cast<double>(atoms.size()) > kMaxValues) {
        throw Error(ErrorCode::TooManyValues, fmt::format("N = {} exceeds {:.0f} distinct sums", N, kMaxValues));
      }
    }
    state = std::move(next);
  }

  Atoms all;
  for (auto& atoms : state) all.insert(all.end(), atoms.begin(), atoms.end());
  all = merge_atoms(std::move(all), merge_tol);

  ExactDistribution out;
  out.kind = ExactDistribution::Kind::Enumerated;
  out.N = N;
  for (const auto& [v, q] : all) {
    out.support.push_back(v);
    out.pmf.push_back(q);
  }
  out.cdf = running_cdf(out.pmf);
  return out;
}

std::vector<double> exact_moments(const MarkovModel& model, int N, int kmax, double center) {
  const int d = model.dim();
  std::vector<Jet> step(static_cast<std::size_t>(d * d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      step[static_cast<std::size_t>(j * d + k)] = jet_exp_i(model.h(j, k) - center, model.P(j, k), kmax);

  std::vector<Jet> w(static_cast<std::size_t>(d), Jet(kmax));
  for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)][0] = model.mu0(j);
  for (int n = 0; n < N; ++n) {
    std::vector<Jet> next(static_cast<std::size_t>(d), Jet(kmax));
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        if (model.P(j, k) <= 0.0) continue;
        next[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(j)] * step[static_cast<std::size_t>(j * d + k)];
      }
    }
    w = std::move(next);
  }
  Jet total(kmax);
  for (const auto& wj : w) total += wj;

  std::vector<double> out;
  const Complex minus_i{0.0, -1.0};
  Complex phase = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    out.push_back((total.derivative_at_zero(k) * phase).real());
    phase *= minus_i;
  }
  return out;
}

ExactDistribution mc_sample(const MarkovModel& model, int N, long long trials, std::uint64_t seed, int threads) {
  const int d = model.dim();
  std::vector<double> cum_mu(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> cum_row(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
  std::vector<int> last_positive(static_cast<std::size_t>(d), 0);
  double acc = 0.0;
  int last_mu = 0;
  for (int j = 0; j < d; ++j) {
    acc += model.mu0(j);
    cum_mu[static_cast<std::size_t>(j)] = acc;
    if (model.mu0(j) > 0.0) last_mu = j;
  }
  for (int j = 0; j < d; ++j) {
    double row = 0.0;
    for (int k = 0; k < d; ++k) {
      row += model.P(j, k);
      cum_row[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = row;
      if (model.P(j, k) > 0.0) last_positive[static_cast<std::size_t>(j)] = k;
    }
  }
  auto draw = [](const std::vector<double>& cum, int fallback, double u) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return it == cum.end() ? fallback : std::min(static_cast<int>(it - cum.begin()), fallback);
  };

  auto samples = run_chunks(trials, seed, threads, [&](std::mt19937_64& gen) {
    int x = draw(cum_mu, last_mu, uniform01(gen));
    double s = 0.0;
    for (int n = 0; n < N; ++n) {
      const int y = draw(cum_row[static_cast<std::size_t>(x)], last_positive[static_cast<std::size_t>(x)], uniform01(gen));
      s += model.h(x, y);
      x = y;
    }
    return s;
  });
  return empirical_from(std::move(samples), N, "mt19937_64/splitmix64-chunk4096/markov");
}

ExactDistribution mc_sample(const UlamSpec& spec, int N, long long trials, std::uint64_t seed, int threads) {
  if (spec.density) throw Error(ErrorCode::OracleUnavailable, "map sampling supports Lebesgue starts only");
  if (spec.map.kind == "doubling") {
    // x = 0.b1 b2 b3 ... in binary; f^n x = 0.b_{n+1} b_{n+2} ..., read as a 53-bit window.
    const std::size_t words = static_cast<std::size_t>(N + 53) / 64 + 2;
    auto samples = run_chunks(trials, seed, threads, [&](std::mt19937_64& gen) {
      std::vector<std::uint64_t> bits(words);
      for (auto& w : bits) w = gen();
      double s = 0.0;
      for (int n = 0; n < N; ++n) {
        const std::size_t q = static_cast<std::size_t>(n) / 64;
        const unsigned off = static_cast<unsigned>(n) % 64;
        const std::uint64_t top = off == 0 ? bits[q] : (bits[q] << off) | (bits[q + 1] >> (64 - off));
        s += spec.g(static_cast<double>(top >> 11) * 0x1.0p-53);
      }
      return s;
    });
    return empirical_from(std::move(samples), N, "mt19937_64/splitmix64-chunk4096/doubling-exact-bits");
  }
  const ExpandingMap map = piecewise_linear_map(spec.map.branches);
  auto samples = run_chunks(trials, seed, threads, [&](std::mt19937_64& gen) {
    double x = uniform01(gen);
    double s = 0.0;
    for (int n = 0; n < N; ++n) {
      s += spec.g(x);
      x = std::clamp(map(x), 0.0, std::nextafter(1.0, 0.0));
    }
    return s;
  });
  return empirical_from(std::move(samples), N, "mt19937_64/splitmix64-chunk4096/map-float-iteration");
}

CdfQuery as_query(const ExactDistribution& dist) {
  const auto* p = &dist;
  return {[p](double x) { return p->cdf_at(x); }, [p](double x) { return p->cdf_before(x); }, dist.support};
}

CdfQuery continuous_query(std::function<double(double)> F) { return {F, F, {}}; }

double kolmogorov_distance(const CdfQuery& a, const CdfQuery& b, std::span<const double> probes) {
  std::vector<double> points(probes.begin(), probes.end());
  points.insert(points.end(), a.atoms.begin(), a.atoms.end());
  points.insert(points.end(), b.atoms.begin(), b.atoms.end());
  const bool a_jumps = !a.atoms.empty();
  const bool b_jumps = !b.atoms.empty();
  double worst = 0.0;
  for (double x : points) {
    const double fa = a.F(x);
    const double fb = b.F(x);
    worst = std::max(worst, std::abs(fa - fb));
    if (a_jumps || b_jumps) {
      const double la = a_jumps ? a.F_left(x) : fa;
      const double lb = b_jumps ? b.F_left(x) : fb;
      worst = std::max(worst, std::abs(la - lb));
    }
  }
  return worst;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 1) return {lo};
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace edgeworth
