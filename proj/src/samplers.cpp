#include <cmath>
#include <numeric>

#include "bq/errors.hpp"
#include "bq/functionals.hpp"

namespace bq::functionals {

namespace {

PointConfiguration uniform_points(const Box& box, long long count, std::mt19937_64& rng) {
  PointConfiguration cfg;
  cfg.dim = box.dim();
  cfg.coords.reserve(static_cast<std::size_t>(count * cfg.dim));
  for (long long i = 0; i < count; ++i) {
    for (int a = 0; a < cfg.dim; ++a) {
      std::uniform_real_distribution<double> u(0.0, box.side(a));
      cfg.coords.push_back(u(rng));
    }
  }
  return cfg;
}

long long poisson_count(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return dist(rng);
}

std::mt19937_64 stream_engine(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

PointConfiguration sample_poisson_config(const IntensityMeasure& mu, std::mt19937_64& rng) {
  return uniform_points(mu.box, poisson_count(mu.mass(), rng), rng);
}

PointConfiguration sample_fractional_config(const IntensityMeasure& mu, specfun::FractionalOrder alpha,
                                            std::mt19937_64& rng) {
  if (alpha.is_poisson()) return sample_poisson_config(mu, rng);
  const double tau = specfun::sample_mixing_tau(alpha, rng);
  return uniform_points(mu.box, poisson_count(tau * mu.mass(), rng), rng);
}

McEstimate mc_char(const TestFunction& f, const ConfigSampler& sampler, long long n_samples,
                   std::uint64_t seed) {
  if (n_samples < 100) throw DomainError("mc_char: need at least 100 samples");
  std::vector<cplx> values(static_cast<std::size_t>(n_samples));
  const long long base = n_samples / kMcStreams;
  const long long extra = n_samples % kMcStreams;
  long long offset = 0;
  for (int s = 0; s < kMcStreams; ++s) {
    auto rng = stream_engine(seed, s);
    const long long count = base + (s < extra ? 1 : 0);
    for (long long i = 0; i < count; ++i) {
      const double phase = sampler(rng).pair(f);
      values[static_cast<std::size_t>(offset + i)] = std::polar(1.0, phase);
    }
    offset += count;
  }
  const double n = static_cast<double>(n_samples);
  const cplx mean = std::accumulate(values.begin(), values.end(), cplx(0.0)) / n;
  double ss = 0.0;
  for (const auto& v : values) ss += std::norm(v - mean);
  return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

}  // namespace bq::functionals
