#include "filtfit/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace filtfit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

ComplexSignal normalized_two_sided(ComplexVector values, long n) {
  // ||[x]_0^n||_2 = 1; the window [0, n] sits at offset n in the storage.
  double nrm = 0.0;
  for (long t = 0; t <= n; ++t) nrm += std::norm(values[static_cast<std::size_t>(n + t)]);
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (auto& v : values) v /= nrm;
  return ComplexSignal::two_sided(std::move(values), n);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

Rng Rng::for_trial(std::uint64_t base_seed, std::uint64_t trial) {
  return Rng(base_seed + trial * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

std::size_t Scenario::subspace_dim() const {
  switch (kind) {
    case Kind::RanSin: return static_cast<std::size_t>(s);
    case Kind::CohSin: return static_cast<std::size_t>(2 * s);
    case Kind::ModSin: return static_cast<std::size_t>(2 * s * (m + 1));
  }
  return 0;
}

double Scenario::sigma() const { return 1.0 / (snr * std::sqrt(static_cast<double>(n))); }

std::string Scenario::label() const {
  std::string base(to_string(kind));
  base += "-" + std::to_string(s);
  if (kind == Kind::ModSin) base += "-" + std::to_string(m);
  return base;
}

Scenario::Kind scenario_kind_from_string(std::string_view name) {
  if (name == "ransin") return Scenario::Kind::RanSin;
  if (name == "cohsin") return Scenario::Kind::CohSin;
  if (name == "modsin") return Scenario::Kind::ModSin;
  throw std::invalid_argument("unknown scenario kind: " + std::string(name));
}

std::string_view to_string(Scenario::Kind kind) {
  switch (kind) {
    case Scenario::Kind::RanSin: return "ransin";
    case Scenario::Kind::CohSin: return "cohsin";
    case Scenario::Kind::ModSin: return "modsin";
  }
  return "?";
}

ComplexSignal generate_ransin(int s, long n, Rng& rng) {
  if (s < 1) throw std::invalid_argument("generate_ransin: s must be >= 1");
  std::vector<double> omega(static_cast<std::size_t>(s)), amp(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) omega[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * rng.uniform();
  for (int k = 0; k < s; ++k) amp[static_cast<std::size_t>(k)] = rng.uniform();

  ComplexVector values(static_cast<std::size_t>(2 * n + 1));
  for (long t = -n; t <= n; ++t) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < s; ++k)
      acc += amp[static_cast<std::size_t>(k)] *
             std::polar(1.0, omega[static_cast<std::size_t>(k)] * static_cast<double>(t));
    values[static_cast<std::size_t>(t + n)] = acc;
  }
  return normalized_two_sided(std::move(values), n);
}

ComplexSignal generate_cohsin(int s, long n, Rng& rng) {
  if (s < 1) throw std::invalid_argument("generate_cohsin: s must be >= 1");
  const double gap = 0.2 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> omega(static_cast<std::size_t>(s)), amp(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) omega[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * rng.uniform();
  for (int k = 0; k < s; ++k) amp[static_cast<std::size_t>(k)] = rng.uniform();

  ComplexVector values(static_cast<std::size_t>(2 * n + 1));
  for (long t = -n; t <= n; ++t) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < s; ++k) {
      const double w = omega[static_cast<std::size_t>(k)];
      const double a = amp[static_cast<std::size_t>(k)];
      acc += a * (std::polar(1.0, w * static_cast<double>(t)) +
                  std::polar(1.0, (w + gap) * static_cast<double>(t)));
    }
    values[static_cast<std::size_t>(t + n)] = acc;
  }
  return normalized_two_sided(std::move(values), n);
}

ComplexSignal generate_modsin(int s, int m, long n, Rng& rng) {
  if (s < 1) throw std::invalid_argument("generate_modsin: s must be >= 1");
  if (m < 0) throw std::invalid_argument("generate_modsin: m must be >= 0");
  std::vector<double> omega(static_cast<std::size_t>(s));
  std::vector<ComplexVector> coeff(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) omega[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * rng.uniform();
  for (int k = 0; k < s; ++k) {
    coeff[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(m + 1));
    for (int d = 0; d <= m; ++d) coeff[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] = rng.complex_normal();
  }

  ComplexVector values(static_cast<std::size_t>(2 * n + 1));
  for (long t = -n; t <= n; ++t) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < s; ++k) {
      Complex poly{0.0, 0.0};
      double tp = 1.0;
      for (int d = 0; d <= m; ++d) {
        poly += coeff[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] * tp;
        tp *= static_cast<double>(t);
      }
      acc += poly * std::polar(1.0, omega[static_cast<std::size_t>(k)] * static_cast<double>(t));
    }
    values[static_cast<std::size_t>(t + n)] = acc;
  }
  return normalized_two_sided(std::move(values), n);
}

ComplexSignal generate(const Scenario& scenario, Rng& rng) {
  switch (scenario.kind) {
    case Scenario::Kind::RanSin: return generate_ransin(scenario.s, scenario.n, rng);
    case Scenario::Kind::CohSin: return generate_cohsin(scenario.s, scenario.n, rng);
    case Scenario::Kind::ModSin: return generate_modsin(scenario.s, scenario.m, scenario.n, rng);
  }
  throw std::invalid_argument("generate: unknown scenario");
}

ComplexSignal add_noise(const ComplexSignal& x, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma < 0");
  ComplexSignal y = x;
  if (sigma == 0.0) return y;
  for (auto& v : y.values) v += sigma * rng.complex_normal();
  return y;
}

LossPair metrics(const ComplexSignal& x, const ComplexSignal& filter, const ComplexSignal& y,
                 long n) {
  const ComplexVector est = convolve_oracle(filter, y, n);
  ComplexVector diff(static_cast<std::size_t>(n + 1));
  for (long t = 0; t <= n; ++t) diff[static_cast<std::size_t>(t)] = x.at(t) - est[static_cast<std::size_t>(t)];

  LossPair out;
  double acc = 0.0;
  for (const auto& d : diff) acc += std::norm(d);
  out.l2_loss = std::sqrt(acc / static_cast<double>(n + 1));

  const ComplexVector spec = dft(diff);
  for (const auto& c : spec) out.linf_fourier_loss = std::max(out.linf_fourier_loss, std::abs(c));
  return out;
}

}  // namespace filtfit
