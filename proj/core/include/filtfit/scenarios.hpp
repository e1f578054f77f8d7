#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "filtfit/signal.hpp"

namespace filtfit {

/// Deterministic stream: mt19937_64 seeded through splitmix64, with explicit
/// uniform/Box-Muller draws so sequences do not depend on the standard
/// library's distribution implementations. Per-trial streams mix the trial
/// index into the seed (stream k uses splitmix64(seed + k * golden ratio)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng for_trial(std::uint64_t base_seed, std::uint64_t trial);

  double uniform();          // [0, 1)
  double normal();           // N(0, 1)
  Complex complex_normal();  // independent N(0,1) real and imaginary parts

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct Scenario {
  enum class Kind { RanSin, CohSin, ModSin };
  Kind kind = Kind::RanSin;
  int s = 1;
  int m = 0;  // polynomial degree, ModSin only
  long n = 100;
  double snr = 1.0;
  int trials = 1;
  std::uint64_t seed = 0;

  std::size_t subspace_dim() const;
  /// SNR = 1 / (sigma sqrt(n)).
  double sigma() const;
  std::string label() const;  // e.g. "ransin-4", "modsin-4-2"
};

Scenario::Kind scenario_kind_from_string(std::string_view name);
std::string_view to_string(Scenario::Kind kind);

/// x_t = sum_k a_k e^{i w_k t}, w_k uniform on [0, 2pi), a_k uniform on [0, 1];
/// evaluated on all of [-n, n] and normalized so ||[x]_0^n||_2 = 1.
ComplexSignal generate_ransin(int s, long n, Rng& rng);

/// s pairs of frequencies separated by 0.2 pi / n with equal in-pair amplitudes.
ComplexSignal generate_cohsin(int s, long n, Rng& rng);

/// Polynomially modulated sum, p_k of degree m with CN(0,1) coefficients.
ComplexSignal generate_modsin(int s, int m, long n, Rng& rng);

ComplexSignal generate(const Scenario& scenario, Rng& rng);

/// y_tau = x_tau + sigma zeta_tau with standard complex Gaussian zeta.
ComplexSignal add_noise(const ComplexSignal& x, double sigma, Rng& rng);

struct LossPair {
  double l2_loss = 0.0;
  double linf_fourier_loss = 0.0;
};

/// l2_loss = ||x - phi*y||_{n,2}; linf_fourier_loss = ||F_n[x - phi*y]||_inf.
/// Uses the direct-summation convolution.
LossPair metrics(const ComplexSignal& x, const ComplexSignal& filter, const ComplexSignal& y,
                 long n);

}  // namespace filtfit
