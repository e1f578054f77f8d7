#include "filtfit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace filtfit {

namespace {

constexpr int kRootSearchCap = 200;
constexpr double kRootSearchTol = 1e-12;

double pair_abs(const SpectralVector& u, std::size_t j) { return std::abs(u.pair(j)); }

}  // namespace

namespace {

double compute_big_c(std::size_t block_count, double q_tilde, double c_tilde) {
  const double m1 = static_cast<double>(block_count);
  return std::pow(m1, (q_tilde - 1.0) * (2.0 - q_tilde) / q_tilde) / c_tilde;
}

}  // namespace

ProximalSetup ProximalSetup::complex_l1(std::size_t complex_dim) {
  if (complex_dim == 0) throw std::invalid_argument("complex_l1 setup: empty dimension");
  ProximalSetup s;
  s.kind = SetupKind::ComplexL1;
  s.block_count = complex_dim;  // m + 1 = n + 1
  s.block_size = 2;
  const std::size_t m = complex_dim - 1;
  if (m <= 1) {
    s.q_tilde = 2.0;
    s.c_tilde = 1.0 / static_cast<double>(m + 1);
  } else {
    const double lg = std::log(static_cast<double>(m + 1));
    s.q_tilde = 1.0 + 1.0 / lg;
    s.c_tilde = 1.0 / (std::exp(1.0) * lg);
  }
  s.big_c_value = compute_big_c(s.block_count, s.q_tilde, s.c_tilde);
  return s;
}

ProximalSetup ProximalSetup::l2(std::size_t real_dim) {
  if (real_dim == 0 || real_dim % 2 != 0)
    throw std::invalid_argument("l2 setup: dimension must be even and positive");
  ProximalSetup s;
  s.kind = SetupKind::L2;
  s.block_count = 1;
  s.block_size = real_dim;
  s.q_tilde = 2.0;
  s.c_tilde = 1.0;
  s.big_c_value = 1.0;
  return s;
}

double ProximalSetup::dgf(const SpectralVector& u) const {
  if (u.dim() != dim()) throw std::invalid_argument("dgf: dimension mismatch");
  if (kind == SetupKind::L2) return 0.5 * dot(u, u);
  double s = 0.0;
  for (std::size_t j = 0; j < block_count; ++j) s += std::pow(pair_abs(u, j), q_tilde);
  if (s == 0.0) return 0.0;
  return 0.5 * big_c() * std::pow(s, 2.0 / q_tilde);
}

SpectralVector ProximalSetup::dgf_grad(const SpectralVector& u) const {
  if (u.dim() != dim()) throw std::invalid_argument("dgf_grad: dimension mismatch");
  if (kind == SetupKind::L2) return u;
  SpectralVector g(u.complex_dim());
  double s = 0.0;
  for (std::size_t j = 0; j < block_count; ++j) s += std::pow(pair_abs(u, j), q_tilde);
  if (s == 0.0) return g;
  const double cc = big_c() * std::pow(s, (2.0 - q_tilde) / q_tilde);
  for (std::size_t j = 0; j < block_count; ++j) {
    const double a = pair_abs(u, j);
    if (a == 0.0) continue;  // zero subgradient selection on zero blocks
    const double w = cc * std::pow(a, q_tilde - 2.0);
    g[2 * j] = w * u[2 * j];
    g[2 * j + 1] = w * u[2 * j + 1];
  }
  return g;
}

double omega_radius_bound(const ProximalSetup& setup, double R) {
  if (R < 0.0) throw std::invalid_argument("omega_radius_bound: R < 0");
  return std::sqrt(setup.big_c()) * R;
}

Penalty Penalty::scaled(double eta) const {
  Penalty p = *this;
  p.lambda *= eta;
  return p;
}

double Penalty::value(const SpectralVector& u) const {
  switch (type) {
    case Type::None:
    case Type::L1Ball:
    case Type::L2Ball:
      return 0.0;
    case Type::L1Pen: {
      const double n1 = complex_lp_norm(u, 1.0);
      return power == 1 ? lambda * n1 : lambda * n1 * n1;
    }
  }
  return 0.0;
}

bool Penalty::feasible(const SpectralVector& u, double tol) const {
  switch (type) {
    case Type::L1Ball:
      return complex_lp_norm(u, 1.0) <= radius + tol;
    case Type::L2Ball:
      return norm2(u) <= radius + tol;
    default:
      return true;
  }
}

ComplexVector prox_pen_q1(const ProximalSetup& setup, const ComplexVector& z, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("prox_pen_q1: negative threshold");
  const std::size_t m = z.size();
  ComplexVector out(m, Complex{0.0, 0.0});

  std::vector<double> theta(m, 0.0);
  double theta_max = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    theta[j] = std::max(std::abs(z[j]) - threshold, 0.0);
    theta_max = std::max(theta_max, theta[j]);
  }
  if (theta_max == 0.0) return out;

  const double q = setup.q_tilde;
  const double p = q / (q - 1.0);
  const double inv_c = 1.0 / setup.big_c();

  // ||theta||_p computed on ratios to keep powers in [0, 1].
  double nrm_p = 0.0;
  for (std::size_t j = 0; j < m; ++j) nrm_p += std::pow(theta[j] / theta_max, p);
  nrm_p = std::pow(nrm_p, 1.0 / p);  // ||theta||_p / theta_max, >= 1

  for (std::size_t j = 0; j < m; ++j) {
    if (theta[j] == 0.0) continue;
    const double ratio = theta[j] / theta_max;
    const double mag =
        inv_c * theta_max * std::pow(ratio / std::pow(nrm_p, 2.0 - q), p / q);
    if (mag == 0.0) continue;
    out[j] = -(z[j] / std::abs(z[j])) * mag;
  }
  return out;
}

ComplexVector prox_pen_q2(const ProximalSetup& setup, const ComplexVector& z, double lam) {
  if (lam < 0.0 || std::isnan(lam)) throw std::invalid_argument("prox_pen_q2: bad lambda");
  auto l1_of = [](const ComplexVector& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::abs(c);
    return s;
  };

  const double g0 = l1_of(prox_pen_q1(setup, z, 0.0));
  if (lam == 0.0 || g0 == 0.0) return prox_pen_q1(setup, z, 0.0);

  // t -> ||zeta*(t)||_1 is non-increasing; fixed point bracketed by [0, g0].
  double lo = 0.0, hi = g0;
  auto h = [&](double t) { return l1_of(prox_pen_q1(setup, z, 2.0 * lam * t)) - t; };
  if (h(lo) < 0.0 || h(hi) > kRootSearchTol)
    throw std::runtime_error("prox_pen_q2: root bracket lost (internal error)");
  for (int it = 0; it < kRootSearchCap && hi - lo > kRootSearchTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) >= 0.0 ? lo : hi) = mid;
  }
  return prox_pen_q1(setup, z, 2.0 * lam * 0.5 * (lo + hi));
}

ComplexVector project_l1_ball_complex(const ComplexVector& z, double R) {
  if (R < 0.0) throw std::invalid_argument("project_l1_ball_complex: R < 0");
  const std::size_t m = z.size();
  std::vector<double> a(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = std::abs(z[j]);
    total += a[j];
  }
  if (total <= R) return z;

  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    cumsum += sorted[k];
    const double cand = (cumsum - R) / static_cast<double>(k + 1);
    if (sorted[k] - cand > 0.0) tau = cand;
  }
  ComplexVector out(m, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < m; ++j) {
    if (a[j] > tau) out[j] = z[j] * ((a[j] - tau) / a[j]);
  }
  return out;
}

SpectralVector project_l2_ball(const SpectralVector& z, double R) {
  if (R < 0.0) throw std::invalid_argument("project_l2_ball: R < 0");
  const double n = norm2(z);
  if (n <= R) return z;
  SpectralVector out = z;
  scale(R / n, out);
  return out;
}

ComplexVector project_l2_ball(const ComplexVector& z, double R) {
  if (R < 0.0) throw std::invalid_argument("project_l2_ball: R < 0");
  double n = 0.0;
  for (const auto& c : z) n += std::norm(c);
  n = std::sqrt(n);
  if (n <= R) return z;
  ComplexVector out = z;
  for (auto& c : out) c *= R / n;
  return out;
}

ComplexVector prox_con_l1setup(const ProximalSetup& setup, const ComplexVector& z, double R) {
  if (R <= 0.0) throw std::invalid_argument("prox_con_l1setup: R <= 0");
  auto l1_of = [](const ComplexVector& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::abs(c);
    return s;
  };

  ComplexVector free_opt = prox_pen_q1(setup, z, 0.0);
  if (l1_of(free_opt) <= R) return free_opt;  // mu = 0 branch

  double zmax = 0.0;
  for (const auto& c : z) zmax = std::max(zmax, std::abs(c));
  double lo = 0.0, hi = zmax;  // at mu = zmax the solution is 0
  for (int it = 0; it < kRootSearchCap && hi - lo > kRootSearchTol * std::max(1.0, zmax); ++it) {
    const double mu = 0.5 * (lo + hi);
    (l1_of(prox_pen_q1(setup, z, mu)) > R ? lo : hi) = mu;
  }
  return prox_pen_q1(setup, z, 0.5 * (lo + hi));
}

SpectralVector prox_composite(const ProximalSetup& setup, const BregmanPoint& u,
                              const SpectralVector& g, const Penalty& penalty) {
  if (g.dim() != setup.dim() || u.point.dim() != setup.dim())
    throw std::invalid_argument("prox_composite: dimension mismatch");

  // argmin <g, xi> + D_u(xi) + Psi(xi) = argmin <g - omega'(u), xi> + omega(xi) + Psi(xi)
  SpectralVector zs = lincomb(1.0, g, -1.0, u.dgf_grad);
  ComplexVector z = vec_adjoint(zs);

  switch (penalty.type) {
    case Penalty::Type::None:
      return vec(prox_pen_q1(setup, z, 0.0));
    case Penalty::Type::L1Pen:
      return vec(penalty.power == 1 ? prox_pen_q1(setup, z, penalty.lambda)
                                    : prox_pen_q2(setup, z, penalty.lambda));
    case Penalty::Type::L1Ball: {
      if (penalty.radius == 0.0) return SpectralVector(setup.dim() / 2);
      if (setup.kind == SetupKind::L2) {
        ComplexVector target = z;
        for (auto& c : target) c = -c;  // l2 setup: -z = u - g
        return vec(project_l1_ball_complex(target, penalty.radius));
      }
      return vec(prox_con_l1setup(setup, z, penalty.radius));
    }
    case Penalty::Type::L2Ball: {
      if (setup.kind != SetupKind::L2)
        throw std::invalid_argument("prox_composite: l2 ball requires the l2 setup");
      ComplexVector target = z;
      for (auto& c : target) c = -c;
      return vec(project_l2_ball(target, penalty.radius));
    }
  }
  throw std::invalid_argument("prox_composite: unsupported penalty");
}

}  // namespace filtfit
