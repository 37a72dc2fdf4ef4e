#include "helicoid/scalefn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace helicoid {

namespace {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGlX = {0.1488743389816312, 0.4333953941292472,
                                        0.6794095682990244, 0.8650633666889845,
                                        0.9739065285171717};
constexpr std::array<double, 5> kGlW = {0.2955242247147529, 0.2692667193099963,
                                        0.2190863625159820, 0.1494513491505806,
                                        0.0666713443086881};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGlX.size(); ++i) {
    acc += kGlW[i] * (f(mid - half * kGlX[i]) + f(mid + half * kGlX[i]));
  }
  return acc * half;
}

}  // namespace

ScaleFunction ScaleFunction::constant(double c, Pinching pinch, double sigma_min,
                                      double sigma_max) {
  if (!(c > 0.0)) throw std::invalid_argument("scale: constant c must be positive");
  if (!(sigma_min >= 0.0) || !(sigma_max > sigma_min))
    throw std::invalid_argument("scale: need 0 <= sigma_min < sigma_max");
  ScaleFunction sf;
  sf.kind_ = Kind::Constant;
  sf.c_ = c;
  sf.pinch_ = pinch;
  sf.sigma_min_ = sigma_min;
  sf.sigma_max_ = sigma_max;
  return sf;
}

ScaleFunction ScaleFunction::power(double c, double p, Pinching pinch, double sigma_min,
                                   double sigma_max) {
  if (!(c > 0.0)) throw std::invalid_argument("scale: power c must be positive");
  if (!(p >= 0.0)) throw std::invalid_argument("scale: power exponent p must be >= 0");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
    throw std::invalid_argument("scale: power kind needs 0 < sigma_min < sigma_max");
  ScaleFunction sf;
  sf.kind_ = Kind::Power;
  sf.c_ = c;
  sf.p_ = p;
  sf.pinch_ = pinch;
  sf.sigma_min_ = sigma_min;
  sf.sigma_max_ = sigma_max;
  return sf;
}

ScaleFunction ScaleFunction::table(std::vector<double> sigma, std::vector<double> lambda,
                                   Pinching pinch) {
  const std::size_t n = sigma.size();
  if (n < 4 || lambda.size() != n)
    throw std::invalid_argument("scale: table needs >= 4 matching samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambda[i] > 0.0)) throw std::invalid_argument("scale: table not strictly positive");
    if (i > 0 && !(sigma[i] > sigma[i - 1]))
      throw std::invalid_argument("scale: table sigma must be strictly increasing");
  }
  ScaleFunction sf;
  sf.kind_ = Kind::Table;
  sf.pinch_ = pinch;
  sf.sigma_min_ = sigma.front();
  sf.sigma_max_ = sigma.back();

  // natural cubic spline: solve for second derivatives m_i
  std::vector<double> m(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = sigma[i] - sigma[i - 1];
    const double h1 = sigma[i + 1] - sigma[i];
    const double a = h0 / 6.0;
    const double b = (h0 + h1) / 3.0;
    const double cc = h1 / 6.0;
    const double rhs =
        (lambda[i + 1] - lambda[i]) / h1 - (lambda[i] - lambda[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = d[i] - c[i] * m[i + 1];
    if (i == 1) break;
  }
  sf.xs_ = std::move(sigma);
  sf.ys_ = std::move(lambda);
  sf.m_ = std::move(m);
  return sf;
}

ScaleJet ScaleFunction::at(double sigma) const {
  switch (kind_) {
    case Kind::Constant:
      return {c_, 0.0, 0.0, 0.0};
    case Kind::Power: {
      const double p = p_;
      const double l = c_ * std::pow(sigma, p);
      return {l, p * l / sigma, p * (p - 1.0) * l / (sigma * sigma),
              p * (p - 1.0) * (p - 2.0) * l / (sigma * sigma * sigma)};
    }
    case Kind::Table: {
      const double x = std::clamp(sigma, xs_.front(), xs_.back());
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      std::size_t i = static_cast<std::size_t>(std::distance(xs_.begin(), it));
      i = std::clamp<std::size_t>(i, 1, xs_.size() - 1) - 1;
      const double h = xs_[i + 1] - xs_[i];
      const double a = (xs_[i + 1] - x) / h;
      const double b = (x - xs_[i]) / h;
      const double m0 = m_[i], m1 = m_[i + 1];
      ScaleJet j;
      j.l = a * ys_[i] + b * ys_[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
      j.l1 = (ys_[i + 1] - ys_[i]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 +
             (3.0 * b * b - 1.0) * h * m1 / 6.0;
      j.l2 = a * m0 + b * m1;
      j.l3 = (m1 - m0) / h;
      return j;
    }
  }
  return {};
}

ValidationReport validate_pinching(const ScaleFunction& sf, std::size_t n_samples) {
  if (n_samples < 100) throw std::invalid_argument("validate_pinching: need >= 100 samples");
  ValidationReport rep;
  rep.samples = n_samples;
  rep.positive = true;
  const auto& pc = sf.pinching();
  const double a = sf.sigma_min(), b = sf.sigma_max();
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double s = a + (b - a) * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const ScaleJet j = sf.at(s);
    if (!std::isfinite(j.l) || !std::isfinite(j.l1) || !std::isfinite(j.l2) ||
        !std::isfinite(j.l3))
      throw std::runtime_error("validate_pinching: derivative evaluation failed");
    if (!(j.l > 0.0)) {
      rep.positive = false;
      continue;
    }
    const double rhs = pc.c1 * std::pow(j.l, pc.epsilon);
    rep.worst_bound = std::max(rep.worst_bound, j.l / pc.c0);
    rep.worst_d1 = std::max(rep.worst_d1, std::abs(j.l1) / rhs);
    rep.worst_d2 = std::max(rep.worst_d2, std::abs(j.l2 * j.l) / rhs);
    rep.worst_d3 = std::max(rep.worst_d3, std::abs(j.l3 * j.l * j.l) / rhs);
  }
  // lambda < C0 is strict; derivative bounds are non-strict
  rep.pass = rep.positive && rep.worst_bound < 1.0 && rep.worst_d1 <= 1.0 + 1e-12 &&
             rep.worst_d2 <= 1.0 + 1e-12 && rep.worst_d3 <= 1.0 + 1e-12;
  return rep;
}

Reparametrization::Reparametrization(const ScaleFunction& sf, double quad_tol) : sf_(sf) {
  const double a = sf.sigma_min(), b = sf.sigma_max();
  const bool geometric = a > 0.0 && b / a > 10.0;
  auto inv = [&](double s) {
    const double l = sf_.lambda(s);
    if (!(l > 1e-300)) throw std::runtime_error("reparametrization: lambda vanishes in domain");
    const double v = 1.0 / l;
    if (!std::isfinite(v)) throw std::runtime_error("reparametrization: integrand overflow");
    return v;
  };
  for (std::size_t n = 64;; n *= 2) {
    nodes_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      nodes_[i] = geometric ? a * std::pow(b / a, t) : a + (b - a) * t;
    }
    nodes_.back() = b;
    cum_.assign(n + 1, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = nodes_[i], hi = nodes_[i + 1], mid = 0.5 * (lo + hi);
      const double whole = gauss_legendre(inv, lo, hi);
      const double split = gauss_legendre(inv, lo, mid) + gauss_legendre(inv, mid, hi);
      err += std::abs(whole - split);
      cum_[i + 1] = cum_[i] + split;
    }
    err_est_ = err;
    if (err <= quad_tol * std::max(1.0, cum_.back()) || n >= (1u << 20)) break;
  }
}

double Reparametrization::cell_integral(double lo, double hi) const {
  auto inv = [&](double s) { return 1.0 / sf_.lambda(s); };
  const double mid = 0.5 * (lo + hi);
  return gauss_legendre(inv, lo, mid) + gauss_legendre(inv, mid, hi);
}

double Reparametrization::z_of_sigma(double sigma) const {
  if (sigma < nodes_.front() || sigma > nodes_.back())
    throw std::out_of_range("z_of_sigma: sigma outside domain");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), sigma);
  std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  i = std::min(i, nodes_.size() - 1) - 1;
  if (sigma == nodes_[i]) return cum_[i];
  return cum_[i] + cell_integral(nodes_[i], sigma);
}

double Reparametrization::sigma_of_z(double z) const {
  const double zmax = cum_.back();
  if (z < -1e-12 * std::max(1.0, zmax) || z > zmax * (1.0 + 1e-12) + 1e-12)
    throw std::out_of_range("sigma_of_z: z outside domain");
  z = std::clamp(z, 0.0, zmax);
  auto it = std::upper_bound(cum_.begin(), cum_.end(), z);
  std::size_t i = static_cast<std::size_t>(std::distance(cum_.begin(), it));
  i = std::min(i, cum_.size() - 1) - 1;
  const double a = nodes_[i];
  double lo = a, hi = nodes_[i + 1];
  double s = lo + (hi - lo) * (z - cum_[i]) / std::max(cum_[i + 1] - cum_[i], 1e-300);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = cum_[i] + (s > a ? cell_integral(a, s) : 0.0) - z;
    if (f > 0.0) hi = s; else lo = s;
    double next = s - f * sf_.lambda(s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-17 * std::abs(s)) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

double DomainSpec::ell(double lambda) const {
  return std::max(1.0, std::pow(lambda, -tau * epsilon));
}

DomainSpec make_domain(const ScaleFunction& sf, double tau, double a_window) {
  if (!(tau > 0.0) || !(1.0 - 20.0 * tau > 0.0))
    throw std::invalid_argument("domain: tau must satisfy tau > 0 and 1 - 20 tau > 0");
  if (!(a_window > 0.0)) throw std::invalid_argument("domain: A_window must be positive");
  DomainSpec d;
  d.tau = tau;
  d.epsilon = sf.epsilon();
  d.eps0 = (1.0 - 2.0 * tau) * d.epsilon;
  d.eps1 = (1.0 - 10.0 * tau) * d.eps0;
  d.eps2 = (1.0 - 20.0 * tau) * d.eps0;
  d.a_window = a_window;
  return d;
}

namespace {

// distance from x0 in direction dir to the first point where pred fails, or
// +inf if it holds up to the boundary
template <class Eval>
double first_violation(Eval&& ok, double x0, double bound, std::size_t n_scan) {
  const double len = std::abs(bound - x0);
  if (len <= 0.0) return std::numeric_limits<double>::infinity();
  const double dir = bound > x0 ? 1.0 : -1.0;
  double prev = 0.0;
  for (std::size_t k = 1; k <= n_scan; ++k) {
    const double d = len * static_cast<double>(k) / static_cast<double>(n_scan);
    if (!ok(x0 + dir * d)) {
      double lo = prev, hi = d;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(x0 + dir * mid) ? lo : hi) = mid;
      }
      return lo;
    }
    prev = d;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

GoodInterval good_interval_radius(const Reparametrization& rep, double z0, std::size_t n_scan) {
  const double zmax = rep.z_max();
  if (z0 < 0.0 || z0 > zmax) throw std::out_of_range("good_interval_radius: z0 out of range");
  GoodInterval g;
  g.lambda0 = rep.lambda_at_z(z0);
  const double l0 = g.lambda0;
  auto ok_z = [&](double z) {
    const double l = rep.lambda_at_z(z);
    return std::abs(l / l0 - 1.0) <= 0.5;
  };
  const double left = first_violation(ok_z, z0, 0.0, n_scan);
  const double right = first_violation(ok_z, z0, zmax, n_scan);
  double r = std::min(left, right);
  if (!std::isfinite(r)) r = zmax;
  if (r <= 0.0) throw std::runtime_error("good_interval_radius: empty interval");
  g.radius_z = r;

  const auto& sf = rep.scale();
  const double s0 = rep.sigma_of_z(z0);
  auto ok_s = [&](double s) { return std::abs(sf.lambda(s) / l0 - 1.0) <= 0.5; };
  const double sl = first_violation(ok_s, s0, sf.sigma_min(), n_scan);
  const double sr = first_violation(ok_s, s0, sf.sigma_max(), n_scan);
  double rs = std::min(sl, sr);
  if (!std::isfinite(rs)) rs = sf.sigma_max() - sf.sigma_min();
  g.radius_sigma = rs;
  return g;
}

}  // namespace helicoid
