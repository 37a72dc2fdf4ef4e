#include "helicoid/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helicoid {

Grid make_grid(double s_max, std::size_t ns, double z0, double z1, std::size_t nz) {
  if (ns < 4 || nz < 4) throw std::invalid_argument("grid: need at least 4 points per axis");
  if (!(s_max > 0.0) || !(z1 > z0)) throw std::invalid_argument("grid: empty extent");
  Grid g;
  g.ns = ns;
  g.nz = nz;
  g.hs = s_max / static_cast<double>(ns - 1);
  g.hz = (z1 - z0) / static_cast<double>(nz - 1);
  g.z0 = z0;
  return g;
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField u(g);
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) u(i, j) = f(g.s(i), g.z(j));
  return u;
}

double ScalarField::at_ext(long i, long j) const {
  const long ns = static_cast<long>(g_.ns), nz = static_cast<long>(g_.nz);
  if (j < 0) j = -j;
  if (j > nz - 1) j = 2 * (nz - 1) - j;
  j = std::clamp(j, 0L, nz - 1);
  if (i < 0) return -at_ext(-i, j);
  if (i > ns - 1) {
    const double a = (*this)(ns - 1, j), b = (*this)(ns - 2, j);
    return a + static_cast<double>(i - (ns - 1)) * (a - b);
  }
  return (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

namespace {
// Catmull-Rom weights for fractional offset t in [0, 1)
void cr_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}
}  // namespace

double ScalarField::eval(double s, double z) const {
  const double x = s / g_.hs;
  const double y = (z - g_.z0) / g_.hz;
  const long i0 = static_cast<long>(std::floor(x));
  const long j0 = static_cast<long>(std::floor(y));
  double wx[4], wy[4];
  cr_weights(x - static_cast<double>(i0), wx);
  cr_weights(y - static_cast<double>(j0), wy);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wy[b] * at_ext(i0 - 1 + a, j0 - 1 + b);
    acc += wx[a] * row;
  }
  return acc;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (o.v_.size() != v_.size()) throw std::invalid_argument("field: grid mismatch");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  if (o.v_.size() != v_.size()) throw std::invalid_argument("field: grid mismatch");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& x : v_) x *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField b) { return b *= a; }

FieldJet grid_jet(const ScalarField& u, std::size_t i, std::size_t j) {
  const Grid& g = u.grid();
  const double hs = g.hs, hz = g.hz;
  const std::size_t jm = j == 0 ? 1 : j - 1;
  const std::size_t jp = j + 1 == g.nz ? g.nz - 2 : j + 1;

  auto dz = [&](std::size_t ii) { return (u(ii, jp) - u(ii, jm)) / (2 * hz); };
  FieldJet J;
  J.u = u(i, j);
  J.uz = dz(i);
  J.uzz = (u(i, jp) - 2 * u(i, j) + u(i, jm)) / (hz * hz);
  if (i == 0) {
    // odd extension: u(-h) = -u(h)
    J.us = u(1, j) / hs;
    J.uss = -2 * u(0, j) / (hs * hs);
    J.usz = dz(1) / hs;
  } else if (i + 1 == g.ns) {
    J.us = (3 * u(i, j) - 4 * u(i - 1, j) + u(i - 2, j)) / (2 * hs);
    J.uss = (2 * u(i, j) - 5 * u(i - 1, j) + 4 * u(i - 2, j) - u(i - 3, j)) / (hs * hs);
    J.usz = (3 * dz(i) - 4 * dz(i - 1) + dz(i - 2)) / (2 * hs);
  } else {
    J.us = (u(i + 1, j) - u(i - 1, j)) / (2 * hs);
    J.uss = (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) / (hs * hs);
    J.usz = (dz(i + 1) - dz(i - 1)) / (2 * hs);
  }
  return J;
}

}  // namespace helicoid
