#include "helicoid/op1d.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace helicoid {

namespace {

double sech2(double s) {
  const double c = std::cosh(s);
  return 1.0 / (c * c);
}

// cumulative integral of samples, fourth-order interior cells
std::vector<double> cumulative(const std::vector<double>& y, double h) {
  const std::size_t n = y.size() - 1;
  std::vector<double> c(y.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double cell;
    if (n < 3) {
      cell = 0.5 * h * (y[i] + y[i + 1]);
    } else if (i == 0) {
      cell = h * (5 * y[0] + 8 * y[1] - y[2]) / 12.0;
    } else if (i == n - 1) {
      cell = h * (-y[n - 2] + 8 * y[n - 1] + 5 * y[n]) / 12.0;
    } else {
      cell = h * (-y[i - 1] + 13 * y[i] + 13 * y[i + 1] - y[i + 2]) / 24.0;
    }
    c[i + 1] = c[i] + cell;
  }
  return c;
}

std::vector<double> derivative4(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw std::invalid_argument("profile: need at least 5 samples");
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  const std::size_t m = n - 1;
  d[m] = (25 * f[m] - 48 * f[m - 1] + 36 * f[m - 2] - 16 * f[m - 3] + 3 * f[m - 4]) / (12 * h);
  d[m - 1] = (3 * f[m] + 10 * f[m - 1] - 18 * f[m - 2] + 6 * f[m - 3] - f[m - 4]) / (12 * h);
  return d;
}

double robin_coeff(double ell) { return sech2(ell) / std::tanh(ell); }

}  // namespace

Profile1D Profile1D::sample(double ell, double h, const std::function<double(double)>& fn) {
  if (!(h > 0.0) || !(ell > 0.0)) throw std::invalid_argument("profile: bad extent");
  const auto n = static_cast<std::size_t>(std::llround(ell / h));
  Profile1D p;
  p.h = ell / static_cast<double>(n);
  p.f.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) p.f[i] = fn(p.s(i));
  p.dirichlet = p.f[0] == 0.0;
  return p;
}

Profile1D apply_Ltilde(const Profile1D& f) {
  if (f.ell() < 1.0 - 1e-12) throw std::invalid_argument("apply_Ltilde: ell < 1");
  if (f.h > 0.01 + 1e-15) throw std::invalid_argument("apply_Ltilde: grid too coarse");
  Profile1D out = f;
  const double h2 = f.h * f.h;
  out.f.assign(f.size(), 0.0);
  for (std::size_t i = 1; i + 1 < f.size(); ++i)
    out.f[i] = (f.f[i + 1] - 2 * f.f[i] + f.f[i - 1]) / h2 + 2 * sech2(f.s(i)) * f.f[i];
  return out;
}

Profile1D invert_Ltilde(const Profile1D& f) {
  const std::size_t n = f.size();
  if (n < 6) throw std::invalid_argument("invert_Ltilde: need at least 6 samples");
  for (double v : f.f)
    if (!std::isfinite(v)) throw std::invalid_argument("invert_Ltilde: non-finite input");
  const double h = f.h;

  std::vector<double> tf(n);
  for (std::size_t i = 0; i < n; ++i) tf[i] = std::tanh(f.s(i)) * f.f[i];
  const std::vector<double> inner = cumulative(tf, h);

  // Taylor data of f at 0 from the quartic through the first five samples
  Eigen::Matrix<double, 5, 5> V;
  Eigen::Matrix<double, 5, 1> y;
  for (int r = 0; r < 5; ++r) {
    for (int k = 0; k < 5; ++k) V(r, k) = std::pow(static_cast<double>(r), k);
    y(r) = f.f[static_cast<std::size_t>(r)];
  }
  Eigen::Matrix<double, 5, 1> a = V.partialPivLu().solve(y);
  const double f0 = a(0), f1 = a(1) / h, f2 = a(2) / (h * h), f3 = a(3) / (h * h * h);

  constexpr double kTaylor = 0.02;
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = f.s(i);
    if (s < kTaylor) {
      ratio[i] = f0 / 2 + f1 * s / 3 + (f2 / 4 + f0 / 4) * s * s +
                 (f3 / 5 + 7 * f1 / 45) * s * s * s;
    } else {
      const double t = std::tanh(s);
      ratio[i] = inner[i] / (t * t);
    }
  }
  const std::vector<double> outer = cumulative(ratio, h);
  Profile1D u = f;
  for (std::size_t i = 0; i < n; ++i) u.f[i] = std::tanh(f.s(i)) * outer[i];
  u.f[0] = 0.0;
  u.dirichlet = true;
  return u;
}

Profile1D u0_profile(double ell, double h) {
  if (ell < 1.0) throw std::invalid_argument("u0_profile: ell < 1");
  return invert_Ltilde(Profile1D::sample(ell, h, [](double s) { return std::tanh(s); }));
}

double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size() - 1;
  if (n < 2) return n == 1 ? 0.5 * h * (y[0] + y[1]) : 0.0;
  std::size_t m = n % 2 == 0 ? n : n - 3;
  double acc = 0.0;
  for (std::size_t i = 0; i + 2 <= m; i += 2) acc += h * (y[i] + 4 * y[i + 1] + y[i + 2]) / 3.0;
  if (m != n) acc += 3.0 * h * (y[m] + 3 * y[m + 1] + 3 * y[m + 2] + y[m + 3]) / 8.0;
  return acc;
}

double weighted_inner(const Profile1D& f, const Profile1D& g) {
  if (f.size() != g.size()) throw std::invalid_argument("weighted_inner: size mismatch");
  std::vector<double> y(f.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.f[i] * g.f[i] * sech2(f.s(i));
  return simpson(y, f.h);
}

double energy_form(const Profile1D& f, const Profile1D& g) {
  if (f.size() != g.size()) throw std::invalid_argument("energy_form: size mismatch");
  const auto df = derivative4(f.f, f.h), dg = derivative4(g.f, g.h);
  std::vector<double> y(f.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = df[i] * dg[i];
  return simpson(y, f.h) - 2.0 * weighted_inner(f, g) -
         f.f.back() * g.f.back() * robin_coeff(f.ell());
}

EnergyReport energy(const Profile1D& f) {
  EnergyReport r;
  r.e_ell = energy_form(f, f);
  r.l2_weighted = weighted_inner(f, f);
  const Profile1D t = Profile1D::sample(f.ell(), f.h, [](double s) { return std::tanh(s); });
  r.alpha = weighted_inner(f, t) / weighted_inner(t, t);
  return r;
}

Decomposition decompose(const Profile1D& f) {
  Decomposition d;
  d.alpha = energy(f).alpha;
  d.g = f;
  for (std::size_t i = 0; i < f.size(); ++i) d.g.f[i] -= d.alpha * std::tanh(f.s(i));
  return d;
}

double poincare_beta(double ell, std::size_t n_elements) {
  if (!(ell >= 2.0 && ell <= 50.0)) throw std::invalid_argument("poincare_beta: ell outside [2, 50]");
  const std::size_t n = n_elements;
  const double h = ell / static_cast<double>(n);
  // unknowns at nodes 1..n
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (std::size_t e = 0; e < n; ++e) {
    const double a = static_cast<double>(e) * h;
    double m[2][2] = {{0, 0}, {0, 0}}, cv[2] = {0, 0};
    for (int q = 0; q < 3; ++q) {
      const double xi = 0.5 * (gx[q] + 1.0);
      const double x = a + xi * h, w = 0.5 * gw[q] * h * sech2(a + xi * h);
      const double phi[2] = {1.0 - xi, xi};
      for (int r = 0; r < 2; ++r) {
        cv[r] += w * phi[r] * std::tanh(x);
        for (int k = 0; k < 2; ++k) m[r][k] += w * phi[r] * phi[k];
      }
    }
    const long idx[2] = {static_cast<long>(e) - 1, static_cast<long>(e)};
    for (int r = 0; r < 2; ++r) {
      if (idx[r] < 0) continue;
      c(idx[r]) += cv[r];
      for (int k = 0; k < 2; ++k) {
        if (idx[k] < 0) continue;
        const double kk = (r == k ? 1.0 : -1.0) / h;
        Q(idx[r], idx[k]) += kk - 2.0 * m[r][k];
        M(idx[r], idx[k]) += m[r][k];
      }
    }
  }
  Q(n - 1, n - 1) -= robin_coeff(ell);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd Z = Eigen::MatrixXd(qr.householderQ()).rightCols(n - 1);
  const Eigen::MatrixXd Qz = Z.transpose() * Q * Z;
  const Eigen::MatrixXd Mz = Z.transpose() * M * Z;
  if (Eigen::LLT<Eigen::MatrixXd>(Qz).info() != Eigen::Success)
    throw std::runtime_error("poincare_beta: energy form not positive on the constrained space");
  // the weighted mass degenerates like e^{-2 ell}; solve M x = mu Q x instead
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Mz, Qz, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("poincare_beta: energy form not positive on the constrained space");
  const double mu = es.eigenvalues().maxCoeff();
  if (!(mu > 0.0)) throw std::runtime_error("poincare_beta: nonpositive beta");
  return 1.0 / mu;
}

void write_u0_csv(const std::string& path, const Profile1D& u0) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_u0_csv: cannot open " + path);
  os << "s,u0\n" << std::setprecision(12);
  for (std::size_t i = 0; i < u0.size(); ++i) os << u0.s(i) << ',' << u0.f[i] << '\n';
}

void write_beta_csv(const std::string& path, const std::vector<double>& ells) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_beta_csv: cannot open " + path);
  os << "ell,beta\n" << std::setprecision(12);
  for (double l : ells) os << l << ',' << poincare_beta(l) << '\n';
}

}  // namespace helicoid
