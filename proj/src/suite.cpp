#include "helicoid/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace helicoid {

namespace {

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(std::abs(b), scale); }

// F* - sigma(z0) e_z, with sigma(z) - sigma(z0) from one RK4 step of sigma' = lambda(sigma)
ImmersionField local_immersion(const Reparametrization& rep, double z0) {
  const double s0 = rep.sigma_of_z(z0);
  const ScaleFunction& sf = rep.scale();
  return {[s0, z0, &sf](double s, double z) {
            const double h = z - z0;
            const double k1 = sf.lambda(s0), k2 = sf.lambda(s0 + 0.5 * h * k1);
            const double k3 = sf.lambda(s0 + 0.5 * h * k2), k4 = sf.lambda(s0 + h * k3);
            const double ds = h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
            return Vec3(sf.lambda(s0 + ds) * std::sinh(s) * e_r(z) + Vec3(0, 0, ds));
          },
          1e-3};
}

// sqrt(g) g^{i.} from the oracle metric
Eigen::Vector2d flux_row(const ImmersionField& im, double s, double z, int row) {
  const auto G = numeric_geometry(im, s, z);
  const double d = G.det(), sq = std::sqrt(d);
  return row == 0 ? Eigen::Vector2d(sq * G.g_zz / d, -sq * G.g_sz / d)
                  : Eigen::Vector2d(-sq * G.g_sz / d, sq * G.g_ss / d);
}

struct Manufactured {
  double ell, N, c;
  Manufactured(double ell_, double N_) : ell(ell_), N(N_) {
    double num = 0, den = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
      const double s = (k + 0.5) * ell / n;
      num += a(s) * std::tanh(s);
      den += std::tanh(s) * std::tanh(s);
    }
    c = -num / den;
  }
  double a(double s) const { return s * (ell - s) * (ell - s) / (ell * ell * ell); }
  double a2(double s) const { return (6 * s - 4 * ell) / (ell * ell * ell); }
  double w(double s) const { return a(s) + c * std::tanh(s); }
  double u(double s, double z) const { return w(s) * std::cos(std::numbers::pi * z / N); }
  double E(double s, double z) const {
    const double sc = 1 / std::cosh(s), k = std::numbers::pi / N;
    return (a2(s) + 2 * sc * sc * a(s) - k * k * w(s)) * std::cos(k * z);
  }
};

}  // namespace

ConvergenceStudy strip_manufactured_study(double ell, double N, const std::vector<double>& hs) {
  const Manufactured m(ell, N);
  ConvergenceStudy out;
  for (double h : hs) {
    StripProblem p;
    p.ell = ell;
    p.N = N;
    const Grid g = strip_grid(ell, N, h, h);
    const StripSolver S(g.hs, g.ns);
    p.E = S.orthogonalize(ScalarField::sample(g, [&](double s, double z) { return m.E(s, z); }));
    const StripSolution sol = solve_strip(p);
    double e = 0.0;
    for (std::size_t i = 0; i < g.ns; ++i)
      for (std::size_t j = 0; j < g.nz; ++j) e = std::max(e, std::abs(sol.u(i, j) - m.u(g.s(i), g.z(j))));
    out.h.push_back(h);
    out.error.push_back(e);
    out.orthogonality = std::max(out.orthogonality, sol.orthogonality);
    out.residual = std::max(out.residual, sol.residual);
  }
  for (std::size_t k = 1; k < out.error.size(); ++k)
    out.order.push_back(std::log(out.error[k - 1] / out.error[k]) / std::log(out.h[k - 1] / out.h[k]));
  return out;
}

double gaussian_bump(double s, double z, double zc) {
  const double x = z - zc;
  return std::abs(x) < 2 * std::numbers::pi ? s * std::exp(-s) * std::pow(std::cos(x / 4), 4) : 0.0;
}

GeometrySuite verify_geometry(const Reparametrization& rep, std::size_t n, double s_max, const ClosedForm& closed) {
  const auto t0 = std::chrono::steady_clock::now();
  GeometrySuite out;
  const double Z = rep.z_max(), z0 = 0.05 * Z, z1 = 0.95 * Z;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double s = -s_max + 2.0 * s_max * a / (n - 1.0);
      const double z = z0 + (z1 - z0) * b / (n - 1.0);
      const ZJet zj = zjet(rep, z);
      const ImmersionField im = local_immersion(rep, z);
      const auto C = closed(zj, s, z);
      const auto N = numeric_geometry(im, s, z);
      const double l = zj.lam.l, gs = C.g_ss;
      const double as = l * std::sqrt(1.0 + std::abs(C.A_zz / l));
      const double hs = std::sqrt(C.normA2);
      out.metric = std::max({out.metric, rel(N.g_ss, C.g_ss, gs), rel(N.g_zz, C.g_zz, gs), rel(N.g_sz, C.g_sz, gs)});
      out.normal = std::max(out.normal, (N.nu - C.nu).norm());
      out.second_form =
          std::max({out.second_form, rel(N.A_ss, C.A_ss, as), rel(N.A_zz, C.A_zz, as), rel(N.A_sz, C.A_sz, as)});
      out.normA2 = std::max(out.normA2, rel(N.normA2, C.normA2, C.normA2));
      out.H = std::max(out.H, rel(N.H, C.H, hs));

      // lambda^2 cosh^2 Delta in divergence form on the oracle metric
      const double scale = l * l * std::cosh(s) * std::cosh(s) / std::sqrt(N.det());
      const double d = N.det();
      auto ddiv = [&](double h) -> Eigen::Vector2d {
        return (flux_row(im, s + h, z, 0) - flux_row(im, s - h, z, 0)) / (2 * h) +
               (flux_row(im, s, z + h, 1) - flux_row(im, s, z - h, 1)) / (2 * h);
      };
      const Eigen::Vector2d div = ddiv(1e-3);
      const double sq = std::sqrt(d);
      const OperatorCoefficients P = scaled_laplacian(zj, s);
      out.laplacian = std::max({out.laplacian, rel(P.c_ss, scale * sq * N.g_zz / d, 1.0),
                                rel(P.c_zz, scale * sq * N.g_ss / d, 1.0),
                                rel(P.c_sz, -2.0 * scale * sq * N.g_sz / d, 1.0), rel(P.c_s, scale * div(0), 1.0),
                                rel(P.c_z, scale * div(1), 1.0)});
      ++out.points;
    }
  out.worst = std::max({out.metric, out.normal, out.second_form, out.normA2, out.H, out.laplacian});
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace helicoid
