#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helicoid/striplin.hpp"

using namespace helicoid;
using std::numbers::pi;

namespace {

// w(0) = 0, Robin-compatible at ell, int_0^ell w tanh = 0
struct Manufactured {
  double ell, N, c;
  explicit Manufactured(double ell_, double N_) : ell(ell_), N(N_) {
    // c = -int a tanh / int tanh^2 by fine midpoint sums
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
  double u(double s, double z) const { return w(s) * std::cos(pi * z / N); }
  double E(double s, double z) const {
    // L (c tanh) = 0, so only a contributes to the s part
    const double sc = 1 / std::cosh(s);
    return (a2(s) + 2 * sc * sc * a(s) - (pi / N) * (pi / N) * w(s)) * std::cos(pi * z / N);
  }
};

double max_err(const ScalarField& u, const std::function<double(double, double)>& f) {
  const Grid& g = u.grid();
  double e = 0.0;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) e = std::max(e, std::abs(u(i, j) - f(g.s(i), g.z(j))));
  return e;
}

}  // namespace

TEST_CASE("discrete kernel") {
  auto k = make_strip_kernel(0.02, 500);
  CHECK(k.t[0] == 0.0);
  // close to tanh and to the continuous Robin coefficient
  CHECK(std::abs(k.t[250] - std::tanh(5.0)) < 1e-3);
  const double rc = 1 / (std::cosh(10.0) * std::cosh(10.0) * std::tanh(10.0));
  CHECK(std::abs(k.r - rc) < 1e-3);
  StripSolver S(0.02, 501);
  auto g = make_grid(10.0, 501, -2, 2, 9);
  auto T = ScalarField::sample(g, [](double, double) { return 0.0; });
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) T(i, j) = k.t[i];
  CHECK(S.apply(T).max_abs() < 1e-10);
}

TEST_CASE("zero data") {
  StripProblem p;
  p.ell = 8;
  p.N = 6;
  p.E = ScalarField(strip_grid(8, 6, 0.05, 0.05));
  auto sol = solve_strip(p);
  CHECK(sol.u.max_abs() == 0.0);
}

TEST_CASE("manufactured solution converges at second order") {
  const double ell = 6, N = 4;
  Manufactured m(ell, N);
  std::vector<double> errs;
  for (double h : {0.08, 0.04, 0.02}) {
    StripProblem p;
    p.ell = ell;
    p.N = N;
    const Grid g = strip_grid(ell, N, h, h);
    StripSolver S(g.hs, g.ns);
    p.E = S.orthogonalize(ScalarField::sample(g, [&](double s, double z) { return m.E(s, z); }));
    auto sol = solve_strip(p);
    CHECK(sol.orthogonality <= 1e-8);
    CHECK(sol.residual < 1e-9);
    // u_ex differs from the discrete gauge only by O(h^2)
    errs.push_back(max_err(sol.u, [&](double s, double z) { return m.u(s, z); }));
    // Dirichlet exact, Neumann and Robin to O(h^2)
    for (std::size_t j = 0; j < g.nz; ++j) CHECK(sol.u(0, j) == 0.0);
    double rob = 0.0;
    const std::size_t M = g.ns - 1;
    for (std::size_t j = 0; j < g.nz; ++j) {
      const double us = (3 * sol.u(M, j) - 4 * sol.u(M - 1, j) + sol.u(M - 2, j)) / (2 * g.hs);
      rob = std::max(rob, std::abs(us * std::tanh(ell) - sol.u(M, j) / std::pow(std::cosh(ell), 2)));
    }
    CHECK(rob < 20 * h * h);
  }
  MESSAGE("errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(std::abs(std::log2(errs[0] / errs[1]) - 2.0) < 0.2);
  CHECK(std::abs(std::log2(errs[1] / errs[2]) - 2.0) < 0.2);
}

TEST_CASE("non-orthogonal data is rejected") {
  const Grid g = strip_grid(5, 3, 0.05, 0.05);
  StripSolver S(g.hs, g.ns);
  auto E = ScalarField::sample(g, [](double s, double) { return std::exp(-s); });
  CHECK_THROWS_AS(S.solve(E), std::invalid_argument);
  CHECK_NOTHROW(S.solve(S.orthogonalize(E)));
}

TEST_CASE("gauge invariance and symmetry") {
  const Grid g = strip_grid(6, 10, 0.05, 0.05);
  StripSolver S(g.hs, g.ns);
  auto bump = [](double s, double z) {
    return std::abs(z) < 2 * pi ? s * std::exp(-s) * std::pow(std::cos(z / 4), 4) : 0.0;
  };
  auto E = S.orthogonalize(ScalarField::sample(g, bump));
  auto u1 = S.solve(E);
  // shift by a discrete-kernel multiple per z
  ScalarField E2 = E;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) E2(i, j) += S.kernel().t[i] * std::sin(g.z(j));
  E2 = S.orthogonalize(E2);
  auto u2 = S.solve(E2);
  CHECK((u1 - u2).max_abs() < 1e-10 * std::max(1.0, u1.max_abs()));
  double asym = 0.0;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) asym = std::max(asym, std::abs(u1(i, j) - u1(i, g.nz - 1 - j)));
  CHECK(asym < 1e-12);
}

TEST_CASE("limit solution and decay") {
  auto bump = [](double s, double z) {
    return std::abs(z) < 2 * pi ? std::sin(s) * std::exp(-0.5 * s) * std::pow(std::cos(z / 4), 4) : 0.0;
  };
  std::vector<double> consts;
  for (double ell : {5.0, 10.0}) {
    auto res = limit_solution(ell, bump, {8 * pi, 16 * pi, 32 * pi}, 0.05, 0.1);
    REQUIRE(res.diffs.size() == 2);
    MESSAGE("ell " << ell << " diffs " << res.diffs[0] << " " << res.diffs[1] << " L1 const " << res.l1_constant);
    CHECK(res.cauchy);
    CHECK(res.diffs[1] <= 0.5 * res.diffs[0]);
    auto dec = decay_certificate(res.sol.u, 0.0);
    CHECK(dec.monotone_pass);
    double Esup = 0.0;
    for (double x = 0; x <= ell; x += 0.01) Esup = std::max(Esup, std::abs(bump(x, 0.0)));
    consts.push_back(dec.weighted_norm / (ell * ell * ell * Esup));
    CHECK(res.l1_constant < 10.0);
  }
  MESSAGE("weighted constants " << consts[0] << " " << consts[1]);
  CHECK(consts[1] <= 4 * consts[0]);

  ScalarField zero(strip_grid(5, 8 * pi, 0.05, 0.1));
  auto dz = decay_certificate(zero, 0.0);
  CHECK(dz.monotone_pass);
  CHECK(dz.sbar[0] == 0.0);
  CHECK_THROWS(limit_solution(5, bump, {1, 2}, 0.05, 0.1));
}

TEST_CASE("kernel check") {
  std::vector<double> second;
  for (std::size_t ns : {51, 101, 201}) {
    auto r = kernel_check(10.0, 10.0, ns, 33);
    CHECK(r.sigma_min < 1e-8);
    CHECK(r.cosine_tanh >= 0.999);
    CHECK(r.mode1_min > 0.05);
    second.push_back(r.sigma_second);
  }
  MESSAGE("second singular values " << second[0] << " " << second[1] << " " << second[2]);
  CHECK(second[2] > 0.5 * second[0]);
  CHECK(second[2] > 1e-3);
}
