#include "helicoid/striplin.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace helicoid {

namespace {

double sech2(double s) {
  const double c = std::cosh(s);
  return 1.0 / (c * c);
}

// in-place DCT-I along contiguous rows of length n
void dct_rows(double* data, int rows, int n) {
  fftw_plan p = fftw_plan_many_r2r(1, &n, rows, data, nullptr, 1, n, data, nullptr, 1, n,
                                   std::vector<fftw_r2r_kind>{FFTW_REDFT00}.data(),
                                   FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
}

}  // namespace

StripKernel make_strip_kernel(double h, std::size_t M) {
  if (M < 4 || !(h > 0.0)) throw std::invalid_argument("strip kernel: grid too coarse");
  StripKernel k;
  k.h = h;
  k.M = M;
  std::vector<double> t(M + 2);
  t[0] = 0.0;
  t[1] = std::tanh(h);
  for (std::size_t i = 1; i <= M; ++i)
    t[i + 1] = (2.0 - 2.0 * h * h * sech2(static_cast<double>(i) * h)) * t[i] - t[i - 1];
  k.r = (t[M + 1] - t[M - 1]) / (2.0 * h * t[M]);
  t.resize(M + 1);
  k.t = t;
  k.y.resize(M + 1);
  k.yt = 0.0;
  for (std::size_t i = 0; i <= M; ++i) {
    k.y[i] = (i == M ? 0.5 : 1.0) * h * t[i];
    k.yt += k.y[i] * t[i];
  }
  return k;
}

StripSolver::StripSolver(double hs, std::size_t ns) : ns_(ns), k_(make_strip_kernel(hs, ns - 1)) {
  const std::size_t M = ns - 1;
  pot_.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) pot_[i] = 2.0 * sech2(static_cast<double>(i) * hs);
  const double ih2 = 1.0 / (hs * hs);
  // bordered k = 0 system on unknowns u_1..u_M plus a multiplier
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(M + 1), static_cast<long>(M + 1));
  for (std::size_t i = 1; i <= M; ++i) {
    const long r = static_cast<long>(i - 1);
    if (i < M) {
      A(r, r) = -2.0 * ih2 + pot_[i];
      if (i > 1) A(r, r - 1) = ih2;
      A(r, r + 1) = ih2;
    } else {
      A(r, r) = (-2.0 + 2.0 * hs * k_.r) * ih2 + pot_[i];
      A(r, r - 1) = 2.0 * ih2;
    }
    A(r, static_cast<long>(M)) = k_.y[i];
    A(static_cast<long>(M), r) = k_.y[i];
  }
  lu0_.compute(A);
}

void StripSolver::check_grid(const Grid& g) const {
  if (g.ns != ns_ || std::abs(g.hs - k_.h) > 1e-12 * k_.h)
    throw std::invalid_argument("strip solver: s-grid mismatch");
  if (g.nz < 2) throw std::invalid_argument("strip solver: need at least 2 z nodes");
}

std::vector<double> StripSolver::kernel_coefficients(const ScalarField& E) const {
  const Grid& g = E.grid();
  check_grid(g);
  std::vector<double> a(g.nz, 0.0);
  for (std::size_t i = 1; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) a[j] += k_.y[i] * E(i, j);
  for (double& v : a) v /= k_.yt;
  return a;
}

ScalarField StripSolver::orthogonalize(const ScalarField& E) const {
  const auto a = kernel_coefficients(E);
  ScalarField F = E;
  for (std::size_t i = 0; i < ns_; ++i)
    for (std::size_t j = 0; j < E.grid().nz; ++j) F(i, j) -= a[j] * k_.t[i];
  return F;
}

double StripSolver::orthogonality_certificate(const ScalarField& u) const {
  double m = 0.0;
  for (double a : kernel_coefficients(u)) m = std::max(m, std::abs(a) * k_.yt);
  return m;
}

ScalarField StripSolver::apply(const ScalarField& u) const {
  const Grid& g = u.grid();
  check_grid(g);
  const std::size_t M = ns_ - 1, nz = g.nz;
  const double ih2 = 1.0 / (g.hs * g.hs), iz2 = 1.0 / (g.hz * g.hz);
  ScalarField out(g);
  for (std::size_t i = 1; i <= M; ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      const std::size_t jm = j == 0 ? 1 : j - 1, jp = j + 1 == nz ? nz - 2 : j + 1;
      const double uzz = (u(i, jp) - 2.0 * u(i, j) + u(i, jm)) * iz2;
      const double up = i < M ? u(i + 1, j) : u(M - 1, j) + 2.0 * g.hs * k_.r * u(M, j);
      const double uss = (up - 2.0 * u(i, j) + u(i - 1, j)) * ih2;
      out(i, j) = uss + uzz + pot_[i] * u(i, j);
    }
  return out;
}

ScalarField StripSolver::solve(const ScalarField& E, bool check_orthogonality) const {
  const Grid& g = E.grid();
  check_grid(g);
  const std::size_t M = ns_ - 1, nz = g.nz, K = nz - 1;
  if (check_orthogonality) {
    const double scale = std::max(E.max_abs(), 1e-300);
    for (double a : kernel_coefficients(E))
      if (std::abs(a) > 1e-8 * scale)
        throw std::invalid_argument("strip solver: E not orthogonal to the kernel");
  }
  // rows 1..M, contiguous in z
  std::vector<double> B(M * nz);
  for (std::size_t i = 1; i <= M; ++i)
    for (std::size_t j = 0; j < nz; ++j) B[(i - 1) * nz + j] = E(i, j);
  dct_rows(B.data(), static_cast<int>(M), static_cast<int>(nz));

  const double hs = g.hs, ih2 = 1.0 / (hs * hs);
  std::vector<double> rhs(M), sol(M), cp(M), dp(M);
  Eigen::VectorXd b0(static_cast<long>(M + 1));
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t i = 0; i < M; ++i) rhs[i] = B[i * nz + k];
    if (k == 0) {
      for (std::size_t i = 0; i < M; ++i) b0(static_cast<long>(i)) = rhs[i];
      b0(static_cast<long>(M)) = 0.0;
      const Eigen::VectorXd x = lu0_.solve(b0);
      for (std::size_t i = 0; i < M; ++i) sol[i] = x(static_cast<long>(i));
    } else {
      const double sn = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(K)));
      const double lam = 4.0 * sn * sn / (g.hz * g.hz);
      // Thomas: sub a_i, diag b_i, super c_i on rows i = 1..M
      for (std::size_t r = 0; r < M; ++r) {
        const std::size_t i = r + 1;
        const double a = r == 0 ? 0.0 : (i == M ? 2.0 * ih2 : ih2);
        const double bdiag = (i == M ? (-2.0 + 2.0 * hs * k_.r) * ih2 : -2.0 * ih2) + pot_[i] - lam;
        const double c = i == M ? 0.0 : ih2;
        const double den = r == 0 ? bdiag : bdiag - a * cp[r - 1];
        cp[r] = c / den;
        dp[r] = (rhs[r] - (r == 0 ? 0.0 : a * dp[r - 1])) / den;
      }
      sol[M - 1] = dp[M - 1];
      for (std::size_t r = M - 1; r-- > 0;) sol[r] = dp[r] - cp[r] * sol[r + 1];
    }
    for (std::size_t i = 0; i < M; ++i) B[i * nz + k] = sol[i];
  }
  dct_rows(B.data(), static_cast<int>(M), static_cast<int>(nz));
  const double scale = 1.0 / (2.0 * static_cast<double>(K));
  ScalarField u(g);
  for (std::size_t i = 1; i <= M; ++i)
    for (std::size_t j = 0; j < nz; ++j) u(i, j) = scale * B[(i - 1) * nz + j];
  return u;
}

Grid strip_grid(double ell, double N, double hs, double hz) {
  if (!(ell > 0.0) || !(N > 0.0)) throw std::invalid_argument("strip grid: empty strip");
  if (hs <= 0.0) hs = ell / 400.0;
  if (hz <= 0.0) hz = N / 800.0;
  const auto ns = static_cast<std::size_t>(std::llround(ell / hs)) + 1;
  const auto half = static_cast<std::size_t>(std::llround(N / hz));
  if (ns < 16 || half < 4) throw std::invalid_argument("strip grid: grid too coarse");
  const double Nh = static_cast<double>(half) * hz;
  return make_grid(ell, ns, -Nh, Nh, 2 * half + 1);
}

StripSolution solve_strip(const StripProblem& p) {
  const Grid& g = p.E.grid();
  if (std::abs(g.s_max() - p.ell) > 1e-9 * p.ell || std::abs(g.z0 + p.N) > g.hz)
    throw std::invalid_argument("solve_strip: E grid does not cover Lambda(ell, N)");
  StripSolver S(g.hs, g.ns);
  StripSolution out;
  out.u = S.solve(p.E, p.strong_orthogonality);
  out.orthogonality = S.orthogonality_certificate(out.u);
  ScalarField r = S.apply(out.u) - p.E;
  for (std::size_t j = 0; j < g.nz; ++j) r(0, j) = 0.0;
  out.residual = r.max_abs();
  return out;
}

LimitResult limit_solution(double ell, const std::function<double(double, double)>& E,
                           const std::vector<double>& Ns, double hs, double hz) {
  if (Ns.size() < 3) throw std::invalid_argument("limit_solution: need >= 3 values of N");
  for (std::size_t k = 1; k < Ns.size(); ++k)
    if (!(Ns[k] > Ns[k - 1])) throw std::invalid_argument("limit_solution: N must increase");
  LimitResult res;
  res.N = Ns;
  ScalarField prev;
  std::optional<StripSolver> S;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    const Grid g = strip_grid(ell, Ns[k], hs, hz);
    if (!S) S.emplace(g.hs, g.ns);
    const ScalarField Ek = S->orthogonalize(ScalarField::sample(g, E));
    StripSolution sol;
    sol.u = S->solve(Ek);
    sol.orthogonality = S->orthogonality_certificate(sol.u);
    ScalarField r = S->apply(sol.u) - Ek;
    for (std::size_t j = 0; j < g.nz; ++j) r(0, j) = 0.0;
    sol.residual = r.max_abs();
    if (k > 0) {
      const Grid& gp = prev.grid();
      const auto off = static_cast<std::size_t>(std::llround((gp.z0 - g.z0) / g.hz));
      double d = 0.0;
      for (std::size_t j = 0; j < gp.nz; ++j) {
        if (std::abs(gp.z(j)) > 0.5 * Ns[k - 1] + 1e-12) continue;
        for (std::size_t i = 0; i < g.ns; ++i) d = std::max(d, std::abs(sol.u(i, j + off) - prev(i, j)));
      }
      res.diffs.push_back(d);
    }
    if (k + 1 == Ns.size()) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < g.ns; ++i)
        for (std::size_t j = 0; j < g.nz; ++j) {
          const double w = (i == 0 || i + 1 == g.ns ? 0.5 : 1.0) * (j == 0 || j + 1 == g.nz ? 0.5 : 1.0);
          l1 += w * (std::abs(sol.u(i, j)) + std::abs(grid_jet(sol.u, i, j).us));
        }
      l1 *= g.hs * g.hz;
      res.l1_constant = l1 / (ell * ell * ell * std::max(Ek.max_abs(), 1e-300));
      res.sol = sol;
    }
    prev = std::move(sol.u);
  }
  res.cauchy = true;
  for (std::size_t k = 1; k < res.diffs.size(); ++k)
    res.cauchy = res.cauchy && res.diffs[k] <= res.diffs[k - 1];
  if (!res.cauchy && res.diffs.back() > 1e-12 * std::max(1.0, res.sol.u.max_abs())) throw std::runtime_error("limit_solution: sequence is not Cauchy");
  return res;
}

DecayReport decay_certificate(const ScalarField& u, double zc, double slack) {
  const Grid& g = u.grid();
  // column sup and C^2 column norm indexed by distance bucket from the center
  const double wmax = std::max(std::abs(g.z0 - zc), std::abs(g.z_max() - zc));
  const auto nb = static_cast<std::size_t>(std::floor(wmax / g.hz + 1e-9)) + 1;
  std::vector<double> col(nb, 0.0);
  DecayReport rep;
  for (std::size_t j = 0; j < g.nz; ++j) {
    const double d = std::abs(g.z(j) - zc);
    const auto b = std::min(nb - 1, static_cast<std::size_t>(std::llround(d / g.hz)));
    double m = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < g.ns; ++i) {
      m = std::max(m, std::abs(u(i, j)));
      const FieldJet J = grid_jet(u, i, j);
      c2 = std::max({c2, std::abs(J.u), std::abs(J.us), std::abs(J.uz), std::abs(J.uss),
                     std::abs(J.uzz), std::abs(J.usz)});
    }
    col[b] = std::max(col[b], m);
    rep.weighted_norm = std::max(rep.weighted_norm, (1.0 + d) * c2);
  }
  rep.w.resize(nb);
  rep.sbar.resize(nb);
  double run = 0.0;
  for (std::size_t b = nb; b-- > 0;) {
    run = std::max(run, col[b]);
    rep.w[b] = static_cast<double>(b) * g.hz;
    rep.sbar[b] = run;
  }
  rep.monotone_pass = true;
  for (std::size_t b = 0; b + 1 < nb; ++b)
    if (rep.w[b] > 2.0 * std::numbers::pi && col[b + 1] > col[b] + slack) rep.monotone_pass = false;
  return rep;
}

KernelReport kernel_check(double ell, double N, std::size_t ns, std::size_t nz) {
  const double hs = ell / static_cast<double>(ns - 1);
  const double hz = 2.0 * N / static_cast<double>(nz - 1);
  const StripKernel k = make_strip_kernel(hs, ns - 1);
  const std::size_t M = ns - 1;
  const double ih2 = 1.0 / (hs * hs);
  // symmetrized s-operator D A D^{-1}, D = diag(sqrt(w)), w = 1 except 1/2 at row M
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(M), static_cast<long>(M));
  std::vector<double> d(M, 1.0);
  d[M - 1] = std::sqrt(0.5);
  for (std::size_t r = 0; r < M; ++r) {
    const std::size_t i = r + 1;
    const double s = static_cast<double>(i) * hs;
    const auto R = static_cast<long>(r);
    if (i < M) {
      A(R, R) = -2.0 * ih2 + 2.0 * sech2(s);
      if (r > 0) A(R, R - 1) = ih2;
      A(R, R + 1) = ih2 * d[r] / d[r + 1];
    } else {
      A(R, R) = (-2.0 + 2.0 * hs * k.r) * ih2 + 2.0 * sech2(s);
      A(R, R - 1) = 2.0 * ih2 * d[r] / d[r - 1];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  std::vector<double> sv;
  const std::size_t K = nz - 1;
  for (std::size_t m = 0; m < nz; ++m) {
    const double sn = std::sin(std::numbers::pi * static_cast<double>(m) / (2.0 * static_cast<double>(K)));
    const double lam = 4.0 * sn * sn / (hz * hz);
    for (long e = 0; e < ev.size(); ++e) sv.push_back(std::abs(ev(e) - lam));
  }
  std::sort(sv.begin(), sv.end());
  KernelReport rep;
  rep.sigma_min = sv[0];
  rep.sigma_second = sv[1];
  long imin = 0;
  ev.cwiseAbs().minCoeff(&imin);
  Eigen::VectorXd v = es.eigenvectors().col(imin);
  double dot = 0.0, nv = 0.0, nt = 0.0;
  for (std::size_t r = 0; r < M; ++r) {
    const double vi = v(static_cast<long>(r)) / d[r];
    const double ti = std::tanh(static_cast<double>(r + 1) * hs);
    dot += vi * ti;
    nv += vi * vi;
    nt += ti * ti;
  }
  rep.cosine_tanh = std::abs(dot) / std::sqrt(nv * nt);
  rep.mode1_min = (ev.array() - 1.0).abs().minCoeff();
  return rep;
}

}  // namespace helicoid
