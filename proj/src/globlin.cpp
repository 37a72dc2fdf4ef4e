#include "helicoid/globlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helicoid {

using std::numbers::pi;

namespace {

double bump_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// L with zeroed rows 0 and M
ScalarField apply_interior(const StripSolver& S, const ScalarField& u) {
  ScalarField out = S.apply(u);
  const Grid& g = u.grid();
  for (std::size_t j = 0; j < g.nz; ++j) {
    out(0, j) = 0.0;
    out(g.ns - 1, j) = 0.0;
  }
  return out;
}

}  // namespace

double psi0(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = bump_g(1.0 + x), b = bump_g(1.0 - x);
  return a / (a + b);
}

double psi_ab(double a, double b, double x) { return psi0(-3.0 + 6.0 * (x - a) / (b - a)); }

double partition(long j, double z) {
  const double x = z - static_cast<double>(j) * pi;
  auto step = [](double t) { return psi0(2.0 * t / pi); };
  return step(x + 0.5 * pi) - step(x - 0.5 * pi);
}

double cofunction(double s) {
  const double a = std::abs(s);
  const double v = psi_ab(1.0, 2.0, a) * (a * std::tanh(a) - 1.0);
  return s < 0.0 ? -v : v;
}

double projection_cutoff(double x) { return psi_ab(2.0 * pi, pi, std::abs(x)); }

double dual_cutoff(double rho, double x) { return psi_ab(rho, 0.5 * rho, std::abs(x)); }

double Piece::dual(double z) const {
  if (edge < 0) return cut_right ? psi_ab(core_hi + 0.5 * rho, core_hi, z) : 1.0;
  if (edge > 0) return cut_left ? psi_ab(core_lo - 0.5 * rho, core_lo, z) : 1.0;
  const double x = z - zj;
  if ((x < 0.0 && !cut_left) || (x > 0.0 && !cut_right)) return 1.0;
  return dual_cutoff(rho, x);
}

namespace {

// smallest m >= n with no prime factor above 7
std::size_t smooth_length(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace

Grid global_grid(const Reparametrization& rep, const DomainSpec& ds, double hs, double hz) {
  if (!(hs > 0.0) || !(hz > 0.0)) throw std::invalid_argument("global grid: bad steps");
  const double Z = rep.z_max();
  double lmax = 1.0;
  const int n = 2000;
  for (int k = 0; k <= n; ++k) lmax = std::max(lmax, ds.ell(rep.lambda_at_z(Z * k / n)));
  const auto ns = static_cast<std::size_t>(std::ceil(2.0 * lmax / hs - 1e-9)) + 1;
  const auto nz = std::max<std::size_t>(static_cast<std::size_t>(std::llround(Z / hz)), 4) + 1;
  return make_grid(static_cast<double>(ns - 1) * hs, ns, 0.0, Z, nz);
}

GlobalSolver::GlobalSolver(const Reparametrization& rep, const DomainSpec& ds, const Grid& g,
                           GlobalOptions opt)
    : g_(g), ds_(ds), opt_(opt), strip_(g.hs, g.ns) {
  lam_.resize(g.nz);
  ell_.resize(g.nz);
  for (std::size_t j = 0; j < g.nz; ++j) {
    lam_[j] = rep.lambda_at_z(std::clamp(g.z(j), 0.0, rep.z_max()));
    ell_[j] = ds.ell(lam_[j]);
  }
  const double zlo = g.z0, zhi = g.z_max();
  const long J0 = static_cast<long>(std::floor(zlo / pi)), J1 = static_cast<long>(std::ceil(zhi / pi));
  for (long j = J0; j <= J1; ++j) {
    Piece p;
    p.j = j;
    p.zj = static_cast<double>(j) * pi;
    p.lambda = rep.lambda_at_z(std::clamp(p.zj, 0.0, rep.z_max()));
    p.ell = ds.ell(p.lambda);
    p.rho = std::max(ds.a_window * std::pow(p.lambda, -ds.epsilon) / 6.0, 4.0 * pi);
    const double half = p.rho + 4.0 * pi;
    const double lo = std::max(zlo, p.zj - half), hi = std::min(zhi, p.zj + half);
    p.w0 = static_cast<std::size_t>(std::ceil((lo - zlo) / g.hz - 1e-9));
    p.w1 = std::min(g.nz - 1, static_cast<std::size_t>(std::floor((hi - zlo) / g.hz + 1e-9)));
    // widen to a transform-friendly length where the domain allows
    std::size_t extra = smooth_length(p.w1 - p.w0) - (p.w1 - p.w0);
    const std::size_t up = std::min(extra, g.nz - 1 - p.w1);
    p.w1 += up;
    p.w0 -= std::min(extra - up, p.w0);
    if (p.zj - 2.0 * pi < zlo) {
      p.edge = -1;
      p.z_center = zlo;
    } else if (p.zj + 2.0 * pi > zhi) {
      p.edge = 1;
      p.z_center = zhi;
    } else {
      p.z_center = p.zj;
    }
    p.core_lo = std::max(zlo, std::min(p.zj - pi, p.z_center - 2.0 * pi));
    p.core_hi = std::min(zhi, std::max(p.zj + pi, p.z_center + 2.0 * pi));
    if (p.edge < 0) {
      p.cut_left = false;
      p.cut_right = p.core_hi + 0.5 * p.rho <= zhi;
    } else if (p.edge > 0) {
      p.cut_left = p.core_lo - 0.5 * p.rho >= zlo;
      p.cut_right = false;
    } else {
      p.cut_left = p.zj - p.rho >= zlo;
      p.cut_right = p.zj + p.rho <= zhi;
    }
    pieces_.push_back(p);
  }
}

Grid GlobalSolver::window_grid(std::size_t k) const {
  const Piece& p = pieces_.at(k);
  return make_grid(g_.s_max(), g_.ns, g_.z(p.w0), g_.z(p.w1), p.w1 - p.w0 + 1);
}

ScalarField GlobalSolver::apply(const ScalarField& u) const { return apply_interior(strip_, u); }

double GlobalSolver::weighted_c0(const ScalarField& E) const {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < g_.ns; ++i)
    for (std::size_t j = 0; j < g_.nz; ++j)
      m = std::max(m, std::abs(E(i, j)) / std::pow(lam_[j], ds_.eps0));
  return m;
}

double GlobalSolver::weighted_c2(const ScalarField& u) const {
  double m = 0.0;
  for (std::size_t j = 0; j < g_.nz; ++j) {
    const double w = std::pow(lam_[j], ds_.eps2);
    for (std::size_t i = 0; i < g_.ns && g_.s(i) <= ell_[j] + 1e-12; ++i) {
      const FieldJet J = grid_jet(u, i, j);
      const double v = std::max({std::abs(J.u), std::abs(J.us), std::abs(J.uz), std::abs(J.uss),
                                 std::abs(J.uzz), std::abs(J.usz)});
      m = std::max(m, v / w);
    }
  }
  return m;
}

double GlobalSolver::sup_on_lambda(const ScalarField& E) const {
  double m = 0.0;
  for (std::size_t j = 0; j < g_.nz; ++j)
    for (std::size_t i = 1; i + 1 < g_.ns && g_.s(i) <= ell_[j] + 1e-12; ++i)
      m = std::max(m, std::abs(E(i, j)));
  return m;
}

ScalarField GlobalSolver::restrict(const ScalarField& E, std::size_t k) const {
  const Piece& p = pieces_[k];
  ScalarField out(window_grid(k));
  for (std::size_t m = p.w0; m <= p.w1; ++m) {
    const double w = partition(p.j, g_.z(m));
    if (w == 0.0) continue;
    for (std::size_t i = 1; i + 1 < g_.ns; ++i) out(i, m - p.w0) = w * E(i, m);
  }
  return out;
}

std::vector<double> GlobalSolver::moment_weights(std::size_t k) const {
  const Piece& p = pieces_[k];
  std::vector<double> w(p.w1 - p.w0 + 1, 1.0);
  if (p.w0 == 0) w.front() = 0.5;
  if (p.w1 == g_.nz - 1) w.back() = 0.5;
  return w;
}

ScalarField GlobalSolver::projection(std::size_t k, int which) const {
  const Piece& p = pieces_.at(k);
  ScalarField out(window_grid(k));
  const Grid& wg = out.grid();
  for (std::size_t m = 0; m < wg.nz; ++m) {
    const double x = wg.z(m) - p.z_center;
    const double c = projection_cutoff(x) * (which == 0 ? 1.0 : x);
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < wg.ns; ++i) out(i, m) = c * cofunction(wg.s(i));
  }
  return out;
}

PieceSolution GlobalSolver::solve_piece(std::size_t k, const ScalarField& E) const {
  const Piece& p = pieces_.at(k);
  PieceSolution out;
  out.E = restrict(E, k);
  const Grid& wg = out.E.grid();
  const std::size_t nz = wg.nz, M = wg.ns - 1;
  out.v = ScalarField(wg);
  out.a.assign(nz, 0.0);
  out.A.assign(nz, 0.0);
  if (out.E.max_abs() == 0.0) return out;

  const auto& ker = strip_.kernel();
  const auto wts = moment_weights(k);
  auto moments = [&](const ScalarField& F, double m[2]) {
    const auto col = strip_.kernel_coefficients(F);
    m[0] = m[1] = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
      const double c = wts[j] * col[j] * ker.yt;
      m[0] += c;
      m[1] += c * (wg.z(j) - p.z_center);
    }
  };

  const ScalarField fb = projection(k, 0);
  const ScalarField Lf = apply_interior(strip_, fb);
  double mE[2], mf[2];
  moments(out.E, mE);
  moments(Lf, mf);
  out.moments_before[0] = mE[0];
  out.moments_before[1] = mE[1];
  ScalarField Ehat = out.E;
  ScalarField gb;
  if (p.edge == 0) {
    gb = projection(k, 1);
    const ScalarField Lg = apply_interior(strip_, gb);
    double mg[2];
    moments(Lg, mg);
    const double det = mf[0] * mg[1] - mg[0] * mf[1];
    if (std::abs(det) < 1e-6 * std::abs(mf[0] * mg[1]) || mf[0] * mg[1] == 0.0)
      throw std::runtime_error("solve_piece: moment matrix near-singular");
    out.abar = (mE[0] * mg[1] - mg[0] * mE[1]) / det;
    out.bbar = (mf[0] * mE[1] - mE[0] * mf[1]) / det;
    Ehat -= out.abar * Lf;
    Ehat -= out.bbar * Lg;
  } else {
    if (std::abs(mf[0]) < 1e-12) throw std::runtime_error("solve_piece: moment matrix near-singular");
    out.abar = mE[0] / mf[0];
    Ehat -= out.abar * Lf;
  }
  moments(Ehat, out.moments_after);

  // double primitive of a, built from the side away from any edge
  out.a = strip_.kernel_coefficients(Ehat);
  const double h2 = wg.hz * wg.hz;
  auto& A = out.A;
  const auto& a = out.a;
  const bool from_right = p.edge <= 0;
  auto idx = [&](std::size_t r) { return from_right ? nz - 1 - r : r; };
  const bool start_is_boundary = from_right ? p.w1 == g_.nz - 1 : p.w0 == 0;
  A[idx(0)] = 0.0;
  A[idx(1)] = h2 * a[idx(0)] * (start_is_boundary ? 0.5 : 1.0);
  for (std::size_t r = 1; r + 1 < nz; ++r)
    A[idx(r + 1)] = h2 * a[idx(r)] + 2.0 * A[idx(r)] - A[idx(r - 1)];
  const std::size_t e0 = idx(nz - 1), e1 = idx(nz - 2);
  const bool end_is_boundary = from_right ? p.w0 == 0 : p.w1 == g_.nz - 1;
  double Amax = 0.0;
  for (double v : A) Amax = std::max(Amax, std::abs(v));
  if (end_is_boundary)
    out.A_tail = std::abs(A[e1] - A[e0] - 0.5 * h2 * a[e0]) / wg.hz;
  else
    out.A_tail = std::max(std::abs(A[e0]), std::abs(A[e1] - A[e0]) / wg.hz);
  if (out.A_tail > 1e-8 * std::max(1.0, Amax))
    throw std::runtime_error("solve_piece: kernel primitive does not vanish");

  ScalarField F = Ehat;
  for (std::size_t i = 0; i <= M; ++i)
    for (std::size_t j = 0; j < nz; ++j) F(i, j) -= a[j] * ker.t[i];
  out.v = strip_.solve(F);
  out.v += out.abar * fb;
  if (p.edge == 0) out.v += out.bbar * gb;
  for (std::size_t i = 0; i <= M; ++i)
    for (std::size_t j = 0; j < nz; ++j) out.v(i, j) += A[j] * ker.t[i];
  return out;
}

ScalarField GlobalSolver::dual_solution(std::size_t k, const PieceSolution& ps) const {
  const Piece& p = pieces_.at(k);
  ScalarField out = ps.v;
  const Grid& wg = out.grid();
  for (std::size_t j = 0; j < wg.nz; ++j) {
    const double c = p.dual(wg.z(j));
    for (std::size_t i = 0; i < wg.ns; ++i) out(i, j) *= c;
  }
  return out;
}

ScalarField GlobalSolver::dual_error(std::size_t k, const PieceSolution& ps) const {
  return ps.E - apply_interior(strip_, dual_solution(k, ps));
}

GlobalSolution GlobalSolver::solve(const ScalarField& E) const {
  if (E.grid().ns != g_.ns || E.grid().nz != g_.nz)
    throw std::invalid_argument("solve_global: grid mismatch");
  ScalarField E0 = E;
  for (std::size_t j = 0; j < g_.nz; ++j) {
    E0(0, j) = 0.0;
    E0(g_.ns - 1, j) = 0.0;
  }
  GlobalSolution out;
  out.u = ScalarField(g_);
  out.gamma0 = weighted_c0(E0);
  if (out.gamma0 == 0.0) {
    out.converged = true;
    return out;
  }
  if (g_.z_max() - g_.z0 < 6.0 * pi) throw std::invalid_argument("solve_global: z-range shorter than 6 pi");

  ScalarField R = E0;
  double gamma = out.gamma0;
  while (true) {
    if (gamma <= opt_.rtol * out.gamma0) {
      out.converged = true;
      break;
    }
    if (out.iterations == opt_.max_iter) break;
    IterationRecord rec;
    rec.gamma = gamma;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const PieceSolution ps = solve_piece(k, R);
      if (ps.E.max_abs() == 0.0) continue;
      ++rec.active;
      const ScalarField vs = dual_solution(k, ps);
      const Piece& p = pieces_[k];
      for (std::size_t i = 0; i < g_.ns; ++i)
        for (std::size_t m = p.w0; m <= p.w1; ++m) out.u(i, m) += vs(i, m - p.w0);
    }
    R = E0 - apply(out.u);
    const double next = weighted_c0(R);
    rec.delta = next / gamma;
    out.delta_meas = std::max(out.delta_meas, rec.delta);
    out.history.push_back(rec);
    ++out.iterations;
    gamma = next;
  }
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < g_.ns; ++i)
    for (std::size_t j = 0; j < g_.nz; ++j) r = std::max(r, std::abs(R(i, j)));
  out.residual = r;
  return out;
}

}  // namespace helicoid
