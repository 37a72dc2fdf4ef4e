#include "helicoid/fixpoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "helicoid/op1d.hpp"

namespace helicoid {

namespace {

double sup_rows(const ScalarField& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

IterationState step_from(const Reparametrization& rep, const GlobalSolver& G, const IterationState& s,
                         const ScalarField& r, StepRecord* rec, ScalarField* r_next) {
  const GlobalSolution sol = G.solve(r);
  IterationState out;
  out.u = s.u - sol.u;
  out.step = s.step + 1;
  ScalarField rn = residual_field(rep, out.u);
  out.residual = G.weighted_c0(rn);
  out.xi_norm = G.weighted_c2(out.u);
  if (rec) {
    rec->step = out.step;
    rec->residual = out.residual;
    rec->xi_norm = out.xi_norm;
    rec->factor = s.residual > 0.0 ? out.residual / s.residual : 0.0;
    rec->inner_iterations = sol.iterations;
    rec->inner_delta = sol.delta_meas;
  }
  if (r_next) *r_next = std::move(rn);
  return out;
}

}  // namespace

ScalarField residual_field(const Reparametrization& rep, const ScalarField& u) {
  ScalarField r = htilde(rep, u);
  const Grid& g = u.grid();
  for (std::size_t j = 0; j < g.nz; ++j) {
    r(0, j) = 0.0;
    r(g.ns - 1, j) = 0.0;
  }
  return r;
}

V0Result build_v0(const Reparametrization& rep, const GlobalSolver& G) {
  const Grid& g = G.grid();
  const auto zs = zjets(rep, g);
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(g.hs / 1e-3 - 1e-9)));
  const Profile1D u0 = u0_profile(g.s_max(), g.hs / static_cast<double>(k));

  ScalarField T(g), H0(g);
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) {
      const double ld = zs[j].lam.l1;
      T(i, j) = ld * u0.f[i * k];
      if (i > 0 && i + 1 < g.ns) H0(i, j) = ld * std::tanh(g.s(i));
    }
  V0Result out;
  out.remainder = G.apply(T) - H0;
  out.inner = G.solve(-1.0 * out.remainder);
  out.v0 = T + out.inner.u;
  out.gamma0 = G.weighted_c0(H0);
  const double r = sup_rows(G.apply(out.v0) - H0);
  out.residual = out.gamma0 > 0.0 ? r / out.gamma0 : r;

  const Pinching& pin = rep.scale().pinching();
  double c = 0.0;
  for (std::size_t i = 1; i + 1 < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) {
      const double s = g.s(i);
      c = std::max(c, std::abs(out.remainder(i, j)) / (std::pow(zs[j].lam.l, pin.epsilon) * (1 + s * s)));
    }
  out.remainder_constant = c / pin.c1;
  out.norm_c2 = G.weighted_c2(out.v0);
  return out;
}

IterationState psi_step(const Reparametrization& rep, const GlobalSolver& G, const IterationState& s,
                        StepRecord* rec) {
  return step_from(rep, G, s, residual_field(rep, s.u), rec, nullptr);
}

ConstructionResult construct(const Reparametrization& rep, const GlobalSolver& G,
                             const FixpointOptions& opt) {
  ConstructionResult out;
  out.v0 = build_v0(rep, G);
  out.zeta = opt.zeta_factor * out.v0.norm_c2;

  IterationState st;
  st.u = -1.0 * out.v0.v0;
  ScalarField r = residual_field(rep, st.u);
  st.residual = G.weighted_c0(r);
  st.xi_norm = G.weighted_c2(st.u);
  StepRecord first;
  first.residual = st.residual;
  first.xi_norm = st.xi_norm;
  out.history.push_back(first);
  if (st.xi_norm > out.zeta * (1 + 1e-12)) {
    out.in_ball = false;
    out.failure = "initial iterate outside the ball";
  }

  std::size_t rising = 0;
  while (out.failure.empty()) {
    if (st.residual <= opt.tol) {
      out.fixed_point_gap = st.residual > 0.0 ? G.solve(r).u.max_abs() : 0.0;
      if (out.fixed_point_gap <= 0.1 * opt.tol) {
        out.converged = true;
        break;
      }
    }
    if (st.step == opt.max_steps) {
      out.failure = "max_steps exceeded";
      break;
    }
    StepRecord rec;
    ScalarField rn;
    IterationState next = step_from(rep, G, st, r, &rec, &rn);
    if (!std::isfinite(next.residual) || !std::isfinite(next.xi_norm)) {
      out.failure = "non-finite residual";
      break;
    }
    if (next.xi_norm > out.zeta * (1 + 1e-12)) {
      out.in_ball = false;
      out.failure = "iterate left the ball";
      out.history.push_back(rec);
      break;
    }
    out.history.push_back(rec);
    rising = rec.factor >= 1.0 ? rising + 1 : 0;
    st = std::move(next);
    r = std::move(rn);
    if (rising >= 3) out.failure = "no contraction";
  }
  out.u = st.u;
  out.residual = st.residual;
  return out;
}

ScalarField graph_normA2(const Reparametrization& rep, const ScalarField& u) {
  const Grid& g = u.grid();
  const auto zs = zjets(rep, g);
  ScalarField out(g);
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j)
      out(i, j) = geometry_from_jet(graph_jet(zs[j], g.s(i), g.z(j), grid_jet(u, i, j))).normA2;
  return out;
}

BlowupTable blowup_table(const Reparametrization& rep, const GlobalSolver& G, const ScalarField& u,
                         double h_min, double h_max, std::size_t n) {
  if (!(h_min > 0.0) || !(h_max > h_min) || n < 2)
    throw std::invalid_argument("blowup_table: need 0 < h_min < h_max and n >= 2");
  const Grid& g = u.grid();
  const auto zs = zjets(rep, g);
  const ScalarField A2 = graph_normA2(rep, u);
  // column maxima inside Lambda, then suffix maxima in z (sigma increases with z)
  std::vector<double> col(g.nz, 0.0);
  std::vector<std::size_t> arg(g.nz, 0), sarg(g.nz, 0);
  for (std::size_t j = 0; j < g.nz; ++j)
    for (std::size_t i = 0; i < g.ns && g.s(i) <= G.ell()[j] + 1e-12; ++i)
      if (A2(i, j) > col[j]) {
        col[j] = A2(i, j);
        arg[j] = i;
      }
  std::vector<double> suf(g.nz);
  for (std::size_t j = g.nz; j-- > 0;) {
    if (j + 1 < g.nz && suf[j + 1] > col[j]) {
      suf[j] = suf[j + 1];
      sarg[j] = sarg[j + 1];
    } else {
      suf[j] = col[j];
      sarg[j] = j;
    }
  }
  BlowupTable t;
  auto im = graph_immersion(rep, [&u](double a, double b) { return u.eval(a, b); });
  for (std::size_t k = 0; k < n; ++k) {
    const double h = std::exp(std::log(h_min) + (std::log(h_max) - std::log(h_min)) * k / (n - 1.0));
    std::size_t j = 0;
    while (j < g.nz && zs[j].sigma < h) ++j;
    if (j == g.nz) throw std::invalid_argument("blowup_table: height above the surface");
    t.h.push_back(h);
    t.supA2.push_back(suf[j]);
    const std::size_t jj = sarg[j], ii = arg[jj];
    const double ref = numeric_geometry(im, g.s(ii), g.z(jj)).normA2;
    t.oracle_deviation = std::max(t.oracle_deviation, std::abs(ref - suf[j]) / ref);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(t.h[k]), y = std::log(t.supA2[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  t.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  t.intercept = (sy - t.slope * sx) / nn;
  return t;
}

std::vector<RescalingSample> local_rescaling_check(const Reparametrization& rep, const ScalarField& u,
                                                   const std::vector<double>& sigmas, double radius) {
  std::vector<RescalingSample> out;
  const int n = 41;
  const double sm = std::asinh(1.5 * radius), zm = 1.5 * radius;
  const double ds = 2 * sm / (n - 1), dz = 2 * zm / (n - 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double sigma : sigmas) {
    RescalingSample rs;
    rs.sigma = sigma;
    const double z0 = rep.z_of_sigma(sigma);
    rs.lambda = rep.scale().lambda(sigma);
    const Vec3 c0(0, 0, sigma);
    std::vector<double> w(n * n, nan);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double s = -sm + a * ds, z = z0 - zm + b * dz;
        if (z < 0.0 || z > rep.z_max()) continue;
        const ZJet zj = zjet(rep, z);
        const Vec3 P = bent_helicoid_point(zj, s, z) + zj.lam.l * u.eval(s, z) * bent_normal(s, z);
        const Vec3 p = (P - c0) / rs.lambda;
        if (p.norm() > radius) continue;
        // p = H(s', t) + w N(s', t), H the standard helicoid turned by z0
        Eigen::Vector3d x(s, z - z0, 0.0);
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
          const double sp = x(0), zz = z0 + x(1), ww = x(2);
          const double ch = std::cosh(sp), sh = std::sinh(sp);
          const Vec3 er = e_r(zz), erp = e_r_prime(zz), ez(0, 0, 1);
          const Vec3 N = bent_normal(sp, zz);
          const Vec3 f = sh * er + x(1) * ez + ww * N - p;
          if (f.norm() < 1e-13) {
            ok = true;
            break;
          }
          const Vec3 Ns = erp * sh / (ch * ch) + ez / (ch * ch);
          const Vec3 Nt = er / ch;
          Eigen::Matrix3d J;
          J.col(0) = ch * er + ww * Ns;
          J.col(1) = sh * erp + ez + ww * Nt;
          J.col(2) = N;
          x -= J.partialPivLu().solve(f);
        }
        if (!ok || std::abs(x(2)) > 0.5) {
          rs.fit_ok = false;
          continue;
        }
        w[a * n + b] = x(2);
        rs.graph_norm = std::max(rs.graph_norm, std::abs(x(2)));
        ++rs.points;
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double v = w[a * n + b];
        if (std::isnan(v)) continue;
        if (a + 1 < n && !std::isnan(w[(a + 1) * n + b]))
          rs.slope = std::max(rs.slope, std::abs(w[(a + 1) * n + b] - v) / ds);
        if (b + 1 < n && !std::isnan(w[a * n + b + 1]))
          rs.slope = std::max(rs.slope, std::abs(w[a * n + b + 1] - v) / dz);
      }
    out.push_back(rs);
  }
  return out;
}

}  // namespace helicoid
