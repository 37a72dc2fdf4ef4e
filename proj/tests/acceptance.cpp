// Acceptance run: one line per criterion, exit status 1 if any criterion fails.
#include <malloc.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helicoid/config.hpp"
#include "helicoid/fixpoint.hpp"
#include "helicoid/globlin.hpp"
#include "helicoid/mesh.hpp"
#include "helicoid/op1d.hpp"
#include "helicoid/suite.hpp"

using namespace helicoid;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream msg;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      msg << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, Verdict& v, double secs) {
  std::printf("criterion %2d %s %-22s %s (%.1f s)\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), v.msg.str().c_str(),
              secs);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double sup_interior(const Profile1D& p) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) m = std::max(m, std::abs(p.f[i]));
  return m;
}

// ---------------------------------------------------------------------------

void geometry_oracle() {
  const auto t0 = Clock::now();
  Verdict v;
  const Reparametrization rc(ScaleFunction::constant(0.5, {0.5, 1.0, 1.0}, 1e-3, 1.0));
  const Reparametrization rp(ScaleFunction::power(1.0, 1.5, {1.0 / 3.0, 1.0, 1.5}, 1e-3, 1.0));
  const GeometrySuite a = verify_geometry(rc, 50), b = verify_geometry(rp, 50);
  const double secs = since(t0);
  v.msg << "worst rel. deviation const " << a.worst << ", sigma^1.5 " << b.worst << " on 50x50";
  v.require(a.worst <= 1e-6 && b.worst <= 1e-6, "tolerance 1e-6");
  v.require(secs < 10.0, "runtime < 10 s");
  report(1, "geometry oracle", v, secs);
}

void kernel_identities() {
  const auto t0 = Clock::now();
  Verdict v;
  const char* names[2] = {"tanh", "s tanh - 1"};
  for (int which = 0; which < 2; ++which) {
    std::vector<double> r;
    for (double h : {4e-3, 2e-3, 1e-3}) {
      auto p = Profile1D::sample(8.0, h, [&](double s) { return which == 0 ? std::tanh(s) : s * std::tanh(s) - 1; });
      r.push_back(sup_interior(apply_Ltilde(p)));
    }
    const double o1 = std::log2(r[0] / r[1]), o2 = std::log2(r[1] / r[2]);
    v.msg << names[which] << " orders " << o1 << ", " << o2 << (which == 0 ? "; " : "");
    v.require(std::abs(o1 - 2) <= 0.2 && std::abs(o2 - 2) <= 0.2, std::string(names[which]) + " order 2 +- 0.2");
  }
  report(2, "kernel identities", v, since(t0));
}

void inverse_roundtrip() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::vector<std::function<double(double)>> basis = {
      [](double) { return 1.0; },
      [](double s) { return s; },
      [](double s) { return std::tanh(s); },
      [](double s) { return std::sin(s); },
      [](double s) { return std::cos(2 * s); },
      [](double s) { return std::exp(-s); },
      [](double s) { return s * s / (1 + s * s); },
      [](double s) { return 1.0 / std::cosh(s); },
      [](double s) { return std::sin(3 * s) * std::exp(-0.2 * s); },
      [](double s) { return std::log(1 + s); }};
  double worst = 0.0;
  for (const auto& b : basis) {
    const auto p = Profile1D::sample(10.0, 1e-3, b);
    const auto Lp = apply_Ltilde(invert_Ltilde(p));
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) e = std::max(e, std::abs(Lp.f[i] - p.f[i]) / std::max(1.0, std::abs(p.f[i])));
    worst = std::max(worst, e);
  }
  const auto u0 = u0_profile(20.0, 1e-3);
  double bound = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) bound = std::max(bound, std::abs(u0.f[i]) / (1 + u0.s(i) * u0.s(i)));
  v.msg << "round-trip " << worst << " over 10 profiles at ell 10; max |u0|/(1+s^2) " << bound;
  v.require(worst <= 1e-6, "round-trip <= 1e-6");
  v.require(bound <= 1.0, "|u0| <= 1 + s^2");
  report(3, "inverse round-trip", v, since(t0));
}

Profile1D random_smooth(std::mt19937& rng, double ell, double h) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double a[5], w[5];
  for (int k = 0; k < 5; ++k) {
    a[k] = U(rng);
    w[k] = 0.3 + 1.5 * std::abs(U(rng));
  }
  return Profile1D::sample(ell, h, [&](double s) {
    double x = 0.0;
    for (int k = 0; k < 5; ++k) x += a[k] * std::sin(w[k] * s);
    return x;
  });
}

void poincare() {
  const auto t0 = Clock::now();
  Verdict v;
  const double b5 = poincare_beta(5.0), b10 = poincare_beta(10.0), b20 = poincare_beta(20.0);
  const double ratio = std::max({b5, b10, b20}) / std::min({b5, b10, b20});
  const double ell = 10.0;
  std::mt19937 rng(3);
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    const auto g = decompose(random_smooth(rng, ell, 2e-3)).g;
    const double e = energy(g).e_ell;
    const double grad = e + 2 * weighted_inner(g, g) + g.f.back() * g.f.back() / (std::pow(std::cosh(ell), 2) * std::tanh(ell));
    ok += (1 - 2 / (2 + b10)) * grad <= 2 * e + 1e-9;
  }
  v.msg << "beta(5,10,20) = " << b5 << ", " << b10 << ", " << b20 << ", ratio " << ratio << "; gradient bound "
        << ok << "/100";
  v.require(std::min({b5, b10, b20}) > 0 && ratio < 2, "beta > 0 and ratio < 2");
  v.require(ok == 100, "gradient inequality");
  report(4, "Poincare constant", v, since(t0));
}

void strip_solver() {
  const auto t0 = Clock::now();
  Verdict v;
  const ConvergenceStudy cs = strip_manufactured_study(6.0, 4.0, {0.08, 0.04, 0.02});
  v.msg << "orders " << cs.order[0] << ", " << cs.order[1] << "; orthogonality " << cs.orthogonality;
  v.require(std::abs(cs.order[0] - 2) <= 0.2 && std::abs(cs.order[1] - 2) <= 0.2, "order 2 +- 0.2");
  v.require(cs.orthogonality <= 1e-8, "orthogonality <= 1e-8");

  auto E = [](double s, double z) {
    return std::abs(z) < 2 * pi ? std::sin(s) * std::exp(-0.5 * s) * std::pow(std::cos(z / 4), 4) : 0.0;
  };
  std::vector<double> C;
  bool decay = true;
  for (double ell : {5.0, 10.0}) {
    const LimitResult res = limit_solution(ell, E, {8 * pi, 16 * pi, 32 * pi}, 0.05, 0.1);
    const DecayReport d = decay_certificate(res.sol.u, 0.0);
    decay = decay && d.monotone_pass;
    double esup = 0.0;
    for (double s = 0; s <= ell; s += 1e-3) esup = std::max(esup, std::abs(E(s, 0.0)));
    C.push_back(d.weighted_norm / (ell * ell * ell * esup));
  }
  const double secs = since(t0);
  v.msg << "; decay " << (decay ? "monotone" : "not monotone") << "; C(5) " << C[0] << ", C(10) " << C[1];
  v.require(decay, "decay monotone for w > 2 pi");
  v.require(C[1] <= 2 * C[0], "C uniform (C(10) <= 2 C(5))");
  v.require(secs < 60.0, "runtime < 60 s");
  report(5, "strip solver", v, secs);
}

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

void global_solver() {
  const auto t0 = Clock::now();
  Verdict v;
  std::vector<double> deltas;
  double merr = 0.0;
  for (double c : {0.1, 0.05}) {
    const ScaleFunction sf = ScaleFunction::power(c, 1.5, Pinching{1.0 / 3.0, 1.0, 1.5}, 1e-2, 1.0);
    const Reparametrization rep(sf);
    const DomainSpec ds = make_domain(sf, 0.04);
    const Grid g = global_grid(rep, ds, 0.05, 0.1);
    const GlobalSolver G(rep, ds, g);
    const auto E = ScalarField::sample(g, [](double s, double z) { return std::tanh(s) * std::cos(z / 7) + std::sin(s); });
    const GlobalSolution sol = G.solve(E);
    v.require(sol.converged, "global iteration converged");
    deltas.push_back(sol.history.at(0).delta);
    if (c == 0.05) {
      const auto& y = G.strip().kernel().y;
      auto g1 = [](double s) { return bump((s - 0.5) / 0.3); };
      auto g2 = [](double s) { return bump((s - 0.8) / 0.3); };
      double y1 = 0, y2 = 0;
      for (std::size_t i = 0; i < g.ns; ++i) {
        y1 += y[i] * g1(g.s(i));
        y2 += y[i] * g2(g.s(i));
      }
      const double zc = 0.5 * g.z_max();
      const auto w = ScalarField::sample(g, [&](double s, double z) {
        return bump((z - zc) / 8.0) * (g1(s) - y1 / y2 * g2(s)) * (1 + 0.2 * std::sin(z));
      });
      merr = (G.solve(G.apply(w)).u - w).max_abs();
    }
  }
  v.msg << "delta(c=0.1) " << deltas[0] << ", delta(c=0.05) " << deltas[1] << "; manufactured error " << merr;
  v.require(deltas[0] < 1 && deltas[1] < 1, "delta < 1");
  v.require(deltas[1] < deltas[0], "delta decreasing in c");
  v.require(merr <= 1e-5, "manufactured error <= 1e-5");
  report(6, "global solver", v, since(t0));
}

void quadratic_remainder() {
  const auto t0 = Clock::now();
  Verdict v;
  const Reparametrization rep(ScaleFunction::power(1.0, 1.5, {1.0 / 3.0, 1.0, 1.5}, 1e-3, 1.0));
  const Grid g = make_grid(4.0, 41, 5.0, 40.0, 60);
  const std::vector<std::function<double(double, double)>> dirs = {
      [](double s, double z) { return 0.8 * std::tanh(s) * std::exp(-0.2 * s * s) * std::cos(0.3 * z); },
      [](double s, double z) { return s * std::exp(-s) * std::sin(0.5 * z); },
      [](double s, double z) { return std::sin(s) / std::cosh(0.5 * s) * std::cos(z / 7); },
      [](double s, double z) { return std::tanh(s) * (1 + 0.01 * z); },
      [](double s, double z) { return 0.5 * std::sin(2 * s) * std::exp(-0.25 * s * s) * std::cos(0.2 * z + 1); }};
  const auto H0 = htilde(rep, ScalarField(g));
  const auto zs = zjets(rep, g);
  double worst = 10.0;
  for (const auto& d : dirs) {
    const auto vf = ScalarField::sample(g, d);
    ScalarField Lv(g);
    for (std::size_t i = 0; i < g.ns; ++i)
      for (std::size_t j = 0; j < g.nz; ++j) Lv(i, j) = full_linearization(zs[j], g.s(i)).apply(grid_jet(vf, i, j));
    std::vector<double> lr;
    const std::vector<double> ts = {1e-2, 1e-3, 1e-4};
    for (double t : ts) lr.push_back(std::log((htilde(rep, t * vf) - H0 - t * Lv).max_abs()));
    for (std::size_t k = 1; k < ts.size(); ++k)
      worst = std::min(worst, (lr[k] - lr[k - 1]) / (std::log(ts[k]) - std::log(ts[k - 1])));
  }
  v.msg << "smallest slope " << worst << " over 5 directions";
  v.require(worst >= 1.9, "slope >= 1.9");
  report(7, "quadratic remainder", v, since(t0));
}

struct PresetRun {
  RunConfig rc;
  ScaleFunction sf;
  Reparametrization rep;
  DomainSpec ds;
  Grid g;
  GlobalSolver G;
  ConstructionResult res;
  double seconds = 0.0;
  double max_xi = 0.0;

  explicit PresetRun(const RunConfig& c)
      : rc(c),
        sf(make_scale(c)),
        rep(sf),
        ds(make_domain(c)),
        g(global_grid(rep, ds, c.h_s, c.h_z)),
        G(rep, ds, g, global_options(c)) {
    const auto t0 = Clock::now();
    res = construct(rep, G, fixpoint_options(rc));
    seconds = since(t0);
    for (const auto& h : res.history) max_xi = std::max(max_xi, h.xi_norm);
  }
};

RunConfig preset(const std::string& name) { return load_config(std::string(HELICOID_PRESET_DIR) + "/" + name + ".json"); }

}  // namespace

int main() {
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 256 << 20);

  geometry_oracle();
  kernel_identities();
  inverse_roundtrip();
  poincare();
  strip_solver();
  global_solver();
  quadratic_remainder();

  std::vector<std::string> names = {"constant", "eps0.1", "eps0.5"};
  std::vector<PresetRun*> runs;
  {
    const auto t0 = Clock::now();
    Verdict v;
    for (const auto& n : names) {
      auto* r = new PresetRun(preset(n));
      runs.push_back(r);
      const auto& res = r->res;
      v.msg << n << ": " << res.history.size() - 1 << " steps, residual " << res.residual << ", |xi| " << r->max_xi
            << " <= zeta " << res.zeta << "; ";
      v.require(res.converged && res.residual <= 1e-8 && res.history.size() <= 51, n + " residual within 50 steps");
      v.require(res.in_ball, n + " stays in the ball");
    }
    const double u_const = runs[0]->res.u.max_abs();
    v.msg << "constant |u*| " << u_const;
    v.require(u_const <= 1e-10, "constant preset u* = 0");
    report(8, "fixed point", v, since(t0));
  }
  {
    const auto t0 = Clock::now();
    Verdict v;
    for (std::size_t k = 1; k < runs.size(); ++k) {
      const auto tb = Clock::now();
      PresetRun& r = *runs[k];
      const BlowupTable bt = blowup_table(r.rep, r.G, r.res.u, 2 * r.rc.sigma_min, 0.5);
      const double target = -2.0 * r.rc.p, secs = r.seconds + since(tb);
      const double dev = std::abs(bt.slope / target - 1.0);
      v.msg << names[k] << ": slope " << bt.slope << " vs " << target << " (" << 100 * dev << "%), " << secs << " s; ";
      v.require(dev <= 0.05, names[k] + " slope within 5%");
      v.require(secs < 300.0, names[k] + " under 5 min");
    }
    report(9, "blowup rates", v, since(t0));
  }
  {
    const auto t0 = Clock::now();
    Verdict v;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      PresetRun& r = *runs[k];
      const GraphMesh gm = graph_mesh(r.rep, r.ds, r.res.u, r.rc.mesh_ns, r.rc.mesh_nz);
      const EmbeddednessReport er = embeddedness_check(gm.mesh);
      std::vector<double> sig;
      const double s0 = 4 * r.rc.sigma_min, s1 = 0.5;
      for (int q = 0; q < 5; ++q) sig.push_back(s0 * std::pow(s1 / s0, q / 4.0));
      double worst = 0.0;
      bool fit = true;
      for (const auto& x : local_rescaling_check(r.rep, r.res.u, sig, r.rc.rescale_radius)) {
        worst = std::max(worst, x.graph_norm);
        fit = fit && x.fit_ok;
      }
      v.msg << names[k] << ": " << gm.rows << "x" << gm.cols << (er.embedded ? " embedded" : " SELF-INTERSECTING")
            << ", rescaled norm " << worst << "; ";
      v.require(gm.rows >= 200 && gm.cols >= 2000, names[k] + " mesh >= 200x2000");
      v.require(er.embedded, names[k] + " embedded");
      v.require(fit && worst <= r.rc.rescale_tol, names[k] + " rescaled graph norm <= 0.05");
    }
    report(10, "embeddedness", v, since(t0));
  }
  for (auto* r : runs) delete r;
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
