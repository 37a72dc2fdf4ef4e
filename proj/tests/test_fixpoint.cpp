#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "helicoid/fixpoint.hpp"

using namespace helicoid;

namespace {

struct Setup {
  ScaleFunction sf;
  Reparametrization rep;
  DomainSpec ds;
  Grid g;
  GlobalSolver G;
  Setup(ScaleFunction f, double hs = 0.05, double hz = 0.1)
      : sf(std::move(f)), rep(sf), ds(make_domain(sf, 0.04)), g(global_grid(rep, ds, hs, hz)), G(rep, ds, g) {}
};

ScaleFunction power_preset(double c, double p, double sigma_min) {
  return ScaleFunction::power(c, p, Pinching{(p - 1) / p, 1.0, p}, sigma_min, 1.0);
}

}  // namespace

TEST_CASE("constant scale: exact helicoid") {
  Setup su(ScaleFunction::constant(0.05, Pinching{0.5, 1.0, 1.0}, 1e-2, 1.0));
  auto v0 = build_v0(su.rep, su.G);
  CHECK(v0.v0.max_abs() == 0.0);
  auto res = construct(su.rep, su.G);
  CHECK(res.converged);
  CHECK(res.u.max_abs() <= 1e-10);
  CHECK(res.history.size() == 1);
  auto A2 = graph_normA2(su.rep, res.u);
  CHECK(A2(0, su.g.nz / 2) == doctest::Approx(2.0 / (0.05 * 0.05)).epsilon(1e-10));
  for (const auto& r : local_rescaling_check(su.rep, res.u, {0.02, 0.1, 0.5}))
    CHECK(r.graph_norm <= 1e-10);
}

TEST_CASE("power scale: v0, contraction, fixed point") {
  auto t0 = std::chrono::steady_clock::now();
  Setup su(power_preset(0.05, 1.5, 1e-2));
  auto res = construct(su.rep, su.G);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("nz " << su.g.nz << " ns " << su.g.ns << " time " << secs << " s");
  MESSAGE("v0 residual " << res.v0.residual << " gamma0 " << res.v0.gamma0 << " remainder C "
                         << res.v0.remainder_constant << " |v0| " << res.v0.norm_c2);
  for (const auto& r : res.history)
    MESSAGE("step " << r.step << " residual " << r.residual << " factor " << r.factor << " xi " << r.xi_norm
                    << " inner " << r.inner_iterations);
  CHECK(res.v0.residual <= 1e-6);
  CHECK(res.converged);
  CHECK(res.in_ball);
  CHECK(res.residual <= 1e-8);
  CHECK(res.history.size() <= 51);
  CHECK(res.fixed_point_gap <= 1e-9);

  StepRecord rec;
  IterationState st{res.u, res.residual, 0.0, 0};
  auto next = psi_step(su.rep, su.G, st, &rec);
  CHECK((next.u - res.u).max_abs() <= 1e-9);
  CHECK(next.residual <= res.residual);

  // |A|^2 ~ 2 / lambda^2 ~ h^-3
  auto bt = blowup_table(su.rep, su.G, res.u, 2e-2, 0.5);
  MESSAGE("blowup slope " << bt.slope << " oracle deviation " << bt.oracle_deviation);
  CHECK(bt.h.size() == 30);
  CHECK(bt.slope == doctest::Approx(-3.0).epsilon(0.05));
  CHECK(bt.oracle_deviation <= 1e-3);
  for (std::size_t k = 1; k < bt.h.size(); ++k) CHECK(bt.supA2[k] <= bt.supA2[k - 1]);

  for (const auto& r : local_rescaling_check(su.rep, res.u, {0.02, 0.05, 0.1, 0.2, 0.4})) {
    MESSAGE("sigma " << r.sigma << " |w| " << r.graph_norm << " slope " << r.slope << " points " << r.points);
    CHECK(r.fit_ok);
    CHECK(r.points > 100);
    CHECK(r.graph_norm <= 0.05);
  }
}
