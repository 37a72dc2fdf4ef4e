#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "helicoid/scalefn.hpp"

using namespace helicoid;

TEST_CASE("make_scale: analytic kinds") {
  auto c = ScaleFunction::constant(0.5, {});
  for (double s : {0.01, 0.3, 0.9}) {
    auto j = c.at(s);
    CHECK(j.l == 0.5);
    CHECK(j.l1 == 0.0);
    CHECK(j.l2 == 0.0);
  }
  auto p = ScaleFunction::power(1.0, 2.0, {});
  CHECK(p.at(0.5).l == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.at(0.5).l1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.at(0.5).l2 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.at(0.5).l3 == doctest::Approx(0.0));

  auto b = ScaleFunction::power(1.0, 1.5, {});
  CHECK(b.lambda(0.64) == doctest::Approx(0.512).epsilon(1e-14));
}

TEST_CASE("make_scale: errors") {
  CHECK_THROWS_AS(ScaleFunction::constant(0.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleFunction::power(1.0, -0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleFunction::power(1.0, 1.0, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScaleFunction::table({0, 0.3, 0.6, 1}, {1, 0, 1, 1}, {}),
                  std::invalid_argument);
}

TEST_CASE("table spline reproduces a smooth profile") {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 400; ++i) {
    double s = 0.1 + 0.9 * i / 400.0;
    xs.push_back(s);
    ys.push_back(0.2 + 0.1 * std::sin(3 * s));
  }
  auto t = ScaleFunction::table(xs, ys, {});
  for (double s : {0.3, 0.55, 0.8}) {
    auto j = t.at(s);
    CHECK(j.l == doctest::Approx(0.2 + 0.1 * std::sin(3 * s)).epsilon(1e-9));
    CHECK(j.l1 == doctest::Approx(0.3 * std::cos(3 * s)).epsilon(1e-5));
    CHECK(j.l2 == doctest::Approx(-0.9 * std::sin(3 * s)).epsilon(1e-3));
  }
}

TEST_CASE("validate_pinching") {
  auto c = ScaleFunction::constant(0.5, {0.7, 1.0, 1.0});
  auto rc = validate_pinching(c);
  CHECK(rc.pass);
  CHECK(rc.worst_d1 == 0.0);
  CHECK(rc.worst_d2 == 0.0);
  CHECK(rc.worst_d3 == 0.0);

  // |l'| = 2 sigma = 2 l^{1/2}; l'' l = 2 sigma^2 <= 2 sigma
  auto ok = ScaleFunction::power(1.0, 2.0, {0.5, 2.0, 2.0}, 0.01, 1.0);
  auto r1 = validate_pinching(ok);
  CHECK(r1.pass);
  CHECK(r1.worst_d1 == doctest::Approx(1.0).epsilon(1e-12));

  auto bad = ScaleFunction::power(1.0, 2.0, {0.5, 2.0, 1.0}, 0.01, 1.0);
  auto r2 = validate_pinching(bad);
  CHECK_FALSE(r2.pass);
  CHECK(r2.worst_d1 == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS(validate_pinching(ok, 50));
}

TEST_CASE("reparametrization") {
  SUBCASE("unit lambda") {
    auto sf = ScaleFunction::constant(1.0, {0.5, 2.0, 1.0});
    Reparametrization rep(sf);
    for (double s : {1e-3, 0.2, 0.77, 1.0}) CHECK(rep.z_of_sigma(s) == doctest::Approx(s - 1e-3).epsilon(1e-13));
  }
  SUBCASE("lambda = sigma") {
    auto sf = ScaleFunction::power(1.0, 1.0, {0.5, 2.0, 2.0}, 0.1, 1.0);
    Reparametrization rep(sf);
    CHECK(std::abs(rep.z_of_sigma(1.0) - std::log(10.0)) < 1e-12);
    CHECK(std::abs(rep.sigma_of_z(rep.z_of_sigma(0.7)) - 0.7) < 1e-10);
  }
  SUBCASE("quadrature oracle and round trip, lambda = 0.05 sigma^1.5") {
    auto sf = ScaleFunction::power(0.05, 1.5, {1.0 / 3.0, 1.0, 1.0});
    Reparametrization rep(sf);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double prev = -1.0;
    for (double s : {1e-3, 2e-3, 0.01, 0.1, 0.5, 1.0}) {
      double ref = GK::integrate([&](double x) { return 1.0 / sf.lambda(x); }, 1e-3, s, 20, 1e-14);
      CHECK(std::abs(rep.z_of_sigma(s) - ref) <= 1e-10 * std::max(1.0, ref));
      CHECK(rep.z_of_sigma(s) > prev);
      prev = rep.z_of_sigma(s);
    }
    for (int k = 0; k <= 50; ++k) {
      double s = 1e-3 * std::pow(1e3, k / 50.0);
      CHECK(std::abs(rep.sigma_of_z(rep.z_of_sigma(s)) - s) < 1e-10);
    }
    // chain rule: d/dz sigma^2 = lambda * 2 sigma
    for (double z : {1.0, 100.0, rep.z_max() / 2}) {
      double h = 1e-4;
      double d = (std::pow(rep.sigma_of_z(z + h), 2) - std::pow(rep.sigma_of_z(z - h), 2)) / (2 * h);
      double s = rep.sigma_of_z(z);
      CHECK(std::abs(d - 2 * s * sf.lambda(s)) < 1e-8 * std::max(1e-3, s * sf.lambda(s)) + 1e-12);
    }
  }
}

TEST_CASE("domain") {
  auto sf = ScaleFunction::power(0.05, 1.5, {1.0 / 3.0, 1.0, 1.0});
  auto d = make_domain(sf, 0.04);
  CHECK(d.eps2 < d.eps1);
  CHECK(d.eps1 < d.eps0);
  CHECK(d.eps0 < d.epsilon);
  CHECK(d.eps0 == doctest::Approx(0.92 / 3.0));
  CHECK(d.ell(0.01) == doctest::Approx(std::pow(0.01, -0.04 / 3.0)));
  CHECK(d.ell(1e-6) >= 1.0);
  CHECK_THROWS_AS(make_domain(sf, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(sf, 0.0), std::invalid_argument);
}

TEST_CASE("good interval") {
  SUBCASE("constant lambda covers the whole domain") {
    auto sf = ScaleFunction::constant(0.5, {0.5, 1.0, 1.0});
    Reparametrization rep(sf);
    auto g = good_interval_radius(rep, rep.z_max() / 2);
    CHECK(g.radius_z == doctest::Approx(rep.z_max()));
  }
  SUBCASE("power profile meets the proof bounds") {
    // |l'| = 1.5 l^{1/3}, so C1 = 1.5
    auto sf = ScaleFunction::power(1.0, 1.5, {1.0 / 3.0, 2.0, 1.5});
    Reparametrization rep(sf);
    const double c1 = 1.5;
    const double eps = sf.epsilon();
    for (double frac : {0.25, 0.5, 0.75}) {
      double z0 = frac * rep.z_max();
      auto g = good_interval_radius(rep, z0);
      CHECK(g.radius_z >= (2.0 / 3.0) * std::pow(g.lambda0, eps));
      // the maximality argument gives delta >= l^{1-eps} / (3 C1) and
      // |z - z0| >= (2/3) delta / l >= (2 / (9 C1)) l^{-eps}
      CHECK(g.radius_sigma >= std::pow(g.lambda0, 1.0 - eps) / (3.0 * c1));
      CHECK(g.radius_z >= (2.0 / (9.0 * c1)) * std::pow(g.lambda0, -eps));
      // lambda within factor on the certified interval
      for (int k = -20; k <= 20; ++k) {
        double z = std::clamp(z0 + g.radius_z * k / 20.0, 0.0, rep.z_max());
        CHECK(std::abs(rep.lambda_at_z(z) / g.lambda0 - 1.0) <= 0.5 + 1e-9);
      }
    }
  }
  CHECK_THROWS(good_interval_radius(Reparametrization(ScaleFunction::constant(0.5, {})), -1.0));
}
