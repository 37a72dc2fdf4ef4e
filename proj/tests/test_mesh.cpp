#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "helicoid/globlin.hpp"
#include "helicoid/mesh.hpp"

using namespace helicoid;

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
TriMesh param_mesh(std::size_t rows, std::size_t cols, F f) {
  TriMesh m;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.verts.push_back(f(r, c));
  m.tris = grid_triangles(rows, cols);
  return m;
}

}  // namespace

TEST_CASE("triangle pairs") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  // piercing
  CHECK(triangles_intersect(a, b, c, Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 1), Vec3(0.3, 0.25, 1)));
  // parallel and disjoint
  CHECK_FALSE(triangles_intersect(a, b, c, Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0, 1, 1)));
  // crosses the plane outside the triangle
  CHECK_FALSE(triangles_intersect(a, b, c, Vec3(2, 2, -1), Vec3(2, 2, 1), Vec3(3, 2, 0)));
  // coplanar overlap and coplanar disjoint
  CHECK(triangles_intersect(a, b, c, Vec3(0.2, 0.2, 0), Vec3(2, 0.2, 0), Vec3(0.2, 2, 0)));
  CHECK(triangles_intersect(a, b, c, Vec3(0.1, 0.1, 0), Vec3(0.2, 0.1, 0), Vec3(0.1, 0.2, 0)));
  CHECK_FALSE(triangles_intersect(a, b, c, Vec3(1, 1, 0), Vec3(2, 1, 0), Vec3(1, 2, 0)));
  // touching at a point
  CHECK(triangles_intersect(a, b, c, Vec3(0.5, 0.5, 0), Vec3(1, 1, 1), Vec3(1, 1, -1) + Vec3(0.5, 0, 0)));
  // symmetric in argument order
  CHECK(triangles_intersect(Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 1), Vec3(0.3, 0.25, 1), a, b, c));
}

TEST_CASE("grid triangles follow the OBJ split") {
  auto t = grid_triangles(3, 4);
  REQUIRE(t.size() == 12);
  CHECK(t[0] == std::array<std::uint32_t, 3>{0, 1, 5});
  CHECK(t[1] == std::array<std::uint32_t, 3>{0, 5, 4});
}

TEST_CASE("embeddedness sweep") {
  SUBCASE("plane patch") {
    auto m = param_mesh(40, 60, [](std::size_t r, std::size_t c) { return Vec3(0.1 * r, 0.07 * c, 0.0); });
    auto rep = embeddedness_check(m);
    CHECK(rep.embedded);
    CHECK(rep.candidate_pairs > 0);
  }
  SUBCASE("two helicoid turns") {
    auto m = param_mesh(60, 400, [](std::size_t r, std::size_t c) {
      const double s = -2.0 + 4.0 * r / 59.0, z = 4 * pi * c / 399.0;
      return Vec3(std::sinh(s) * std::cos(z), std::sinh(s) * std::sin(z), z);
    });
    auto rep = embeddedness_check(m, false);
    CHECK(rep.embedded);
    CHECK(rep.intersecting_pairs == 0);
  }
  SUBCASE("figure-eight cylinder") {
    const std::size_t n = 64;
    auto m = param_mesh(n + 1, 20, [n](std::size_t r, std::size_t c) {
      const double t = 2 * pi * (r + 0.5) / n;
      return Vec3(std::sin(t), std::sin(t) * std::cos(t), 0.1 * c);
    });
    auto rep = embeddedness_check(m, false);
    CHECK_FALSE(rep.embedded);
    // the crossing line meets one quad column of each branch along the full height
    CHECK(rep.intersecting_pairs >= 19);
  }
  SUBCASE("degenerate triangle") {
    auto m = param_mesh(5, 5, [](std::size_t r, std::size_t c) { return Vec3(r, c, 0.0); });
    m.verts[6] = m.verts[7];
    CHECK_THROWS_AS(embeddedness_check(m), std::invalid_argument);
  }
}

TEST_CASE("cotangent mean curvature") {
  const double R = 2.0;
  const std::size_t rows = 40, cols = 80;
  auto m = param_mesh(rows, cols, [&](std::size_t r, std::size_t c) {
    const double t = 0.5 * r / (rows - 1.0), z = 0.05 * c;
    return Vec3(R * std::cos(t), R * std::sin(t), z);
  });
  auto H = cotangent_mean_curvature(m, rows, cols);
  CHECK(H[rows / 2 * cols + cols / 2] == doctest::Approx(1.0 / (2 * R)).epsilon(1e-3));
  CHECK(H[0] == 0.0);

  auto hel = param_mesh(rows, cols, [&](std::size_t r, std::size_t c) {
    const double s = -1.0 + 2.0 * r / (rows - 1.0), z = 0.05 * c;
    return Vec3(std::sinh(s) * std::cos(z), std::sinh(s) * std::sin(z), z);
  });
  auto Hh = cotangent_mean_curvature(hel, rows, cols);
  CHECK(Hh[rows / 2 * cols + cols / 2] <= 1e-3);
}

TEST_CASE("graph mesh of F*") {
  auto sf = ScaleFunction::power(0.05, 1.5, Pinching{1.0 / 3.0, 1.0, 1.5}, 1e-2, 1.0);
  Reparametrization rep(sf);
  auto ds = make_domain(sf, 0.04);
  Grid g = global_grid(rep, ds, 0.05, 0.1);
  ScalarField u(g);
  auto t0 = std::chrono::steady_clock::now();
  auto gm = graph_mesh(rep, ds, u);
  CHECK(gm.rows == 200);
  CHECK(gm.cols >= 2000);
  const std::size_t k = 17 * gm.cols + 999;
  CHECK((gm.mesh.verts[k] - bent_helicoid_point(rep, gm.s[k], gm.z[k])).norm() <= 1e-12);
  CHECK(gm.s[199 * gm.cols + 5] == doctest::Approx(-gm.s[5]));

  auto er = embeddedness_check(gm.mesh);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("triangles " << er.triangles << " candidates " << er.candidate_pairs << " time " << secs << " s");
  CHECK(er.embedded);
  MESSAGE("median |H| lambda cosh^2 " << scaled_curvature_median(gm));
}
