#include "helicoid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Geometry>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace helicoid {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using LD = long double;

struct P3 {
  LD x, y, z;
};

P3 lift(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
P3 sub(const P3& a, const P3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
P3 cross(const P3& a, const P3& b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
LD dot(const P3& a, const P3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

LD orient(const P3& a, const P3& b, const P3& c, const P3& d) {
  return dot(cross(sub(b, a), sub(c, a)), sub(d, a));
}

int sgn(LD v) { return (v > 0) - (v < 0); }

// interval of the triangle on the plane-plane line, from signed distances to the other plane
std::pair<LD, LD> line_interval(const P3 (&t)[3], const LD (&d)[3], const P3& dir) {
  LD lo = INFINITY, hi = -INFINITY;
  auto add = [&](LD v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  LD pr[3];
  for (int i = 0; i < 3; ++i) pr[i] = dot(dir, t[i]);
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0) add(pr[i]);
    const int j = (i + 1) % 3;
    if (sgn(d[i]) * sgn(d[j]) < 0) add(pr[i] + (pr[j] - pr[i]) * d[i] / (d[i] - d[j]));
  }
  return {lo, hi};
}

struct P2 {
  LD x, y;
};

LD orient2(const P2& a, const P2& b, const P2& c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool on_segment(const P2& a, const P2& b, const P2& c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

bool segments_meet(const P2& a, const P2& b, const P2& c, const P2& d) {
  const LD o1 = orient2(a, b, c), o2 = orient2(a, b, d), o3 = orient2(c, d, a), o4 = orient2(c, d, b);
  if (sgn(o1) * sgn(o2) < 0 && sgn(o3) * sgn(o4) < 0) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

bool inside(const P2 (&t)[3], const P2& p) {
  const int a = sgn(orient2(t[0], t[1], p)), b = sgn(orient2(t[1], t[2], p)), c = sgn(orient2(t[2], t[0], p));
  return (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0);
}

bool coplanar_intersect(const P3 (&p)[3], const P3 (&q)[3], const P3& n) {
  const LD ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  auto proj = [&](const P3& v) -> P2 {
    if (ax >= ay && ax >= az) return {v.y, v.z};
    if (ay >= az) return {v.x, v.z};
    return {v.x, v.y};
  };
  P2 a[3], b[3];
  for (int i = 0; i < 3; ++i) {
    a[i] = proj(p[i]);
    b[i] = proj(q[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (segments_meet(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3])) return true;
  return inside(a, b[0]) || inside(b, a[0]);
}

using Point = bg::model::point<double, 3, bg::cs::cartesian>;
using Box = bg::model::box<Point>;
using Entry = std::pair<Box, std::uint32_t>;

}  // namespace

bool triangles_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0, const Vec3& q1,
                         const Vec3& q2) {
  const P3 p[3] = {lift(p0), lift(p1), lift(p2)}, q[3] = {lift(q0), lift(q1), lift(q2)};
  LD dq[3], dp[3];
  for (int i = 0; i < 3; ++i) dq[i] = orient(p[0], p[1], p[2], q[i]);
  if ((dq[0] > 0 && dq[1] > 0 && dq[2] > 0) || (dq[0] < 0 && dq[1] < 0 && dq[2] < 0)) return false;
  const P3 np = cross(sub(p[1], p[0]), sub(p[2], p[0]));
  if (dq[0] == 0 && dq[1] == 0 && dq[2] == 0) return coplanar_intersect(p, q, np);
  for (int i = 0; i < 3; ++i) dp[i] = orient(q[0], q[1], q[2], p[i]);
  if ((dp[0] > 0 && dp[1] > 0 && dp[2] > 0) || (dp[0] < 0 && dp[1] < 0 && dp[2] < 0)) return false;
  const P3 nq = cross(sub(q[1], q[0]), sub(q[2], q[0]));
  const P3 dir = cross(np, nq);
  const auto [a0, a1] = line_interval(p, dp, dir);
  const auto [b0, b1] = line_interval(q, dq, dir);
  return std::max(a0, b0) <= std::min(a1, b1);
}

std::vector<std::array<std::uint32_t, 3>> grid_triangles(std::size_t rows, std::size_t cols) {
  std::vector<std::array<std::uint32_t, 3>> t;
  if (rows < 2 || cols < 2) return t;
  t.reserve(2 * (rows - 1) * (cols - 1));
  for (std::size_t r = 0; r + 1 < rows; ++r)
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      const auto a = static_cast<std::uint32_t>(r * cols + c), b = a + 1;
      const auto d = static_cast<std::uint32_t>(a + cols), e = d + 1;
      t.push_back({a, b, e});
      t.push_back({a, e, d});
    }
  return t;
}

GraphMesh graph_mesh(const Reparametrization& rep, const DomainSpec& ds, const ScalarField& u, std::size_t ns,
                     std::size_t nz) {
  const double Z = rep.z_max();
  if (nz == 0) nz = std::max<std::size_t>(2000, static_cast<std::size_t>(std::ceil(Z / 0.3)));
  if (ns < 2 || nz < 2) throw std::invalid_argument("graph_mesh: need at least 2 x 2 vertices");
  GraphMesh gm;
  gm.rows = ns;
  gm.cols = nz;
  const std::size_t n = ns * nz;
  gm.mesh.verts.resize(n);
  gm.s.resize(n);
  gm.z.resize(n);
  gm.scale.resize(n);
  for (std::size_t j = 0; j < nz; ++j) {
    const double z = Z * static_cast<double>(j) / static_cast<double>(nz - 1);
    const ZJet zj = zjet(rep, z);
    const double lam = zj.lam.l, ell = ds.ell(lam);
    for (std::size_t i = 0; i < ns; ++i) {
      const double s = ell * (-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(ns - 1));
      const std::size_t k = i * nz + j;
      gm.mesh.verts[k] = bent_helicoid_point(zj, s, z) + lam * u.eval(s, z) * bent_normal(s, z);
      gm.s[k] = s;
      gm.z[k] = z;
      const double c = std::cosh(s);
      gm.scale[k] = lam * c * c;
    }
  }
  gm.mesh.tris = grid_triangles(ns, nz);
  return gm;
}

EmbeddednessReport embeddedness_check(const TriMesh& m, bool stop_at_first) {
  EmbeddednessReport rep;
  rep.triangles = m.tris.size();
  const auto& V = m.verts;
  std::vector<double> area(m.tris.size());
  double mean = 0.0;
  for (std::size_t t = 0; t < m.tris.size(); ++t) {
    const auto& T = m.tris[t];
    area[t] = 0.5 * (V[T[1]] - V[T[0]]).cross(V[T[2]] - V[T[0]]).norm();
    mean += area[t];
  }
  if (m.tris.empty()) return rep;
  mean /= static_cast<double>(m.tris.size());
  for (std::size_t t = 0; t < m.tris.size(); ++t)
    if (!(area[t] >= 1e-14 * mean)) throw std::invalid_argument("embeddedness_check: degenerate triangle");

  std::vector<Entry> boxes;
  boxes.reserve(m.tris.size());
  for (std::size_t t = 0; t < m.tris.size(); ++t) {
    const auto& T = m.tris[t];
    Vec3 lo = V[T[0]].cwiseMin(V[T[1]]).cwiseMin(V[T[2]]);
    Vec3 hi = V[T[0]].cwiseMax(V[T[1]]).cwiseMax(V[T[2]]);
    const double pad = 1e-12 * (hi - lo).norm();
    lo.array() -= pad;
    hi.array() += pad;
    boxes.emplace_back(Box(Point(lo.x(), lo.y(), lo.z()), Point(hi.x(), hi.y(), hi.z())),
                       static_cast<std::uint32_t>(t));
  }
  const bgi::rtree<Entry, bgi::rstar<16>> tree(boxes.begin(), boxes.end());

  std::vector<Entry> hits;
  for (std::size_t t = 0; t < m.tris.size(); ++t) {
    const auto& A = m.tris[t];
    hits.clear();
    tree.query(bgi::intersects(boxes[t].first), std::back_inserter(hits));
    for (const auto& h : hits) {
      if (h.second <= t) continue;
      const auto& B = m.tris[h.second];
      bool shared = false;
      for (auto a : A)
        for (auto b : B) shared = shared || a == b;
      if (shared) continue;
      ++rep.candidate_pairs;
      if (triangles_intersect(V[A[0]], V[A[1]], V[A[2]], V[B[0]], V[B[1]], V[B[2]])) {
        if (rep.embedded) rep.first = {static_cast<std::uint32_t>(t), h.second};
        rep.embedded = false;
        ++rep.intersecting_pairs;
        if (stop_at_first) return rep;
      }
    }
  }
  return rep;
}

std::vector<double> cotangent_mean_curvature(const TriMesh& m, std::size_t rows, std::size_t cols) {
  const auto& V = m.verts;
  std::vector<Vec3> lap(V.size(), Vec3::Zero());
  std::vector<double> area(V.size(), 0.0);
  for (const auto& T : m.tris) {
    const double a = 0.5 * (V[T[1]] - V[T[0]]).cross(V[T[2]] - V[T[0]]).norm();
    for (int k = 0; k < 3; ++k) {
      const auto i = T[(k + 1) % 3], j = T[(k + 2) % 3], o = T[k];
      const Vec3 e1 = V[i] - V[o], e2 = V[j] - V[o];
      const double cot = e1.dot(e2) / e1.cross(e2).norm();
      lap[i] += 0.5 * cot * (V[j] - V[i]);
      lap[j] += 0.5 * cot * (V[i] - V[j]);
      area[T[k]] += a / 3.0;
    }
  }
  std::vector<double> H(V.size(), 0.0);
  for (std::size_t r = 1; r + 1 < rows; ++r)
    for (std::size_t c = 1; c + 1 < cols; ++c) {
      const std::size_t k = r * cols + c;
      H[k] = 0.5 * lap[k].norm() / area[k];
    }
  return H;
}

double scaled_curvature_median(const GraphMesh& gm) {
  const auto H = cotangent_mean_curvature(gm.mesh, gm.rows, gm.cols);
  std::vector<double> v;
  for (std::size_t r = 1; r + 1 < gm.rows; ++r)
    for (std::size_t c = 1; c + 1 < gm.cols; ++c) {
      const std::size_t k = r * gm.cols + c;
      v.push_back(H[k] * gm.scale[k]);
    }
  if (v.empty()) return 0.0;
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace helicoid
