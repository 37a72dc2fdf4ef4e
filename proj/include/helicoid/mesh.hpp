#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "helicoid/field.hpp"
#include "helicoid/geometry.hpp"

namespace helicoid {

struct TriMesh {
  std::vector<Vec3> verts;
  std::vector<std::array<std::uint32_t, 3>> tris;
};

/// Two triangles per quad of a rows x cols row-major vertex grid, same split as write_obj.
std::vector<std::array<std::uint32_t, 3>> grid_triangles(std::size_t rows, std::size_t cols);

struct GraphMesh {
  TriMesh mesh;
  std::size_t rows = 0, cols = 0;  // rows in s, cols in z
  std::vector<double> s, z;        // parameters per vertex
  std::vector<double> scale;       // lambda cosh^2 per vertex
};

/// F* + lambda u nu* on |s| <= ell(z); nz = 0 picks max(2000, ceil(z_max / 0.3)).
GraphMesh graph_mesh(const Reparametrization& rep, const DomainSpec& ds, const ScalarField& u,
                     std::size_t ns = 200, std::size_t nz = 0);

struct EmbeddednessReport {
  bool embedded = true;
  std::size_t triangles = 0;
  std::size_t candidate_pairs = 0;   // box overlaps without a shared vertex
  std::size_t intersecting_pairs = 0;
  std::array<std::uint32_t, 2> first = {0, 0};
};

/// Triangle-triangle intersection test (closed triangles).
bool triangles_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0, const Vec3& q1,
                         const Vec3& q2);

/// Sweep over all triangle pairs that share no vertex. Throws on degenerate
/// triangles (area below 1e-14 of the mean).
EmbeddednessReport embeddedness_check(const TriMesh& m, bool stop_at_first = true);

/// Cotangent-formula mean curvature (mean of principal curvatures) at each vertex
/// of a grid mesh, barycentric areas; 0 on the boundary.
std::vector<double> cotangent_mean_curvature(const TriMesh& m, std::size_t rows, std::size_t cols);

/// Median over interior vertices of |H| * scale.
double scaled_curvature_median(const GraphMesh& gm);

}  // namespace helicoid
