#pragma once

#include <cstddef>
#include <functional>

#include <vector>

#include "helicoid/geometry.hpp"
#include "helicoid/striplin.hpp"

namespace helicoid {

using ClosedForm = std::function<GeometryAtPoint(const ZJet&, double, double)>;

struct GeometrySuite {
  double worst = 0.0;  // max over all quantities
  double metric = 0.0, normal = 0.0, second_form = 0.0, normA2 = 0.0, H = 0.0, laplacian = 0.0;
  std::size_t points = 0;
  double seconds = 0.0;
};

/// Closed forms against the finite-difference oracle on an n x n grid of
/// s in [-s_max, s_max], z in [0.05, 0.95] z_max. Relative deviations; metric
/// and second form are normalised by g_ss and by lambda sqrt(1 + |A_zz| / lambda),
/// H by |A|. The Laplacian coefficients are checked against the divergence form
/// on the oracle metric.
GeometrySuite verify_geometry(const Reparametrization& rep, std::size_t n = 50, double s_max = 3.0,
                              const ClosedForm& closed = [](const ZJet& zj, double s, double z) {
                                return closed_form_geometry(zj, s, z);
                              });

struct ConvergenceStudy {
  std::vector<double> h;
  std::vector<double> error;
  std::vector<double> order;          // log2 of successive error ratios
  double orthogonality = 0.0;         // worst over the runs
  double residual = 0.0;
};

/// Strip [0, ell] x [-N, N] with exact solution w(s) cos(pi z / N), w odd,
/// Robin-compatible at ell and orthogonal to tanh; h_s = h_z = h.
ConvergenceStudy strip_manufactured_study(double ell, double N, const std::vector<double>& hs);

/// Bump s e^-s cos^4(z / 4) on |z - zc| < 2 pi, zero elsewhere.
double gaussian_bump(double s, double z, double zc);

}  // namespace helicoid
