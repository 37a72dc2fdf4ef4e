#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace helicoid {

/// Uniform tensor grid: s_i = i*hs (i = 0..ns-1), z_j = z0 + j*hz (j = 0..nz-1).
struct Grid {
  std::size_t ns = 0;
  std::size_t nz = 0;
  double hs = 0.0;
  double hz = 0.0;
  double z0 = 0.0;

  double s(std::size_t i) const { return static_cast<double>(i) * hs; }
  double z(std::size_t j) const { return z0 + static_cast<double>(j) * hz; }
  double s_max() const { return s(ns - 1); }
  double z_max() const { return z(nz - 1); }
  std::size_t size() const { return ns * nz; }
};

Grid make_grid(double s_max, std::size_t ns, double z0, double z1, std::size_t nz);

/// Grid function stored s-row major: value(i, j) at v[i * nz + j].
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : g_(g), v_(g.size(), fill) {}

  static ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);

  const Grid& grid() const { return g_; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * g_.nz + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * g_.nz + j]; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  /// Bicubic (Catmull-Rom) interpolation; odd in s across s = 0, even across
  /// the z edges, index-clamped beyond s_max.
  double eval(double s, double z) const;

  double max_abs() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);

 private:
  double at_ext(long i, long j) const;

  Grid g_{};
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField b);

/// Second-order grid derivatives: odd ghost at s = 0, one-sided at s_max,
/// even (Neumann) ghost at both z edges.
struct FieldJet {
  double u = 0, us = 0, uz = 0, uss = 0, uzz = 0, usz = 0;
};
FieldJet grid_jet(const ScalarField& u, std::size_t i, std::size_t j);

}  // namespace helicoid
