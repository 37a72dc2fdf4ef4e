#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "helicoid/field.hpp"

namespace helicoid {

/// Discrete 1D data of the s-operator on rows 0..M with step h.
///
/// t solves the three-point recurrence of d_ss + 2 sech^2 exactly with t_0 = 0,
/// t_1 = tanh(h); the Robin coefficient r is the one that keeps t in the kernel
/// through the central ghost u_{M+1} = u_{M-1} + 2 h r u_M. y = trapezoid weights
/// times t is the left null vector.
struct StripKernel {
  double h = 0.0;
  std::size_t M = 0;
  std::vector<double> t;
  std::vector<double> y;
  double r = 0.0;
  double yt = 0.0;  // sum y_i t_i
};
StripKernel make_strip_kernel(double h, std::size_t M);

/// Solver for d_ss u + d_zz u + 2 sech^2(s) u = E on an (s, z) grid window:
/// Dirichlet at s = 0, Robin at s = s_max, Neumann at both z edges. The s-grid is
/// fixed at construction; any window length in z is accepted.
class StripSolver {
 public:
  StripSolver(double hs, std::size_t ns);

  const StripKernel& kernel() const { return k_; }

  /// Gauge: sum_i y_i u(i, j) = 0 for every j. Throws std::invalid_argument if
  /// check_orthogonality is set and some column of E has a tanh component
  /// above 1e-8 relative to sup |E|.
  ScalarField solve(const ScalarField& E, bool check_orthogonality = true) const;

  /// Discrete operator with the same ghosts; row 0 returns 0.
  ScalarField apply(const ScalarField& u) const;

  /// a(z_j) = sum_i y_i E(i, j) / sum_i y_i t_i.
  std::vector<double> kernel_coefficients(const ScalarField& E) const;
  ScalarField orthogonalize(const ScalarField& E) const;

  /// max_j |sum_i y_i u(i, j)|.
  double orthogonality_certificate(const ScalarField& u) const;

 private:
  void check_grid(const Grid& g) const;
  std::size_t ns_;
  StripKernel k_;
  std::vector<double> pot_;            // 2 sech^2(s_i)
  Eigen::PartialPivLU<Eigen::MatrixXd> lu0_;
};

struct StripProblem {
  double ell = 10.0;
  double N = 8.0;
  ScalarField E;  // on strip_grid(ell, N, ...), z in [-N, N]
  bool strong_orthogonality = true;
};

struct StripSolution {
  ScalarField u;
  double orthogonality = 0.0;  // max_z |sum y u|
  double residual = 0.0;       // sup |L_h u - E|
};

/// Grid on [0, ell] x [-N, N] with N snapped to a multiple of h_z; defaults
/// h_s = ell/400, h_z = N/800.
Grid strip_grid(double ell, double N, double hs = 0.0, double hz = 0.0);

StripSolution solve_strip(const StripProblem& p);

struct LimitResult {
  StripSolution sol;              // on the largest N
  std::vector<double> N;
  std::vector<double> diffs;      // sup over Lambda(ell, N_k/2) of |u_{k+1} - u_k|
  bool cauchy = false;            // diffs nonincreasing
  double l1_constant = 0.0;       // (|u|_{L1} + |u_s|_{L1}) / (ell^3 sup|E|) on the largest N
};

/// E is sampled on each strip grid (fixed h_s, h_z) and orthogonalized per z.
/// Throws std::invalid_argument unless N_sequence is increasing with >= 3 entries.
LimitResult limit_solution(double ell, const std::function<double(double, double)>& E,
                           const std::vector<double>& N_sequence, double hs, double hz);

struct DecayReport {
  std::vector<double> w;
  std::vector<double> sbar;  // sup_{|z - z_c| >= w} |u|
  bool monotone_pass = false;
  double weighted_norm = 0.0;  // sup_z (1 + |z - z_c|) * max(|u|, |Du|, |D^2u|) at z
};
DecayReport decay_certificate(const ScalarField& u, double z_center, double slack = 1e-10);

struct KernelReport {
  double sigma_min = 0.0;
  double sigma_second = 0.0;
  double cosine_tanh = 0.0;  // |<v, tanh>| / (|v| |tanh|) for the weakest mode
  double mode1_min = 0.0;    // smallest |eigenvalue| of the s-operator minus 1
};
/// Singular values of the discrete operator across all cosine modes.
KernelReport kernel_check(double ell, double N, std::size_t ns = 101, std::size_t nz = 65);

}  // namespace helicoid
