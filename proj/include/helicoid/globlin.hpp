#pragma once

#include <cstddef>
#include <vector>

#include "helicoid/field.hpp"
#include "helicoid/scalefn.hpp"
#include "helicoid/striplin.hpp"

namespace helicoid {

/// Smooth step: 0 on (-inf, -1], 1 on [1, inf), psi0(x) - 1/2 odd.
double psi0(double x);
/// psi0 composed with the affine map a -> -3, b -> 3 (0 near a, 1 near b).
double psi_ab(double a, double b, double x);
/// Partition of unity psi_j(z), support in (z_j - pi, z_j + pi), z_j = j pi.
double partition(long j, double z);
/// phi(s) = psi[1,2](|s|) (s tanh s - 1), odd.
double cofunction(double s);
/// z-cutoff of the projection functions: 1 on |x| <= pi, 0 on |x| >= 2 pi.
double projection_cutoff(double x);
/// Dual cutoff: 1 on |x| <= rho/2, 0 on |x| >= rho.
double dual_cutoff(double rho, double x);

/// Grid on [0, S] x [0, z_max] with S = 2 max ell(lambda(z)) rounded up to h_s.
Grid global_grid(const Reparametrization& rep, const DomainSpec& ds, double hs, double hz);

struct GlobalOptions {
  double rtol = 1e-8;
  std::size_t max_iter = 30;
  double delta_bar = 0.5;  // target factor, reported against
};

/// One strip of the decomposition. Window and cutoff extents are global z indices.
struct Piece {
  long j = 0;
  double zj = 0.0;
  double lambda = 0.0;
  double ell = 0.0;
  double rho = 0.0;
  std::size_t w0 = 0, w1 = 0;  // window [w0, w1]
  int edge = 0;                // -1 left, +1 right, 0 interior (two moments)
  double z_center = 0.0;       // centre of the projection functions
  double core_lo = 0.0, core_hi = 0.0;  // hull of the data and projection supports
  bool cut_left = true, cut_right = true;
  /// Interior pieces: dual_cutoff(rho, z - zj), kept at 1 towards a side with no
  /// room to cut. Edge pieces: 1 on the core, cut over rho/2 on the interior side.
  double dual(double z) const;
};

struct PieceSolution {
  ScalarField v;   // on the window grid
  ScalarField E;   // psi_j E on the window
  double abar = 0.0, bbar = 0.0;
  double moments_before[2] = {0, 0};
  double moments_after[2] = {0, 0};
  std::vector<double> a;  // per-z kernel coefficient after projection
  std::vector<double> A;  // its double primitive
  double A_tail = 0.0;    // |A| and |A'| at the non-edge window ends
};

struct IterationRecord {
  double gamma = 0.0;         // weighted residual before this iteration
  double delta = 0.0;         // gamma_{i+1} / gamma_i
  std::size_t active = 0;     // strips with nonzero data
};

struct GlobalSolution {
  ScalarField u;
  std::vector<IterationRecord> history;
  double gamma0 = 0.0;
  double delta_meas = 0.0;    // largest per-iteration factor
  std::size_t iterations = 0;
  double residual = 0.0;      // sup |L u - E| over rows 1..M-1
  bool converged = false;
};

/// Solver for d_ss u + d_zz u + 2 sech^2(s) u = E on rows 1..M-1 of a global
/// grid (odd at s = 0, Neumann at both z edges, row M free). The data is split
/// into strips at z_j = j pi, each strip is solved on a window with the
/// projection and kernel corrections, cut off, summed, and the residual iterated.
class GlobalSolver {
 public:
  GlobalSolver(const Reparametrization& rep, const DomainSpec& ds, const Grid& g,
               GlobalOptions opt = {});

  const Grid& grid() const { return g_; }
  const StripSolver& strip() const { return strip_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& lambda() const { return lam_; }
  const std::vector<double>& ell() const { return ell_; }
  const GlobalOptions& options() const { return opt_; }

  /// Rows 0 and M are set to zero.
  ScalarField apply(const ScalarField& u) const;
  /// sup over rows 1..M-1 of |E| / lambda^eps0.
  double weighted_c0(const ScalarField& E) const;
  /// sup over Lambda = {s <= ell(z)} of the 2-jet of u divided by lambda^eps2.
  double weighted_c2(const ScalarField& u) const;
  /// sup over Lambda of |E|.
  double sup_on_lambda(const ScalarField& E) const;

  GlobalSolution solve(const ScalarField& E) const;

  /// Steps of a single strip, for E on the global grid.
  PieceSolution solve_piece(std::size_t k, const ScalarField& E) const;
  /// Projection function on the window of piece k: fbar (which = 0) or gbar (which = 1).
  ScalarField projection(std::size_t k, int which) const;
  /// v* = psi* v and E* = psi_j E - L(psi* v) on the window of piece k.
  ScalarField dual_solution(std::size_t k, const PieceSolution& p) const;
  ScalarField dual_error(std::size_t k, const PieceSolution& p) const;

  Grid window_grid(std::size_t k) const;

 private:
  ScalarField restrict(const ScalarField& E, std::size_t k) const;
  std::vector<double> moment_weights(std::size_t k) const;

  Grid g_;
  DomainSpec ds_;
  GlobalOptions opt_;
  StripSolver strip_;
  std::vector<double> lam_, ell_;
  std::vector<Piece> pieces_;
};

}  // namespace helicoid
