#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "helicoid/geometry.hpp"
#include "helicoid/globlin.hpp"

namespace helicoid {

struct FixpointOptions {
  double tol = 1e-8;           // on the weighted residual of H~*
  std::size_t max_steps = 50;
  double zeta_factor = 4.0;    // zeta = factor * |v0|_{C2}
};

struct V0Result {
  ScalarField v0;
  ScalarField remainder;       // L(ldot u0) - ldot tanh
  double gamma0 = 0.0;         // weighted C0 norm of ldot tanh
  double residual = 0.0;       // sup |L v0 - ldot tanh| / gamma0
  double remainder_constant = 0.0;  // sup |remainder| / (lambda^eps (1 + s^2)) / C1
  double norm_c2 = 0.0;        // weighted C2 norm of v0 on Lambda
  GlobalSolution inner;
};

/// v0 = ldot u0 + u1 with L u1 = -(L(ldot u0) - ldot tanh), so L v0 = H~*[0].
V0Result build_v0(const Reparametrization& rep, const GlobalSolver& G);

/// H~*[u] with rows 0 and M set to zero.
ScalarField residual_field(const Reparametrization& rep, const ScalarField& u);

struct IterationState {
  ScalarField u;
  double residual = 0.0;  // weighted C0 norm of H~*[u]
  double xi_norm = 0.0;   // weighted C2 norm on Lambda
  std::size_t step = 0;
};

struct StepRecord {
  std::size_t step = 0;
  double residual = 0.0;
  double xi_norm = 0.0;
  double factor = 0.0;     // residual / previous residual
  std::size_t inner_iterations = 0;
  double inner_delta = 0.0;
};

/// u' = u - L^-1 H~*[u].
IterationState psi_step(const Reparametrization& rep, const GlobalSolver& G,
                        const IterationState& s, StepRecord* rec = nullptr);

struct ConstructionResult {
  ScalarField u;
  V0Result v0;
  std::vector<StepRecord> history;
  double zeta = 0.0;
  double residual = 0.0;
  double fixed_point_gap = 0.0;  // sup |Psi(u*) - u*|
  bool converged = false;
  bool in_ball = true;
  std::string failure;
};

/// Picard iteration of Psi from -v0. Converged once the residual is <= tol and
/// |Psi(u) - u| <= tol / 10. Otherwise stops on max_steps, leaving the
/// ball of radius zeta, or a non-finite residual; the reason is in failure.
ConstructionResult construct(const Reparametrization& rep, const GlobalSolver& G,
                             const FixpointOptions& opt = {});

struct BlowupTable {
  std::vector<double> h;
  std::vector<double> supA2;     // sup of |A|^2 over heights >= h, inside Lambda
  double slope = 0.0;
  double intercept = 0.0;
  double oracle_deviation = 0.0; // max relative gap to the finite-difference geometry
};

/// |A|^2 of the graph F*[u] per grid point (graph jets from grid derivatives).
ScalarField graph_normA2(const Reparametrization& rep, const ScalarField& u);

/// n log-spaced heights in [h_min, h_max]; least-squares slope of log supA2 vs log h.
BlowupTable blowup_table(const Reparametrization& rep, const GlobalSolver& G, const ScalarField& u,
                         double h_min, double h_max, std::size_t n = 30);

struct RescalingSample {
  double sigma = 0.0;
  double lambda = 0.0;
  double graph_norm = 0.0;  // sup |w| on the ball
  double slope = 0.0;       // sup of difference quotients of w
  std::size_t points = 0;
  bool fit_ok = true;
};

/// Rescale by 1/lambda(sigma) about (0, 0, sigma) and fit a normal graph w over
/// the standard helicoid inside the ball of the given radius.
std::vector<RescalingSample> local_rescaling_check(const Reparametrization& rep, const ScalarField& u,
                                                   const std::vector<double>& sigmas,
                                                   double radius = 0.5);

}  // namespace helicoid
