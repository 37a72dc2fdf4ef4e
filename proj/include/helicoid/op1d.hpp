#pragma once

#include <functional>
#include <string>
#include <vector>

namespace helicoid {

/// Samples on the uniform grid s_i = i*h over [0, ell].
struct Profile1D {
  double h = 0.0;
  std::vector<double> f;
  bool dirichlet = false;  // f(0) = 0
  bool robin = false;      // Robin condition at ell

  static Profile1D sample(double ell, double h, const std::function<double(double)>& fn);

  std::size_t size() const { return f.size(); }
  double s(std::size_t i) const { return static_cast<double>(i) * h; }
  double ell() const { return s(f.size() - 1); }
};

/// f'' + 2 sech^2 f by central differences; the two endpoint entries are left at 0.
/// Throws std::invalid_argument if ell < 1 or h > 0.01.
Profile1D apply_Ltilde(const Profile1D& f);

/// tanh(s) int_0^s tanh^{-2} int_0^{s'} tanh f, with a Taylor branch for s' < 0.02.
Profile1D invert_Ltilde(const Profile1D& f);

/// L^{-1} tanh sampled with step h.
Profile1D u0_profile(double ell, double h = 1e-3);

struct EnergyReport {
  double e_ell = 0.0;
  double l2_weighted = 0.0;  // int f^2 sech^2
  double alpha = 0.0;        // coefficient of tanh in f = alpha tanh + g
};

/// Composite Simpson (3/8 tail for odd interval counts).
double simpson(const std::vector<double>& y, double h);

/// int f g sech^2 over [0, ell].
double weighted_inner(const Profile1D& f, const Profile1D& g);

/// e_ell(f) = int f'^2 - 2 int f^2 sech^2 - f(ell)^2 sech^2(ell)/tanh(ell).
/// Derivatives are fourth-order differences.
EnergyReport energy(const Profile1D& f);

/// Symmetric bilinear form with B[f, f] = e_ell(f).
double energy_form(const Profile1D& f, const Profile1D& g);

struct Decomposition {
  double alpha = 0.0;
  Profile1D g;
};
Decomposition decompose(const Profile1D& f);

/// Smallest Rayleigh quotient of e_ell over {f(0) = 0, <f, tanh>_w = 0}, P1 elements.
/// Throws std::invalid_argument outside ell in [2, 50], std::runtime_error if beta <= 0.
double poincare_beta(double ell, std::size_t n_elements = 600);

void write_u0_csv(const std::string& path, const Profile1D& u0);
void write_beta_csv(const std::string& path, const std::vector<double>& ells);

}  // namespace helicoid
