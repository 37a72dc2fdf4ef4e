#pragma once

#include <string>
#include <vector>

namespace helicoid {

/// Value and first three sigma-derivatives of a scale function.
struct ScaleJet {
  double l = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

/// Constants of the pinching bounds lambda < C0, |l'| <= C1 l^eps, ...
struct Pinching {
  double epsilon = 0.5;
  double c0 = 1.0;
  double c1 = 1.0;
};

/// Positive scale profile lambda(sigma) on [sigma_min, sigma_max].
///
/// Constant and power kinds carry exact derivatives; table kinds are backed by
/// a natural cubic spline (third derivative is piecewise constant).
class ScaleFunction {
 public:
  enum class Kind { Constant, Power, Table };

  static ScaleFunction constant(double c, Pinching pinch, double sigma_min = 1e-3,
                                double sigma_max = 1.0);
  static ScaleFunction power(double c, double p, Pinching pinch, double sigma_min = 1e-3,
                             double sigma_max = 1.0);
  /// Uniform or non-uniform strictly increasing sigma samples.
  static ScaleFunction table(std::vector<double> sigma, std::vector<double> lambda,
                             Pinching pinch);

  ScaleJet at(double sigma) const;
  double lambda(double sigma) const { return at(sigma).l; }

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double p() const { return p_; }
  const Pinching& pinching() const { return pinch_; }
  double epsilon() const { return pinch_.epsilon; }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }

 private:
  ScaleFunction() = default;

  Kind kind_ = Kind::Constant;
  double c_ = 1.0;
  double p_ = 0.0;
  Pinching pinch_{};
  double sigma_min_ = 1e-3;
  double sigma_max_ = 1.0;
  // natural cubic spline data for Table
  std::vector<double> xs_, ys_, m_;
};

struct ValidationReport {
  bool pass = false;
  bool positive = false;
  double worst_bound = 0.0;   // max lambda / C0
  double worst_d1 = 0.0;      // max |l'| / (C1 l^eps)
  double worst_d2 = 0.0;      // max |l'' l| / (C1 l^eps)
  double worst_d3 = 0.0;      // max |l''' l^2| / (C1 l^eps)
  std::size_t samples = 0;
};

/// Sample-based check of the four pinching inequalities (uniform samples).
ValidationReport validate_pinching(const ScaleFunction& sf, std::size_t n_samples = 10000);

/// z(sigma) = int_{sigma_min}^sigma dsigma'/lambda(sigma') and its inverse.
///
/// Cumulative values are stored on a geometric sigma grid; evaluation between
/// nodes integrates the remaining piece with Gauss-Legendre, so z_of_sigma is
/// accurate to the construction tolerance everywhere, and sigma_of_z inverts it
/// by safeguarded Newton iteration.
class Reparametrization {
 public:
  Reparametrization(const ScaleFunction& sf, double quad_tol = 1e-12);

  double z_of_sigma(double sigma) const;
  double sigma_of_z(double z) const;

  double z_max() const { return cum_.back(); }
  double sigma_min() const { return nodes_.front(); }
  double sigma_max() const { return nodes_.back(); }

  /// Scale jet expressed at parameter z (derivatives remain sigma-derivatives).
  ScaleJet jet_at_z(double z) const { return sf_.at(sigma_of_z(z)); }
  double lambda_at_z(double z) const { return jet_at_z(z).l; }

  const ScaleFunction& scale() const { return sf_; }
  double quad_error_estimate() const { return err_est_; }

 private:
  double cell_integral(double a, double b) const;

  ScaleFunction sf_;
  std::vector<double> nodes_;
  std::vector<double> cum_;
  double err_est_ = 0.0;
};

/// Derived exponents and the truncated domain |s| <= ell(z) = lambda^{-tau eps}.
struct DomainSpec {
  double tau = 0.04;
  double epsilon = 0.5;
  double eps0 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double a_window = 36.0;

  double ell(double lambda) const;
};

/// Throws std::invalid_argument unless tau > 0 and 1 - 20 tau > 0.
DomainSpec make_domain(const ScaleFunction& sf, double tau, double a_window = 36.0);

struct GoodInterval {
  double radius_z = 0.0;       // |z - z0| <= radius keeps lambda within [l0/2, 3 l0/2]
  double radius_sigma = 0.0;   // same in sigma around sigma(z0)
  double lambda0 = 0.0;
};

/// Largest sampled symmetric radius around z0 on which lambda stays within a
/// factor [1/2, 3/2] of lambda(z0). If no violation occurs on either side the
/// full domain width is returned.
GoodInterval good_interval_radius(const Reparametrization& rep, double z0,
                                  std::size_t n_scan = 4000);

}  // namespace helicoid
