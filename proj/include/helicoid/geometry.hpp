#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "helicoid/field.hpp"
#include "helicoid/scalefn.hpp"

namespace helicoid {

using Vec3 = Eigen::Vector3d;

struct GeometryAtPoint {
  double g_ss = 0, g_zz = 0, g_sz = 0;
  Vec3 nu = Vec3::Zero();
  double A_ss = 0, A_zz = 0, A_sz = 0;
  double normA2 = 0;
  double H = 0;             // trace g^{ij} A_ij
  double conformality = 0;  // 2 sqrt(det g) / (g_ss + g_zz)

  double det() const { return g_ss * g_zz - g_sz * g_sz; }
};

/// Scale data at a parameter z: sigma(z) and the sigma-jet of lambda.
struct ZJet {
  double sigma = 0;
  ScaleJet lam;
  // z-derivatives of lambda
  double dl() const { return lam.l * lam.l1; }
  double ddl() const { return lam.l * lam.l1 * lam.l1 + lam.l * lam.l * lam.l2; }
};
ZJet zjet(const Reparametrization& rep, double z);

Vec3 e_r(double z);
Vec3 e_r_prime(double z);

/// Standard helicoid sinh(s) e_r(z) + z e_z.
Vec3 helicoid_point(double s, double z);
/// sigma(z) e_z + lambda(z) sinh(s) e_r(z).
Vec3 bent_helicoid_point(const Reparametrization& rep, double s, double z);
Vec3 bent_helicoid_point(const ZJet& zj, double s, double z);

/// -e_r'(z)/cosh(s) + tanh(s) e_z; H[F*] >= 0 for lambda' >= 0 in this orientation.
Vec3 bent_normal(double s, double z);

GeometryAtPoint closed_form_geometry(const ZJet& zj, double s, double z);
GeometryAtPoint closed_form_geometry(const Reparametrization& rep, double s, double z);

/// Position, first and second partials of a parametrized surface.
struct SurfaceJet {
  Vec3 x = Vec3::Zero(), xs = Vec3::Zero(), xz = Vec3::Zero();
  Vec3 xss = Vec3::Zero(), xzz = Vec3::Zero(), xsz = Vec3::Zero();
};

/// Assemble metric, normal (orientation xz x xs), second fundamental form, |A|^2, H.
GeometryAtPoint geometry_from_jet(const SurfaceJet& J);

/// Closed-form jets of F* and of lambda nu* at (s, z).
SurfaceJet bent_helicoid_jet(const ZJet& zj, double s, double z);
SurfaceJet scaled_normal_jet(const ZJet& zj, double s, double z);

struct ImmersionField {
  std::function<Vec3(double, double)> eval;
  double fd_step = 1e-3;
};

/// Central differences with one Richardson step (fourth order).
SurfaceJet numeric_jet(const ImmersionField& im, double s, double z);

/// Throws std::runtime_error if conformality <= 1/2.
GeometryAtPoint numeric_geometry(const ImmersionField& im, double s, double z);

/// F*[u] = F* + lambda u nu*, with u given by a callable.
ImmersionField graph_immersion(const Reparametrization& rep,
                               std::function<double(double, double)> u, double fd_step = 1e-3);

/// Coefficients of c_ss u_ss + c_zz u_zz + c_sz u_sz + c_s u_s + c_z u_z + c0 u.
struct OperatorCoefficients {
  double c_ss = 0, c_zz = 0, c_sz = 0, c_s = 0, c_z = 0, c0 = 0;

  double apply(const FieldJet& J) const {
    return c_ss * J.uss + c_zz * J.uzz + c_sz * J.usz + c_s * J.us + c_z * J.uz + c0 * J.u;
  }
};

/// lambda^2 cosh^2 Delta* (no potential).
OperatorCoefficients scaled_laplacian(const ZJet& zj, double s);
/// Perturbation E = lambda^2 cosh^2 (Delta* + |A*|^2) - (Delta + 2 sech^2).
OperatorCoefficients perturbation(const ZJet& zj, double s);
/// Exact linearization of u -> lambda cosh^2 H[F* + lambda u nu*] at u = 0.
OperatorCoefficients full_linearization(const ZJet& zj, double s);

/// Jet of F* + lambda u nu* from the closed-form jets and a jet of u.
SurfaceJet graph_jet(const ZJet& zj, double s, double z, const FieldJet& U);

/// lambda cosh^2 H of the graph over F*, from closed-form F*/nu* jets and grid
/// derivatives of u.
ScalarField htilde(const Reparametrization& rep, const ScalarField& u);
/// Same quantity through numeric_geometry on the interpolated graph.
double htilde_oracle(const Reparametrization& rep, const ScalarField& u, double s, double z,
                     double fd_step = 1e-3);

/// Per-row z-jets of a grid, computed once.
std::vector<ZJet> zjets(const Reparametrization& rep, const Grid& g);

void write_obj(const std::string& path, const std::vector<Vec3>& verts, std::size_t rows,
               std::size_t cols);
void write_geometry_csv(const std::string& path, const Reparametrization& rep, const Grid& g);

}  // namespace helicoid
