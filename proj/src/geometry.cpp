#include "helicoid/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace helicoid {

ZJet zjet(const Reparametrization& rep, double z) {
  ZJet zj;
  zj.sigma = rep.sigma_of_z(z);
  zj.lam = rep.scale().at(zj.sigma);
  return zj;
}

std::vector<ZJet> zjets(const Reparametrization& rep, const Grid& g) {
  std::vector<ZJet> out(g.nz);
  for (std::size_t j = 0; j < g.nz; ++j) out[j] = zjet(rep, g.z(j));
  return out;
}

Vec3 e_r(double z) { return {std::sin(z), std::cos(z), 0.0}; }
Vec3 e_r_prime(double z) { return {std::cos(z), -std::sin(z), 0.0}; }

Vec3 helicoid_point(double s, double z) { return std::sinh(s) * e_r(z) + Vec3(0, 0, z); }

Vec3 bent_helicoid_point(const ZJet& zj, double s, double z) {
  return Vec3(0, 0, zj.sigma) + zj.lam.l * std::sinh(s) * e_r(z);
}

Vec3 bent_helicoid_point(const Reparametrization& rep, double s, double z) {
  return bent_helicoid_point(zjet(rep, z), s, z);
}

Vec3 bent_normal(double s, double z) {
  return -e_r_prime(z) / std::cosh(s) + std::tanh(s) * Vec3(0, 0, 1);
}

GeometryAtPoint closed_form_geometry(const ZJet& zj, double s, double z) {
  const double l = zj.lam.l, ld = zj.lam.l1;
  const double c = std::cosh(s), sh = std::sinh(s), t = std::tanh(s);
  GeometryAtPoint G;
  G.g_ss = l * l * c * c;
  G.g_zz = l * l * (c * c + ld * ld * sh * sh);
  G.g_sz = ld * l * l * sh * c;
  G.nu = bent_normal(s, z);
  G.A_ss = 0.0;
  G.A_zz = -l * ld * t;
  G.A_sz = -l;
  G.normA2 = (2.0 + ld * ld * t * t) / (l * l * c * c * c * c);
  G.H = ld * t / (l * c * c);
  G.conformality = 2.0 * std::sqrt(G.det()) / (G.g_ss + G.g_zz);
  return G;
}

GeometryAtPoint closed_form_geometry(const Reparametrization& rep, double s, double z) {
  return closed_form_geometry(zjet(rep, z), s, z);
}

GeometryAtPoint geometry_from_jet(const SurfaceJet& J) {
  GeometryAtPoint G;
  G.g_ss = J.xs.dot(J.xs);
  G.g_zz = J.xz.dot(J.xz);
  G.g_sz = J.xs.dot(J.xz);
  const Vec3 n = J.xz.cross(J.xs);
  const double nn = n.norm();
  if (!(nn > 0.0)) throw std::runtime_error("geometry: degenerate tangent plane");
  G.nu = n / nn;
  G.A_ss = J.xss.dot(G.nu);
  G.A_zz = J.xzz.dot(G.nu);
  G.A_sz = J.xsz.dot(G.nu);
  Eigen::Matrix2d g, A;
  g << G.g_ss, G.g_sz, G.g_sz, G.g_zz;
  A << G.A_ss, G.A_sz, G.A_sz, G.A_zz;
  const Eigen::Matrix2d gi = g.inverse();
  const Eigen::Matrix2d S = gi * A;
  G.H = S.trace();
  G.normA2 = (S * S).trace();
  G.conformality = 2.0 * std::sqrt(G.det()) / (G.g_ss + G.g_zz);
  return G;
}

SurfaceJet bent_helicoid_jet(const ZJet& zj, double s, double z) {
  const double l = zj.lam.l, l1 = zj.dl(), l2 = zj.ddl();
  const double c = std::cosh(s), sh = std::sinh(s);
  const Vec3 er = e_r(z), ep = e_r_prime(z), ez(0, 0, 1);
  SurfaceJet J;
  J.x = zj.sigma * ez + l * sh * er;
  J.xs = l * c * er;
  J.xz = l * ez + l1 * sh * er + l * sh * ep;
  J.xss = l * sh * er;
  J.xsz = l1 * c * er + l * c * ep;
  J.xzz = l1 * ez + l2 * sh * er + 2 * l1 * sh * ep - l * sh * er;
  return J;
}

SurfaceJet scaled_normal_jet(const ZJet& zj, double s, double z) {
  const double l = zj.lam.l, l1 = zj.dl(), l2 = zj.ddl();
  const double c = std::cosh(s), sh = std::sinh(s), t = std::tanh(s);
  const double sech2 = 1.0 / (c * c);
  const Vec3 er = e_r(z), ep = e_r_prime(z), ez(0, 0, 1);
  SurfaceJet J;
  J.x = -l * ep / c + l * t * ez;
  J.xs = l * (ep * sh * sech2 + sech2 * ez);
  J.xss = l * (ep * (c * c - 2 * sh * sh) / (c * c * c) - 2 * sech2 * t * ez);
  J.xz = -l1 * ep / c + l * er / c + l1 * t * ez;
  J.xzz = (l - l2) * ep / c + 2 * l1 * er / c + l2 * t * ez;
  J.xsz = l1 * (ep * sh * sech2 + sech2 * ez) - l * er * sh * sech2;
  return J;
}

SurfaceJet numeric_jet(const ImmersionField& im, double s, double z) {
  const auto& f = im.eval;
  const double h = im.fd_step;
  const Vec3 f0 = f(s, z);
  auto d1s = [&](double k) { return Vec3((f(s + k, z) - f(s - k, z)) / (2 * k)); };
  auto d1z = [&](double k) { return Vec3((f(s, z + k) - f(s, z - k)) / (2 * k)); };
  auto d2s = [&](double k) { return Vec3((f(s + k, z) - 2 * f0 + f(s - k, z)) / (k * k)); };
  auto d2z = [&](double k) { return Vec3((f(s, z + k) - 2 * f0 + f(s, z - k)) / (k * k)); };
  auto dsz = [&](double k) {
    return Vec3((f(s + k, z + k) - f(s + k, z - k) - f(s - k, z + k) + f(s - k, z - k)) /
                (4 * k * k));
  };
  auto rich = [&](auto&& D) { return Vec3((4.0 * D(h / 2) - D(h)) / 3.0); };
  SurfaceJet J;
  J.x = f0;
  J.xs = rich(d1s);
  J.xz = rich(d1z);
  J.xss = rich(d2s);
  J.xzz = rich(d2z);
  J.xsz = rich(dsz);
  return J;
}

GeometryAtPoint numeric_geometry(const ImmersionField& im, double s, double z) {
  GeometryAtPoint G = geometry_from_jet(numeric_jet(im, s, z));
  if (!(G.conformality > 0.5))
    throw std::runtime_error("numeric_geometry: degenerate immersion (conformality <= 1/2)");
  return G;
}

ImmersionField graph_immersion(const Reparametrization& rep,
                               std::function<double(double, double)> u, double fd_step) {
  ImmersionField im;
  im.fd_step = fd_step;
  im.eval = [&rep, u = std::move(u)](double s, double z) -> Vec3 {
    const ZJet zj = zjet(rep, z);
    return bent_helicoid_point(zj, s, z) + zj.lam.l * u(s, z) * bent_normal(s, z);
  };
  return im;
}

OperatorCoefficients scaled_laplacian(const ZJet& zj, double s) {
  const double ld = zj.lam.l1, t = std::tanh(s);
  const double sech2 = 1.0 / (std::cosh(s) * std::cosh(s));
  OperatorCoefficients P;
  P.c_ss = 1.0 + ld * ld * t * t;
  P.c_zz = 1.0;
  P.c_sz = -2.0 * ld * t;
  P.c_s = 2.0 * ld * ld * t * sech2 - zj.lam.l * zj.lam.l2 * t;
  P.c_z = -ld * sech2;
  return P;
}

OperatorCoefficients perturbation(const ZJet& zj, double s) {
  const double ld = zj.lam.l1, t = std::tanh(s);
  const double sech2 = 1.0 / (std::cosh(s) * std::cosh(s));
  OperatorCoefficients E = scaled_laplacian(zj, s);
  E.c_ss -= 1.0;
  E.c_zz -= 1.0;
  E.c0 = ld * ld * t * t * sech2;
  return E;
}

OperatorCoefficients full_linearization(const ZJet& zj, double s) {
  const double ld = zj.lam.l1, t = std::tanh(s);
  const double sech2 = 1.0 / (std::cosh(s) * std::cosh(s));
  const OperatorCoefficients P = scaled_laplacian(zj, s);
  OperatorCoefficients D = P;
  D.c_s += ld * P.c_sz;
  D.c_z += 2.0 * ld * P.c_zz;
  D.c0 = (ld * ld + zj.lam.l * zj.lam.l2) * P.c_zz + ld * P.c_z + sech2 * (2.0 + ld * ld * t * t);
  return D;
}

SurfaceJet graph_jet(const ZJet& zj, double s, double z, const FieldJet& U) {
  const SurfaceJet F = bent_helicoid_jet(zj, s, z);
  const SurfaceJet W = scaled_normal_jet(zj, s, z);
  SurfaceJet X;
  X.x = F.x + U.u * W.x;
  X.xs = F.xs + U.u * W.xs + U.us * W.x;
  X.xz = F.xz + U.u * W.xz + U.uz * W.x;
  X.xss = F.xss + U.u * W.xss + 2 * U.us * W.xs + U.uss * W.x;
  X.xzz = F.xzz + U.u * W.xzz + 2 * U.uz * W.xz + U.uzz * W.x;
  X.xsz = F.xsz + U.u * W.xsz + U.us * W.xz + U.uz * W.xs + U.usz * W.x;
  return X;
}

ScalarField htilde(const Reparametrization& rep, const ScalarField& u) {
  const Grid& g = u.grid();
  const std::vector<ZJet> zs = zjets(rep, g);
  ScalarField out(g);
  for (std::size_t i = 0; i < g.ns; ++i) {
    const double s = g.s(i);
    const double c2 = std::cosh(s) * std::cosh(s);
    for (std::size_t j = 0; j < g.nz; ++j) {
      const SurfaceJet X = graph_jet(zs[j], s, g.z(j), grid_jet(u, i, j));
      out(i, j) = zs[j].lam.l * c2 * geometry_from_jet(X).H;
    }
  }
  return out;
}

double htilde_oracle(const Reparametrization& rep, const ScalarField& u, double s, double z,
                     double fd_step) {
  auto im = graph_immersion(rep, [&u](double a, double b) { return u.eval(a, b); }, fd_step);
  const GeometryAtPoint G = numeric_geometry(im, s, z);
  return rep.lambda_at_z(z) * std::cosh(s) * std::cosh(s) * G.H;
}

void write_obj(const std::string& path, const std::vector<Vec3>& verts, std::size_t rows,
               std::size_t cols) {
  if (verts.size() != rows * cols) throw std::invalid_argument("write_obj: size mismatch");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_obj: cannot open " + path);
  os << std::setprecision(12);
  for (const Vec3& v : verts) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (std::size_t r = 0; r + 1 < rows; ++r)
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      const std::size_t a = r * cols + c + 1, b = a + 1, d = a + cols, e = d + 1;
      os << "f " << a << ' ' << b << ' ' << e << '\n';
      os << "f " << a << ' ' << e << ' ' << d << '\n';
    }
}

void write_geometry_csv(const std::string& path, const Reparametrization& rep, const Grid& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_geometry_csv: cannot open " + path);
  os << "s,z,g_ss,g_zz,g_sz,A_sz,normA2,H\n" << std::setprecision(12);
  const auto zs = zjets(rep, g);
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) {
      const GeometryAtPoint G = closed_form_geometry(zs[j], g.s(i), g.z(j));
      os << g.s(i) << ',' << g.z(j) << ',' << G.g_ss << ',' << G.g_zz << ',' << G.g_sz << ','
         << G.A_sz << ',' << G.normA2 << ',' << G.H << '\n';
    }
}

}  // namespace helicoid
