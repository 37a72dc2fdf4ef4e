#include <CLI11.hpp>
#include <json.hpp>
#include <malloc.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include "helicoid/config.hpp"
#include "helicoid/fixpoint.hpp"
#include "helicoid/globlin.hpp"
#include "helicoid/mesh.hpp"
#include "helicoid/suite.hpp"

using namespace helicoid;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kConfig = 2;

class Timer {
 public:
  explicit Timer(json& sink) : sink_(sink) {}
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  json& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Run {
  RunConfig rc;
  fs::path out;
  json report;
  json timings = json::object();
};

json versions() {
  std::ostringstream eig, bst;
  eig << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  bst << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return {{"helicoid", "0.1.0"}, {"eigen", eig.str()}, {"boost", bst.str()}};
}

Run start(const std::string& config, const std::string& out, double grid_scale, const std::string& cmd) {
  Run r;
  r.rc = refine(load_config(config), grid_scale);
  if (!out.empty()) r.rc.out_dir = out;
  r.out = r.rc.out_dir;
  std::error_code ec;
  fs::create_directories(r.out, ec);
  if (ec) throw ConfigError("cannot create " + r.out.string() + ": " + ec.message());
  r.report["command"] = cmd;
  r.report["versions"] = versions();
  r.report["config"] = to_json(r.rc);
  r.report["grid_scale"] = grid_scale;
  return r;
}

void check_pinching(const ScaleFunction& sf, json& report) {
  const ValidationReport v = validate_pinching(sf);
  report["pinching"] = {{"pass", v.pass},        {"worst_bound", v.worst_bound}, {"worst_d1", v.worst_d1},
                        {"worst_d2", v.worst_d2}, {"worst_d3", v.worst_d3},       {"samples", v.samples}};
  if (!v.pass) throw ConfigError("scale function violates the pinching bounds (see report.json)");
}

void finish(Run& r, bool pass) {
  r.report["pass"] = pass;
  if (!r.rc.deterministic) r.report["timings"] = r.timings;
  std::ofstream(r.out / "report.json") << std::setw(2) << r.report << '\n';
  std::ofstream(r.out / "timings.json") << std::setw(2) << r.timings << '\n';
}

void write_field(const fs::path& path, const ScalarField& u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "s,z,u\n" << std::setprecision(12);
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nz; ++j) os << g.s(i) << ',' << g.z(j) << ',' << u(i, j) << '\n';
}

ScalarField read_field(const std::string& path, const Grid& g) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("s,z,E", 0) != 0) throw ConfigError(path + ": expected header s,z,E");
  ScalarField E(g);
  std::size_t n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double s, z, e;
    char c1, c2;
    std::istringstream ls(line);
    if (!(ls >> s >> c1 >> z >> c2 >> e) || c1 != ',' || c2 != ',') throw ConfigError(path + ": bad row " + line);
    if (n >= g.ns * g.nz) throw ConfigError(path + ": more rows than grid points");
    const std::size_t i = n / g.nz, j = n % g.nz;
    if (std::abs(s - g.s(i)) > 1e-9 * (1 + g.s_max()) || std::abs(z - g.z(j)) > 1e-9 * (1 + g.z_max()))
      throw ConfigError(path + ": row " + std::to_string(n) + " is not on the solver grid");
    E(i, j) = e;
    ++n;
  }
  if (n != g.ns * g.nz) throw ConfigError(path + ": expected " + std::to_string(g.ns * g.nz) + " rows");
  return E;
}

json solution_json(const GlobalSolution& s) {
  json h = json::array();
  for (const auto& r : s.history) h.push_back({{"gamma", r.gamma}, {"delta", r.delta}, {"active", r.active}});
  return {{"converged", s.converged}, {"iterations", s.iterations}, {"gamma0", s.gamma0},
          {"delta_meas", s.delta_meas}, {"residual", s.residual},    {"history", h}};
}

// ---------------------------------------------------------------------------

int cmd_verify_geometry(Run& r) {
  Timer t(r.timings);
  const ScaleFunction sf = make_scale(r.rc);
  check_pinching(sf, r.report);
  const Reparametrization rep(sf);
  t.mark("setup");
  const GeometrySuite gs = verify_geometry(rep, 50);
  t.mark("suite");
  write_geometry_csv((r.out / "geometry.csv").string(), rep, make_grid(3.0, 50, 0.05 * rep.z_max(),
                                                                       0.95 * rep.z_max(), 50));
  t.mark("export");
  const bool pass = gs.worst <= 1e-6;
  r.report["geometry"] = {{"worst", gs.worst},     {"metric", gs.metric}, {"normal", gs.normal},
                          {"second_form", gs.second_form}, {"normA2", gs.normA2}, {"H", gs.H},
                          {"laplacian", gs.laplacian},     {"points", gs.points}, {"tolerance", 1e-6}};
  std::cout << "geometry oracle: worst relative deviation " << gs.worst << (pass ? " (pass)" : " (FAIL)") << '\n';
  finish(r, pass);
  return pass ? kPass : kFail;
}

int cmd_solve_linear(Run& r, const std::string& kind, const std::string& file) {
  Timer t(r.timings);
  const ScaleFunction sf = make_scale(r.rc);
  check_pinching(sf, r.report);
  const Reparametrization rep(sf);
  const DomainSpec ds = make_domain(r.rc);
  const Grid g = global_grid(rep, ds, r.rc.h_s, r.rc.h_z);
  const GlobalSolver G(rep, ds, g, global_options(r.rc));
  t.mark("setup");
  r.report["grid"] = {{"ns", g.ns}, {"nz", g.nz}, {"h_s", g.hs}, {"h_z", g.hz}, {"s_max", g.s_max()},
                      {"z_max", g.z_max()}, {"pieces", G.pieces().size()}};
  r.report["E"] = kind;

  bool pass = true;
  ScalarField E(g);
  ScalarField exact(g);
  if (kind == "zero") {
  } else if (kind == "gaussian-bump") {
    // made orthogonal to the discrete kernel on rows 1..M-1 so the solution decays
    const double zc = g.z(g.nz / 2);
    const auto& y = G.strip().kernel().y;
    auto g2 = [](double s) { return std::abs(s - 1.0) < 0.5 ? std::exp(-1 / (1 - 4 * (s - 1) * (s - 1))) : 0.0; };
    double y1 = 0, y2 = 0;
    for (std::size_t i = 1; i + 1 < g.ns; ++i) {
      y1 += y[i] * gaussian_bump(g.s(i), zc, zc);
      y2 += y[i] * g2(g.s(i));
    }
    E = ScalarField::sample(g, [&](double s, double z) {
      return gaussian_bump(s, z, zc) - y1 / y2 * g2(s) * gaussian_bump(1.0, z, zc) / gaussian_bump(1.0, zc, zc);
    });
  } else if (kind == "manufactured") {
    const double hs = 0.08 / std::max(1.0, r.report["grid_scale"].get<double>());
    const ConvergenceStudy cs = strip_manufactured_study(6.0, 4.0, {hs, hs / 2, hs / 4});
    t.mark("strip_study");
    bool orders_ok = true;
    for (double o : cs.order) orders_ok = orders_ok && std::abs(o - 2.0) <= 0.2;
    r.report["strip_convergence"] = {{"h", cs.h}, {"error", cs.error}, {"order", cs.order},
                                     {"orthogonality", cs.orthogonality}, {"pass", orders_ok}};
    pass = pass && orders_ok;
    // discrete manufactured field: compact in s, orthogonal to the discrete kernel
    const auto& y = G.strip().kernel().y;
    auto bump = [](double x) { return std::abs(x) < 1 ? std::exp(-1 / (1 - x * x)) : 0.0; };
    auto g1 = [&](double s) { return bump((s - 0.5) / 0.3); };
    auto g2 = [&](double s) { return bump((s - 0.8) / 0.3); };
    double y1 = 0, y2 = 0;
    for (std::size_t i = 0; i < g.ns; ++i) {
      y1 += y[i] * g1(g.s(i));
      y2 += y[i] * g2(g.s(i));
    }
    const double zc = 0.5 * g.z_max();
    exact = ScalarField::sample(g, [&](double s, double z) {
      return bump((z - zc) / 8.0) * (g1(s) - y1 / y2 * g2(s)) * (1 + 0.2 * std::sin(z));
    });
    E = G.apply(exact);
  } else if (kind == "file") {
    if (file.empty()) throw ConfigError("--E file needs --E-file");
    E = read_field(file, g);
  } else {
    throw ConfigError("unknown --E " + kind);
  }

  const GlobalSolution sol = G.solve(E);
  t.mark("solve");
  r.report["solve"] = solution_json(sol);
  pass = pass && sol.converged;
  if (kind == "zero") {
    r.report["zero_solution"] = sol.u.max_abs();
    pass = pass && sol.u.max_abs() == 0.0;
  } else if (kind == "manufactured") {
    const double err = (sol.u - exact).max_abs();
    r.report["manufactured_error"] = err;
    pass = pass && err <= 1e-5;
  } else if (kind == "gaussian-bump") {
    const DecayReport d = decay_certificate(sol.u, g.z(g.nz / 2));
    r.report["decay"] = {{"w", d.w}, {"sbar", d.sbar}, {"monotone", d.monotone_pass},
                         {"weighted_norm", d.weighted_norm}};
    pass = pass && d.monotone_pass;
  }
  write_field(r.out / "u.csv", sol.u);
  t.mark("export");
  std::cout << "solve-linear " << kind << ": iterations " << sol.iterations << ", residual " << sol.residual
            << (pass ? " (pass)" : " (FAIL)") << '\n';
  finish(r, pass);
  return pass ? kPass : kFail;
}

struct Constructed {
  ScaleFunction sf;
  Reparametrization rep;
  DomainSpec ds;
  Grid g;
  GlobalSolver G;
  ConstructionResult res;
};

std::unique_ptr<Constructed> build(Run& r, Timer& t) {
  ScaleFunction sf = make_scale(r.rc);
  check_pinching(sf, r.report);
  Reparametrization rep(sf);
  const DomainSpec ds = make_domain(r.rc);
  const Grid g = global_grid(rep, ds, r.rc.h_s, r.rc.h_z);
  if (g.z_max() < 6 * std::numbers::pi) throw ConfigError("z range below 6 pi; lower scale.c or sigma_min");
  auto c = std::unique_ptr<Constructed>(
      new Constructed{sf, rep, ds, g, GlobalSolver(rep, ds, g, global_options(r.rc)), {}});
  t.mark("setup");
  c->res = construct(c->rep, c->G, fixpoint_options(r.rc));
  t.mark("fixpoint");
  const auto& res = c->res;
  json hist = json::array();
  for (const auto& h : res.history)
    hist.push_back({{"step", h.step}, {"residual", h.residual}, {"factor", h.factor}, {"xi_norm", h.xi_norm},
                    {"inner_iterations", h.inner_iterations}, {"inner_delta", h.inner_delta}});
  r.report["grid"] = {{"ns", g.ns}, {"nz", g.nz}, {"h_s", g.hs}, {"h_z", g.hz}, {"s_max", g.s_max()},
                      {"z_max", g.z_max()}, {"pieces", c->G.pieces().size()}};
  r.report["v0"] = {{"residual", res.v0.residual}, {"gamma0", res.v0.gamma0},
                    {"remainder_constant", res.v0.remainder_constant}, {"norm_c2", res.v0.norm_c2}};
  r.report["fixpoint"] = {{"converged", res.converged}, {"in_ball", res.in_ball}, {"zeta", res.zeta},
                          {"residual", res.residual},   {"fixed_point_gap", res.fixed_point_gap},
                          {"steps", res.history.size() - 1}, {"failure", res.failure}, {"history", hist},
                          {"u_sup", res.u.max_abs()}};
  return c;
}

double blowup_target(const RunConfig& rc) { return rc.kind == "constant" ? 0.0 : -2.0 * rc.p; }

json blowup_json(const BlowupTable& bt, const RunConfig& rc, bool& pass) {
  const double target = blowup_target(rc);
  const double dev = target == 0.0 ? std::abs(bt.slope) : std::abs(bt.slope / target - 1.0);
  pass = target == 0.0 ? dev <= 1e-6 : dev <= 0.05;
  return {{"slope", bt.slope},  {"intercept", bt.intercept}, {"target", target}, {"relative_deviation", dev},
          {"oracle_deviation", bt.oracle_deviation}, {"points", bt.h.size()}, {"pass", pass}};
}

void write_blowup(const fs::path& path, const BlowupTable& bt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "h,supA2\n" << std::setprecision(12);
  for (std::size_t k = 0; k < bt.h.size(); ++k) os << bt.h[k] << ',' << bt.supA2[k] << '\n';
}

int cmd_construct(Run& r) {
  Timer t(r.timings);
  auto c = build(r, t);
  const auto& res = c->res;
  bool ok = res.converged && res.in_ball && res.failure.empty();
  if (!ok) {
    std::cout << "construct: fixed point failed: " << res.failure << '\n';
    finish(r, false);
    return kFail;
  }

  const BlowupTable bt = blowup_table(c->rep, c->G, res.u, 2 * r.rc.sigma_min, 0.5);
  bool slope_ok = false;
  r.report["blowup"] = blowup_json(bt, r.rc, slope_ok);
  write_blowup(r.out / "blowup.csv", bt);
  t.mark("blowup");

  const GraphMesh gm = graph_mesh(c->rep, c->ds, res.u, r.rc.mesh_ns, r.rc.mesh_nz);
  write_obj((r.out / "surface.obj").string(), gm.mesh.verts, gm.rows, gm.cols);
  t.mark("mesh");
  const EmbeddednessReport er = embeddedness_check(gm.mesh);
  t.mark("embeddedness");
  const double hmed = scaled_curvature_median(gm);
  r.report["mesh"] = {{"rows", gm.rows},
                      {"cols", gm.cols},
                      {"triangles", er.triangles},
                      {"candidate_pairs", er.candidate_pairs},
                      {"embedded", er.embedded},
                      {"cotangent_H_median", hmed},
                      {"cotangent_H_target", 10 * r.rc.tol},
                      {"cotangent_H_pass", hmed <= 10 * r.rc.tol}};

  std::vector<double> sig;
  const double s0 = 4 * r.rc.sigma_min, s1 = 0.5;
  for (int k = 0; k < 5; ++k) sig.push_back(s0 * std::pow(s1 / s0, k / 4.0));
  const auto rs = local_rescaling_check(c->rep, res.u, sig, r.rc.rescale_radius);
  json rj = json::array();
  bool rescale_ok = true;
  for (const auto& x : rs) {
    const bool p = x.fit_ok && x.graph_norm <= r.rc.rescale_tol;
    rescale_ok = rescale_ok && p;
    rj.push_back({{"sigma", x.sigma}, {"lambda", x.lambda}, {"graph_norm", x.graph_norm}, {"slope", x.slope},
                  {"points", x.points}, {"fit_ok", x.fit_ok}, {"pass", p}});
  }
  r.report["rescaling"] = rj;
  t.mark("rescaling");

  const bool pass = ok && er.embedded;
  r.report["verdicts"] = {{"converged", res.converged}, {"embedded", er.embedded}, {"blowup_slope", slope_ok},
                          {"rescaling", rescale_ok}};
  std::cout << "construct: steps " << res.history.size() - 1 << ", residual " << res.residual << ", embedded "
            << (er.embedded ? "yes" : "no") << ", blowup slope " << bt.slope << ", " << (pass ? "pass" : "FAIL")
            << '\n';
  finish(r, pass);
  return pass ? kPass : kFail;
}

int cmd_blowup_report(Run& r) {
  Timer t(r.timings);
  auto c = build(r, t);
  const auto& res = c->res;
  if (!res.converged) {
    std::cout << "blowup-report: fixed point failed: " << res.failure << '\n';
    finish(r, false);
    return kFail;
  }
  const BlowupTable bt = blowup_table(c->rep, c->G, res.u, 2 * r.rc.sigma_min, 0.5);
  bool pass = false;
  r.report["blowup"] = blowup_json(bt, r.rc, pass);
  write_blowup(r.out / "blowup.csv", bt);
  t.mark("blowup");
  std::cout << "blowup-report: slope " << bt.slope << " target " << blowup_target(r.rc)
            << (pass ? " (pass)" : " (FAIL)") << '\n';
  finish(r, pass);
  return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  // keep window-sized buffers on the heap between pieces
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 256 << 20);
  CLI::App app{"Minimal graphs over bent, variably scaled helicoids"};
  app.require_subcommand(1);
  std::string config, out, e_kind = "gaussian-bump", e_file;
  double grid_scale = 1.0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--grid-scale", grid_scale, "uniform refinement factor");
  };
  auto* vg = app.add_subcommand("verify-geometry", "closed forms against the finite-difference oracle");
  auto* sl = app.add_subcommand("solve-linear", "global linear solve for a test inhomogeneity");
  auto* co = app.add_subcommand("construct", "fixed point, mesh, embeddedness, blowup and rescaling");
  auto* br = app.add_subcommand("blowup-report", "fixed point and curvature blowup table");
  for (auto* s : {vg, sl, co, br}) common(s);
  sl->add_option("--E", e_kind, "zero | gaussian-bump | manufactured | file");
  sl->add_option("--E-file", e_file, "CSV with header s,z,E on the solver grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    Run r = start(config, out, grid_scale, cmd);
    if (cmd == "verify-geometry") return cmd_verify_geometry(r);
    if (cmd == "solve-linear") return cmd_solve_linear(r, e_kind, e_file);
    if (cmd == "construct") return cmd_construct(r);
    return cmd_blowup_report(r);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kFail;
  }
}
