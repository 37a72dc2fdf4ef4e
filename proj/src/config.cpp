#include "helicoid/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace helicoid {

namespace {

using nlohmann::json;

const json& section(const json& j, const char* name, const std::set<std::string>& keys) {
  static const json empty = json::object();
  if (!j.contains(name)) return empty;
  const json& s = j.at(name);
  if (!s.is_object()) throw ConfigError(std::string(name) + ": expected an object");
  for (const auto& [k, v] : s.items())
    if (!keys.count(k)) throw ConfigError(std::string("unknown key ") + name + "." + k);
  return s;
}

template <class T>
bool read(const json& s, const char* sec, const char* key, T& out) {
  if (!s.contains(key)) return false;
  const json& v = s.at(key);
  const std::string name = std::string(sec) + "." + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(name + ": expected a string");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(name + ": expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(name + ": expected a non-negative integer");
  } else {
    if (!v.is_number()) throw ConfigError(name + ": expected a number");
  }
  out = v.get<T>();
  return true;
}

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (k != "scale" && k != "domain" && k != "solver" && k != "fixpoint" && k != "checks" && k != "output")
      throw ConfigError("unknown key " + k);
  RunConfig rc;
  const json& sc = section(j, "scale", {"kind", "c", "p", "epsilon", "C0", "C1", "sigma_min"});
  read(sc, "scale", "kind", rc.kind);
  if (rc.kind != "constant" && rc.kind != "power") throw ConfigError("scale.kind must be constant or power");
  read(sc, "scale", "c", rc.c);
  if (rc.kind == "constant") rc.p = 0.0;
  const bool has_p = read(sc, "scale", "p", rc.p);
  if (rc.kind == "constant" && has_p && rc.p != 0.0) throw ConfigError("scale.p must be 0 for constant kind");
  rc.epsilon = rc.kind == "constant" ? 0.5 : (rc.p - 1.0) / rc.p;
  rc.C1 = std::max(1.0, rc.p);
  read(sc, "scale", "epsilon", rc.epsilon);
  read(sc, "scale", "C0", rc.C0);
  read(sc, "scale", "C1", rc.C1);
  read(sc, "scale", "sigma_min", rc.sigma_min);

  const json& dm = section(j, "domain", {"tau"});
  read(dm, "domain", "tau", rc.tau);

  const json& so = section(j, "solver", {"h_s", "h_z", "rtol", "max_iter", "delta_bar"});
  read(so, "solver", "h_s", rc.h_s);
  read(so, "solver", "h_z", rc.h_z);
  read(so, "solver", "rtol", rc.rtol);
  read(so, "solver", "max_iter", rc.max_iter);
  read(so, "solver", "delta_bar", rc.delta_bar);

  const json& fp = section(j, "fixpoint", {"tol", "max_steps"});
  read(fp, "fixpoint", "tol", rc.tol);
  read(fp, "fixpoint", "max_steps", rc.max_steps);

  const json& ck = section(j, "checks", {"rescale_radius", "rescale_tol", "mesh_ns", "mesh_nz"});
  read(ck, "checks", "rescale_radius", rc.rescale_radius);
  read(ck, "checks", "rescale_tol", rc.rescale_tol);
  read(ck, "checks", "mesh_ns", rc.mesh_ns);
  read(ck, "checks", "mesh_nz", rc.mesh_nz);

  const json& out = section(j, "output", {"dir", "deterministic"});
  read(out, "output", "dir", rc.out_dir);
  read(out, "output", "deterministic", rc.deterministic);

  positive(rc.c, "scale.c");
  if (rc.kind == "power" && !(rc.p >= 0.0)) throw ConfigError("scale.p must be >= 0");
  if (!(rc.epsilon > 0.0 && rc.epsilon < 1.0)) throw ConfigError("scale.epsilon must lie in (0, 1)");
  positive(rc.C0, "scale.C0");
  positive(rc.C1, "scale.C1");
  if (!(rc.sigma_min > 0.0 && rc.sigma_min < 1.0)) throw ConfigError("scale.sigma_min must lie in (0, 1)");
  positive(rc.tau, "domain.tau");
  if (!(1.0 - 20.0 * rc.tau > 0.0)) throw ConfigError("domain.tau must satisfy 1 - 20 tau > 0");
  positive(rc.h_s, "solver.h_s");
  positive(rc.h_z, "solver.h_z");
  positive(rc.rtol, "solver.rtol");
  if (rc.max_iter == 0) throw ConfigError("solver.max_iter must be positive");
  positive(rc.delta_bar, "solver.delta_bar");
  positive(rc.tol, "fixpoint.tol");
  if (rc.max_steps == 0) throw ConfigError("fixpoint.max_steps must be positive");
  positive(rc.rescale_radius, "checks.rescale_radius");
  positive(rc.rescale_tol, "checks.rescale_tol");
  if (rc.mesh_ns < 2) throw ConfigError("checks.mesh_ns must be >= 2");
  if (rc.out_dir.empty()) throw ConfigError("output.dir must not be empty");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& rc) {
  return {
      {"scale",
       {{"kind", rc.kind}, {"c", rc.c}, {"p", rc.p}, {"epsilon", rc.epsilon}, {"C0", rc.C0}, {"C1", rc.C1},
        {"sigma_min", rc.sigma_min}}},
      {"domain", {{"tau", rc.tau}}},
      {"solver",
       {{"h_s", rc.h_s}, {"h_z", rc.h_z}, {"rtol", rc.rtol}, {"max_iter", rc.max_iter}, {"delta_bar", rc.delta_bar}}},
      {"fixpoint", {{"tol", rc.tol}, {"max_steps", rc.max_steps}}},
      {"checks",
       {{"rescale_radius", rc.rescale_radius},
        {"rescale_tol", rc.rescale_tol},
        {"mesh_ns", rc.mesh_ns},
        {"mesh_nz", rc.mesh_nz}}},
      {"output", {{"dir", rc.out_dir}, {"deterministic", rc.deterministic}}},
  };
}

RunConfig refine(RunConfig rc, double grid_scale) {
  if (!(grid_scale > 0.0) || !std::isfinite(grid_scale)) throw ConfigError("--grid-scale must be positive");
  rc.h_s /= grid_scale;
  rc.h_z /= grid_scale;
  return rc;
}

ScaleFunction make_scale(const RunConfig& rc) {
  const Pinching pin{rc.epsilon, rc.C0, rc.C1};
  try {
    if (rc.kind == "constant") return ScaleFunction::constant(rc.c, pin, rc.sigma_min, 1.0);
    return ScaleFunction::power(rc.c, rc.p, pin, rc.sigma_min, 1.0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

DomainSpec make_domain(const RunConfig& rc) {
  try {
    return make_domain(make_scale(rc), rc.tau);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

GlobalOptions global_options(const RunConfig& rc) { return {rc.rtol, rc.max_iter, rc.delta_bar}; }

FixpointOptions fixpoint_options(const RunConfig& rc) {
  FixpointOptions o;
  o.tol = rc.tol;
  o.max_steps = rc.max_steps;
  return o;
}

}  // namespace helicoid
