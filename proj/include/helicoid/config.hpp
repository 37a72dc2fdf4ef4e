#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "helicoid/fixpoint.hpp"
#include "helicoid/globlin.hpp"
#include "helicoid/scalefn.hpp"

namespace helicoid {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // scale
  std::string kind = "power";  // constant | power
  double c = 0.05;
  double p = 1.5;
  double epsilon = 1.0 / 3.0;  // pinching exponent; power default (p - 1) / p
  double C0 = 1.0;
  double C1 = 1.5;             // power default max(1, p)
  double sigma_min = 1e-3;
  // domain
  double tau = 0.04;
  // solver
  double h_s = 0.05;
  double h_z = 0.1;
  double rtol = 1e-8;
  std::size_t max_iter = 30;
  double delta_bar = 0.5;
  // fixpoint
  double tol = 1e-8;
  std::size_t max_steps = 50;
  // checks
  double rescale_radius = 0.5;
  double rescale_tol = 0.05;
  std::size_t mesh_ns = 200;
  std::size_t mesh_nz = 0;     // 0: max(2000, z_max / 0.3)
  // output
  std::string out_dir = "out";
  bool deterministic = true;
};

/// Missing keys take defaults; unknown keys, wrong types and invalid values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Every effective value.
nlohmann::json to_json(const RunConfig& rc);
/// Divides h_s and h_z by the factor.
RunConfig refine(RunConfig rc, double grid_scale);

ScaleFunction make_scale(const RunConfig& rc);
DomainSpec make_domain(const RunConfig& rc);
GlobalOptions global_options(const RunConfig& rc);
FixpointOptions fixpoint_options(const RunConfig& rc);

}  // namespace helicoid
