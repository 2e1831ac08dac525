#pragma once

#include "rotnft/geometry.hpp"
#include "rotnft/system.hpp"

#include <map>
#include <optional>

namespace rotnft {

// Expected audit outcome for a built-in scenario (encoded from the source
// family's known behavior), compared against the computed audit by the CLI.
struct ExpectedFlags {
  std::optional<bool> ipc;
  std::optional<bool> h3;
  std::optional<bool> h4;
  std::optional<bool> h5;
  std::optional<bool> h6;
};

struct Scenario {
  std::string name;
  ControlAffineSystem system;
  Constraint constraint;
  SingularSetModel singular;
  ExpectedFlags expected;
  std::map<std::string, double> params;
};

// Built-in names: brockett_flat, brockett_power, brockett_general,
// brockett_nonlinear, h6_violator, counterexample.
std::vector<std::string> scenario_names();

// Throws DomainError listing the alternatives for an unknown name.
Scenario make_scenario(const std::string& name,
                       const std::map<std::string, double>& params = {});

// Brockett closed-form trajectory from the origin under (cos wt, sin wt).
Vector brockett_closed_form(double omega, double t);

// A rotational reference process stub for nft sweeps: from x0 (default the
// origin), control (cos w0 t, sin w0 t) on [0, T]. Solves for w0 on the
// large-frequency branch so the violation extent is approximately d.
double brockett_omega_for_violation(double d, double T);

}  // namespace rotnft
