#pragma once

#include "bosecert/scattering.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bosecert {

struct PotentialSpec {
  std::string kind = "square-well"; // square-well | table
  double v0 = 2.0;
  double R = 1.0;
  std::string table; // path, for kind = table

  RadialPotential build() const;
};

struct Tolerances {
  double scatter = 1e-8;
  double born = 1e-2;
  double fourier = 1e-6;
  double integrals = 1e-6;
  double sliding = 1e-5;
  double kinetic_F0 = 1e-10;
  double momentum = 1e-6;
  double vertex = 1e-12;
  double c0_stability = 0.05;
  double lhy = 1e-6;
  double potsplit = 1e-12;
  double commutator = 1e-10;
  double ed = 1e-10;
  double number = 1e-10;
};

// Shared input for every suite. Text format: one `key = value` per line, `#` comments,
// lists comma separated, potential as `{kind: "square-well", v0: 2, R: 1}`.
struct RunConfig {
  PotentialSpec potential;
  double steepness = 1.0;

  // Box geometry; rho_mu wins over rho_a3 when both are given.
  std::optional<double> rho_mu;
  double rho_a3 = 1e-6;
  double K = 10.0;
  double L_over_ell = 4.0;
  double s = 0.02;
  double b = 1e-3;
  double Xi = 3.0;
  double delta = 0.2;
  double epsilon = 0.0;
  double kappa = 0.4;

  Tolerances tol;

  std::vector<double> fourier_k{0.5, 1.0, 2.0, 5.0};
  std::vector<double> K_list{5.0, 10.0};
  int sliding_pairs = 20;
  std::vector<double> kinetic_s{0.02, 0.03, 0.04};
  std::vector<double> kinetic_b{1e-3, 1e-2, 1e-1};
  std::size_t kinetic_max_points = 200000;
  std::vector<double> sweep_rho_a3{1e-6, 1e-7, 1e-8};
  int bogoliubov_refine = 2;
  double C_gap = 1.0;
  double C_error = 1.0;
  bool strict_gap = false;

  double potsplit_ell = 2.2;
  std::vector<std::array<int, 2>> potsplit_cases{{{2, 2}}, {{2, 3}}, {{3, 2}}};
  int interaction_samples = 200;
  int commutator_M = 3;
  std::vector<int> commutator_N{1, 2, 3};

  double ed_L = 4.0;
  int ed_N = 3;
  int ed_cutoff = 4;
  std::vector<double> ed_couplings{0.25, 0.5, 1.0};
  double ed_weak_v0 = 0.02;
  std::string eigenvector_dump; // empty: no dump

  std::uint64_t seed = 20240607;
  std::string output_dir = "bose-cert-out";

  nlohmann::json to_json() const;
};

// Throws ConfigError with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Checks that only need the config. Throws ConfigError.
void validate_config(const RunConfig& cfg);

// Geometry at a diluteness value given a and the support radius R. Checks the support and box
// conditions and throws ConfigError naming the violated one.
struct ResolvedGeometry {
  double a = 0.0;
  double rho_mu = 0.0;
  double ell = 0.0;
  double L = 0.0;
};
ResolvedGeometry resolve_geometry(const RunConfig& cfg, double a, double R, double rho_a3,
                                  double K);

} // namespace bosecert
