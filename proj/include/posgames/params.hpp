#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "posgames/error.hpp"

namespace posgames {

// Named constants of the universality proof.  Derived quantities are methods so
// they are never stale; C1 and delta accept explicit overrides.
struct Params {
  int n = 600;
  double alpha = 0.05;
  double C0 = 1.0;
  double gamma = 0.01;
  double c = 0.04;
  std::optional<double> delta_override;
  double beta = 0.05;
  int K = 13;
  std::optional<double> C1_override;
  double edge_prob = 0.7;
  bool universal_v1 = false;
  bool empty_r_star = false;

  int q() const { return (K - 7) / 3; }
  int ell() const { return 15 * (q() + 2) + 7; }
  double delta() const { return delta_override.value_or(0.5 * alpha); }
  double log_n() const { return std::log(static_cast<double>(n)); }
  int m() const { return static_cast<int>(std::floor(C0 * log_n())); }
  int d() const { return static_cast<int>(std::floor(c * n / log_n())); }
  double C1() const { return C1_override.value_or(std::max(100.0 * C0 / alpha, 501.0)); }
  int units() const { return static_cast<int>(std::floor(gamma * n)); }
  int v2_size() const { return 5 * K * units(); }
  int s_star_size() const { return static_cast<int>(std::floor(25.0 * C0 * log_n())); }

  void validate() const {
    auto open01 = [](double x) { return x > 0 && x < 1; };
    require(n >= 2, ErrorCode::invalid_parameter, "n must be at least 2");
    require(open01(alpha) && open01(gamma) && open01(c) && open01(delta()), ErrorCode::invalid_parameter,
            "alpha, gamma, c and delta must lie in (0,1)");
    require(beta > 0 && beta < 1, ErrorCode::invalid_parameter, "beta must lie in (0,1)");
    require(C0 > 0, ErrorCode::invalid_parameter, "C0 must be positive");
    require(K >= 13 && K % 3 == 1, ErrorCode::invalid_parameter, "K must be at least 13 and congruent to 1 mod 3");
    require(edge_prob > 0 && edge_prob <= 1, ErrorCode::invalid_parameter, "edge_prob must lie in (0,1]");
  }

  static Params desk() {
    Params p;
    p.edge_prob = 0.85;
    return p;
  }

  // Desk-scale parameters for the leaves branch: at the desk profile that branch
  // needs C1 gamma n = 12000 leaves, more than n.
  static Params desk_leaves() {
    Params p;
    p.alpha = 0.2;
    p.C0 = 0.16;
    p.c = 0.7;
    p.delta_override = 0.9;
    p.C1_override = 8;
    p.edge_prob = 0.85;
    p.universal_v1 = true;
    p.empty_r_star = true;
    return p;
  }

  static Params paper() {
    Params p;
    p.n = 1000000;
    p.alpha = 1e-8;
    p.C0 = 2000;
    p.gamma = 1e-6;
    p.c = 1e-12;
    p.beta = 0.05;
    p.K = 100;
    return p;
  }
};

inline nlohmann::json params_to_json(const Params& p) {
  nlohmann::json j{{"n", p.n},         {"alpha", p.alpha}, {"C0", p.C0},
                   {"gamma", p.gamma}, {"c", p.c},         {"beta", p.beta},
                   {"K", p.K},         {"edge_prob", p.edge_prob}, {"universal_v1", p.universal_v1},
                   {"empty_r_star", p.empty_r_star}};
  if (p.delta_override) j["delta"] = *p.delta_override;
  if (p.C1_override) j["C1"] = *p.C1_override;
  return j;
}

inline Params params_from_json(const nlohmann::json& j, Params base = {}) {
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      if (k == "n") base.n = it->get<int>();
      else if (k == "alpha") base.alpha = it->get<double>();
      else if (k == "C0") base.C0 = it->get<double>();
      else if (k == "gamma") base.gamma = it->get<double>();
      else if (k == "c") base.c = it->get<double>();
      else if (k == "delta") base.delta_override = it->get<double>();
      else if (k == "beta") base.beta = it->get<double>();
      else if (k == "K") base.K = it->get<int>();
      else if (k == "C1") base.C1_override = it->get<double>();
      else if (k == "edge_prob") base.edge_prob = it->get<double>();
      else if (k == "universal_v1") base.universal_v1 = it->get<bool>();
      else if (k == "empty_r_star") base.empty_r_star = it->get<bool>();
      else if (k != "name") fail(ErrorCode::parse_error, "unknown parameter: " + k);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("bad parameter file: ") + e.what());
  }
  base.validate();
  return base;
}

inline Params load_params(const std::string& path, Params base = {}) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::parse_error, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, path + ": " + e.what());
  }
  return params_from_json(j, base);
}

}  // namespace posgames
