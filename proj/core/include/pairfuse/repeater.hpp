// Copyright 2026 The pairfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Distribution-time model for first- and second-generation repeaters built
// from fusion gates, with photon loss as the only error.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pairfuse {

enum class Scheme { Standard, Pairwise };

struct RepeaterParams {
  double eta_d = 1.0;
  double eta_c = 1.0;
  Scheme scheme = Scheme::Standard;
  int d = 2;
  int k = 0;
  /// km
  double L_tot = 100.0;
  double L_att = 22.0;
  /// km/s
  double c_fiber = 2e5;

  /// eta_d = eta_c = eta.
  static RepeaterParams standard(double eta, double L_tot = 100.0);
  static RepeaterParams pairwise(double eta, int d, int k = 0, double L_tot = 100.0);

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  double p_f() const;
  double P_s() const;
  double P_g(double L0) const;
  double alpha() const { return 3.0 / (4.0 * P_s()); }
  std::string scheme_name() const;
  RepeaterParams with_length(double L) const;
};

struct PerfResult {
  double T = 0.0;
  int nodes = 0;
  double memory_time = 0.0;
  double alpha = 0.0;
};

struct TimeAndMemory {
  double T = 0.0;
  double memory_time = 0.0;
};

/// Mean time to herald one elementary link of length L0: (L0/c) / P_g(L0).
double t0(const RepeaterParams& params, double L0);

/// Closed form T_k = 2^k tau0 (alpha^k / P_g + 2 alpha (alpha^k - 1) / (3 (alpha - 1)))
/// for links of level k built on segments of length L0. Infinite if P_g
/// underflows.
double first_gen_level_time(const RepeaterParams& params, double L0, int k);

/// 2^n segments; T = 3/(2 P_s) T_{n-1}, memory time P_s T.
TimeAndMemory t_first(const RepeaterParams& params, int n);
PerfResult t_first_opt(const RepeaterParams& params, int n_max = 30);

/// H(m+1) = 1 + 1/2 + ... + 1/(m+1).
double harmonic(int n);

/// m + 1 segments; T = H(m+1) T_0 / P_s^m, memory time H(m+1) T_0.
TimeAndMemory t_second(const RepeaterParams& params, int m);
PerfResult t_second_opt(const RepeaterParams& params, int m_max = 200);

struct AlphaEntry {
  double eta = 0.0;
  /// 2 stands for the standard scheme.
  int d = 2;
  double alpha = 0.0;
};

/// alpha for (eta, d) in {0.95, 0.99} x {2, 10, 100}.
std::vector<AlphaEntry> alpha_table();

/// Standard for d == 2, Pairwise(d, k) otherwise.
RepeaterParams scheme_params(double eta, int d, int k = 0);

std::vector<double> geometric_grid(double start, double stop, int points);
std::vector<double> linear_grid(double start, double stop, int points);

struct ScalingReport {
  double alpha = 0.0;
  bool linear_regime = false;
  /// alpha < 1: relative spread (max - min) / min of c T*/L over the last decade.
  double last_decade_variation = 0.0;
  /// alpha > 1: least-squares slope of log(T*/L) against log L.
  double slope = 0.0;
  double expected_slope = 0.0;
  bool passed = false;
};

/// Throws std::domain_error for |alpha - 1| < 1e-9 and std::invalid_argument
/// for grids with fewer than 5 points or spanning less than two decades.
ScalingReport scaling_check(const RepeaterParams& params, std::span<const double> L_grid);

/// Event-driven estimate of T_first(n): geometric link generation, max of
/// two sub-links, and swapping retried with probability P_s.
double mc_first_gen(const RepeaterParams& params, int n, int trials, std::uint64_t seed);
/// Event-driven estimate of T_second(m): all m + 1 links in parallel, then
/// unheralded swapping succeeding with probability P_s^m.
double mc_second_gen(const RepeaterParams& params, int m, int trials, std::uint64_t seed);

struct SweepRow {
  double L_tot_km = 0.0;
  std::string scheme;
  int d = 2;
  int k = 0;
  double eta = 0.0;
  int generation = 1;
  double T_seconds = 0.0;
  int nodes_opt = 0;
  double memory_time_seconds = 0.0;
  double alpha = 0.0;
};

/// One row per (eta, d, generation, L) in that nesting order.
std::vector<SweepRow> repeater_sweep(std::span<const double> etas, std::span<const int> ds, int k,
                                     std::span<const double> L_grid, std::span<const int> generations);

std::string sweep_csv_header();
std::string to_csv(const SweepRow& row);

}  // namespace pairfuse
