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

#include "pairfuse/repeater.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace pairfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_unit(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

RepeaterParams RepeaterParams::standard(double eta, double L_tot) {
  RepeaterParams p;
  p.eta_d = p.eta_c = eta;
  p.scheme = Scheme::Standard;
  p.L_tot = L_tot;
  p.validate();
  return p;
}

RepeaterParams RepeaterParams::pairwise(double eta, int d, int k, double L_tot) {
  RepeaterParams p;
  p.eta_d = p.eta_c = eta;
  p.scheme = Scheme::Pairwise;
  p.d = d;
  p.k = k;
  p.L_tot = L_tot;
  p.validate();
  return p;
}

void RepeaterParams::validate() const {
  if (!in_unit(eta_d)) throw std::invalid_argument("eta_d must lie in (0, 1]");
  if (!in_unit(eta_c)) throw std::invalid_argument("eta_c must lie in (0, 1]");
  if (scheme == Scheme::Pairwise && d < 2) throw std::invalid_argument("pairwise scheme needs d >= 2");
  if (k < 0 || k > 30) throw std::invalid_argument("k must lie in [0, 30]");
  if (!(L_tot > 0.0)) throw std::invalid_argument("L_tot must be positive");
  if (!(L_att > 0.0)) throw std::invalid_argument("L_att must be positive");
  if (!(c_fiber > 0.0)) throw std::invalid_argument("c_fiber must be positive");
}

double RepeaterParams::p_f() const {
  if (scheme == Scheme::Standard) return 0.5;
  const double boosted = 1.0 - std::pow(static_cast<double>(d), -(k + 1));
  if (k == 0) return boosted;
  return boosted * std::pow(eta_d, 2.0 * (std::ldexp(1.0, k) - 1.0));
}

double RepeaterParams::P_s() const {
  const double e = eta_d * eta_d * eta_c * eta_c;
  return scheme == Scheme::Standard ? e * p_f() : e * e * p_f();
}

double RepeaterParams::P_g(double L0) const { return std::exp(-L0 / L_att) * eta_d * eta_d * p_f(); }

std::string RepeaterParams::scheme_name() const { return scheme == Scheme::Standard ? "standard" : "pairwise"; }

RepeaterParams RepeaterParams::with_length(double L) const {
  RepeaterParams p = *this;
  p.L_tot = L;
  return p;
}

double t0(const RepeaterParams& params, double L0) {
  if (!(L0 > 0.0)) throw std::invalid_argument("L0 must be positive");
  const double pg = params.P_g(L0);
  if (pg == 0.0) return kInf;
  return (L0 / params.c_fiber) / pg;
}

double first_gen_level_time(const RepeaterParams& params, double L0, int k) {
  if (k < 0) throw std::invalid_argument("level must be >= 0");
  const double pg = params.P_g(L0);
  if (pg == 0.0) return kInf;
  const double tau0 = L0 / params.c_fiber;
  const double a = params.alpha();
  const double ak = std::pow(a, k);
  // (a^k - 1) / (a - 1) through expm1/log1p keeps full precision near a = 1.
  const double am1 = a - 1.0;
  const double ratio = am1 == 0.0 ? k : std::expm1(k * std::log1p(am1)) / am1;
  const double bracket = 2.0 * a * ratio / 3.0;
  return std::ldexp(tau0, k) * (ak / pg + bracket);
}

TimeAndMemory t_first(const RepeaterParams& params, int n) {
  if (n < 1) throw std::invalid_argument("first-generation protocol needs n >= 1");
  const double L0 = params.L_tot / std::ldexp(1.0, n);
  const double ps = params.P_s();
  const double T = 3.0 / (2.0 * ps) * first_gen_level_time(params, L0, n - 1);
  return {T, ps * T};
}

PerfResult t_first_opt(const RepeaterParams& params, int n_max) {
  params.validate();
  PerfResult best{kInf, 0, kInf, params.alpha()};
  for (int n = 1; n <= n_max; ++n) {
    const auto r = t_first(params, n);
    if (r.T < best.T) best = {r.T, n, r.memory_time, params.alpha()};
  }
  if (best.nodes == 0) best.nodes = 1;
  return best;
}

double harmonic(int n) {
  double h = 0.0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

TimeAndMemory t_second(const RepeaterParams& params, int m) {
  if (m < 1) throw std::invalid_argument("second-generation protocol needs m >= 1");
  const double L0 = params.L_tot / (m + 1);
  const double tau = harmonic(m + 1) * t0(params, L0);
  return {tau / std::pow(params.P_s(), m), tau};
}

PerfResult t_second_opt(const RepeaterParams& params, int m_max) {
  params.validate();
  PerfResult best{kInf, 0, kInf, params.alpha()};
  for (int m = 1; m <= m_max; ++m) {
    const auto r = t_second(params, m);
    if (r.T < best.T) best = {r.T, m, r.memory_time, params.alpha()};
  }
  if (best.nodes == 0) best.nodes = 1;
  return best;
}

RepeaterParams scheme_params(double eta, int d, int k) {
  return d == 2 ? RepeaterParams::standard(eta) : RepeaterParams::pairwise(eta, d, k);
}

std::vector<AlphaEntry> alpha_table() {
  std::vector<AlphaEntry> out;
  for (double eta : {0.95, 0.99})
    for (int d : {2, 10, 100}) out.push_back({eta, d, scheme_params(eta, d).alpha()});
  return out;
}

std::vector<double> geometric_grid(double start, double stop, int points) {
  if (!(start > 0.0) || !(stop > start) || points < 2) throw std::invalid_argument("geometric grid needs 0 < start < stop and >= 2 points");
  std::vector<double> out;
  const double ratio = std::log(stop / start) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(i == points - 1 ? stop : start * std::exp(ratio * i));
  return out;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (!(start > 0.0) || !(stop > start) || points < 2) throw std::invalid_argument("linear grid needs 0 < start < stop and >= 2 points");
  std::vector<double> out;
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(i == points - 1 ? stop : start + step * i);
  return out;
}

ScalingReport scaling_check(const RepeaterParams& params, std::span<const double> L_grid) {
  ScalingReport report;
  report.alpha = params.alpha();
  if (std::abs(report.alpha - 1.0) < 1e-9) throw std::domain_error("scaling check is undefined at alpha = 1");
  if (L_grid.size() < 5) throw std::invalid_argument("scaling check needs at least 5 grid points");
  const auto [lo, hi] = std::minmax_element(L_grid.begin(), L_grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) throw std::invalid_argument("scaling grid must span at least two decades");

  std::vector<double> xs;
  std::vector<double> ys;
  for (double L : L_grid) {
    const double T = t_first_opt(params.with_length(L)).T;
    xs.push_back(L);
    ys.push_back(T * params.c_fiber / L);
  }
  report.linear_regime = report.alpha < 1.0;
  if (report.linear_regime) {
    double mn = kInf;
    double mx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < *hi / 10.0 * (1.0 - 1e-12)) continue;
      mn = std::min(mn, ys[i]);
      mx = std::max(mx, ys[i]);
    }
    report.last_decade_variation = (mx - mn) / mn;
    report.passed = report.last_decade_variation <= 0.10;
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = std::log(xs[i]);
      const double y = std::log(ys[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.expected_slope = std::log2(report.alpha);
    report.passed = report.slope >= 0.5 * report.expected_slope && report.slope <= 1.3 * report.expected_slope;
  }
  return report;
}

namespace {

class LinkSampler {
 public:
  LinkSampler(double pg, double tau0, std::uint64_t seed) : rng_(seed), cycles_(pg), tau0_(tau0) {}

  double link() { return tau0_ * (static_cast<double>(cycles_(rng_)) + 1.0); }
  bool coin(double p) { return static_cast<double>(rng_() >> 11) * 0x1p-53 < p; }

 private:
  std::mt19937_64 rng_;
  std::geometric_distribution<long long> cycles_;
  double tau0_;
};

void check_mc(const RepeaterParams& params, int trials, double pg) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(pg > 0.0)) throw std::domain_error("link generation probability underflows");
}

double first_gen_level(LinkSampler& sampler, int level, int top, double tau0, double ps) {
  if (level == 0) return sampler.link();
  const double herald = level == top ? 0.0 : std::ldexp(tau0, level - 1);
  double t = 0.0;
  do {
    const double a = first_gen_level(sampler, level - 1, top, tau0, ps);
    const double b = first_gen_level(sampler, level - 1, top, tau0, ps);
    t += std::max(a, b) + herald;
  } while (!sampler.coin(ps));
  return t;
}

}  // namespace

double mc_first_gen(const RepeaterParams& params, int n, int trials, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("first-generation protocol needs n >= 1");
  const double L0 = params.L_tot / std::ldexp(1.0, n);
  const double pg = params.P_g(L0);
  check_mc(params, trials, pg);
  const double tau0 = L0 / params.c_fiber;
  LinkSampler sampler(pg, tau0, seed);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += first_gen_level(sampler, n, n, tau0, params.P_s());
  return sum / trials;
}

double mc_second_gen(const RepeaterParams& params, int m, int trials, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("second-generation protocol needs m >= 1");
  const double L0 = params.L_tot / (m + 1);
  const double pg = params.P_g(L0);
  check_mc(params, trials, pg);
  LinkSampler sampler(pg, L0 / params.c_fiber, seed);
  const double swap = std::pow(params.P_s(), m);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    do {
      double slowest = 0.0;
      for (int link = 0; link <= m; ++link) slowest = std::max(slowest, sampler.link());
      sum += slowest;
    } while (!sampler.coin(swap));
  }
  return sum / trials;
}

std::vector<SweepRow> repeater_sweep(std::span<const double> etas, std::span<const int> ds, int k,
                                     std::span<const double> L_grid, std::span<const int> generations) {
  std::vector<SweepRow> rows;
  for (double eta : etas) {
    for (int d : ds) {
      const RepeaterParams base = scheme_params(eta, d, k);
      for (int gen : generations) {
        if (gen != 1 && gen != 2) throw std::invalid_argument("generation must be 1 or 2");
        for (double L : L_grid) {
          const RepeaterParams p = base.with_length(L);
          const PerfResult r = gen == 1 ? t_first_opt(p) : t_second_opt(p);
          rows.push_back({L, p.scheme_name(), d, p.scheme == Scheme::Standard ? 0 : k, eta, gen, r.T, r.nodes,
                          r.memory_time, p.alpha()});
        }
      }
    }
  }
  return rows;
}

std::string sweep_csv_header() {
  return "L_tot_km,scheme,d,k,eta,generation,T_seconds,nodes_opt,memory_time_seconds,alpha";
}

std::string to_csv(const SweepRow& row) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, "%.6g,%s,%d,%d,%.6g,%s,%.10e,%d,%.10e,%.10g", row.L_tot_km, row.scheme.c_str(),
                row.d, row.k, row.eta, row.generation == 1 ? "first" : "second", row.T_seconds, row.nodes_opt,
                row.memory_time_seconds, row.alpha);
  return buffer;
}

}  // namespace pairfuse
