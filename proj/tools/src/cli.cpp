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

#include "pairfuse/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairfuse/pfg.hpp"
#include "pairfuse/repeater.hpp"
#include "pairfuse/stabilizer_lemma.hpp"
#include "pairfuse/swapping.hpp"

namespace pairfuse::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, spec, value);
  return buffer;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Pulls --config out of the arguments and appends the file's entries that
// the command line does not set.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  for (const auto& [key, value] : read_config(*path))
    if (!has_flag(args, key)) args.push_back("--" + key + "=" + value);
  return args;
}

Json pair_json(PairSpec p) { return Json::array({p.first, p.second}); }

Json params_json(const std::optional<PsiParams>& p) {
  if (!p) return nullptr;
  return Json{{"x", pair_json(p->x)}, {"z", pair_json(p->z)}, {"sign", std::string(1, to_char(p->sign))}};
}

bool pfg_within_capacity(int d, int k) { return (k <= 1 && d <= 5) || (k == 2 && d <= 3); }

// ---- pfg-verify ----

struct PfgOptions {
  std::string d = "2..3";
  std::string k = "0..1";
  double tolerance = 1e-9;
  bool labels = false;
  std::string format = "text";
};

int cmd_pfg_verify(const PfgOptions& o, std::ostream& out, std::ostream& err) {
  const auto ds = parse_int_range(o.d);
  const auto ks = parse_int_range(o.k);
  for (int d : ds)
    if (d < 2) throw UsageError("d must be >= 2");
  for (int k : ks)
    if (k < 0) throw UsageError("k must be >= 0");
  for (int d : ds) {
    for (int k : ks) {
      if (!pfg_within_capacity(d, k)) {
        err << "capacity error: (d=" << d << ", k=" << k
            << ") exceeds the Fock engine guard (d <= 5 for k <= 1, d <= 3 for k = 2)\n";
        return kUsageError;
      }
    }
  }

  bool all = true;
  Json cases = Json::array();
  if (o.format == "text") {
    out << "note: Phi(i,j,+-) outcomes carry weight c_k = sum_{p=1}^k d^-p\n";
    out << "   d  k  patterns  max_residual  weight_dev  prob_dev   p_f(formula)  p_f(engine)  povm_dev  status\n";
  }
  for (int d : ds) {
    for (int k : ks) {
      const KrausVerification v = verify_kraus(build_circuit(d, k), o.tolerance);
      const PovmCheck povm = povm_completeness(d, k);
      const bool passed = v.passed && povm.max_deviation <= 1e-12 &&
                          std::abs(v.empirical_success - v.analytic_success) <= o.tolerance;
      all = all && passed;
      if (o.format == "text") {
        char line[256];
        std::snprintf(line, sizeof line, "%4d %2d %9zu  %12.3e  %10.3e  %8.3e  %12.6f  %11.6f  %8.1e  %s\n", d, k,
                      v.patterns, v.max_residual, v.max_weight_deviation, v.max_probability_deviation,
                      v.analytic_success, v.empirical_success, povm.max_deviation, passed ? "PASS" : "FAIL");
        out << line;
        if (o.labels) {
          for (const auto& [label, s] : v.labels) {
            std::snprintf(line, sizeof line, "        %-12s weight %.9f (expected %.9f) patterns %zu\n",
                          label.to_string().c_str(), s.observed_weight, s.expected_weight, s.patterns);
            out << line;
          }
        }
        for (const auto& f : v.failures) out << "        failure: " << f << "\n";
      } else {
        Json labels = Json::array();
        for (const auto& [label, s] : v.labels)
          labels.push_back({{"label", label.to_string()},
                            {"expected_weight", s.expected_weight},
                            {"observed_weight", s.observed_weight},
                            {"patterns", s.patterns}});
        cases.push_back({{"d", d},
                         {"k", k},
                         {"patterns", v.patterns},
                         {"max_residual", v.max_residual},
                         {"max_weight_deviation", v.max_weight_deviation},
                         {"max_probability_deviation", v.max_probability_deviation},
                         {"p_f_formula", v.analytic_success},
                         {"p_f_engine", v.empirical_success},
                         {"phi_weight", phi_weight(d, k)},
                         {"povm_deviation", povm.max_deviation},
                         {"labels", labels},
                         {"failures", v.failures},
                         {"passed", passed}});
      }
    }
  }
  if (o.format == "json") out << Json{{"command", "pfg-verify"}, {"cases", cases}, {"passed", all}}.dump(2) << "\n";
  else out << (all ? "PASS" : "FAIL") << "\n";
  return all ? kPass : kVerificationFailure;
}

// ---- swap-demo ----

struct SwapOptions {
  int d = 3;
  int k = 0;
  int chain = 1;
  std::string trace;
  std::string format = "text";
};

int cmd_swap_demo(const SwapOptions& o, std::ostream& out, std::ostream& err) {
  if (o.d < 2 || o.k < 0 || o.chain < 1) throw UsageError("need d >= 2, k >= 0, chain >= 1");
  if (o.d > 5 || o.k > 2 || o.chain > 5) {
    err << "capacity error: swap-demo enumerates every branch; limits are d <= 5, k <= 2, chain <= 5\n";
    return kUsageError;
  }
  if (o.d % 2 == 0)
    err << "warning: even d admits doubly degenerate M(y,z) measurements (y0 - y1 = z1 - z0 = d/2)\n";

  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (o.trace == "-") {
    trace = &out;
  } else if (!o.trace.empty()) {
    trace_file.open(o.trace);
    if (!trace_file) throw UsageError("cannot write trace file " + o.trace);
    trace = &trace_file;
  }
  std::function<void(const ChainEvent&)> sink;
  if (trace) {
    sink = [trace](const ChainEvent& e) {
      *trace << Json{{"stage", e.stage},
                     {"left", e.left},
                     {"right", e.right},
                     {"path", e.path},
                     {"probability", e.probability},
                     {"success", e.success},
                     {"params", params_json(e.params)}}
                    .dump()
             << "\n";
    };
  }

  const ChainReport r = run_chain(o.d, o.k, o.chain, sink);
  const double pf = 1.0 - std::pow(static_cast<double>(o.d), -(o.k + 1));
  bool closed = true;
  for (const auto& s : r.stages) {
    closed = closed && s.non_canonical == 0 && std::abs(s.success_probability - pf) <= 1e-9 &&
             std::abs(s.min_pair_success - pf) <= 1e-9 && std::abs(s.max_pair_success - pf) <= 1e-9 &&
             s.max_branch_probability_error <= 1e-9;
  }
  closed = closed && r.min_bell_fidelity >= 1.0 - 1e-9;

  if (o.format == "json") {
    Json stages = Json::array();
    for (const auto& s : r.stages)
      stages.push_back({{"stage", s.stage},
                        {"left_classes", s.left_classes},
                        {"right_classes", s.right_classes},
                        {"success_probability", s.success_probability},
                        {"min_pair_success", s.min_pair_success},
                        {"max_pair_success", s.max_pair_success},
                        {"success_branches", s.success_branches},
                        {"non_canonical", s.non_canonical}});
    Json classes = Json::array();
    for (const auto& c : r.final_classes)
      classes.push_back({{"params", params_json(c.params)}, {"probability", c.probability}, {"bell_fidelity", c.bell_fidelity}});
    out << Json{{"command", "swap-demo"},
                {"d", o.d},
                {"k", o.k},
                {"chain", o.chain},
                {"fuse_success", r.fuse_success},
                {"expected_success", pf},
                {"stages", stages},
                {"final_classes", classes},
                {"min_bell_fidelity", r.min_bell_fidelity},
                {"passed", closed}}
               .dump(2)
        << "\n";
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "d=%d k=%d chain=%d  expected success 1 - d^-(k+1) = %.6f\n", o.d, o.k, o.chain, pf);
    out << line;
    std::snprintf(line, sizeof line, "fuse C (x) C: success %.6f\n", r.fuse_success);
    out << line;
    out << "stage  left  right  success    min_pair   max_pair   branches  non_canonical\n";
    for (const auto& s : r.stages) {
      std::snprintf(line, sizeof line, "%5d %5zu %6zu  %.6f   %.6f   %.6f   %8zu  %13zu\n", s.stage, s.left_classes,
                    s.right_classes, s.success_probability, s.min_pair_success, s.max_pair_success, s.success_branches,
                    s.non_canonical);
      out << line;
    }
    out << "canonical forms after the last stage:\n";
    out << "  x       z       s  probability  fidelity\n";
    for (const auto& c : r.final_classes) {
      std::snprintf(line, sizeof line, "  %-7s %-7s %c  %.9f  %.9f\n", c.params.x.to_string().c_str(),
                    c.params.z.to_string().c_str(), to_char(c.params.sign), c.probability, c.bell_fidelity);
      out << line;
    }
    std::snprintf(line, sizeof line, "final Bell fidelity %.9f\n", r.min_bell_fidelity);
    out << line;
    out << (closed ? "PASS" : "FAIL: closure violation") << "\n";
  }
  return closed ? kPass : kVerificationFailure;
}

// ---- repeater-sweep ----

struct SweepOptions {
  std::string eta = "0.95,0.99";
  std::string d = "2,10,100";
  int k = 0;
  std::string L = "100:5000:50";
  std::string grid = "geometric";
  std::string gen = "first,second";
  std::string out;
};

std::vector<double> parse_grid(const std::string& spec, const std::string& kind) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("--L expects start:stop:points");
  const double start = to_double(parts[0]);
  const double stop = to_double(parts[1]);
  const int points = to_int(parts[2]);
  return kind == "linear" ? linear_grid(start, stop, points) : geometric_grid(start, stop, points);
}

std::vector<int> parse_generations(const std::string& text) {
  std::vector<int> out;
  for (const auto& g : split(text, ',')) {
    if (g == "first" || g == "1") out.push_back(1);
    else if (g == "second" || g == "2") out.push_back(2);
    else throw UsageError("unknown generation '" + g + "'");
  }
  return out;
}

int cmd_repeater_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const auto etas = parse_double_list(o.eta);
  const auto ds = parse_int_range(o.d);
  const auto L = parse_grid(o.L, o.grid);
  const auto gens = parse_generations(o.gen);
  std::vector<SweepRow> rows;
  try {
    rows = repeater_sweep(etas, ds, o.k, L, gens);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::filesystem::path path;
  const char* dir = std::getenv(kOutputDirEnv);
  if (!o.out.empty() && o.out != "-") {
    path = o.out;
    if (path.is_relative() && dir && *dir) path = std::filesystem::path(dir) / path;
  } else if (o.out.empty() && dir && *dir) {
    path = std::filesystem::path(dir) / "repeater_sweep.csv";
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!path.empty()) {
    file.open(path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << path.string() << "\n";
      return kVerificationFailure;
    }
    sink = &file;
  }
  *sink << sweep_csv_header() << "\n";
  for (const auto& r : rows) *sink << to_csv(r) << "\n";
  sink->flush();
  if (!*sink) {
    err << "error: write failed\n";
    return kVerificationFailure;
  }
  if (!path.empty()) err << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  return kPass;
}

// ---- lemma-check ----

struct LemmaOptions {
  std::string k = "0..2";
  std::string p;
  std::string d = "2..3";
  std::string format = "text";
};

std::string pattern_list(const std::vector<FockBasisState>& patterns) {
  std::string s;
  for (const auto& p : patterns) s += (s.empty() ? "" : " ") + p.to_string();
  return s;
}

int cmd_lemma_check(const LemmaOptions& o, std::ostream& out, std::ostream& err) {
  const auto ks = parse_int_range(o.k);
  const auto ds = parse_int_range(o.d);
  const std::optional<std::vector<int>> ps =
      o.p.empty() ? std::nullopt : std::optional<std::vector<int>>(parse_int_range(o.p));
  std::vector<StabilizerSpec> specs;
  for (int k : ks) {
    std::vector<int> plist;
    if (ps) {
      plist = *ps;
    } else {
      for (int p = 0; p <= k; ++p) plist.push_back(p);
    }
    for (int p : plist) {
      if (p > k) throw UsageError("p = " + std::to_string(p) + " exceeds k = " + std::to_string(k));
      for (int d : ds) {
        if (d > 5 || k > 2) {
          err << "capacity error: lemma-check is limited to d <= 5, k <= 2\n";
          return kUsageError;
        }
        try {
          specs.push_back(StabilizerSpec::make(k, p, d));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
    }
  }
  const bool show = specs.size() == 1;

  bool all = true;
  Json results = Json::array();
  for (const auto& spec : specs) {
    bool passed = true;
    double worst = 0.0;
    Json cases = Json::array();
    for (const auto& c : lemma_cases(spec)) {
      const LemmaReport r = verify_lemma(c.plus, c.minus, spec, 1e-9, show);
      passed = passed && r.passed;
      worst = std::max(worst, r.max_wrong_parity_amplitude);
      if (o.format == "json") {
        Json entry{{"case", c.name},
                   {"plus_support", r.plus_support},
                   {"minus_support", r.minus_support},
                   {"max_wrong_parity_amplitude", r.max_wrong_parity_amplitude},
                   {"passed", r.passed}};
        if (show) {
          Json plus = Json::array();
          Json minus = Json::array();
          for (const auto& p : r.plus_patterns) plus.push_back(p.to_string());
          for (const auto& p : r.minus_patterns) minus.push_back(p.to_string());
          entry["plus_patterns"] = plus;
          entry["minus_patterns"] = minus;
        }
        cases.push_back(entry);
      } else if (show) {
        out << "  " << c.name << "\n";
        out << "    S+ : " << pattern_list(r.plus_patterns) << "\n";
        out << "    S- : " << pattern_list(r.minus_patterns) << "\n";
      }
    }
    all = all && passed;
    if (o.format == "json") {
      results.push_back({{"k", spec.k}, {"p", spec.p}, {"d", spec.d}, {"cases", cases},
                         {"max_wrong_parity_amplitude", worst}, {"passed", passed}});
    } else {
      out << (passed ? "PASS " : "FAIL ") << spec.to_string() << "  max wrong-parity amplitude "
          << fmt("%.2e", worst) << "\n";
    }
  }
  if (o.format == "json") out << Json{{"command", "lemma-check"}, {"specs", results}, {"passed", all}}.dump(2) << "\n";
  return all ? kPass : kVerificationFailure;
}

}  // namespace

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dots));
    const int hi = to_int(item.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pairfuse: pairwise fusion gate verification and repeater sweeps", "pairfuse"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  app.add_option("--config", "key=value file; command-line flags take precedence");

  PfgOptions pfg;
  auto* pfg_cmd = app.add_subcommand("pfg-verify", "Derive the fusion-gate Kraus operators and compare with the closed form");
  pfg_cmd->add_option("--d", pfg.d, "qudit dimensions, e.g. 3 or 2..5")->capture_default_str();
  pfg_cmd->add_option("--k", pfg.k, "ancilla levels, e.g. 0..1")->capture_default_str();
  pfg_cmd->add_option("--tol", pfg.tolerance, "amplitude tolerance")->capture_default_str();
  pfg_cmd->add_flag("--labels", pfg.labels, "list per-label weights");
  pfg_cmd->add_option("--format", pfg.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  SwapOptions swap;
  auto* swap_cmd = app.add_subcommand("swap-demo", "Run a boosted entanglement swapping chain over all branches");
  swap_cmd->add_option("--d", swap.d, "qudit dimension")->capture_default_str();
  swap_cmd->add_option("--k", swap.k, "ancilla levels")->capture_default_str();
  swap_cmd->add_option("--chain", swap.chain, "number of swapping stages")->capture_default_str();
  swap_cmd->add_option("--trace", swap.trace, "write branch trace as JSON lines ('-' for stdout)");
  swap_cmd->add_option("--format", swap.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("repeater-sweep", "Optimized distribution time over a distance grid (CSV)");
  sweep_cmd->add_option("--eta", sweep.eta, "efficiencies, comma separated")->capture_default_str();
  sweep_cmd->add_option("--d", sweep.d, "dimensions; 2 selects the standard scheme")->capture_default_str();
  sweep_cmd->add_option("--k", sweep.k, "ancilla levels for the pairwise scheme")->capture_default_str();
  sweep_cmd->add_option("--L", sweep.L, "distance grid start:stop:points in km")->capture_default_str();
  sweep_cmd->add_option("--grid", sweep.grid)->check(CLI::IsMember({"geometric", "linear"}))->capture_default_str();
  sweep_cmd->add_option("--gen", sweep.gen, "first, second or both")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out,
                        std::string("output CSV ('-' for stdout); relative paths and the default go to $") +
                            kOutputDirEnv + " when set");

  LemmaOptions lemma;
  auto* lemma_cmd = app.add_subcommand("lemma-check", "Check the parity separation lemma on the fusion circuit");
  lemma_cmd->add_option("--k", lemma.k)->capture_default_str();
  lemma_cmd->add_option("--p", lemma.p, "defaults to 0..k");
  lemma_cmd->add_option("--d", lemma.d)->capture_default_str();
  lemma_cmd->add_option("--format", lemma.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*pfg_cmd) return cmd_pfg_verify(pfg, out, err);
    if (*swap_cmd) return cmd_swap_demo(swap, out, err);
    if (*sweep_cmd) return cmd_repeater_sweep(sweep, out, err);
    if (*lemma_cmd) return cmd_lemma_check(lemma, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const EngineCapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace pairfuse::cli
