// Copyright 2026 The calsig authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "calsig/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "calsig/ir.hpp"
#include "calsig/json_io.hpp"
#include "calsig/marginals.hpp"
#include "calsig/oracle.hpp"
#include "calsig/prior.hpp"
#include "calsig/signaling.hpp"
#include "calsig/sim.hpp"
#include "calsig/transport.hpp"

namespace calsig {

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

struct PriorArgs {
  std::string lambda_csv;
  std::string bernoulli;
  std::string prior_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda_csv,
                    "click-count masses lambda[0..n], comma separated");
    cmd->add_option("--bernoulli", bernoulli, "independent clicks as 'n,p'");
    cmd->add_option("--prior-file", prior_file, "JSON file holding the prior");
  }

  PriorBySum resolve() const {
    const int given = (!lambda_csv.empty()) + (!bernoulli.empty()) + (!prior_file.empty());
    if (given != 1)
      throw std::invalid_argument(
          "exactly one of --lambda, --bernoulli, --prior-file is required");
    if (!lambda_csv.empty()) {
      const std::vector<double> l = parse_csv_doubles(lambda_csv);
      if (l.size() < 3) throw std::invalid_argument("--lambda needs at least 3 entries");
      return PriorBySum::from_lambdas(static_cast<int>(l.size()) - 1, l);
    }
    if (!bernoulli.empty()) {
      const std::vector<double> v = parse_csv_doubles(bernoulli);
      if (v.size() != 2) throw std::invalid_argument("--bernoulli expects 'n,p'");
      return PriorBySum::from_bernoulli(static_cast<int>(v[0]), v[1]);
    }
    std::ifstream in(prior_file);
    if (!in) throw std::invalid_argument("cannot open " + prior_file);
    return prior_from_json(nlohmann::ordered_json::parse(in));
  }
};

ThresholdConvention parse_convention(const std::string& s) {
  if (s == "appendix") return ThresholdConvention::appendix;
  if (s == "main" || s == "main_text") return ThresholdConvention::main_text;
  throw std::invalid_argument("--convention must be 'appendix' or 'main'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::ordered_json read_json(const std::string& path) {
  if (path.empty() || path == "-") return nlohmann::ordered_json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return nlohmann::ordered_json::parse(in);
}

int worker_count(int jobs) {
  int threads = 0;
  if (const char* env = std::getenv("CALSIG_THREADS")) threads = std::atoi(env);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  return std::min(threads, jobs);
}

void print_design_summary(const CalibratedSignaling& sig) {
  std::ostringstream os;
  os << "variant=" << sig.meta.variant << " n=" << sig.prior.n
     << " region=" << sig.meta.region << " t1=" << fmt12(sig.meta.t1)
     << " t0=" << fmt12(sig.meta.t0);
  if (sig.meta.has_ir)
    os << " epsilon=" << fmt12(sig.meta.epsilon) << " M=" << sig.meta.M
       << " t0_ir=" << fmt12(sig.meta.t0_ir);
  os << " revenue=" << fmt12(revenue(sig))
     << " welfare=" << fmt12(sig.prior.welfare());
  std::cerr << os.str() << "\n";
}

int cmd_design(const PriorArgs& pa, const std::string& conv, const std::string& out) {
  const PriorBySum prior = pa.resolve();
  const CalibratedSignaling sig = design_optimal(prior, parse_convention(conv));

  // The bundle records the thresholds under both low-signal conventions so a
  // reader can tell how much the choice moves the design.
  const LinSysSolution lin = solve_linsys(prior);
  const Thresholds ta = optimal_thresholds(prior, lin, ThresholdConvention::appendix);
  const Thresholds tm = optimal_thresholds(prior, lin, ThresholdConvention::main_text);
  nlohmann::ordered_json j = signaling_to_json(sig);
  j["meta"]["thresholds"] = {
      {"appendix", {{"t1", ta.t1}, {"t0", ta.t0}}},
      {"main_text", {{"t1", tm.t1}, {"t0", tm.t0}}},
  };

  write_text(out, j.dump(2) + "\n");
  print_design_summary(sig);
  std::cerr << "thresholds appendix t1=" << fmt12(ta.t1) << " t0=" << fmt12(ta.t0)
            << " | main t1=" << fmt12(tm.t1) << " t0=" << fmt12(tm.t0) << "\n";
  return 0;
}

int cmd_design_ir(const PriorArgs& pa, double eps, const std::string& conv,
                  const std::string& out) {
  const CalibratedSignaling sig = design_ir(pa.resolve(), eps, parse_convention(conv));
  write_text(out, signaling_to_json(sig).dump(2) + "\n");
  print_design_summary(sig);
  const UtilityReport ur = exante_utility(sig);
  std::cerr << "exante utility total=" << fmt12(ur.total) << "\n";
  return 0;
}

int cmd_simulate(const std::string& in, long long samples, std::uint64_t seed,
                 const std::string& out, const std::string& csv_out) {
  const CalibratedSignaling sig = signaling_from_json(read_json(in));
  SimOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  const SimReport rep = simulate(sig, opt);
  write_text(out, sim_report_to_json(rep).dump(2) + "\n");
  if (!csv_out.empty()) {
    std::ostringstream csv;
    csv << "value,impressions,clicks,click_rate\n";
    for (const auto& row : rep.calibration) {
      const double rate = row.impressions > 0
                              ? static_cast<double>(row.clicks) / row.impressions
                              : 0.0;
      csv << fmt12(row.value) << ',' << row.impressions << ',' << row.clicks
          << ',' << fmt12(rate) << "\n";
    }
    write_text(csv_out, csv.str());
  }
  std::cerr << "revenue " << fmt12(rep.revenue_mean) << " +/- "
            << fmt12(rep.revenue_stderr) << " (" << rep.samples << " samples)\n";
  return 0;
}

bool verify_bundle(const std::string& in, double tol) {
  const CalibratedSignaling sig = signaling_from_json(read_json(in));
  bool ok = true;

  double worst_plan_dev = 0.0;
  for (int k = 0; k <= sig.prior.n; ++k) {
    if (sig.prior.lambda[k] <= 0.0) continue;
    if (sig.plans[k].rows.empty()) {
      std::cout << "[FAIL] class " << k << ": missing plan\n";
      ok = false;
      continue;
    }
    const PlanCheck pc = check_plan_feasible(
        sig.plans[k], k >= 1 ? &sig.family.f1[k] : nullptr,
        k <= sig.prior.n - 1 ? &sig.family.f0[k] : nullptr, std::max(tol, 1e-9));
    worst_plan_dev = std::max(worst_plan_dev, pc.worst_marginal_dev);
    if (!pc.ok) {
      std::cout << "[FAIL] class " << k << ": " << pc.note << "\n";
      ok = false;
    }
  }
  if (ok) std::cout << "[OK] plans match the family (worst deviation "
                    << fmt12(worst_plan_dev) << ")\n";

  const SignalCalibration cal = verify_calibration(sig, tol);
  if (cal.calibrated) {
    std::cout << "[OK] calibrated (worst deviation " << fmt12(cal.worst_dev)
              << ")\n";
  } else {
    std::cout << "[FAIL] calibration off by " << fmt12(cal.worst_dev)
              << " at value " << fmt12(cal.worst_value) << "\n";
    ok = false;
  }
  std::cout << "revenue " << fmt12(revenue(sig)) << "\n";
  return ok;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Built-in self tests with externally known answers. The coupling example is
// the four-bidder pair from the transport docs; the n=2 check pits the
// designer against an exhaustive grid optimum; the scan check replays the
// one-dimensional threshold objective against the closed form.
void run_oracle_checks(std::vector<CheckResult>& checks) {
  const DiscreteDist f1 =
      DiscreteDist::from_atoms({{1.0, 0.4}, {0.8, 0.4}, {0.2, 0.2}});
  const DiscreteDist f0 =
      DiscreteDist::from_atoms({{0.8, 0.2}, {0.2, 0.2}, {0.0, 0.6}});
  const TransportPlan plan = correlate_general(2, &f1, &f0, 4);
  const PlanCheck pc = check_plan_feasible(plan, &f1, &f0, 1e-9);
  const DiscreteDist sm = induced_secmax(plan);
  const double bound = secmax_upper_bound(2, &f1, &f0, 4);
  const double bf = brute_force_transport(2, &f1, &f0, 4);
  checks.push_back(
      {"coupling hits its upper bound on the stock four-bidder example",
       pc.ok && std::abs(sm.mean() - 0.88) <= 1e-12 &&
           std::abs(sm.mass_at(1.0) - 0.4) <= 1e-12 &&
           std::abs(sm.mass_at(0.8) - 0.6) <= 1e-12 &&
           std::abs(sm.mean() - bound) <= 1e-12 &&
           std::abs(sm.mean() - bf) <= 1e-7,
       "value " + fmt12(sm.mean()) + ", exhaustive " + fmt12(bf)});

  const PriorBySum p2 = PriorBySum::from_lambdas(2, {0.25, 0.5, 0.25});
  const CalibratedSignaling sig = design_optimal(p2);
  std::vector<double> grid{0.0, sig.meta.t0, sig.meta.t1, 1.0};
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const double lp = grid_lp_optimal(p2, grid);
  const double rev = revenue(sig);
  checks.push_back({"designed revenue matches the exhaustive grid optimum at n=2",
                    std::abs(lp - rev) <= 1e-6,
                    "design " + fmt12(rev) + ", grid " + fmt12(lp)});

  const PriorBySum p3 = PriorBySum::from_lambdas(3, {0.1, 0.4, 0.4, 0.1});
  const LinSysSolution lin = solve_linsys(p3);
  const MarginalScan scan =
      scan_marginal_objective(p3, 4000, ThresholdConvention::appendix);
  checks.push_back({"threshold objective scan agrees with the closed form",
                    std::abs(scan.x_star - lin.x_star) <= 1e-5,
                    "scan " + fmt12(scan.x_star) + ", closed form " +
                        fmt12(lin.x_star)});
}

int cmd_verify(const std::string& in, double tol, const std::string& json_out) {
  std::vector<CheckResult> checks;
  bool ok = true;
  if (!in.empty()) ok = verify_bundle(in, tol);
  run_oracle_checks(checks);
  for (const CheckResult& c : checks) {
    std::cout << (c.pass ? "[OK] " : "[FAIL] ") << c.name << " (" << c.detail
              << ")\n";
    ok = ok && c.pass;
  }
  if (!json_out.empty()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CheckResult& c : checks)
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    nlohmann::ordered_json rep{{"pass", ok}, {"checks", arr}};
    write_text(json_out, rep.dump(2) + "\n");
  }
  return ok ? 0 : 1;
}

struct SweepRow {
  double p = 0.0, welfare = 0.0, rev_opt = 0.0, rev_ir = 0.0, rev_full = 0.0;
  double t1 = 0.0, t0 = 0.0;
  int region = 1;
};

SweepRow sweep_row(int n, double eps, double p) {
  SweepRow row;
  row.p = p;
  if (p <= 0.0) return row;
  if (p >= 1.0) {
    row.welfare = row.rev_opt = row.rev_ir = row.rev_full = row.t1 = 1.0;
    return row;
  }
  const IrSummary s = ir_design_summary(PriorBySum::from_bernoulli(n, p), eps,
                                        /*enforce_validity=*/false);
  row.welfare = s.welfare;
  row.rev_opt = s.rev_opt;
  row.rev_ir = s.rev_ir;
  row.rev_full = s.rev_full;
  row.t1 = s.t1;
  row.t0 = s.t0;
  row.region = s.region;
  return row;
}

int cmd_sweep(int n, double eps, double p_start, double p_end, int steps,
              const std::string& out) {
  if (n < 2) throw std::invalid_argument("--n must be at least 2");
  if (steps < 1) throw std::invalid_argument("--p-steps must be at least 1");
  if (!(p_start >= 0.0 && p_end <= 1.0 && p_start <= p_end))
    throw std::invalid_argument("need 0 <= p-start <= p-end <= 1");

  std::vector<double> ps(steps);
  for (int i = 0; i < steps; ++i)
    ps[i] = steps == 1 ? p_start
                       : p_start + (p_end - p_start) * i / (steps - 1);

  std::vector<SweepRow> rows(ps.size());
  const int threads = worker_count(static_cast<int>(ps.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < ps.size(); ++i) rows[i] = sweep_row(n, eps, ps[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < ps.size(); i = next++) {
          try {
            rows[i] = sweep_row(n, eps, ps[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::ostringstream csv;
  csv << "p,welfare,rev_opt,rev_ir,rev_full,t1,t0,region\n";
  for (const SweepRow& r : rows)
    csv << fmt12(r.p) << ',' << fmt12(r.welfare) << ',' << fmt12(r.rev_opt) << ','
        << fmt12(r.rev_ir) << ',' << fmt12(r.rev_full) << ',' << fmt12(r.t1) << ','
        << fmt12(r.t0) << ',' << r.region << "\n";
  write_text(out, csv.str());
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"calibrated signaling designer for pay-per-click second-price auctions"};
  app.require_subcommand(1);

  PriorArgs design_prior, ir_prior;
  std::string design_conv = "appendix", ir_conv = "appendix";
  std::string design_out = "-", ir_out = "-", sim_in = "-", sim_out = "-";
  std::string sim_csv, ver_in, ver_json;
  std::string sweep_out = "-";
  double ir_eps = 0.0, ver_tol = 1e-9;
  long long sim_samples = 1000000;
  std::uint64_t sim_seed = 1;
  int sweep_n = 20, sweep_steps = 50;
  double sweep_eps = 1e-5, sweep_pstart = 0.01, sweep_pend = 0.5;

  CLI::App* design = app.add_subcommand("design", "revenue-optimal calibrated scheme");
  design_prior.attach(design);
  design->add_option("--convention", design_conv, "low-threshold convention: appendix|main");
  design->add_option("--out", design_out, "output JSON path, '-' for stdout");

  CLI::App* dir = app.add_subcommand("design-ir", "participation-safe scheme");
  ir_prior.attach(dir);
  dir->add_option("--epsilon", ir_eps, "revenue slack of the ladder")->required();
  dir->add_option("--convention", ir_conv, "low-threshold convention: appendix|main");
  dir->add_option("--out", ir_out, "output JSON path, '-' for stdout");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo audit of a scheme");
  sim->add_option("--in", sim_in, "signaling JSON path, '-' for stdin");
  sim->add_option("--samples", sim_samples, "number of auction draws");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--out", sim_out, "report JSON path, '-' for stdout");
  sim->add_option("--csv", sim_csv, "also write per-signal calibration rows as CSV");

  CLI::App* ver = app.add_subcommand("verify", "feasibility and calibration checks");
  ver->add_option("--in", ver_in, "signaling JSON to audit; omit for self checks only");
  ver->add_option("--tol", ver_tol, "calibration tolerance");
  ver->add_option("--json", ver_json, "write the pass/fail report as JSON");

  CLI::App* sweep = app.add_subcommand("sweep", "compare designs across Bernoulli priors");
  sweep->add_option("--n", sweep_n, "number of bidders");
  sweep->add_option("--epsilon", sweep_eps, "ladder slack for the rational variant");
  sweep->add_option("--p-start", sweep_pstart, "first click probability");
  sweep->add_option("--p-end", sweep_pend, "last click probability");
  sweep->add_option("--p-steps", sweep_steps, "number of evenly spaced grid points");
  sweep->add_option("--out", sweep_out, "CSV path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (design->parsed()) return cmd_design(design_prior, design_conv, design_out);
    if (dir->parsed()) return cmd_design_ir(ir_prior, ir_eps, ir_conv, ir_out);
    if (sim->parsed()) return cmd_simulate(sim_in, sim_samples, sim_seed, sim_out, sim_csv);
    if (ver->parsed()) return cmd_verify(ver_in, ver_tol, ver_json);
    if (sweep->parsed())
      return cmd_sweep(sweep_n, sweep_eps, sweep_pstart, sweep_pend, sweep_steps, sweep_out);
  } catch (const nlohmann::ordered_json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace calsig
