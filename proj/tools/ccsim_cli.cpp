// ccsim command line: Monte Carlo simulation, parameter sweeps, closed-form
// bound reports and cross-scheme property batteries for cache-aided coded
// multicast delivery.
//
// Exit codes: 0 success, 2 invalid configuration, 3 capability limit,
// 4 property-battery failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "ccsim/ccsim.hpp"
#include "ccsim/json_io.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid_config = 2;
constexpr int exit_capability = 3;
constexpr int exit_battery_failure = 4;

struct CommonFlags {
  int K = 0;
  int N = 0;
  double M = -1;
  int F = 0;
  int F_prime = 0;
  std::string placement = "new_random";
  std::string delivery = "greedy";
  int gain = 0;
  std::string demand = "distinct";
  std::string fixed_demand;  // comma separated, 1-based
  long long trials = 1;
  std::uint64_t seed = 0;
  int grouping_size = 0;
  int workers = 1;
  bool resample_demands = false;
  double tail_eps = 0.1;
  std::string out;
  std::string format = "csv";
  std::string config_path;
};

void add_param_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--K", f.K, "number of users");
  cmd->add_option("--N", f.N, "number of library files");
  cmd->add_option("--M", f.M, "cache size in files");
  cmd->add_option("--F", f.F, "packets per file");
  cmd->add_option("--F-prime", f.F_prime, "packet groups per file (grouped layout)");
}

void add_experiment_flags(CLI::App* cmd, CommonFlags& f) {
  add_param_flags(cmd, f);
  cmd->add_option("--placement", f.placement,
                  "old_random | new_random | deterministic_grouped");
  cmd->add_option("--delivery", f.delivery,
                  "greedy | old_enum | modified | deterministic | optimal");
  cmd->add_option("--g", f.gain, "target gain (deterministic) / pull-down level (modified)");
  cmd->add_option("--demand", f.demand, "distinct | uniform | fixed");
  cmd->add_option("--fixed-demand", f.fixed_demand, "comma separated 1-based files, one per user");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--grouping-size", f.grouping_size, "run placement+delivery per user group");
  cmd->add_option("--workers", f.workers, "concurrent trial workers");
  cmd->add_flag("--resample-demands", f.resample_demands,
                "draw a fresh demand per trial instead of fixing it");
  cmd->add_option("--tail-eps", f.tail_eps, "epsilon for the reported tail probability");
  cmd->add_option("--out", f.out, "output path (stdout when omitted)");
  cmd->add_option("--format", f.format, "csv | json");
}

ccsim::ExperimentConfig experiment_from_flags(const CommonFlags& f) {
  ccsim::json j;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ccsim::InstanceError("cannot open config file: " + f.config_path);
    in >> j;
  }
  auto set_if = [&](const char* key, auto value, auto unset) {
    if (value != unset) j[key] = value;
  };
  set_if("K", f.K, 0);
  set_if("N", f.N, 0);
  if (f.M >= 0) j["M"] = f.M;
  set_if("F", f.F, 0);
  set_if("F_prime", f.F_prime, 0);
  if (!j.contains("placement") || f.placement != "new_random") j["placement"] = f.placement;
  if (!j.contains("delivery") || f.delivery != "greedy") j["delivery"] = f.delivery;
  set_if("g", f.gain, 0);
  if (!j.contains("demand") || f.demand != "distinct") j["demand"] = f.demand;
  if (!f.fixed_demand.empty()) {
    std::vector<int> files;
    std::stringstream ss(f.fixed_demand);
    std::string tok;
    while (std::getline(ss, tok, ',')) files.push_back(std::stoi(tok));
    j["fixed_demand"] = files;
  }
  if (f.resample_demands) j["resample_demands"] = true;
  set_if("grouping_size", f.grouping_size, 0);
  if (f.trials != 1 || !j.contains("trials")) j["trials"] = f.trials;
  if (f.seed != 0 || !j.contains("seed")) j["seed"] = f.seed;
  if (f.workers != 1 || !j.contains("workers")) j["workers"] = f.workers;
  if (!j.contains("tail_eps") || f.tail_eps != 0.1) j["tail_eps"] = f.tail_eps;

  // deterministic placement convenience: derive F = C(K', g) when omitted
  if (j.value("placement", "") == std::string("deterministic_grouped") && !j.contains("F") &&
      !j.contains("F_prime")) {
    ccsim::SystemParams probe;
    probe.num_users = j.at("K").get<int>();
    probe.num_files = j.at("N").get<int>();
    probe.cache_files = j.at("M").get<double>();
    probe.packets_per_file = 1;
    int g = j.value("g", 0);
    if (g >= 1)
      j["F"] = ccsim::binomial(g * probe.group_size(), g);
  }
  return ccsim::experiment_from_json(j);
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ccsim::InstanceError("cannot open output path: " + path);
  out << payload;
}

int cmd_simulate(const CommonFlags& flags) {
  ccsim::ExperimentConfig cfg = experiment_from_flags(flags);
  ccsim::RunResult result = ccsim::run_trials(cfg);
  if (flags.format == "json") {
    write_output(flags.out, ccsim::to_json(result).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    ccsim::write_trial_csv_header(csv);
    ccsim::write_trial_csv_rows(csv, result);
    write_output(flags.out, csv.str());
  }
  std::cerr << "mean rate " << result.stats.mean << " over " << result.stats.trials
            << " trials (std " << result.stats.stddev << ")\n";
  return exit_ok;
}

int cmd_sweep(const CommonFlags& flags, const std::string& grid_path, bool resume) {
  std::ifstream in(grid_path);
  if (!in) throw ccsim::InstanceError("cannot open grid file: " + grid_path);
  ccsim::json grid_json;
  in >> grid_json;
  ccsim::SweepSpec spec = ccsim::sweep_from_json(grid_json);

  std::set<std::string> done;
  bool existing = false;
  if (resume && !flags.out.empty()) {
    std::ifstream prior(flags.out);
    if (prior) {
      std::string line;
      bool header = true;
      while (std::getline(prior, line)) {
        if (header) {
          header = false;
          continue;
        }
        auto comma = line.find(',');
        if (comma != std::string::npos) done.insert(line.substr(0, comma));
      }
      existing = !done.empty();
    }
  }

  if (flags.format == "json") {
    ccsim::json rows = ccsim::json::array();
    ccsim::for_each_sweep_cell(spec, done, [&](const std::string& key, const ccsim::json& cell) {
      ccsim::RunResult result = ccsim::run_trials(ccsim::experiment_from_json(cell));
      ccsim::json row{{"cell", key}, {"config", ccsim::to_json(result.cfg)},
                      {"stats", ccsim::to_json(result.stats)}};
      rows.push_back(std::move(row));
      std::cerr << "cell " << key << " mean " << result.stats.mean << "\n";
    });
    write_output(flags.out, rows.dump(2) + "\n");
    return exit_ok;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!flags.out.empty()) {
    file.open(flags.out, existing ? std::ios::app : std::ios::out);
    if (!file) throw ccsim::InstanceError("cannot open output path: " + flags.out);
    out = &file;
  }
  if (!existing) ccsim::write_sweep_csv_header(*out);
  ccsim::for_each_sweep_cell(spec, done, [&](const std::string& key, const ccsim::json& cell) {
    ccsim::RunResult result = ccsim::run_trials(ccsim::experiment_from_json(cell));
    ccsim::write_sweep_csv_row(*out, key, result);
    out->flush();
    std::cerr << "cell " << key << " mean " << result.stats.mean << "\n";
  });
  return exit_ok;
}

int cmd_bounds(const CommonFlags& flags, std::optional<double> eps,
               std::optional<double> expected_rate, double sizing_c) {
  if (flags.K < 1 || flags.N < 1 || flags.M < 0)
    throw ccsim::InstanceError("bounds needs --K, --N and --M");
  long long F = flags.F;
  std::optional<int> F_prime;
  if (flags.F_prime > 0) {
    F_prime = flags.F_prime;
    if (F == 0 && flags.M > 0) {
      ccsim::SystemParams probe{flags.K, flags.N, flags.M, 1, 0};
      F = static_cast<long long>(probe.group_size()) * flags.F_prime;
    }
  }
  std::optional<int> g;
  if (flags.gain > 0) g = flags.gain;

  ccsim::BoundReport report = ccsim::make_bound_report(flags.K, flags.N, flags.M, F, F_prime, g,
                                                       eps, expected_rate, sizing_c);
  ccsim::json j = ccsim::to_json(report);
  if (flags.format == "table") {
    std::ostringstream table;
    const ccsim::json flat = j.flatten();
    for (auto it = flat.begin(); it != flat.end(); ++it) {
      std::string key = it.key();
      for (char& c : key)
        if (c == '/') c = '.';
      table << "  " << key.substr(1);
      for (std::size_t pad = key.size(); pad < 44; ++pad) table << ' ';
      table << it.value().dump() << "\n";
    }
    write_output(flags.out, table.str());
  } else {
    write_output(flags.out, j.dump(2) + "\n");
  }
  return exit_ok;
}

int cmd_verify(std::uint64_t seed, int equality, int decode, int dominance, int pulldown,
               int equality_K, const std::string& out, const std::string& format) {
  ccsim::VerifyOptions opt;
  opt.seed = seed;
  opt.equality_instances = equality;
  opt.decode_trials = decode;
  opt.dominance_instances = dominance;
  opt.pulldown_instances = pulldown;
  if (equality_K > 0) opt.equality_users = equality_K;
  ccsim::VerifyReport report = ccsim::verify_suite(opt);

  if (format == "text") {
    std::ostringstream text;
    for (const auto& b : report.batteries) {
      text << b.name << ": " << b.status << " (" << b.checked << " checked, " << b.failures
           << " failures)";
      if (!b.detail.empty()) text << ": " << b.detail;
      text << "\n";
    }
    write_output(out, text.str());
  } else {
    write_output(out, ccsim::to_json(report).dump(2) + "\n");
  }
  return report.all_pass ? exit_ok : exit_battery_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and analysis of cache-aided coded multicast delivery"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "run one experiment (flags or --config JSON)");
  simulate->add_option("--config", sim_flags.config_path, "experiment JSON file");
  add_experiment_flags(simulate, sim_flags);

  CommonFlags sweep_flags;
  std::string grid_path;
  bool no_resume = false;
  auto* sweep = app.add_subcommand("sweep", "run a Cartesian grid of experiments");
  sweep->add_option("--grid", grid_path, "sweep JSON: {base: {...}, axes: [...]}")->required();
  sweep->add_option("--out", sweep_flags.out, "output path; existing cells are skipped");
  sweep->add_option("--format", sweep_flags.format, "csv | json");
  sweep->add_flag("--no-resume", no_resume, "recompute every cell even if present in --out");

  CommonFlags bound_flags;
  double eps = -1;
  double expected_rate = -1;
  double sizing_c = 1.0;
  auto* bounds = app.add_subcommand("bounds", "evaluate closed-form rates, bounds, thresholds");
  add_param_flags(bounds, bound_flags);
  bounds->add_option("--g", bound_flags.gain, "target gain for the file-size lower bound");
  bounds->add_option("--eps", eps, "epsilon for the concentration bounds");
  bounds->add_option("--expected-rate", expected_rate,
                     "override the expected rate the bounds are evaluated at");
  bounds->add_option("--sizing-c", sizing_c, "constant c in F' = c*C(K',g)*log(C(K',g))^2");
  bounds->add_option("--out", bound_flags.out, "output path");
  bounds->add_option("--format", bound_flags.format, "json | table");

  std::uint64_t verify_seed = 0x5eedbeefULL;
  int verify_equality = 200, verify_decode = 1000, verify_dominance = 100, verify_pulldown = 100;
  int verify_K = 0;
  std::string verify_out, verify_format = "json";
  auto* verify = app.add_subcommand("verify", "run the cross-scheme property batteries");
  verify->add_option("--seed", verify_seed, "battery seed");
  verify->add_option("--equality-instances", verify_equality, "instances for the equality battery");
  verify->add_option("--decode-trials", verify_decode, "trials for the decodability battery");
  verify->add_option("--dominance-instances", verify_dominance, "instances for the oracle battery");
  verify->add_option("--pulldown-instances", verify_pulldown, "instances for the pull-down battery");
  verify->add_option("--K", verify_K, "force a user count for the equality battery");
  verify->add_option("--out", verify_out, "output path");
  verify->add_option("--format", verify_format, "json | text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags);
    if (sweep->parsed()) {
      sweep_flags.format = sweep_flags.format.empty() ? "csv" : sweep_flags.format;
      return cmd_sweep(sweep_flags, grid_path, !no_resume);
    }
    if (bounds->parsed())
      return cmd_bounds(bound_flags, eps >= 0 ? std::optional<double>(eps) : std::nullopt,
                        expected_rate >= 0 ? std::optional<double>(expected_rate) : std::nullopt,
                        sizing_c);
    if (verify->parsed())
      return cmd_verify(verify_seed, verify_equality, verify_decode, verify_dominance,
                        verify_pulldown, verify_K, verify_out, verify_format);
  } catch (const ccsim::CapabilityError& e) {
    std::cerr << "capability limit: " << e.what() << "\n";
    return exit_capability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid_config;
  }
  return exit_ok;
}
