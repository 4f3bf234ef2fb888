#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ccsim/analysis.hpp"
#include "ccsim/cache.hpp"
#include "ccsim/delivery.hpp"
#include "ccsim/placement.hpp"
#include "ccsim/plan.hpp"
#include "ccsim/rational.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/stats.hpp"
#include "ccsim/system.hpp"

namespace ccsim {

enum class DemandGenMode { DistinctWorstCase, UniformRandom, Fixed };

inline const char* to_string(DemandGenMode m) {
  switch (m) {
    case DemandGenMode::DistinctWorstCase: return "distinct_worst_case";
    case DemandGenMode::UniformRandom: return "uniform_random";
    case DemandGenMode::Fixed: return "fixed";
  }
  return "?";
}

/// One experiment: a placement scheme, a delivery scheme, a demand mode and a
/// trial budget. The per-trial seed is split(seed, trial); placement, demand
/// and pull-down draw from disjoint labeled streams of it.
struct ExperimentConfig {
  SystemParams params;
  PlacementSpec placement;
  DeliverySpec delivery;
  DemandGenMode demand_mode{DemandGenMode::DistinctWorstCase};
  std::vector<int> fixed_demand;  // 0-based, demand_mode == Fixed
  bool resample_demands{false};   // default: demand fixed, expectation over caching
  int grouping_size{0};           // harness-level user grouping, 0 = whole system
  long long trials{1};
  std::uint64_t seed{0};
  int workers{1};
  double tail_eps{0.1};

  void validate() const {
    params.validate();
    if (trials < 1) throw InstanceError("need at least one trial");
    if (demand_mode == DemandGenMode::DistinctWorstCase && params.num_files < params.num_users)
      throw InstanceError("distinct demands require N >= K");
    if (demand_mode == DemandGenMode::Fixed &&
        static_cast<int>(fixed_demand.size()) != params.num_users)
      throw InstanceError("fixed demand must list one file per user");
    if (grouping_size > 0) {
      UserGrouping{params.num_users, grouping_size}.validate();
      if (placement.scheme == PlacementScheme::DeterministicGrouped)
        throw InstanceError("deterministic placement groups users itself; "
                            "drop the harness grouping");
    }
    if (placement.scheme == PlacementScheme::DeterministicGrouped &&
        delivery.scheme != DeliveryScheme::Deterministic)
      throw InstanceError("deterministic placement pairs with the deterministic delivery");
    if (delivery.scheme == DeliveryScheme::Deterministic &&
        placement.scheme != PlacementScheme::DeterministicGrouped)
      throw InstanceError("deterministic delivery needs the deterministic placement");
    if (delivery.scheme == DeliveryScheme::Modified && delivery.gain < 1)
      throw InstanceError("modified delivery needs a pull-down level g >= 1");
  }

  /// g column reported in records: the scheme parameter actually in play.
  int effective_gain() const {
    if (delivery.scheme == DeliveryScheme::Modified) return delivery.gain;
    if (placement.scheme == PlacementScheme::DeterministicGrouped) return placement.gain;
    return 0;
  }
};

inline std::uint64_t trial_seed(std::uint64_t master, long long index) {
  return derive(master, stream::trial, static_cast<std::uint64_t>(index));
}

inline Demand gen_demand(const SystemParams& params, DemandGenMode mode, std::uint64_t seed,
                         const std::vector<int>* fixed = nullptr) {
  Demand d;
  switch (mode) {
    case DemandGenMode::DistinctWorstCase: {
      if (params.num_files < params.num_users)
        throw InstanceError("distinct demands require N >= K");
      d.files.resize(params.num_users);
      std::iota(d.files.begin(), d.files.end(), 0);
      d.mode = DemandMode::Distinct;
      break;
    }
    case DemandGenMode::UniformRandom: {
      Rng rng = make_stream(seed, stream::demand);
      d.files.resize(params.num_users);
      for (int& f : d.files)
        f = static_cast<int>(rng.below(static_cast<std::uint64_t>(params.num_files)));
      d.mode = DemandMode::Arbitrary;
      break;
    }
    case DemandGenMode::Fixed: {
      if (!fixed) throw InstanceError("fixed demand mode without a demand list");
      d.files = *fixed;
      d.mode = DemandMode::Arbitrary;
      break;
    }
  }
  d.validate(params);
  return d;
}

struct TrialRecord {
  long long trial{0};
  std::uint64_t seed{0};
  long long transmissions{0};
  Rational rate;
};

struct RunResult {
  ExperimentConfig cfg;
  std::vector<TrialRecord> records;
  RateStats stats;
};

namespace detail {

inline TransmissionPlan deliver_for(const ExperimentConfig& cfg, const CacheConfiguration& config,
                                    const Demand& demand, const UserGrouping* grouping,
                                    std::uint64_t seed) {
  switch (cfg.delivery.scheme) {
    case DeliveryScheme::Greedy: return deliver_greedy(config, demand);
    case DeliveryScheme::OldEnum: return deliver_old(config, demand);
    case DeliveryScheme::Modified:
      return deliver_modified(config, demand, cfg.delivery.gain, seed);
    case DeliveryScheme::Deterministic:
      if (!grouping) throw InstanceError("deterministic delivery without a grouping");
      return deliver_deterministic(config, demand, *grouping, cfg.placement.gain);
    case DeliveryScheme::Optimal: return deliver_optimal(config, demand);
  }
  throw InstanceError("unknown delivery scheme");
}

/// One trial over one user block (the whole system unless grouped).
inline long long run_block(const ExperimentConfig& cfg, const SystemParams& params,
                           const Demand& demand, std::uint64_t placement_seed,
                           std::uint64_t delivery_seed) {
  CacheConfiguration config;
  UserGrouping grouping{};
  const UserGrouping* grouping_ptr = nullptr;
  switch (cfg.placement.scheme) {
    case PlacementScheme::OldRandom: config = place_old(params, placement_seed); break;
    case PlacementScheme::NewRandom: config = place_new(params, placement_seed); break;
    case PlacementScheme::DeterministicGrouped: {
      auto placed = place_deterministic_grouped(params, cfg.placement.gain);
      config = std::move(placed.first);
      grouping = placed.second;
      grouping_ptr = &grouping;
      break;
    }
  }
  TransmissionPlan plan = deliver_for(cfg, config, demand, grouping_ptr, delivery_seed);
  DecodeReport report = verify_decodable(plan, config, demand);
  if (!report.ok)
    throw std::runtime_error("decodability failure (correctness bug, not sampling noise), "
                             "placement seed " +
                             std::to_string(placement_seed) + ": " + report.first_failure);
  return plan.transmissions();
}

inline TrialRecord run_single_trial(const ExperimentConfig& cfg, long long index,
                                    const Demand& shared_demand) {
  std::uint64_t s_i = trial_seed(cfg.seed, index);
  Demand demand = cfg.resample_demands
                      ? gen_demand(cfg.params, cfg.demand_mode, s_i, &cfg.fixed_demand)
                      : shared_demand;

  long long transmissions = 0;
  if (cfg.grouping_size > 0) {
    UserGrouping grouping{cfg.params.num_users, cfg.grouping_size};
    SystemParams sub = cfg.params;
    sub.num_users = cfg.grouping_size;
    for (int grp = 0; grp < grouping.groups(); ++grp) {
      Demand slice;
      slice.mode = demand.mode;
      int base = grouping.base_of(grp);
      slice.files.assign(demand.files.begin() + base,
                         demand.files.begin() + base + cfg.grouping_size);
      std::uint64_t group_seed = derive(s_i, stream::group, static_cast<std::uint64_t>(grp));
      transmissions += run_block(cfg, sub, slice, group_seed, group_seed);
    }
  } else {
    transmissions = run_block(cfg, cfg.params, demand, s_i, s_i);
  }

  TrialRecord rec;
  rec.trial = index;
  rec.seed = s_i;
  rec.transmissions = transmissions;
  rec.rate = Rational(transmissions, cfg.params.packets_per_file);
  return rec;
}

}  // namespace detail

/// Runs cfg.trials independent trials (concurrently when cfg.workers > 1)
/// and aggregates. The fold is order-independent: records land in a
/// pre-sized vector by trial index, so output is bit-identical for any
/// worker count.
inline RunResult run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  Demand shared_demand;
  if (!cfg.resample_demands)
    shared_demand =
        gen_demand(cfg.params, cfg.demand_mode, derive(cfg.seed, stream::demand), &cfg.fixed_demand);

  RunResult result;
  result.cfg = cfg;
  result.records.resize(static_cast<std::size_t>(cfg.trials));

  int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (long long i = 0; i < cfg.trials; ++i)
      result.records[static_cast<std::size_t>(i)] = detail::run_single_trial(cfg, i, shared_demand);
  } else {
    std::atomic<long long> next{0};
    std::mutex error_mutex;
    std::optional<std::string> error;
    auto worker = [&]() {
      while (true) {
        long long i = next.fetch_add(1);
        if (i >= cfg.trials) return;
        try {
          result.records[static_cast<std::size_t>(i)] =
              detail::run_single_trial(cfg, i, shared_demand);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = e.what();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) throw std::runtime_error(*error);
  }

  std::vector<double> rates;
  rates.reserve(result.records.size());
  for (const auto& rec : result.records) rates.push_back(rec.rate.to_double());
  result.stats = summarize(rates, cfg.tail_eps);
  return result;
}

// ---------------------------------------------------------------------------
// CSV output (schema frozen: trial,placement,delivery,K,N,M,F,g,demand_mode,
// transmissions,rate,seed)
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_trial_csv_header(std::ostream& out) {
  out << "trial,placement,delivery,K,N,M,F,g,demand_mode,transmissions,rate,seed\n";
}

inline void write_trial_csv_rows(std::ostream& out, const RunResult& result) {
  const auto& cfg = result.cfg;
  for (const auto& rec : result.records) {
    out << rec.trial << ',' << to_string(cfg.placement.scheme) << ','
        << to_string(cfg.delivery.scheme) << ',' << cfg.params.num_users << ','
        << cfg.params.num_files << ',' << format_double(cfg.params.cache_files) << ','
        << cfg.params.packets_per_file << ',' << cfg.effective_gain() << ','
        << to_string(cfg.demand_mode) << ',' << rec.transmissions << ','
        << format_double(rec.rate.to_double()) << ',' << rec.seed << '\n';
  }
}

// ---------------------------------------------------------------------------
// Random instances shared by the verify batteries and the test suites
// ---------------------------------------------------------------------------

struct RandomInstance {
  SystemParams params;
  PlacementScheme scheme{PlacementScheme::OldRandom};
  std::uint64_t placement_seed{0};
  Demand demand;
};

struct RandomInstanceOptions {
  int min_users{2};
  int max_users{10};
  int max_packets{40};
  bool allow_old{true};
  bool allow_new{true};
  bool allow_empty_cache{true};  // M = 0 instances (old placement only)
};

inline RandomInstance make_random_instance(Rng& rng, const RandomInstanceOptions& opt = {}) {
  while (true) {
    RandomInstance inst;
    int K = opt.min_users +
            static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_users - opt.min_users + 1)));
    int N = K + static_cast<int>(rng.below(5));
    bool use_new = opt.allow_new && (!opt.allow_old || (rng.below(2) == 0));

    SystemParams p;
    p.num_users = K;
    p.num_files = N;
    if (use_new) {
      int M = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(N)));
      p.cache_files = M;
      int c = SystemParams{K, N, static_cast<double>(M), 1, 0}.group_size();
      int max_groups = opt.max_packets / c;
      if (max_groups < 1) continue;
      p.groups_per_file = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_groups)));
      p.packets_per_file = c * p.groups_per_file;
      inst.scheme = PlacementScheme::NewRandom;
    } else {
      int M = static_cast<int>(rng.below(static_cast<std::uint64_t>(N + 1)));
      if (M == 0 && !opt.allow_empty_cache) M = 1;
      p.cache_files = M;
      int step = M == 0 ? 1 : N / std::gcd(M, N);
      int max_mult = opt.max_packets / step;
      if (max_mult < 1) continue;
      p.packets_per_file = step * (1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_mult))));
      inst.scheme = PlacementScheme::OldRandom;
    }
    inst.params = p;
    inst.placement_seed = rng.next();

    // rotate distinct / duplicated / uniform demands
    switch (rng.below(3)) {
      case 0:
        inst.demand = gen_demand(p, DemandGenMode::DistinctWorstCase, 0);
        break;
      case 1: {
        inst.demand = gen_demand(p, DemandGenMode::DistinctWorstCase, 0);
        if (K >= 2) {
          int from = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
          int to = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
          inst.demand.files[to] = inst.demand.files[from];
          inst.demand.mode = DemandMode::Arbitrary;
        }
        break;
      }
      default:
        inst.demand = gen_demand(p, DemandGenMode::UniformRandom, rng.next());
        break;
    }
    return inst;
  }
}

inline CacheConfiguration place_instance(const RandomInstance& inst) {
  return inst.scheme == PlacementScheme::NewRandom ? place_new(inst.params, inst.placement_seed)
                                                   : place_old(inst.params, inst.placement_seed);
}

// ---------------------------------------------------------------------------
// verify subcommand: cross-scheme property batteries
// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::uint64_t seed{0x5eedbeefULL};
  int equality_instances{200};
  int decode_trials{1000};
  int dominance_instances{100};
  int pulldown_instances{100};
  std::optional<int> equality_users;  // request a specific K; > 10 is skipped
  bool inject_clique_drop{false};     // fault hook: decodability must then fail
};

struct BatteryResult {
  std::string name;
  std::string status;  // "pass" | "fail" | "skipped"
  long long checked{0};
  long long failures{0};
  std::string detail;
};

struct VerifyReport {
  std::vector<BatteryResult> batteries;
  bool all_pass{true};
};

inline VerifyReport verify_suite(const VerifyOptions& opt = {}) {
  VerifyReport report;
  auto finish = [&](BatteryResult r) {
    if (r.status == "fail") report.all_pass = false;
    report.batteries.push_back(std::move(r));
  };

  // Battery 1: subset-enumeration and greedy deliveries count identically.
  {
    BatteryResult r{"old_equals_greedy", "pass", 0, 0, ""};
    if (opt.equality_users && *opt.equality_users > 10) {
      r.status = "skipped";
      r.detail = "K = " + std::to_string(*opt.equality_users) +
                 " exceeds the K <= 10 equality battery cap (subset enumeration)";
    } else {
      Rng rng(derive(opt.seed, 11));
      RandomInstanceOptions io;
      if (opt.equality_users) io.min_users = io.max_users = *opt.equality_users;
      for (int i = 0; i < opt.equality_instances; ++i) {
        RandomInstance inst = make_random_instance(rng, io);
        CacheConfiguration config = place_instance(inst);
        long long a = deliver_old(config, inst.demand).transmissions();
        long long b = deliver_greedy(config, inst.demand).transmissions();
        ++r.checked;
        if (a != b) {
          ++r.failures;
          if (r.detail.empty())
            r.detail = "instance " + std::to_string(i) + ": old=" + std::to_string(a) +
                       " greedy=" + std::to_string(b);
        }
      }
      if (r.failures) r.status = "fail";
    }
    finish(std::move(r));
  }

  // Battery 2: every emitted plan decodes against the real caches.
  {
    BatteryResult r{"decodability", "pass", 0, 0, ""};
    Rng rng(derive(opt.seed, 12));
    for (int i = 0; i < opt.decode_trials; ++i) {
      RandomInstance inst = make_random_instance(rng, {});
      CacheConfiguration config = place_instance(inst);
      TransmissionPlan plan;
      switch (rng.below(3)) {
        case 0: plan = deliver_greedy(config, inst.demand); break;
        case 1: plan = deliver_old(config, inst.demand); break;
        default:
          plan = deliver_modified(config, inst.demand, 1 + static_cast<int>(rng.below(4)),
                                  rng.next());
          break;
      }
      if (opt.inject_clique_drop && !plan.cliques.empty())
        plan.cliques.erase(plan.cliques.begin() +
                           static_cast<long>(rng.below(plan.cliques.size())));
      DecodeReport check = verify_decodable(plan, config, inst.demand);
      ++r.checked;
      if (!check.ok) {
        ++r.failures;
        if (r.detail.empty()) r.detail = check.first_failure;
      }
    }
    if (r.failures) r.status = "fail";
    finish(std::move(r));
  }

  // Battery 3: exact cover never beats greedy never beats one clique per need.
  {
    BatteryResult r{"optimal_dominance", "pass", 0, 0, ""};
    Rng rng(derive(opt.seed, 13));
    RandomInstanceOptions io;
    io.min_users = 2;
    io.max_users = 4;
    io.max_packets = 4;
    for (int i = 0; i < opt.dominance_instances; ++i) {
      RandomInstance inst = make_random_instance(rng, io);
      CacheConfiguration config = place_instance(inst);
      SideInfoView view = build_side_info_view(config, inst.demand);
      if (view.needed().size() > 20) continue;
      long long greedy = deliver_greedy(config, inst.demand).transmissions();
      long long optimal = deliver_optimal(config, inst.demand).transmissions();
      ++r.checked;
      if (!(optimal <= greedy &&
            greedy <= static_cast<long long>(view.needed().size()))) {
        ++r.failures;
        if (r.detail.empty())
          r.detail = "instance " + std::to_string(i) + ": optimal=" + std::to_string(optimal) +
                     " greedy=" + std::to_string(greedy);
      }
    }
    if (r.failures) r.status = "fail";
    finish(std::move(r));
  }

  // Battery 4: deterministic scheme rates match the closed form exactly.
  {
    BatteryResult r{"deterministic_exact_rate", "pass", 0, 0, ""};
    struct Case {
      int K, N, gain;
      double M;
    };
    for (const Case& c : {Case{8, 16, 2, 4}, Case{32, 64, 2, 16}, Case{2, 2, 1, 1}}) {
      SystemParams p;
      p.num_users = c.K;
      p.num_files = c.N;
      p.cache_files = c.M;
      int K_group = c.gain * SystemParams{c.K, c.N, c.M, 1, 0}.group_size();
      p.packets_per_file = static_cast<int>(binomial(K_group, c.gain));
      auto [config, grouping] = place_deterministic_grouped(p, c.gain);
      Demand demand = gen_demand(p, DemandGenMode::DistinctWorstCase, 0);
      TransmissionPlan plan = deliver_deterministic(config, demand, grouping, c.gain);
      Rational expected(static_cast<long long>(c.K / K_group) * binomial(K_group, c.gain + 1),
                        p.packets_per_file);
      ++r.checked;
      if (plan.rate() != expected) {
        ++r.failures;
        if (r.detail.empty())
          r.detail = "K=" + std::to_string(c.K) + ": got " + plan.rate().to_string() +
                     ", expected " + expected.to_string();
      }
    }
    if (r.failures) r.status = "fail";
    finish(std::move(r));
  }

  // Battery 5: pull-down never grows a set, never touches undemanded files,
  // and caps every demanded packet at the requested level.
  {
    BatteryResult r{"pulldown_levels", "pass", 0, 0, ""};
    Rng rng(derive(opt.seed, 14));
    for (int i = 0; i < opt.pulldown_instances; ++i) {
      RandomInstance inst = make_random_instance(rng, {});
      CacheConfiguration config = place_instance(inst);
      int level = 1 + static_cast<int>(rng.below(3));
      PullDownView view = pull_down(config, inst.demand, level, rng.next());
      ++r.checked;
      bool ok = true;
      std::vector<char> demanded(config.params.num_files, 0);
      for (int d : inst.demand.files) demanded[d] = 1;
      for (int n = 0; n < config.params.num_files && ok; ++n) {
        for (int f = 0; f < config.params.packets_per_file && ok; ++f) {
          const UserSet& before = config.users({n, f});
          const UserSet& after = view.config.users({n, f});
          if (!demanded[n]) {
            ok = after == before;
          } else {
            ok = after.subset_of(before) && after.count() <= std::max(level, before.count()) &&
                 (before.count() <= level ? after == before : after.count() == level);
          }
        }
      }
      if (!ok) {
        ++r.failures;
        if (r.detail.empty()) r.detail = "instance " + std::to_string(i);
      }
    }
    if (r.failures) r.status = "fail";
    finish(std::move(r));
  }

  return report;
}

}  // namespace ccsim
