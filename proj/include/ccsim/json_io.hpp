#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccsim/analysis.hpp"
#include "ccsim/cache.hpp"
#include "ccsim/harness.hpp"
#include "ccsim/plan.hpp"
#include "ccsim/system.hpp"

// External JSON and CSV surfaces use 1-based user/file/packet numbering and
// hex bitmasks with bit k-1 standing for user k. Internals are 0-based.

namespace ccsim {

using json = nlohmann::json;

inline json to_json(const SystemParams& p) {
  json j{{"K", p.num_users},
         {"N", p.num_files},
         {"M", p.cache_files},
         {"F", p.packets_per_file}};
  if (p.grouped()) j["F_prime"] = p.groups_per_file;
  return j;
}

inline SystemParams params_from_json(const json& j) {
  SystemParams p;
  p.num_users = j.at("K").get<int>();
  p.num_files = j.at("N").get<int>();
  p.cache_files = j.at("M").get<double>();
  if (j.contains("F_prime")) {
    p.groups_per_file = j.at("F_prime").get<int>();
    p.packets_per_file = j.contains("F")
                             ? j.at("F").get<int>()
                             : p.group_size() * p.groups_per_file;
  } else {
    p.packets_per_file = j.at("F").get<int>();
  }
  p.validate();
  return p;
}

inline json to_json(const CacheConfiguration& config) {
  json store = json::array();
  for (int n = 0; n < config.params.num_files; ++n) {
    json file = json::array();
    for (int f = 0; f < config.params.packets_per_file; ++f)
      file.push_back(config.users({n, f}).hex());
    store.push_back(std::move(file));
  }
  return json{{"params", to_json(config.params)},
              {"origin", config.origin},
              {"store", std::move(store)}};
}

inline CacheConfiguration cache_from_json(const json& j) {
  CacheConfiguration config =
      CacheConfiguration::empty(params_from_json(j.at("params")), j.value("origin", "unknown"));
  const auto& store = j.at("store");
  if (static_cast<int>(store.size()) != config.params.num_files)
    throw InstanceError("store must list every file");
  for (int n = 0; n < config.params.num_files; ++n) {
    const auto& file = store.at(n);
    if (static_cast<int>(file.size()) != config.params.packets_per_file)
      throw InstanceError("store must list every packet");
    for (int f = 0; f < config.params.packets_per_file; ++f)
      config.users({n, f}) = UserSet::from_hex(file.at(f).get<std::string>());
  }
  return config;
}

inline json to_json(const TransmissionPlan& plan) {
  json cliques = json::array();
  for (const auto& clique : plan.cliques) {
    json c = json::array();
    for (const auto& entry : clique)
      for (int u = entry.users.next(0); u >= 0; u = entry.users.next(u + 1))
        c.push_back(json{{"user", u + 1},
                         {"file", entry.packet.file + 1},
                         {"packet", entry.packet.packet + 1}});
    cliques.push_back(std::move(c));
  }
  return json{{"cliques", std::move(cliques)},
              {"summary",
               {{"transmissions", plan.transmissions()},
                {"F", plan.packets_per_file},
                {"rate", plan.rate().to_double()},
                {"rate_exact", plan.rate().to_string()}}}};
}

inline json to_json(const RateStats& s) {
  return json{{"trials", s.trials}, {"mean", s.mean},       {"std", s.stddev},
              {"min", s.min},       {"max", s.max},         {"p50", s.p50},
              {"p95", s.p95},       {"p99", s.p99},         {"tail_eps", s.tail_eps},
              {"tail_prob", s.tail_prob}};
}

inline json to_json(const BoundReport& r) {
  json j{{"inputs",
          {{"K", r.K}, {"N", r.N}, {"M", r.M}, {"F", r.F}}},
         {"uncoded_rate", r.uncoded}};
  auto& inputs = j["inputs"];
  if (r.F_prime) inputs["F_prime"] = *r.F_prime;
  if (r.g) inputs["g"] = *r.g;
  if (r.eps) inputs["eps"] = *r.eps;
  if (r.peak_asymptotic) j["peak_rate_asymptotic"] = *r.peak_asymptotic;
  if (r.peak_asymptotic_grouped) j["peak_rate_asymptotic_grouped"] = *r.peak_asymptotic_grouped;
  if (r.expected_rate) {
    j["expected_rate"] = *r.expected_rate;
    j["expected_rate_source"] = r.expected_rate_source;
  }
  if (r.bound_new)
    j["concentration_bound_new"] = {{"value", *r.bound_new}, {"vacuous", r.bound_new_vacuous}};
  if (r.bound_old)
    j["concentration_bound_old"] = {{"value", *r.bound_old}, {"vacuous", r.bound_old_vacuous}};
  if (r.rate_floor) j["rate_floor"] = *r.rate_floor;
  if (r.f_threshold_new) j["filesize_threshold_new"] = *r.f_threshold_new;
  if (r.f_threshold_old) j["filesize_threshold_old"] = *r.f_threshold_old;
  if (r.filesize_lowerbound) j["filesize_lowerbound_cliquecover"] = *r.filesize_lowerbound;
  if (r.modified_condition) j["modified_delivery_condition"] = *r.modified_condition;
  if (r.recommended_packet_groups)
    j["modified_delivery_packet_groups"] = *r.recommended_packet_groups;
  return j;
}

inline json to_json(const VerifyReport& r) {
  json batteries = json::array();
  for (const auto& b : r.batteries) {
    json jb{{"name", b.name}, {"status", b.status}, {"checked", b.checked},
            {"failures", b.failures}};
    if (!b.detail.empty()) jb["detail"] = b.detail;
    batteries.push_back(std::move(jb));
  }
  return json{{"batteries", std::move(batteries)}, {"all_pass", r.all_pass}};
}

inline PlacementScheme placement_from_string(const std::string& s) {
  if (s == "old_random") return PlacementScheme::OldRandom;
  if (s == "new_random") return PlacementScheme::NewRandom;
  if (s == "deterministic_grouped") return PlacementScheme::DeterministicGrouped;
  throw InstanceError("unknown placement scheme: " + s);
}

inline DeliveryScheme delivery_from_string(const std::string& s) {
  if (s == "old_enum") return DeliveryScheme::OldEnum;
  if (s == "greedy") return DeliveryScheme::Greedy;
  if (s == "modified") return DeliveryScheme::Modified;
  if (s == "deterministic") return DeliveryScheme::Deterministic;
  if (s == "optimal") return DeliveryScheme::Optimal;
  throw InstanceError("unknown delivery scheme: " + s);
}

inline DemandGenMode demand_mode_from_string(const std::string& s) {
  if (s == "distinct" || s == "distinct_worst_case") return DemandGenMode::DistinctWorstCase;
  if (s == "uniform" || s == "uniform_random") return DemandGenMode::UniformRandom;
  if (s == "fixed") return DemandGenMode::Fixed;
  throw InstanceError("unknown demand mode: " + s);
}

inline ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.params = params_from_json(j);
  cfg.placement.scheme = placement_from_string(j.value("placement", "new_random"));
  cfg.delivery.scheme = delivery_from_string(j.value("delivery", "greedy"));
  int gain = j.value("g", 0);
  cfg.placement.gain = gain;
  cfg.delivery.gain = gain;
  cfg.demand_mode = demand_mode_from_string(j.value("demand", "distinct"));
  if (j.contains("fixed_demand")) {
    for (int f : j.at("fixed_demand").get<std::vector<int>>())
      cfg.fixed_demand.push_back(f - 1);  // external 1-based
  }
  cfg.resample_demands = j.value("resample_demands", false);
  cfg.grouping_size = j.value("grouping_size", 0);
  cfg.trials = j.value("trials", 1);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.workers = j.value("workers", 1);
  cfg.tail_eps = j.value("tail_eps", 0.1);
  cfg.validate();
  return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
  json j = to_json(cfg.params);
  j["placement"] = to_string(cfg.placement.scheme);
  j["delivery"] = to_string(cfg.delivery.scheme);
  j["g"] = cfg.effective_gain();
  j["demand"] = to_string(cfg.demand_mode);
  if (!cfg.fixed_demand.empty()) {
    json fixed = json::array();
    for (int f : cfg.fixed_demand) fixed.push_back(f + 1);
    j["fixed_demand"] = std::move(fixed);
  }
  j["resample_demands"] = cfg.resample_demands;
  j["grouping_size"] = cfg.grouping_size;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["tail_eps"] = cfg.tail_eps;
  return j;
}

inline json to_json(const RunResult& result) {
  json records = json::array();
  for (const auto& rec : result.records)
    records.push_back(json{{"trial", rec.trial},
                           {"seed", rec.seed},
                           {"transmissions", rec.transmissions},
                           {"rate", rec.rate.to_double()},
                           {"rate_exact", rec.rate.to_string()}});
  return json{{"config", to_json(result.cfg)},
              {"records", std::move(records)},
              {"stats", to_json(result.stats)}};
}

// ---------------------------------------------------------------------------
// Sweeps: a base experiment plus axes; cells are the Cartesian product, keyed
// by a content hash so interrupted runs can resume.
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string field;
  std::vector<json> values;
};

struct SweepSpec {
  json base;
  std::vector<SweepAxis> axes;
};

inline SweepSpec sweep_from_json(const json& j) {
  SweepSpec spec;
  spec.base = j.at("base");
  for (const auto& axis : j.at("axes")) {
    SweepAxis a;
    a.field = axis.at("field").get<std::string>();
    for (const auto& v : axis.at("values")) a.values.push_back(v);
    if (a.values.empty()) throw InstanceError("sweep axis without values: " + a.field);
    spec.axes.push_back(std::move(a));
  }
  return spec;
}

/// Stable content key of a cell: hash of the sorted field=value rendering.
inline std::string sweep_cell_key(const json& cell) {
  std::map<std::string, std::string> fields;
  for (auto it = cell.begin(); it != cell.end(); ++it) fields[it.key()] = it.value().dump();
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (const auto& [k, v] : fields) {
    for (char c : k) h = splitmix64(h ^ static_cast<unsigned char>(c));
    for (char c : v) h = splitmix64(h ^ static_cast<unsigned char>(c));
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Enumerates cells in row-major order (first axis slowest) and invokes
/// fn(cell_key, cell_json) for each cell not already in `done`.
template <typename Fn>
inline void for_each_sweep_cell(const SweepSpec& spec, const std::set<std::string>& done, Fn&& fn) {
  std::vector<std::size_t> cursor(spec.axes.size(), 0);
  while (true) {
    json cell = spec.base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
      cell[spec.axes[a].field] = spec.axes[a].values[cursor[a]];
    std::string key = sweep_cell_key(cell);
    if (!done.count(key)) fn(key, cell);

    std::size_t a = spec.axes.size();
    while (a > 0) {
      --a;
      if (++cursor[a] < spec.axes[a].values.size()) break;
      cursor[a] = 0;
      if (a == 0) return;
    }
    if (spec.axes.empty()) return;
  }
}

inline void write_sweep_csv_header(std::ostream& out) {
  out << "cell,placement,delivery,K,N,M,F,g,demand_mode,trials,seed,mean,std,min,p50,p95,p99,max,"
         "tail_eps,tail_prob\n";
}

inline void write_sweep_csv_row(std::ostream& out, const std::string& key,
                                const RunResult& result) {
  const auto& cfg = result.cfg;
  const auto& s = result.stats;
  out << key << ',' << to_string(cfg.placement.scheme) << ',' << to_string(cfg.delivery.scheme)
      << ',' << cfg.params.num_users << ',' << cfg.params.num_files << ','
      << format_double(cfg.params.cache_files) << ',' << cfg.params.packets_per_file << ','
      << cfg.effective_gain() << ',' << to_string(cfg.demand_mode) << ',' << cfg.trials << ','
      << cfg.seed << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ','
      << format_double(s.min) << ',' << format_double(s.p50) << ',' << format_double(s.p95) << ','
      << format_double(s.p99) << ',' << format_double(s.max) << ',' << format_double(s.tail_eps)
      << ',' << format_double(s.tail_prob) << '\n';
}

}  // namespace ccsim
