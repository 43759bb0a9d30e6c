#include "hybrid_aoi/campaign.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <utility>

#include "hybrid_aoi/csv.hpp"
#include "hybrid_aoi/json_io.hpp"
#include "hybrid_aoi/parallel.hpp"

namespace hybrid_aoi {

namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

GenerationConfig generation_at(const ExperimentConfig& cfg,
                               const SweepPoint& point) {
  GenerationConfig g = cfg.generation;
  g.n_nodes = point.n_nodes;
  g.n_aps = point.n_aps;
  g.enabled = {true, true};
  return g;
}

double energy_rate(const Scenario& s, const Schedule& x) {
  double sum = 0.0;
  int devices = 0;
  for (int i = 0; i < s.n_devices(); ++i) {
    double used = 0.0;
    double budget = 0.0;
    for (Technology m : kAllTechnologies) {
      used += consumed_energy(s, x, i, m);
      budget += s.energy.budget[index_of(m)][i];
    }
    if (budget <= 0.0) continue;
    sum += used / budget;
    ++devices;
  }
  return devices == 0 ? 0.0 : sum / devices;
}

IterationRecord run_iteration(const ExperimentConfig& cfg, int point_index,
                              const SweepPoint& point, int iteration) {
  IterationRecord r;
  r.point = point_index;
  r.where = point;
  r.iteration = iteration;
  r.seed = cfg.seed_base + static_cast<std::uint64_t>(iteration);
  r.mode = cfg.mode;
  try {
    const Scenario s =
        restrict_technologies(generate_scenario(generation_at(cfg, point), r.seed),
                              mode_technologies(cfg.mode));
    const ObjectiveConfig objective = ObjectiveConfig::for_scenario(s, cfg.alpha);
    BnbOptions options;
    options.gap_target = cfg.gap_target;
    options.node_limit = cfg.node_limit;
    options.time_limit_seconds = cfg.time_limit_seconds;
    const Solution sol = solve_bnb(s, objective, options);

    r.objective = sol.objective;
    r.proof = sol.proof;
    r.gap = sol.gap;
    r.nodes = sol.stats.nodes;
    r.aoi = system_metrics(s, sol.schedule);
    const EndogenousState state = derive_endogenous(s, sol.schedule);
    r.n_messages = static_cast<int>(s.messages.size());
    for (bool sent : state.sent) r.n_sent += sent ? 1 : 0;
    for (const Transmission& t : sol.schedule.transmissions()) {
      ++(t.tech == Technology::kRF ? r.n_rf : r.n_oc);
    }
    r.transmission_rate = static_cast<double>(r.n_sent) / r.n_messages;
    r.energy_rate = energy_rate(s, sol.schedule);
    r.switches = state.switch_count();
    if (cfg.record_trajectories) {
      for (const StreamKey& key : receiver_streams(s)) {
        r.trajectories.push_back(
            {key, aoi_trajectory(s, sol.schedule, key).age});
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    IterationRecord failed;
    failed.point = r.point;
    failed.where = r.where;
    failed.iteration = r.iteration;
    failed.seed = r.seed;
    failed.mode = r.mode;
    r = std::move(failed);
    r.error = e.what();
  }
  return r;
}

std::string point_columns(const SweepPoint& p) {
  return std::to_string(p.n_nodes) + "," + std::to_string(p.n_aps);
}

json manifest_for(const ExperimentConfig& cfg) {
  json seeds = json::array();
  for (int t = 0; t < cfg.iterations; ++t) {
    seeds.push_back(cfg.seed_base + static_cast<std::uint64_t>(t));
  }
  json points = json::array();
  for (const SweepPoint& p : sweep_points(cfg)) {
    points.push_back({{"n_nodes", p.n_nodes}, {"n_aps", p.n_aps}});
  }
  return json{{"config", cfg}, {"seeds", std::move(seeds)},
              {"points", std::move(points)}};
}

}  // namespace

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kRFOnly:
      return "RFOnly";
    case Mode::kOCOnly:
      return "OCOnly";
    case Mode::kHybrid:
      return "Hybrid";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  for (Mode m : {Mode::kRFOnly, Mode::kOCOnly, Mode::kHybrid}) {
    if (name == mode_name(m)) return m;
  }
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected RFOnly, OCOnly or Hybrid)");
}

std::array<bool, kNumTechnologies> mode_technologies(Mode mode) {
  switch (mode) {
    case Mode::kRFOnly:
      return {true, false};
    case Mode::kOCOnly:
      return {false, true};
    case Mode::kHybrid:
      return {true, true};
  }
  return {true, true};
}

std::string ExperimentConfig::display_label() const {
  return label.empty() ? mode_name(mode) : label;
}

void ExperimentConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("alpha weights must sum to 1");
  }
  if (!(gap_target >= 0.0)) throw std::invalid_argument("gap_target must be >= 0");
  if (node_limit < 1) throw std::invalid_argument("node_limit must be >= 1");
  if (!(time_limit_seconds > 0.0)) {
    throw std::invalid_argument("time_limit_seconds must be > 0");
  }
  for (int n : sweep.vary_nodes) {
    if (n < 0) throw std::invalid_argument("vary_nodes entries must be >= 0");
  }
  for (int n : sweep.vary_aps) {
    if (n < 0) throw std::invalid_argument("vary_aps entries must be >= 0");
  }
  for (const SweepPoint& p : sweep_points(*this)) {
    try {
      generation_at(*this, p).validate();
    } catch (const std::exception& e) {
      throw std::invalid_argument("sweep point (" + point_columns(p) +
                                  "): " + e.what());
    }
  }
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  const std::vector<int> nodes = cfg.sweep.vary_nodes.empty()
                                     ? std::vector<int>{cfg.generation.n_nodes}
                                     : cfg.sweep.vary_nodes;
  const std::vector<int> aps = cfg.sweep.vary_aps.empty()
                                   ? std::vector<int>{cfg.generation.n_aps}
                                   : cfg.sweep.vary_aps;
  std::vector<SweepPoint> out;
  for (int n : nodes) {
    for (int a : aps) out.push_back({n, a});
  }
  return out;
}

std::vector<std::pair<std::string, std::optional<double>>> record_metrics(
    const IterationRecord& r, int n_types) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  auto put = [&](const std::string& name, double value) {
    out.emplace_back(name, r.ok ? std::optional<double>(value) : std::nullopt);
  };
  put("objective_total", r.objective.total);
  put("energy_normalized", r.objective.energy_normalized);
  put("switching_normalized", r.objective.switching_normalized);
  put("delay_normalized", r.objective.delay_normalized);
  put("transmission_rate", r.transmission_rate);
  put("energy_rate", r.energy_rate);
  put("switches", r.switches);
  put("n_sent", r.n_sent);
  put("n_oc", r.n_oc);
  put("mean_aoi", r.aoi.mean_aoi);
  put("peak_aoi", r.aoi.peak_aoi);
  for (int t = 0; t < n_types; ++t) {
    const auto it = r.aoi.per_type.find(t);
    const bool present = r.ok && it != r.aoi.per_type.end();
    const std::string suffix = "_type" + std::to_string(t);
    out.emplace_back("mean_aoi" + suffix,
                     present ? std::optional<double>(it->second.mean)
                             : std::nullopt);
    out.emplace_back("peak_aoi" + suffix,
                     present ? std::optional<double>(it->second.peak)
                             : std::nullopt);
  }
  return out;
}

std::vector<PointAggregates> aggregate_records(
    const std::vector<IterationRecord>& records,
    const std::vector<SweepPoint>& points, int n_types) {
  std::vector<PointAggregates> out(points.size());
  std::vector<std::vector<std::vector<double>>> values(points.size());
  std::vector<std::string> names;
  for (const auto& [name, value] : record_metrics(IterationRecord{}, n_types)) {
    names.push_back(name);
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    out[p].point = static_cast<int>(p);
    out[p].where = points[p];
    values[p].resize(names.size());
  }
  for (const IterationRecord& r : records) {
    PointAggregates& agg = out.at(r.point);
    if (!r.ok) {
      ++agg.failed;
      continue;
    }
    const auto metrics = record_metrics(r, n_types);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      if (metrics[m].second) values[r.point][m].push_back(*metrics[m].second);
    }
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t m = 0; m < names.size(); ++m) {
      const std::vector<double>& v = values[p][m];
      Aggregate a;
      a.metric = names[m];
      a.count = static_cast<int>(v.size());
      if (!v.empty()) {
        double sum = 0.0;
        for (double x : v) sum += x;
        a.mean = sum / a.count;
        if (a.count > 1) {
          double sq = 0.0;
          for (double x : v) sq += (x - a.mean) * (x - a.mean);
          a.std = std::sqrt(sq / (a.count - 1));
        }
      }
      out[p].metrics.push_back(a);
    }
  }
  return out;
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<SweepPoint> points = sweep_points(cfg);
  const std::size_t per_point = static_cast<std::size_t>(cfg.iterations);
  CampaignResult result;
  result.config = cfg;
  result.records.resize(points.size() * per_point);
  parallel_for(result.records.size(), cfg.workers, [&](std::size_t index) {
    const int p = static_cast<int>(index / per_point);
    const int t = static_cast<int>(index % per_point);
    result.records[index] = run_iteration(cfg, p, points[p], t);
  });
  bool any_ok = false;
  for (const IterationRecord& r : result.records) any_ok = any_ok || r.ok;
  if (!any_ok) {
    throw CampaignError("every iteration failed; first error: " +
                        result.records.front().error);
  }
  result.aggregates =
      aggregate_records(result.records, points, cfg.generation.n_types);
  return result;
}

ComparisonTable compare_results(std::vector<CampaignResult> campaigns,
                                bool paired_seeds) {
  if (campaigns.size() < 2) {
    throw std::invalid_argument("comparison needs at least two configs");
  }
  const ExperimentConfig& base = campaigns.front().config;
  ComparisonTable table;
  table.paired_seeds = paired_seeds;
  table.points = sweep_points(base);
  for (const CampaignResult& c : campaigns) {
    if (sweep_points(c.config) != table.points) {
      throw std::invalid_argument("sweep axes differ between '" +
                                  base.display_label() + "' and '" +
                                  c.config.display_label() + "'");
    }
    if (c.config.iterations != base.iterations) {
      throw std::invalid_argument("iteration counts differ between configs");
    }
    if (c.config.generation.n_types != base.generation.n_types) {
      throw std::invalid_argument("data type counts differ between configs");
    }
  }
  table.campaigns = std::move(campaigns);
  if (!paired_seeds) return table;

  const int n_types = base.generation.n_types;
  const auto& reference = table.campaigns.front().records;
  for (std::size_t c = 1; c < table.campaigns.size(); ++c) {
    const auto& records = table.campaigns[c].records;
    std::map<std::pair<int, std::string>, SignSummary> summaries;
    for (std::size_t r = 0; r < records.size(); ++r) {
      const IterationRecord& a = reference[r];
      const IterationRecord& b = records[r];
      if (!a.ok || !b.ok || a.seed != b.seed) continue;
      const auto ma = record_metrics(a, n_types);
      const auto mb = record_metrics(b, n_types);
      for (std::size_t m = 0; m < ma.size(); ++m) {
        if (!ma[m].second || !mb[m].second) continue;
        const double delta = *mb[m].second - *ma[m].second;
        table.deltas.push_back({static_cast<int>(c), a.point, a.iteration,
                                a.seed, ma[m].first, delta});
        SignSummary& s = summaries[{a.point, ma[m].first}];
        s.config = static_cast<int>(c);
        s.point = a.point;
        s.metric = ma[m].first;
        ++(delta < 0.0 ? s.negative : delta > 0.0 ? s.positive : s.zero);
        s.mean_delta += delta;
      }
    }
    // Keep the metric order of record_metrics within each point.
    const auto names = record_metrics(IterationRecord{}, n_types);
    for (std::size_t p = 0; p < table.points.size(); ++p) {
      for (const auto& [name, unused] : names) {
        auto it = summaries.find({static_cast<int>(p), name});
        if (it == summaries.end()) continue;
        SignSummary s = it->second;
        const int n = s.negative + s.zero + s.positive;
        if (n > 0) s.mean_delta /= n;
        table.signs.push_back(s);
      }
    }
  }
  return table;
}

ComparisonTable compare_modes(const std::vector<ExperimentConfig>& cfgs,
                              bool paired_seeds) {
  if (cfgs.size() < 2) {
    throw std::invalid_argument("comparison needs at least two configs");
  }
  std::vector<CampaignResult> campaigns;
  for (ExperimentConfig cfg : cfgs) {
    if (sweep_points(cfg) != sweep_points(cfgs.front())) {
      throw std::invalid_argument("sweep axes differ between configs");
    }
    if (paired_seeds) cfg.seed_base = cfgs.front().seed_base;
    campaigns.push_back(run_campaign(cfg));
  }
  return compare_results(std::move(campaigns), paired_seeds);
}

void emit_outputs(const CampaignResult& result,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ExperimentConfig& cfg = result.config;
  const int n_types = cfg.generation.n_types;

  {
    const auto path = out_dir / "iterations.csv";
    std::ofstream out = open_output(path);
    out << "point,n_nodes,n_aps,iteration,seed,mode,status,proof,gap,nodes,"
           "n_messages,n_rf";
    for (const auto& [name, unused] : record_metrics(IterationRecord{}, n_types)) {
      out << "," << name;
    }
    out << ",error\n";
    for (const IterationRecord& r : result.records) {
      out << r.point << "," << point_columns(r.where) << "," << r.iteration
          << "," << r.seed << "," << mode_name(r.mode) << ","
          << (r.ok ? "ok" : "failed") << ",";
      if (r.ok) {
        out << proof_name(r.proof) << "," << format_number(r.gap) << ","
            << r.nodes << "," << r.n_messages << "," << r.n_rf;
      } else {
        out << ",,,,";
      }
      for (const auto& [name, value] : record_metrics(r, n_types)) {
        out << ",";
        if (value) out << format_number(*value);
      }
      out << "," << csv_escape(r.error) << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "aggregates.csv";
    std::ofstream out = open_output(path);
    out << "point,n_nodes,n_aps,mode,metric,mean,std,count,failed\n";
    for (const PointAggregates& agg : result.aggregates) {
      for (const Aggregate& a : agg.metrics) {
        out << agg.point << "," << point_columns(agg.where) << ","
            << mode_name(cfg.mode) << "," << a.metric << ","
            << format_number(a.mean) << "," << format_number(a.std) << ","
            << a.count << "," << agg.failed << "\n";
      }
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "aoi_trajectories.csv";
    std::ofstream out = open_output(path);
    out << "point,n_nodes,n_aps,iteration,seed,receiver,data_type,step,age\n";
    for (const IterationRecord& r : result.records) {
      for (const StreamTrajectory& st : r.trajectories) {
        for (std::size_t k = 0; k < st.age.size(); ++k) {
          out << r.point << "," << point_columns(r.where) << "," << r.iteration
              << "," << r.seed << "," << st.key.receiver << ","
              << st.key.data_type << "," << k << "," << st.age[k] << "\n";
        }
      }
    }
    finish(out, path);
  }
  json manifest = manifest_for(cfg);
  manifest["artifact_version"] = kArtifactVersion;
  manifest["kind"] = "campaign";
  write_json_file(manifest, out_dir / "manifest.json");
}

void emit_outputs(const ComparisonTable& table,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> dirs;
  json configs = json::array();
  for (std::size_t c = 0; c < table.campaigns.size(); ++c) {
    const ExperimentConfig& cfg = table.campaigns[c].config;
    dirs.push_back("c" + std::to_string(c) + "_" + cfg.display_label());
    emit_outputs(table.campaigns[c], out_dir / dirs.back());
    json entry = manifest_for(cfg);
    entry["directory"] = dirs.back();
    configs.push_back(std::move(entry));
  }
  {
    const auto path = out_dir / "comparison.csv";
    std::ofstream out = open_output(path);
    out << "point,n_nodes,n_aps,metric";
    for (const std::string& d : dirs) {
      out << "," << d << "_mean," << d << "_std," << d << "_count";
    }
    out << "\n";
    for (std::size_t p = 0; p < table.points.size(); ++p) {
      const auto& first = table.campaigns.front().aggregates[p].metrics;
      for (std::size_t m = 0; m < first.size(); ++m) {
        out << p << "," << point_columns(table.points[p]) << ","
            << first[m].metric;
        for (const CampaignResult& c : table.campaigns) {
          const Aggregate& a = c.aggregates[p].metrics[m];
          out << "," << format_number(a.mean) << "," << format_number(a.std)
              << "," << a.count;
        }
        out << "\n";
      }
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "deltas.csv";
    std::ofstream out = open_output(path);
    out << "config,reference,point,n_nodes,n_aps,iteration,seed,metric,delta\n";
    for (const PairedDelta& d : table.deltas) {
      out << dirs[d.config] << "," << dirs.front() << "," << d.point << ","
          << point_columns(table.points[d.point]) << "," << d.iteration << ","
          << d.seed << "," << d.metric << "," << format_number(d.delta) << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "sign_tests.csv";
    std::ofstream out = open_output(path);
    out << "config,reference,point,n_nodes,n_aps,metric,negative,zero,positive,"
           "mean_delta\n";
    for (const SignSummary& s : table.signs) {
      out << dirs[s.config] << "," << dirs.front() << "," << s.point << ","
          << point_columns(table.points[s.point]) << "," << s.metric << ","
          << s.negative << "," << s.zero << "," << s.positive << ","
          << format_number(s.mean_delta) << "\n";
    }
    finish(out, path);
  }
  json manifest{{"artifact_version", kArtifactVersion},
                {"kind", "comparison"},
                {"paired_seeds", table.paired_seeds},
                {"campaigns", std::move(configs)}};
  write_json_file(manifest, out_dir / "manifest.json");
}

}  // namespace hybrid_aoi
