#pragma once

#include <atomic>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "explore/config_io.hpp"
#include "explore/episode.hpp"
#include "explore/scene_gen.hpp"

namespace explore {

// The cumulative enhancement ladder: each rung keeps the previous rungs'
// switches and adds one more.
inline std::vector<RunConfig> ablation_ladder(const RunConfig& base) {
    std::vector<RunConfig> configs(4, base);
    configs[0].label = "baseline";
    configs[0].enhancements = {false, false, false};
    configs[1].label = "bump_detector";
    configs[1].enhancements = {true, false, false};
    configs[2].label = "obstacle_expanding";
    configs[2].enhancements = {true, true, false};
    configs[3].label = "orientation_coef";
    configs[3].enhancements = {true, true, true};
    return configs;
}

struct SceneInfo {
    std::string name;
    double area_m2 = 0.0;
    bool large = false;  // >= 60 m^2
};

struct ConfigAggregate {
    std::string label;
    int runs = 0;
    int failed = 0;
    int finished_runs = 0;
    double mean_tracking_losses = 0.0;
    double mean_finish_time_s = 0.0;       // over finished runs
    double finished_scenes_mean = 0.0;     // mean over seeds of finished-scene counts
    std::vector<int> finished_per_seed;    // integer count per seed
    // Mean coverage per checkpoint, overall and split by scene size class.
    std::vector<double> cov_abs_m2_all, cov_rel_all;
    std::vector<double> cov_abs_m2_large, cov_rel_large;
    std::vector<double> cov_abs_m2_small, cov_rel_small;
};

struct AggregateReport {
    std::vector<double> checkpoint_times;  // includes the implicit t=0
    std::vector<uint64_t> seeds;
    std::vector<SceneInfo> scenes;
    std::vector<ConfigAggregate> configs;
};

struct AblationResult {
    std::vector<RunRecord> records;  // ordered by (config, scene, seed)
    AggregateReport report;
};

namespace detail {

inline std::vector<double> checkpoint_times(const RunConfig& base) {
    std::vector<double> t{0.0};
    for (double c : base.checkpoints_s)
        if (c <= base.duration_s + 1e-9) t.push_back(c);
    std::sort(t.begin() + 1, t.end());
    return t;
}

}  // namespace detail

// Aggregates a rectangular batch of records (one per config x scene x seed,
// in that order). Failed runs are excluded from means but stay in the CSV.
inline AggregateReport aggregate(const std::vector<RunConfig>& configs,
                                 const std::vector<const Scene*>& scenes,
                                 const std::vector<uint64_t>& seeds,
                                 const std::vector<RunRecord>& records) {
    AggregateReport rep;
    rep.checkpoint_times = detail::checkpoint_times(configs.front());
    rep.seeds = seeds;
    for (const Scene* s : scenes)
        rep.scenes.push_back({s->name, s->area_m2, s->area_m2 >= 60.0});

    const size_t n_cp = rep.checkpoint_times.size();
    const size_t per_config = scenes.size() * seeds.size();
    for (size_t ci = 0; ci < configs.size(); ++ci) {
        ConfigAggregate agg;
        agg.label = configs[ci].label;
        agg.finished_per_seed.assign(seeds.size(), 0);
        agg.cov_abs_m2_all.assign(n_cp, 0.0);
        agg.cov_rel_all.assign(n_cp, 0.0);
        agg.cov_abs_m2_large.assign(n_cp, 0.0);
        agg.cov_rel_large.assign(n_cp, 0.0);
        agg.cov_abs_m2_small.assign(n_cp, 0.0);
        agg.cov_rel_small.assign(n_cp, 0.0);
        double loss_sum = 0.0, finish_sum = 0.0;
        int ok_runs = 0, large_runs = 0, small_runs = 0;
        for (size_t si = 0; si < scenes.size(); ++si) {
            for (size_t ki = 0; ki < seeds.size(); ++ki) {
                const RunRecord& r = records[ci * per_config + si * seeds.size() + ki];
                ++agg.runs;
                if (r.failed) {
                    ++agg.failed;
                    continue;
                }
                ++ok_runs;
                loss_sum += r.tracking_losses;
                if (r.finished) {
                    ++agg.finished_runs;
                    ++agg.finished_per_seed[ki];
                    finish_sum += r.finish_time_s;
                }
                const bool large = rep.scenes[si].large;
                (large ? large_runs : small_runs)++;
                for (size_t t = 0; t < n_cp && t < r.coverage.size(); ++t) {
                    agg.cov_abs_m2_all[t] += r.coverage[t].abs_area;
                    agg.cov_rel_all[t] += r.coverage[t].rel;
                    auto& abs_split = large ? agg.cov_abs_m2_large : agg.cov_abs_m2_small;
                    auto& rel_split = large ? agg.cov_rel_large : agg.cov_rel_small;
                    abs_split[t] += r.coverage[t].abs_area;
                    rel_split[t] += r.coverage[t].rel;
                }
            }
        }
        auto divide = [](std::vector<double>& v, int n) {
            for (double& x : v) x = n > 0 ? x / n : 0.0;
        };
        divide(agg.cov_abs_m2_all, ok_runs);
        divide(agg.cov_rel_all, ok_runs);
        divide(agg.cov_abs_m2_large, large_runs);
        divide(agg.cov_rel_large, large_runs);
        divide(agg.cov_abs_m2_small, small_runs);
        divide(agg.cov_rel_small, small_runs);
        agg.mean_tracking_losses = ok_runs > 0 ? loss_sum / ok_runs : 0.0;
        agg.mean_finish_time_s = agg.finished_runs > 0 ? finish_sum / agg.finished_runs : 0.0;
        double fs = 0.0;
        for (int c : agg.finished_per_seed) fs += c;
        agg.finished_scenes_mean = seeds.empty() ? 0.0 : fs / static_cast<double>(seeds.size());
        rep.configs.push_back(std::move(agg));
    }
    return rep;
}

// Runs every (config, scene, seed) combination across a worker pool. Task
// order and record placement are fixed up front, so the output does not
// depend on scheduling.
inline std::vector<RunRecord> run_batch(const std::vector<RunConfig>& configs,
                                        const std::vector<const Scene*>& scenes,
                                        const std::vector<uint64_t>& seeds, int jobs,
                                        const std::function<void(size_t, size_t)>& progress = {}) {
    const size_t total = configs.size() * scenes.size() * seeds.size();
    std::vector<RunRecord> records(total);
    std::vector<std::string> hashes;
    hashes.reserve(configs.size());
    for (const auto& c : configs) hashes.push_back(config_hash(c));

    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= total) return;
            const size_t ci = i / (scenes.size() * seeds.size());
            const size_t si = (i / seeds.size()) % scenes.size();
            const size_t ki = i % seeds.size();
            records[i] = run_episode(*scenes[si], configs[ci], seeds[ki]);
            records[i].config_hash = hashes[ci];
            const size_t d = done.fetch_add(1) + 1;
            if (progress) progress(d, total);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

inline AblationResult run_ablation(const std::vector<const Scene*>& scenes, const RunConfig& base,
                                   const std::vector<uint64_t>& seeds, int jobs = 1,
                                   const std::function<void(size_t, size_t)>& progress = {}) {
    if (scenes.empty()) throw std::invalid_argument("run_ablation: no scenes given");
    if (seeds.empty()) throw std::invalid_argument("run_ablation: no seeds given");
    const auto configs = ablation_ladder(base);
    AblationResult out;
    out.records = run_batch(configs, scenes, seeds, jobs, progress);
    out.report = aggregate(configs, scenes, seeds, out.records);
    return out;
}

// --- serialization ---------------------------------------------------------

inline std::string runs_csv_string(const std::vector<RunRecord>& records,
                                   const std::vector<double>& checkpoint_times) {
    std::string out;
    out += "config,scene,seed,area_m2,size_class,failed,error,finished,finish_time_s,"
           "tracking_losses,goal_switches,bump_events,config_hash";
    char buf[64];
    for (double t : checkpoint_times) {
        std::snprintf(buf, sizeof(buf), ",cov_abs_m2_t%g,cov_rel_t%g", t, t);
        out += buf;
    }
    out += "\n";
    for (const RunRecord& r : records) {
        out += r.config_label + "," + r.scene_name + ",";
        std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(r.seed));
        out += buf;
        std::snprintf(buf, sizeof(buf), ",%.4f", r.scene_area_m2);
        out += buf;
        out += r.scene_area_m2 >= 60.0 ? ",large" : ",small";
        out += r.failed ? ",1," : ",0,";
        for (char ch : r.error) out += (ch == ',' || ch == '\n') ? ';' : ch;
        out += r.finished ? ",1" : ",0";
        if (r.finish_time_s >= 0.0) {
            std::snprintf(buf, sizeof(buf), ",%.3f", r.finish_time_s);
            out += buf;
        } else {
            out += ",";
        }
        std::snprintf(buf, sizeof(buf), ",%d,%d,%d,", r.tracking_losses, r.goal_switches,
                      r.bump_events);
        out += buf;
        out += r.config_hash;
        for (const CoverageSample& s : r.coverage) {
            std::snprintf(buf, sizeof(buf), ",%.4f,%.6f", s.abs_area, s.rel);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::ordered_json report_json(const AggregateReport& rep) {
    nlohmann::ordered_json j;
    j["checkpoint_times_s"] = rep.checkpoint_times;
    j["seeds"] = rep.seeds;
    auto& scenes = j["scenes"] = nlohmann::ordered_json::array();
    for (const auto& s : rep.scenes)
        scenes.push_back({{"name", s.name},
                          {"area_m2", s.area_m2},
                          {"size_class", s.large ? "large" : "small"}});
    auto& configs = j["configs"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.configs) {
        nlohmann::ordered_json e;
        e["label"] = c.label;
        e["runs"] = c.runs;
        e["failed"] = c.failed;
        e["mean_tracking_losses"] = c.mean_tracking_losses;
        e["finished_runs"] = c.finished_runs;
        e["finished_scenes_mean"] = c.finished_scenes_mean;
        e["finished_per_seed"] = c.finished_per_seed;
        e["mean_finish_time_s"] = c.mean_finish_time_s;
        e["coverage"] = {{"abs_m2_all", c.cov_abs_m2_all},
                         {"rel_all", c.cov_rel_all},
                         {"abs_m2_large", c.cov_abs_m2_large},
                         {"rel_large", c.cov_rel_large},
                         {"abs_m2_small", c.cov_abs_m2_small},
                         {"rel_small", c.cov_rel_small}};
        configs.push_back(std::move(e));
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << content;
    if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

}  // namespace explore
