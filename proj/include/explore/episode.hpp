#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "explore/control.hpp"
#include "explore/frontier.hpp"
#include "explore/grid_map.hpp"
#include "explore/planning.hpp"
#include "explore/sim.hpp"

namespace explore {

// The cumulative enhancement switches of the ablation ladder.
struct Enhancements {
    bool bump_detector = false;
    bool obstacle_expanding = false;  // max-pool downsampling + 1-cell inflation
    bool orientation_coef = false;    // path-length cost with turn-angle term
};

enum class DepthMode { Ideal, Corrupted };

struct RunConfig {
    std::string label = "custom";
    double duration_s = 240.0;
    std::vector<double> checkpoints_s = {15,  30,  45,  60,  75,  90,  105, 120,
                                         135, 150, 165, 180, 195, 210, 225, 240};
    Enhancements enhancements;
    CostParams cost;
    int min_frontier_size = 3;
    DepthMode depth = DepthMode::Ideal;
    SensorParams sensor;
    SlamParams slam;
    FollowerParams follower;
    double bump_window_s = 1.0;
    double bump_motion_epsilon = 0.02;
    int pool_factor = 2;
    int inflate_radius = 1;
    double tick_hz = 10.0;
    double replan_hz = 5.0;
    int snap_radius = 5;
};

// Everything one run produces. Coverage samples start with an implicit t=0
// entry followed by the configured checkpoints.
struct RunRecord {
    std::string config_label;
    std::string scene_name;
    uint64_t seed = 0;
    double scene_area_m2 = 0.0;
    std::string config_hash;
    bool failed = false;
    std::string error;
    bool finished = false;
    double finish_time_s = -1.0;  // < 0 means never finished
    int tracking_losses = 0;
    int goal_switches = 0;
    int bump_events = 0;
    std::vector<CoverageSample> coverage;
};

// Incremental coverage bookkeeping. Mirrors coverage(): absolute = known
// agent cells, relative = fraction of gt-known locations seen, assuming the
// agent grid shares gt's resolution and lattice (the episode guarantees it).
class CoverageTracker {
public:
    explicit CoverageTracker(const OccupancyGrid& gt)
        : gt_(&gt), seen_(gt.cells.size(), 0), gt_known_(gt.known_count()) {}

    void on_transition(const OccupancyGrid& agent, const Cell& c, CellState old_state) {
        if (old_state != CellState::Unknown) return;
        ++agent_known_;
        const Cell g = gt_->world_to_cell(agent.cell_center(c));
        if (!gt_->in_bounds(g)) return;
        const size_t i = gt_->index(g.x, g.y);
        if (is_known(gt_->at(g)) && !seen_[i]) {
            seen_[i] = 1;
            ++seen_known_;
        }
    }

    int64_t abs_cells() const { return agent_known_; }
    double rel() const {
        return std::clamp(static_cast<double>(seen_known_) / static_cast<double>(gt_known_), 0.0, 1.0);
    }
    CoverageSample sample(double t, double resolution) const {
        return {t, agent_known_, static_cast<double>(agent_known_) * resolution * resolution, rel()};
    }

private:
    const OccupancyGrid* gt_;
    std::vector<uint8_t> seen_;
    int64_t gt_known_ = 0;
    int64_t seen_known_ = 0;
    int64_t agent_known_ = 0;
};

// Deterministic JSONL trace; content depends only on (scene, config, seed).
class TraceWriter {
public:
    explicit TraceWriter(std::ostream& os) : os_(&os) {}

    void tick(double t, FollowerMode mode, const Action& a, double angular_error) {
        char buf[192];
        std::snprintf(buf, sizeof(buf),
                      "{\"type\":\"tick\",\"t\":%.3f,\"mode\":\"%s\",\"action\":\"%s\","
                      "\"err\":%.6f}\n",
                      t, mode_name(mode), action_name(a), angular_error);
        *os_ << buf;
    }

    void replan(double t, size_t frontiers, int goal_index, int goal_size, double goal_cost,
                double path_length, int64_t expansions) {
        char buf[224];
        std::snprintf(buf, sizeof(buf),
                      "{\"type\":\"replan\",\"t\":%.3f,\"frontiers\":%zu,\"goal\":%d,"
                      "\"goal_size\":%d,\"cost\":%.6f,\"path_length\":%.6f,\"expansions\":%lld}\n",
                      t, frontiers, goal_index, goal_size, goal_cost, path_length,
                      static_cast<long long>(expansions));
        *os_ << buf;
    }

    void event(double t, const char* what) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "{\"type\":\"event\",\"t\":%.3f,\"what\":\"%s\"}\n", t, what);
        *os_ << buf;
    }

private:
    static const char* mode_name(FollowerMode m) {
        switch (m) {
            case FollowerMode::LookAround: return "look_around";
            case FollowerMode::FollowPath: return "follow_path";
            case FollowerMode::Recovery: return "recovery";
            case FollowerMode::Idle: return "idle";
        }
        return "?";
    }
    static const char* action_name(const Action& a) {
        switch (a.kind) {
            case Action::Kind::Forward: return "forward";
            case Action::Kind::TurnLeft: return "turn_left";
            case Action::Kind::TurnRight: return "turn_right";
            case Action::Kind::Stay: return "stay";
        }
        return "?";
    }
    std::ostream* os_;
};

namespace detail {

// Fraction of scan endpoints landing in already-known map cells; the
// relocalization gate after a recovery maneuver.
inline double scan_overlap(const DepthScan& scan, const Pose& est, const OccupancyGrid& agent) {
    if (scan.rays.empty()) return 0.0;
    int known = 0;
    for (const ScanRay& r : scan.rays) {
        const Vec2 end = est.position + heading_vector(est.heading + r.bearing) * r.range;
        const Cell c = agent.world_to_cell(end);
        if (agent.in_bounds(c) && is_known(agent.at(c))) ++known;
    }
    return static_cast<double>(known) / static_cast<double>(scan.rays.size());
}

}  // namespace detail

// Runs one exploration episode: sense -> track -> integrate -> (at the replan
// rate) post-process + pick frontier goal + plan -> follow, with the bump
// detector and loss recovery behaviors wired in per the configuration.
// `final_map`, when given, receives the agent's map as of episode end.
inline RunRecord run_episode(const Scene& scene, const RunConfig& config, uint64_t seed,
                             TraceWriter* trace = nullptr, OccupancyGrid* final_map = nullptr) {
    RunRecord rec;
    rec.config_label = config.label;
    rec.scene_name = scene.name;
    rec.seed = seed;
    rec.scene_area_m2 = scene.area_m2;

    const double dt = 1.0 / config.tick_hz;
    const double res = scene.gt.resolution;

    // Checkpoint schedule: implicit t=0 plus configured times within range.
    std::vector<double> cps{0.0};
    for (double c : config.checkpoints_s)
        if (c <= config.duration_s + 1e-9) cps.push_back(c);
    std::sort(cps.begin() + 1, cps.end());

    try {
        SensorParams sensor = config.sensor;
        sensor.corruption.enabled = (config.depth == DepthMode::Corrupted);

        Rng sense_rng = Rng(seed).derived(0x5e);
        SlamSurrogate slam(config.slam, seed, scene.spawn);

        // Agent map: same resolution, origin on gt's lattice, grows on demand.
        OccupancyGrid agent = [&] {
            const double half = sensor.max_range + 0.5;
            const Vec2 lo = scene.spawn.position - Vec2{half, half};
            const int cells = static_cast<int>(std::lround(2.0 * half / res));
            const Vec2 origin{scene.gt.origin.x +
                                  std::floor((lo.x - scene.gt.origin.x) / res) * res,
                              scene.gt.origin.y +
                                  std::floor((lo.y - scene.gt.origin.y) / res) * res};
            return OccupancyGrid(cells, cells, res, origin);
        }();
        CoverageTracker tracker(scene.gt);
        auto hook = [&](const Cell& c, CellState old_state, CellState) {
            tracker.on_transition(agent, c, old_state);
        };

        Pose true_pose = scene.spawn;
        Pose est = scene.spawn;
        FollowerState follower = FollowerState::initial();
        BumpDetectorState bump;
        bump.window = config.bump_window_s;
        bump.motion_epsilon = config.bump_motion_epsilon;

        Path path;
        double last_plan_t = -1e9;
        bool force_replan = false;
        bool exploration_complete = false;
        std::optional<Cell> prev_goal_cell;
        double latest_overlap = 0.0;

        // Reused planning buffers.
        OccupancyGrid pooled, planning_map;
        ReachSweep sweep;
        std::vector<double> costs;
        std::vector<Vec2> chain;

        size_t cp_idx = 0;
        rec.coverage.push_back(tracker.sample(cps[cp_idx++], res));

        const auto total_ticks = static_cast<int64_t>(std::llround(config.duration_s * config.tick_hz));
        double t = 0.0;

        auto replan = [&]() {
            const OccupancyGrid* pm = &agent;
            if (config.enhancements.obstacle_expanding) {
                downsample_maxpool_into(agent, config.pool_factor, pooled);
                inflate_obstacles_into(pooled, config.inflate_radius, planning_map);
                pm = &planning_map;
            }
            const auto robot_cell = snap_to_free(*pm, pm->world_to_cell(est.position), config.snap_radius);
            if (!robot_cell) throw std::runtime_error("replan: robot has no free planning cell");
            sweep.run(*pm, *robot_cell, /*need_distances=*/config.enhancements.orientation_coef);

            auto frontiers = detect_frontiers(*pm, *robot_cell, config.snap_radius);
            costs.assign(frontiers.size(), std::numeric_limits<double>::infinity());
            for (size_t i = 0; i < frontiers.size(); ++i) {
                const auto target = snap_to_free(*pm, pm->world_to_cell(frontiers[i].centroid),
                                                 config.snap_radius);
                if (!target || !sweep.reachable(*target)) continue;
                if (config.enhancements.orientation_coef) {
                    chain.clear();
                    chain.push_back(est.position);
                    sweep.append_chain(*target, chain);
                    chain.push_back(frontiers[i].centroid);
                    Path p;
                    p.points = chain;
                    costs[i] = cost_enhanced(frontiers[i], est, p, config.cost);
                } else {
                    costs[i] = cost_baseline(frontiers[i], est, config.cost);
                }
            }

            while (true) {
                const auto pick = select_goal_index(frontiers, costs, config.min_frontier_size);
                if (!pick) {
                    exploration_complete = true;
                    return;
                }
                const Vec2 start_w = pm->is_free(pm->world_to_cell(est.position))
                                         ? est.position
                                         : pm->cell_center(*robot_cell);
                PlanStats stats;
                const auto plan = plan_theta_star(*pm, start_w, frontiers[*pick].centroid,
                                                  config.snap_radius, &stats);
                if (!plan) {
                    costs[*pick] = std::numeric_limits<double>::infinity();
                    continue;
                }
                path = *plan;
                follower.mode = FollowerMode::FollowPath;
                follower.error = false;
                const Cell goal_cell = pm->world_to_cell(path.points.back());
                if (prev_goal_cell && !(*prev_goal_cell == goal_cell)) ++rec.goal_switches;
                prev_goal_cell = goal_cell;
                if (trace)
                    trace->replan(t, frontiers.size(), static_cast<int>(*pick),
                                  frontiers[*pick].size, costs[*pick], path.length,
                                  stats.expansions);
                break;
            }
            last_plan_t = t;
            force_replan = false;
        };

        for (int64_t k = 0; k < total_ticks; ++k) {
            if (slam.tracking_ok() &&
                (follower.mode == FollowerMode::FollowPath || follower.mode == FollowerMode::Idle) &&
                (force_replan || replan_due(last_plan_t, t, config.replan_hz))) {
                replan();
                if (exploration_complete) break;
            }

            // Follower dispatch; transitions may hand over within one tick
            // but each tick commands exactly one action.
            Action action = Action::stay();
            double angular_error = 0.0;
            for (int guard = 0; guard < 4; ++guard) {
                if (follower.mode == FollowerMode::LookAround) {
                    auto [a, ns] = look_around_step(follower, config.follower);
                    follower = ns;
                    if (a) { action = *a; break; }
                    force_replan = true;
                    continue;  // now FollowPath with no path yet -> Stay
                }
                if (follower.mode == FollowerMode::Recovery) {
                    auto [a, ns] = recovery_step(follower, config.follower);
                    follower = ns;
                    if (a) { action = *a; break; }
                    // Recovery finished: try to pick tracking back up.
                    if (!slam.attempt_relocalize(latest_overlap, true_pose)) {
                        follower.enter_recovery(config.follower);
                        if (trace) trace->event(t, "relocalize_failed");
                        continue;
                    }
                    est = slam.estimate();
                    if (trace) trace->event(t, "relocalized");
                    force_replan = true;
                    path.points.clear();
                    action = Action::stay();
                    break;
                }
                if (follower.mode == FollowerMode::FollowPath && !path.points.empty()) {
                    auto [a, ns] = follow_step(follower, est, path, config.follower, &angular_error);
                    follower = ns;
                    action = a;
                    break;
                }
                action = Action::stay();
                break;
            }

            const Pose new_true = step_kinematics(scene, true_pose, action);
            const auto upd = slam.update(true_pose, new_true, action);
            est = upd.estimate;
            if (upd.lost_now) {
                follower.enter_recovery(config.follower);
                path.points.clear();
                if (trace) trace->event(t, "tracking_lost");
            }

            if (config.enhancements.bump_detector) {
                auto [ev, nb] = bump_update(bump, action, est, dt);
                bump = nb;
                if (ev) {
                    ++rec.bump_events;
                    follower.abort_recovery_forward();
                    mark_cell_ahead_into(agent, ev->pose, hook);
                    force_replan = true;
                    if (trace) trace->event(t, "bump");
                }
            }

            const DepthScan scan = sense(scene, new_true, sensor, sense_rng);
            if (upd.ok) {
                integrate_scan_into(agent, est, scan, hook);
            } else {
                latest_overlap = detail::scan_overlap(scan, est, agent);
            }

            true_pose = new_true;
            t = static_cast<double>(k + 1) * dt;

            if (!rec.finished && tracker.rel() > 0.95) {
                rec.finished = true;
                rec.finish_time_s = t;
                if (trace) trace->event(t, "finished");
            }
            while (cp_idx < cps.size() && cps[cp_idx] <= t + 1e-9)
                rec.coverage.push_back(tracker.sample(cps[cp_idx++], res));
            if (trace) trace->tick(t, follower.mode, action, angular_error);
        }

        while (cp_idx < cps.size()) rec.coverage.push_back(tracker.sample(cps[cp_idx++], res));
        rec.tracking_losses = slam.loss_count();
        if (final_map) *final_map = agent;
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        while (rec.coverage.size() < cps.size()) {
            CoverageSample s =
                rec.coverage.empty() ? CoverageSample{} : rec.coverage.back();
            s.t = cps[rec.coverage.size()];
            rec.coverage.push_back(s);
        }
    }
    return rec;
}

}  // namespace explore
