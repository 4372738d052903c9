#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "explore/episode.hpp"
#include "explore/rng.hpp"

namespace explore {

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["label"] = c.label;
    j["duration_s"] = c.duration_s;
    j["checkpoints_s"] = c.checkpoints_s;
    j["enhancements"] = {{"bump_detector", c.enhancements.bump_detector},
                         {"obstacle_expanding", c.enhancements.obstacle_expanding},
                         {"orientation_coef", c.enhancements.orientation_coef}};
    j["cost"] = {{"alpha", c.cost.alpha}, {"beta", c.cost.beta}, {"gamma", c.cost.gamma}};
    j["min_frontier_size"] = c.min_frontier_size;
    j["depth_mode"] = c.depth == DepthMode::Corrupted ? "corrupted_depth" : "ideal_depth";
    j["sensor"] = {{"fov_rad", c.sensor.fov},
                   {"max_range_m", c.sensor.max_range},
                   {"n_rays", c.sensor.n_rays},
                   {"range_noise_mult", c.sensor.corruption.range_noise_mult},
                   {"gap_threshold_m", c.sensor.corruption.gap_threshold_m},
                   {"p_close", c.sensor.corruption.p_close},
                   {"min_closure_range_m", c.sensor.corruption.min_closure_range}};
    j["slam"] = {{"drift_sigma_trans", c.slam.drift_sigma_trans},
                 {"drift_sigma_rot", c.slam.drift_sigma_rot},
                 {"loss_prob_per_rad", c.slam.loss_prob_per_rad},
                 {"relocalize_overlap", c.slam.relocalize_overlap}};
    j["follower"] = {{"angle_threshold_rad", c.follower.angle_threshold},
                     {"turn_step_rad", c.follower.turn_step},
                     {"forward_step_m", c.follower.forward_step},
                     {"waypoint_radius_m", c.follower.waypoint_radius},
                     {"goal_radius_m", c.follower.goal_radius},
                     {"forward_nudge_m", c.follower.forward_nudge}};
    j["bump"] = {{"window_s", c.bump_window_s}, {"motion_epsilon_m", c.bump_motion_epsilon}};
    j["pool_factor"] = c.pool_factor;
    j["inflate_radius"] = c.inflate_radius;
    j["tick_hz"] = c.tick_hz;
    j["replan_hz"] = c.replan_hz;
    j["snap_radius"] = c.snap_radius;
    return j;
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    c.label = j.value("label", c.label);
    c.duration_s = j.value("duration_s", c.duration_s);
    if (j.contains("checkpoints_s")) c.checkpoints_s = j["checkpoints_s"].get<std::vector<double>>();
    if (j.contains("enhancements")) {
        const auto& e = j["enhancements"];
        c.enhancements.bump_detector = e.value("bump_detector", c.enhancements.bump_detector);
        c.enhancements.obstacle_expanding =
            e.value("obstacle_expanding", c.enhancements.obstacle_expanding);
        c.enhancements.orientation_coef =
            e.value("orientation_coef", c.enhancements.orientation_coef);
    }
    if (j.contains("cost")) {
        const auto& e = j["cost"];
        c.cost.alpha = e.value("alpha", c.cost.alpha);
        c.cost.beta = e.value("beta", c.cost.beta);
        c.cost.gamma = e.value("gamma", c.cost.gamma);
    }
    c.min_frontier_size = j.value("min_frontier_size", c.min_frontier_size);
    if (j.contains("depth_mode"))
        c.depth = j["depth_mode"] == "corrupted_depth" ? DepthMode::Corrupted : DepthMode::Ideal;
    if (j.contains("sensor")) {
        const auto& e = j["sensor"];
        c.sensor.fov = e.value("fov_rad", c.sensor.fov);
        c.sensor.max_range = e.value("max_range_m", c.sensor.max_range);
        c.sensor.n_rays = e.value("n_rays", c.sensor.n_rays);
        c.sensor.corruption.range_noise_mult =
            e.value("range_noise_mult", c.sensor.corruption.range_noise_mult);
        c.sensor.corruption.gap_threshold_m =
            e.value("gap_threshold_m", c.sensor.corruption.gap_threshold_m);
        c.sensor.corruption.p_close = e.value("p_close", c.sensor.corruption.p_close);
        c.sensor.corruption.min_closure_range =
            e.value("min_closure_range_m", c.sensor.corruption.min_closure_range);
    }
    if (j.contains("slam")) {
        const auto& e = j["slam"];
        c.slam.drift_sigma_trans = e.value("drift_sigma_trans", c.slam.drift_sigma_trans);
        c.slam.drift_sigma_rot = e.value("drift_sigma_rot", c.slam.drift_sigma_rot);
        c.slam.loss_prob_per_rad = e.value("loss_prob_per_rad", c.slam.loss_prob_per_rad);
        c.slam.relocalize_overlap = e.value("relocalize_overlap", c.slam.relocalize_overlap);
    }
    if (j.contains("follower")) {
        const auto& e = j["follower"];
        c.follower.angle_threshold = e.value("angle_threshold_rad", c.follower.angle_threshold);
        c.follower.turn_step = e.value("turn_step_rad", c.follower.turn_step);
        c.follower.forward_step = e.value("forward_step_m", c.follower.forward_step);
        c.follower.waypoint_radius = e.value("waypoint_radius_m", c.follower.waypoint_radius);
        c.follower.goal_radius = e.value("goal_radius_m", c.follower.goal_radius);
        c.follower.forward_nudge = e.value("forward_nudge_m", c.follower.forward_nudge);
    }
    if (j.contains("bump")) {
        const auto& e = j["bump"];
        c.bump_window_s = e.value("window_s", c.bump_window_s);
        c.bump_motion_epsilon = e.value("motion_epsilon_m", c.bump_motion_epsilon);
    }
    c.pool_factor = j.value("pool_factor", c.pool_factor);
    c.inflate_radius = j.value("inflate_radius", c.inflate_radius);
    c.tick_hz = j.value("tick_hz", c.tick_hz);
    c.replan_hz = j.value("replan_hz", c.replan_hz);
    c.snap_radius = j.value("snap_radius", c.snap_radius);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    RunConfig c;
    from_json(j, c);
    return c;
}

inline std::string config_hash(const RunConfig& c) {
    const std::string dump = to_json(c).dump();
    const uint64_t h = fnv1a64(dump.data(), dump.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace explore
