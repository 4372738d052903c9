#pragma once

#include <string>
#include <vector>

#include "explore/control.hpp"
#include "explore/grid_map.hpp"
#include "explore/rng.hpp"
#include "explore/scan.hpp"

namespace explore {

// Depth sensor model. Corruption imitates learned-depth failure modes:
// multiplicative range noise plus "narrow opening closure", where a ray
// squeezing through a tight gap reports a wall there instead.
struct SensorCorruption {
    bool enabled = false;
    double range_noise_mult = 0.03;   // sigma of the multiplicative noise
    double gap_threshold_m = 0.30;    // openings narrower than this may close
    double p_close = 0.5;             // per-ray closure probability
    double min_closure_range = 0.5;   // m; gaps right next to the robot stay open
};

struct SensorParams {
    double fov = kPi / 2.0;
    double max_range = 5.0;
    int n_rays = 180;
    SensorCorruption corruption;
};

// Ground-truth world for one run: a fully known occupancy grid, a spawn pose,
// and optional invisible obstacles (untraversable but never sensed, like low
// clutter below the camera).
struct Scene {
    std::string name;
    OccupancyGrid gt;
    Pose spawn;
    double area_m2 = 0.0;  // |free + occupied| * res^2
    std::vector<Cell> invisible_obstacles;

    // Derived lookups; rebuilt by finalize() after any edit to gt/invisible.
    std::vector<uint8_t> invisible_mask;
    std::vector<int16_t> narrowness;  // min free run (cells) through each cell

    bool invisible_at(const Cell& c) const {
        return gt.in_bounds(c) && invisible_mask[gt.index(c.x, c.y)] != 0;
    }

    // Untraversable: occupied, invisible, or outside the world.
    bool blocked(const Cell& c) const {
        if (!gt.in_bounds(c)) return true;
        return gt.at(c) == CellState::Occupied || invisible_mask[gt.index(c.x, c.y)] != 0;
    }

    void finalize() {
        const size_t n = gt.cells.size();
        invisible_mask.assign(n, 0);
        for (const Cell& c : invisible_obstacles)
            if (gt.in_bounds(c)) invisible_mask[gt.index(c.x, c.y)] = 1;
        area_m2 = static_cast<double>(gt.known_count()) * gt.resolution * gt.resolution;
        compute_narrowness();
    }

private:
    // For every free cell, the length (in cells) of the shortest maximal free
    // run through it over the four grid directions. Cells inside a narrow
    // doorway get the doorway width; open space gets large values.
    void compute_narrowness() {
        const int w = gt.width, h = gt.height;
        narrowness.assign(gt.cells.size(), std::numeric_limits<int16_t>::max());
        auto free_at = [&](int x, int y) {
            return gt.in_bounds(x, y) && gt.at(x, y) != CellState::Occupied;
        };
        const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
        std::vector<Cell> line;
        for (const auto& d : dirs) {
            const int dx = d[0], dy = d[1];
            // Starting cells: those whose predecessor along (dx,dy) is not free.
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!free_at(x, y) || free_at(x - dx, y - dy)) continue;
                    line.clear();
                    for (int cx = x, cy = y; free_at(cx, cy); cx += dx, cy += dy)
                        line.push_back({cx, cy});
                    const auto run = static_cast<int16_t>(
                        std::min<size_t>(line.size(), std::numeric_limits<int16_t>::max()));
                    for (const Cell& c : line) {
                        int16_t& v = narrowness[gt.index(c.x, c.y)];
                        if (run < v) v = run;
                    }
                }
            }
        }
    }
};

// Applies one action to the true pose. Forward motion is blocked (pose
// unchanged) when the swept segment touches an occupied cell, an invisible
// obstacle, or leaves the world; this blocked non-motion is exactly what the
// bump detector observes.
inline Pose step_kinematics(const Scene& scene, const Pose& pose, const Action& action) {
    switch (action.kind) {
        case Action::Kind::Stay:
            return pose;
        case Action::Kind::TurnLeft:
            return pose.rotated(action.amount);
        case Action::Kind::TurnRight:
            return pose.rotated(-action.amount);
        case Action::Kind::Forward: {
            const Vec2 dest = pose.position + heading_vector(pose.heading) * action.amount;
            const bool clear = supercover_visit(
                scene.gt.to_units(pose.position), scene.gt.to_units(dest),
                [&](int x, int y) { return !scene.blocked({x, y}); });
            return clear ? Pose{dest, pose.heading} : pose;
        }
    }
    return pose;
}

// Casts `n_rays` depth rays spread evenly over the field of view. Each range
// is the distance to the first occupied ground-truth cell boundary (invisible
// obstacles excluded), clamped to max_range; hit ranges land a hair inside
// the struck cell so scan integration recovers it exactly. Rays cannot
// squeeze between two diagonally-touching occupied cells: such a corner stops
// the ray without an occupied endpoint (hit stays false), matching the
// supercover line-of-sight rule.
inline DepthScan sense(const Scene& scene, const Pose& pose, const SensorParams& params,
                       Rng& rng) {
    DepthScan scan;
    scan.fov = params.fov;
    scan.max_range = params.max_range;
    scan.rays.reserve(params.n_rays);

    const OccupancyGrid& gt = scene.gt;
    const double res = gt.resolution;
    const auto gap_cells = params.corruption.gap_threshold_m / res;

    for (int i = 0; i < params.n_rays; ++i) {
        const double rel = params.n_rays > 1
                               ? -params.fov / 2.0 + params.fov * i / (params.n_rays - 1)
                               : 0.0;
        const Vec2 dir = heading_vector(pose.heading + rel);
        const Vec2 end = pose.position + dir * params.max_range;

        double hit_range = -1.0;
        bool corner_stop = false;
        double first_exit = params.max_range;
        const Cell start_cell = gt.world_to_cell(pose.position);
        bool first_boundary = true;

        supercover_visit(gt.to_units(pose.position), gt.to_units(end), [&](int x, int y) {
            if (x == start_cell.x && y == start_cell.y) return true;
            // Parametric chord of the ray through this cell, in meters.
            const double bx0 = gt.origin.x + x * res, bx1 = bx0 + res;
            const double by0 = gt.origin.y + y * res, by1 = by0 + res;
            double t0 = 0.0, t1 = params.max_range;
            if (dir.x != 0.0) {
                const double ta = (bx0 - pose.position.x) / dir.x;
                const double tb = (bx1 - pose.position.x) / dir.x;
                t0 = std::max(t0, std::min(ta, tb));
                t1 = std::min(t1, std::max(ta, tb));
            } else if (pose.position.x < bx0 || pose.position.x >= bx1) {
                return true;
            }
            if (dir.y != 0.0) {
                const double ta = (by0 - pose.position.y) / dir.y;
                const double tb = (by1 - pose.position.y) / dir.y;
                t0 = std::max(t0, std::min(ta, tb));
                t1 = std::min(t1, std::max(ta, tb));
            } else if (pose.position.y < by0 || pose.position.y >= by1) {
                return true;
            }
            if (t0 > t1 + 1e-12) return true;  // never actually touched
            const bool corner = (t1 - t0) <= 1e-9;
            if (!corner && first_boundary) {
                first_exit = t0;
                first_boundary = false;
            }
            const bool occupied =
                gt.in_bounds(x, y) && gt.at(x, y) == CellState::Occupied;
            if (occupied) {
                hit_range = t0;
                corner_stop = corner;
                return false;
            }
            if (corner) return true;
            if (params.corruption.enabled && gt.in_bounds(x, y) &&
                t0 >= params.corruption.min_closure_range &&
                scene.narrowness[gt.index(x, y)] < gap_cells &&
                rng.chance(params.corruption.p_close)) {
                hit_range = t0;
                return false;
            }
            return true;
        });

        ScanRay ray;
        ray.bearing = rel;
        if (hit_range >= 0.0 && hit_range < params.max_range) {
            if (corner_stop) {
                // Stop just short of the corner; no clean cell to mark.
                ray.hit = false;
                ray.range = std::max(0.0, hit_range - 1e-6);
            } else {
                ray.hit = true;
                ray.range = hit_range + 1e-6;
                if (params.corruption.enabled) {
                    double mult = 1.0 + params.corruption.range_noise_mult * rng.gauss();
                    mult = std::clamp(mult, 0.85, 1.15);
                    ray.range = std::max(ray.range * mult, first_exit + 1e-6);
                }
                if (ray.range >= params.max_range) {
                    ray.range = params.max_range;
                    ray.hit = false;
                }
            }
        } else {
            ray.hit = false;
            ray.range = params.max_range;
        }
        scan.rays.push_back(ray);
    }
    return scan;
}

// Pose-tracking surrogate: publishes the true pose perturbed by accumulated
// drift, and loses tracking with probability proportional to the commanded
// rotation of the tick. While lost, the published estimate freezes.
struct SlamParams {
    double drift_sigma_trans = 0.0025;  // m per moving tick
    double drift_sigma_rot = 0.0008;    // rad per turning tick
    double loss_prob_per_rad = 0.06;
    double relocalize_overlap = 0.30;   // scan-endpoint overlap needed to resume
};

class SlamSurrogate {
public:
    SlamSurrogate() = default;
    SlamSurrogate(const SlamParams& params, uint64_t seed, const Pose& initial)
        : params_(params), rng_seed_(seed), rng_(Rng(seed).derived(0x51a)), estimate_(initial) {}

    struct Update {
        Pose estimate;
        bool ok = true;
        bool lost_now = false;
    };

    Update update(const Pose& true_prev, const Pose& true_now, const Action& action) {
        (void)action;
        if (!tracking_ok_) return {estimate_, false, false};
        const double dhead = std::abs(wrap_angle(true_now.heading - true_prev.heading));
        if (dhead > 1e-12) {
            const double p = std::min(1.0, params_.loss_prob_per_rad * dhead);
            if (rng_.chance(p)) {
                tracking_ok_ = false;
                ++loss_count_;
                return {estimate_, false, true};
            }
            rot_offset_ += rng_.gauss(0.0, params_.drift_sigma_rot);
        }
        if (distance(true_now.position, true_prev.position) > 1e-12) {
            offset_.x += rng_.gauss(0.0, params_.drift_sigma_trans);
            offset_.y += rng_.gauss(0.0, params_.drift_sigma_trans);
        }
        estimate_ = {true_now.position + offset_, wrap_angle(true_now.heading + rot_offset_)};
        return {estimate_, true, false};
    }

    // Called when the recovery maneuver completes. Tracking resumes when the
    // current view overlaps enough already-mapped space; the accumulated
    // drift is kept, as if the map pulled the estimate back in.
    bool attempt_relocalize(double overlap_fraction, const Pose& true_now) {
        if (tracking_ok_) return true;
        if (overlap_fraction < params_.relocalize_overlap) return false;
        tracking_ok_ = true;
        estimate_ = {true_now.position + offset_, wrap_angle(true_now.heading + rot_offset_)};
        return true;
    }

    bool tracking_ok() const { return tracking_ok_; }
    int loss_count() const { return loss_count_; }
    const Pose& estimate() const { return estimate_; }
    uint64_t rng_seed() const { return rng_seed_; }
    const SlamParams& params() const { return params_; }

private:
    SlamParams params_;
    uint64_t rng_seed_ = 0;
    Rng rng_;
    Pose estimate_;
    Vec2 offset_;
    double rot_offset_ = 0.0;
    bool tracking_ok_ = true;
    int loss_count_ = 0;
};

}  // namespace explore
