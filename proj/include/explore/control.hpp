#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "explore/geometry.hpp"
#include "explore/planning.hpp"

namespace explore {

// The four discrete commands a robot accepts: translate along the heading,
// rotate in place by a fixed increment, or hold still.
struct Action {
    enum class Kind { Forward, TurnLeft, TurnRight, Stay };

    Kind kind = Kind::Stay;
    double amount = 0.0;  // meters for Forward, radians for turns

    static Action forward(double d) { return {Kind::Forward, d}; }
    static Action turn_left(double r) { return {Kind::TurnLeft, r}; }
    static Action turn_right(double r) { return {Kind::TurnRight, r}; }
    static Action stay() { return {Kind::Stay, 0.0}; }

    bool is(Kind k) const { return kind == k; }
    // Signed heading change this action commands.
    double turn() const {
        return kind == Kind::TurnLeft ? amount : (kind == Kind::TurnRight ? -amount : 0.0);
    }
};

struct FollowerParams {
    double angle_threshold = 5.0 * kPi / 180.0;  // forward region is |err| < threshold
    double turn_step = 10.0 * kPi / 180.0;       // delta per turn action
    double forward_step = 0.1;                   // m per forward action
    double waypoint_radius = 0.15;               // m, waypoint considered reached
    double goal_radius = 0.2;                    // m, final point considered reached
    double forward_nudge = 0.3;                  // m, recovery forward stage
};

enum class FollowerMode { LookAround, FollowPath, Recovery, Idle };
enum class RecoveryStage { Turn1, Forward, Turn2 };

struct FollowerState {
    FollowerMode mode = FollowerMode::LookAround;
    double look_remaining = kTwoPi;       // rad left of the initial look-around
    RecoveryStage stage = RecoveryStage::Turn1;
    double stage_remaining = 0.0;         // rad or meters, depending on stage
    bool error = false;

    static FollowerState initial() { return {}; }

    // (Re)starts the tracking-loss recovery program from its first half-turn.
    void enter_recovery(const FollowerParams& p = {}) {
        (void)p;
        mode = FollowerMode::Recovery;
        stage = RecoveryStage::Turn1;
        stage_remaining = kPi;
        error = false;
    }

    // A bump during the recovery forward stage skips straight to the second
    // half-turn.
    void abort_recovery_forward() {
        if (mode == FollowerMode::Recovery && stage == RecoveryStage::Forward) {
            stage = RecoveryStage::Turn2;
            stage_remaining = kPi;
        }
    }
};

// One follower decision against the current path. Turns toward the next
// waypoint until the angular error is inside the threshold, then drives
// forward; equality with the threshold counts as a turn. Positive error
// (target counterclockwise of the heading) turns left.
inline std::pair<Action, FollowerState> follow_step(FollowerState state, const Pose& pose,
                                                    const Path& path, const FollowerParams& p = {},
                                                    double* angular_error = nullptr) {
    if (angular_error) *angular_error = 0.0;
    if (path.points.empty()) {
        state.error = true;
        return {Action::stay(), state};
    }
    if (distance(pose.position, path.points.back()) <= p.goal_radius) {
        state.mode = FollowerMode::Idle;
        return {Action::stay(), state};
    }
    Vec2 target = path.points.back();
    for (const Vec2& pt : path.points) {
        if (distance(pose.position, pt) > p.waypoint_radius) {
            target = pt;
            break;
        }
    }
    const double err = wrap_angle(bearing(pose.position, target) - pose.heading);
    if (angular_error) *angular_error = err;
    if (std::abs(err) < p.angle_threshold) return {Action::forward(p.forward_step), state};
    if (err > 0.0) return {Action::turn_left(p.turn_step), state};
    return {Action::turn_right(p.turn_step), state};
}

// Initial 360-degree look-around: emits TurnLeft until a full revolution has
// been commanded, then hands over to path following without consuming an
// action (nullopt).
inline std::pair<std::optional<Action>, FollowerState> look_around_step(
    FollowerState state, const FollowerParams& p = {}) {
    if (state.look_remaining <= 1e-12) {
        state.mode = FollowerMode::FollowPath;
        return {std::nullopt, state};
    }
    state.look_remaining -= p.turn_step;
    return {Action::turn_left(p.turn_step), state};
}

// Tracking-loss recovery program: half-turn left, short forward nudge,
// half-turn left again. Completion transitions back to FollowPath and
// returns nullopt so the caller can force a replan.
inline std::pair<std::optional<Action>, FollowerState> recovery_step(
    FollowerState state, const FollowerParams& p = {}) {
    if (state.mode != FollowerMode::Recovery)
        throw std::logic_error("recovery_step: follower is not in recovery");
    if (state.stage_remaining <= 1e-12) {
        switch (state.stage) {
            case RecoveryStage::Turn1:
                state.stage = RecoveryStage::Forward;
                state.stage_remaining = p.forward_nudge;
                break;
            case RecoveryStage::Forward:
                state.stage = RecoveryStage::Turn2;
                state.stage_remaining = kPi;
                break;
            case RecoveryStage::Turn2:
                state.mode = FollowerMode::FollowPath;
                return {std::nullopt, state};
        }
    }
    if (state.stage == RecoveryStage::Forward) {
        state.stage_remaining -= p.forward_step;
        return {Action::forward(p.forward_step), state};
    }
    state.stage_remaining -= p.turn_step;
    return {Action::turn_left(p.turn_step), state};
}

// Stall watchdog: fires when forward motion has been commanded for `window`
// seconds while the observed pose moved less than `motion_epsilon`.
struct BumpDetectorState {
    double window = 1.0;            // s
    double motion_epsilon = 0.02;   // m
    double stall_clock = 0.0;       // s of stalled forward commands
    bool in_window = false;
    Vec2 window_start;              // observed position when the window began
};

struct BumpEvent {
    Pose pose;  // estimated pose at the moment the detector fired
};

inline std::pair<std::optional<BumpEvent>, BumpDetectorState> bump_update(
    BumpDetectorState state, const Action& commanded, const Pose& observed_pose, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("bump_update: dt must be positive");
    if (!commanded.is(Action::Kind::Forward)) {
        state.in_window = false;
        state.stall_clock = 0.0;
        return {std::nullopt, state};
    }
    if (!state.in_window ||
        distance(observed_pose.position, state.window_start) >= state.motion_epsilon) {
        state.in_window = true;
        state.window_start = observed_pose.position;
        state.stall_clock = 0.0;
    }
    state.stall_clock += dt;
    if (state.stall_clock + 1e-9 >= state.window) {
        state.in_window = false;
        state.stall_clock = 0.0;
        return {BumpEvent{observed_pose}, state};
    }
    return {std::nullopt, state};
}

}  // namespace explore
