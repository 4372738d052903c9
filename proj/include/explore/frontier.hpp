#pragma once

#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "explore/grid_map.hpp"
#include "explore/planning.hpp"

namespace explore {

// A frontier: a connected chain of free cells bordering unknown space.
struct Frontier {
    std::vector<Cell> points;
    int size = 0;       // cell count
    Vec2 centroid;      // mean of member cell centers, world frame
};

// Weights of the goal-selection cost terms.
struct CostParams {
    double alpha = 1.0;   // per meter of distance / path length
    double beta = 0.33;   // per frontier cell
    double gamma = 0.5;   // per radian of turn
};

namespace detail {
inline bool has_unknown_neighbor(const OccupancyGrid& g, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (g.in_bounds(nx, ny) && g.at(nx, ny) == CellState::Unknown) return true;
        }
    }
    return false;
}
}  // namespace detail

// Finds all frontiers reachable from `robot_cell` through free cells (8-way
// BFS). Each returned frontier is a maximal 8-connected component of free
// cells that touch unknown space. The robot cell snaps to the nearest free
// cell within `snap_radius`; detection fails when there is none.
inline std::vector<Frontier> detect_frontiers(const OccupancyGrid& grid, const Cell& robot_cell,
                                              int snap_radius = 5) {
    const auto start = snap_to_free(grid, robot_cell, snap_radius);
    if (!start)
        throw std::runtime_error("detect_frontiers: no free cell near the robot");

    const size_t n = grid.cells.size();
    std::vector<uint8_t> flags(n, 0);  // 1 = reached, 2 = frontier cell, 4 = grouped
    std::vector<int32_t> queue;
    queue.reserve(1024);

    auto id = [&](int x, int y) { return static_cast<int32_t>(grid.index(x, y)); };

    queue.push_back(id(start->x, start->y));
    flags[queue[0]] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int32_t cur = queue[head];
        const int x = cur % grid.width, y = cur / grid.width;
        if (detail::has_unknown_neighbor(grid, x, y)) flags[cur] |= 2;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (!grid.in_bounds(nx, ny) || grid.at(nx, ny) != CellState::Free) continue;
                const int32_t ni = id(nx, ny);
                if (!(flags[ni] & 1)) {
                    flags[ni] |= 1;
                    queue.push_back(ni);
                }
            }
        }
    }

    // Group frontier cells into 8-connected components, scanning in index
    // order so component numbering is deterministic.
    std::vector<Frontier> frontiers;
    std::vector<int32_t> comp_queue;
    for (size_t i = 0; i < n; ++i) {
        if ((flags[i] & 2) == 0 || (flags[i] & 4)) continue;
        Frontier f;
        comp_queue.clear();
        comp_queue.push_back(static_cast<int32_t>(i));
        flags[i] |= 4;
        Vec2 sum{};
        for (size_t head = 0; head < comp_queue.size(); ++head) {
            const int32_t cur = comp_queue[head];
            const Cell c{cur % grid.width, cur / grid.width};
            f.points.push_back(c);
            sum += grid.cell_center(c);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = c.x + dx, ny = c.y + dy;
                    if (!grid.in_bounds(nx, ny)) continue;
                    const int32_t ni = id(nx, ny);
                    if ((flags[ni] & 2) && !(flags[ni] & 4)) {
                        flags[ni] |= 4;
                        comp_queue.push_back(ni);
                    }
                }
            }
        }
        f.size = static_cast<int>(f.points.size());
        f.centroid = sum * (1.0 / f.size);
        frontiers.push_back(std::move(f));
    }
    return frontiers;
}

// Distance-minus-size frontier cost: alpha * ||centroid - robot|| - beta * n.
inline double cost_baseline(const Frontier& f, const Pose& robot, const CostParams& p) {
    return p.alpha * distance(f.centroid, robot.position) - p.beta * f.size;
}

// Path-aware frontier cost: alpha * (path length) - beta * n + gamma * |turn|
// where turn is the angle between the robot heading and the first path
// segment, in [0, pi]. An absent or degenerate path means the frontier is
// unreachable and the cost is +infinity.
inline double cost_enhanced(const Frontier& f, const Pose& robot, const Path& path,
                            const CostParams& p) {
    if (path.points.size() < 2) return std::numeric_limits<double>::infinity();
    double len = 0.0;
    for (size_t i = 0; i + 1 < path.points.size(); ++i)
        len += distance(path.points[i], path.points[i + 1]);
    // First waypoint that actually leaves p0, so the turn angle is defined.
    double turn = 0.0;
    for (size_t i = 1; i < path.points.size(); ++i) {
        if ((path.points[i] - path.points[0]).norm_sq() > 1e-18) {
            turn = std::abs(wrap_angle(bearing(path.points[0], path.points[i]) - robot.heading));
            break;
        }
    }
    return p.alpha * len - p.beta * f.size + p.gamma * turn;
}

// Index of the lowest-cost frontier with size >= min_size; ties break toward
// the larger frontier, then the lower index. Unreachable frontiers must carry
// +infinity cost. nullopt signals that exploration is complete.
inline std::optional<size_t> select_goal_index(const std::vector<Frontier>& frontiers,
                                               const std::vector<double>& costs,
                                               int min_size) {
    std::optional<size_t> best;
    for (size_t i = 0; i < frontiers.size(); ++i) {
        if (frontiers[i].size < min_size) continue;
        if (!(costs[i] < std::numeric_limits<double>::infinity())) continue;
        if (!best || costs[i] < costs[*best] ||
            (costs[i] == costs[*best] && frontiers[i].size > frontiers[*best].size)) {
            best = i;
        }
    }
    return best;
}

inline std::optional<Vec2> select_goal(const std::vector<Frontier>& frontiers,
                                       const std::vector<double>& costs, int min_size) {
    const auto i = select_goal_index(frontiers, costs, min_size);
    if (!i) return std::nullopt;
    return frontiers[*i].centroid;
}

// One multi-target shortest-path sweep over free cells (uniform-cost search,
// 8-connected with the planner's corner rule). Gives every frontier its
// path length and first step without one planner call per frontier.
class ReachSweep {
public:
    // With need_distances the sweep is a full uniform-cost search; without it
    // a plain BFS suffices for reachability (the distances are left as hop
    // counts and should not be read).
    void run(const OccupancyGrid& grid, const Cell& source, bool need_distances = true) {
        grid_ = &grid;
        source_ = source;
        const size_t n = grid.cells.size();
        dist_.assign(n, std::numeric_limits<double>::infinity());
        parent_.assign(n, -1);
        if (!grid.is_free(source))
            throw std::invalid_argument("ReachSweep: source cell is not free");
        const auto sid = static_cast<int32_t>(grid.index(source.x, source.y));
        dist_[sid] = 0.0;
        parent_[sid] = sid;

        if (!need_distances) {
            std::vector<int32_t> queue{sid};
            for (size_t head = 0; head < queue.size(); ++head) {
                const int32_t cur = queue[head];
                const int x = cur % grid.width, y = cur / grid.width;
                for (int d = 0; d < 8; ++d) {
                    if (!detail::step_allowed(grid, x, y, d)) continue;
                    const auto ni = static_cast<int32_t>(
                        grid.index(x + detail::kDx[d], y + detail::kDy[d]));
                    if (dist_[ni] < std::numeric_limits<double>::infinity()) continue;
                    dist_[ni] = dist_[cur] + 1.0;
                    parent_[ni] = cur;
                    queue.push_back(ni);
                }
            }
            return;
        }

        std::priority_queue<detail::HeapNode> open;
        open.push({0.0, 0.0, sid});
        const double res = grid.resolution;
        while (!open.empty()) {
            const auto top = open.top();
            open.pop();
            if (top.g > dist_[top.node]) continue;
            const int x = top.node % grid.width, y = top.node / grid.width;
            for (int d = 0; d < 8; ++d) {
                if (!detail::step_allowed(grid, x, y, d)) continue;
                const auto ni = static_cast<int32_t>(
                    grid.index(x + detail::kDx[d], y + detail::kDy[d]));
                const double nd = top.g + (d < 4 ? res : res * kSqrt2);
                if (nd < dist_[ni]) {
                    dist_[ni] = nd;
                    parent_[ni] = top.node;
                    open.push({nd, nd, ni});
                }
            }
        }
    }

    bool reachable(const Cell& c) const {
        return grid_->in_bounds(c) && dist_[grid_->index(c.x, c.y)] < std::numeric_limits<double>::infinity();
    }

    double distance_m(const Cell& c) const { return dist_[grid_->index(c.x, c.y)]; }

    // World-frame chain source..target (cell centers), appended to `out`.
    void append_chain(const Cell& target, std::vector<Vec2>& out) const {
        const size_t base = out.size();
        int32_t at = static_cast<int32_t>(grid_->index(target.x, target.y));
        const auto sid = static_cast<int32_t>(grid_->index(source_.x, source_.y));
        for (;; at = parent_[at]) {
            out.push_back(grid_->cell_center({at % grid_->width, at / grid_->width}));
            if (at == sid) break;
        }
        std::reverse(out.begin() + base, out.end());
    }

private:
    const OccupancyGrid* grid_ = nullptr;
    Cell source_;
    std::vector<double> dist_;
    std::vector<int32_t> parent_;
};

}  // namespace explore
