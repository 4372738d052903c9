#pragma once

#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "explore/grid_map.hpp"

namespace explore {

// Any-angle path in world coordinates. p0 is the start, the last point the
// goal; every segment between consecutive points passes through free cells.
struct Path {
    std::vector<Vec2> points;
    double length = 0.0;

    bool empty() const { return points.empty(); }
    Vec2 goal() const { return points.back(); }
};

struct PlanStats {
    int64_t expansions = 0;
};

// True iff every cell touched by segment ab (supercover, corner pairs
// included) is Free. Out-of-bounds cells count as blocked.
inline bool line_of_sight(const OccupancyGrid& grid, const Vec2& a, const Vec2& b) {
    return supercover_visit(grid.to_units(a), grid.to_units(b), [&](int x, int y) {
        return grid.in_bounds(x, y) && grid.at(x, y) == CellState::Free;
    });
}

// Nearest Free cell within Chebyshev radius `max_radius` of `c`; ties broken
// by Euclidean distance, then y, then x, so the result is deterministic.
inline std::optional<Cell> snap_to_free(const OccupancyGrid& grid, const Cell& c,
                                        int max_radius) {
    if (grid.is_free(c)) return c;
    for (int r = 1; r <= max_radius; ++r) {
        Cell best{};
        long best_d2 = -1;
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                const Cell cand{c.x + dx, c.y + dy};
                if (!grid.is_free(cand)) continue;
                const long d2 = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
                if (best_d2 < 0 || d2 < best_d2 ||
                    (d2 == best_d2 && (cand.y < best.y || (cand.y == best.y && cand.x < best.x)))) {
                    best = cand;
                    best_d2 = d2;
                }
            }
        }
        if (best_d2 >= 0) return best;
    }
    return std::nullopt;
}

namespace detail {

// 8-connected moves; diagonal steps are allowed only when both orthogonal
// side cells are free, matching the supercover line-of-sight rule.
inline constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

inline bool step_allowed(const OccupancyGrid& g, int x, int y, int dir) {
    const int nx = x + kDx[dir], ny = y + kDy[dir];
    if (!g.in_bounds(nx, ny) || g.at(nx, ny) != CellState::Free) return false;
    if (dir >= 4) {
        if (g.at(x + kDx[dir], y) != CellState::Free) return false;
        if (g.at(x, y + kDy[dir]) != CellState::Free) return false;
    }
    return true;
}

struct HeapNode {
    double f;
    double g;
    int32_t node;
    bool operator<(const HeapNode& o) const {
        if (f != o.f) return f > o.f;  // min-heap
        if (g != o.g) return g < o.g;  // prefer larger g (closer to goal)
        return node > o.node;
    }
};

}  // namespace detail

// Optimal 8-connected grid path with octile heuristic. Step costs are
// resolution and resolution*sqrt(2); the reported length is reconstructed
// from straight/diagonal step counts so it is bit-stable.
inline std::optional<Path> plan_astar(const OccupancyGrid& grid, const Cell& start_in,
                                      const Cell& goal_in, int snap_radius = 5,
                                      PlanStats* stats = nullptr) {
    if (!grid.is_free(start_in))
        throw std::invalid_argument("plan_astar: start cell is not free");
    const auto goal_opt = snap_to_free(grid, goal_in, snap_radius);
    if (!goal_opt) return std::nullopt;
    const Cell goal = *goal_opt;

    const double res = grid.resolution;
    const size_t n = grid.cells.size();
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int32_t> parent(n, -1);
    std::vector<uint8_t> closed(n, 0);
    std::priority_queue<detail::HeapNode> open;

    auto idx = [&](int x, int y) { return static_cast<int32_t>(grid.index(x, y)); };
    auto octile = [&](int x, int y) {
        const double ax = std::abs(x - goal.x), ay = std::abs(y - goal.y);
        return res * (std::max(ax, ay) + (kSqrt2 - 1.0) * std::min(ax, ay));
    };

    const int32_t start_id = idx(start_in.x, start_in.y);
    const int32_t goal_id = idx(goal.x, goal.y);
    g[start_id] = 0.0;
    parent[start_id] = start_id;
    open.push({octile(start_in.x, start_in.y), 0.0, start_id});

    while (!open.empty()) {
        const auto top = open.top();
        open.pop();
        if (closed[top.node] || top.g > g[top.node]) continue;
        closed[top.node] = 1;
        if (stats) ++stats->expansions;
        if (top.node == goal_id) break;
        const int x = top.node % grid.width;
        const int y = top.node / grid.width;
        for (int d = 0; d < 8; ++d) {
            if (!detail::step_allowed(grid, x, y, d)) continue;
            const int32_t ni = idx(x + detail::kDx[d], y + detail::kDy[d]);
            const double ng = g[top.node] + (d < 4 ? res : res * kSqrt2);
            if (ng < g[ni]) {
                g[ni] = ng;
                parent[ni] = top.node;
                closed[ni] = 0;
                open.push({ng + octile(ni % grid.width, ni / grid.width), ng, ni});
            }
        }
    }
    if (!closed[goal_id]) return std::nullopt;

    Path path;
    int64_t straight = 0, diagonal = 0;
    std::vector<Cell> chain;
    for (int32_t at = goal_id;; at = parent[at]) {
        chain.push_back({at % grid.width, at / grid.width});
        if (at == start_id) break;
    }
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const bool diag = chain[i].x != chain[i + 1].x && chain[i].y != chain[i + 1].y;
        (diag ? diagonal : straight)++;
    }
    path.points.reserve(chain.size());
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        path.points.push_back(grid.cell_center(*it));
    path.length = static_cast<double>(straight) * res + static_cast<double>(diagonal) * (res * kSqrt2);
    return path;
}

// Basic Theta*: nodes are expanded over the 8-connected grid, but each node
// may inherit its parent's parent when line of sight holds, which yields
// any-angle paths. Closed nodes reopen when a shorter g is found.
inline std::optional<Path> plan_theta_star(const OccupancyGrid& grid, const Vec2& start_w,
                                           const Vec2& goal_w, int snap_radius = 5,
                                           PlanStats* stats = nullptr) {
    const Cell start = grid.world_to_cell(start_w);
    if (!grid.is_free(start))
        throw std::invalid_argument("plan_theta_star: start is not in a free cell");
    const auto goal_opt = snap_to_free(grid, grid.world_to_cell(goal_w), snap_radius);
    if (!goal_opt) return std::nullopt;
    const Cell goal = *goal_opt;

    const size_t n = grid.cells.size();
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int32_t> parent(n, -1);
    std::vector<uint8_t> closed(n, 0);
    std::priority_queue<detail::HeapNode> open;

    auto idx = [&](const Cell& c) { return static_cast<int32_t>(grid.index(c.x, c.y)); };
    auto center = [&](int32_t id) {
        return grid.cell_center({id % grid.width, id / grid.width});
    };
    const Vec2 goal_center = grid.cell_center(goal);
    auto h = [&](int32_t id) { return distance(center(id), goal_center); };

    const int32_t start_id = idx(start);
    const int32_t goal_id = idx(goal);
    g[start_id] = 0.0;
    parent[start_id] = start_id;
    open.push({h(start_id), 0.0, start_id});

    while (!open.empty()) {
        const auto top = open.top();
        open.pop();
        if (closed[top.node] || top.g > g[top.node]) continue;
        closed[top.node] = 1;
        if (stats) ++stats->expansions;
        if (top.node == goal_id) break;
        const int x = top.node % grid.width;
        const int y = top.node / grid.width;
        const int32_t par = parent[top.node];
        for (int d = 0; d < 8; ++d) {
            if (!detail::step_allowed(grid, x, y, d)) continue;
            const int32_t ni = idx({x + detail::kDx[d], y + detail::kDy[d]});
            double ng;
            int32_t nparent;
            // Path 2: shortcut through this node's parent when visible.
            if (par != top.node && line_of_sight(grid, center(par), center(ni))) {
                ng = g[par] + distance(center(par), center(ni));
                nparent = par;
            } else {
                ng = g[top.node] + distance(center(top.node), center(ni));
                nparent = top.node;
            }
            if (ng < g[ni]) {
                g[ni] = ng;
                parent[ni] = nparent;
                closed[ni] = 0;
                open.push({ng + h(ni), ng, ni});
            }
        }
    }
    if (!closed[goal_id]) return std::nullopt;

    // Corner chain in cell centers, with the exact endpoints substituted in.
    std::vector<Vec2> raw;
    {
        std::vector<int32_t> chain;
        for (int32_t at = goal_id;; at = parent[at]) {
            chain.push_back(at);
            if (at == start_id) break;
        }
        raw.push_back(start_w);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) raw.push_back(center(*it));
        // Use the caller's goal point when it lies in the snapped goal cell.
        if (grid.world_to_cell(goal_w) == goal) raw.push_back(goal_w);
    }

    // Greedy shortcut pass; consecutive raw points are always mutually
    // visible (same cell, grid step, or a verified shortcut), so this keeps
    // every kept segment line-of-sight valid while only shortening the path.
    Path path;
    size_t i = 0;
    path.points.push_back(raw[0]);
    while (i + 1 < raw.size()) {
        size_t j = raw.size() - 1;
        for (; j > i + 1; --j) {
            if (line_of_sight(grid, raw[i], raw[j])) break;
        }
        path.points.push_back(raw[j]);
        i = j;
    }
    for (size_t k = 0; k + 1 < path.points.size(); ++k)
        path.length += distance(path.points[k], path.points[k + 1]);
    // Collapse the degenerate two-point case produced when start==goal cell.
    if (path.points.size() == 2 && path.points[0] == path.points[1]) {
        path.points.pop_back();
        path.length = 0.0;
    }
    return path;
}

// True once at least one replanning period has elapsed.
inline bool replan_due(double last_plan_time, double now, double rate_hz = 5.0) {
    if (rate_hz <= 0.0) throw std::invalid_argument("replan_due: rate must be positive");
    return (now - last_plan_time) + 1e-9 >= 1.0 / rate_hz;
}

}  // namespace explore
