#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "explore/rng.hpp"
#include "explore/sim.hpp"

namespace explore {

// Parameters for the procedural indoor floor-plan generator. Scenes are
// BSP-partitioned rooms joined by doorways, with furniture-like clutter and
// optional invisible low obstacles.
struct SceneGenSpec {
    double target_area_m2 = 60.0;  // accepted range [28, 251]
    double resolution = 0.05;
    double door_min_m = 0.5;
    double door_max_m = 0.7;
    double min_room_m = 2.2;           // rooms never get narrower than this
    double stop_split_area_m2 = 10.0;  // rooms at or below this stay whole
    double furniture_per_m2 = 0.05;
    double invisible_per_m2 = 1.0 / 35.0;
    int max_invisible = 4;
    double aspect_min = 0.65;

    // Many small rooms behind uniform narrow-ish doors; used to probe the
    // corrupted-depth mode, which can seal such openings.
    static SceneGenSpec doorway_rich(double area_m2) {
        SceneGenSpec s;
        s.target_area_m2 = area_m2;
        s.door_min_m = 0.5;
        s.door_max_m = 0.5;
        s.min_room_m = 1.8;
        s.stop_split_area_m2 = 7.0;
        s.furniture_per_m2 = 0.0;
        s.invisible_per_m2 = 0.0;
        return s;
    }
};

namespace detail {

struct CellRect {
    int x0, y0, x1, y1;  // half-open

    int w() const { return x1 - x0; }
    int h() const { return y1 - y0; }
    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

inline bool rect_all_free(const OccupancyGrid& g, const CellRect& r) {
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x)
            if (!g.in_bounds(x, y) || g.at(x, y) != CellState::Free) return false;
    return true;
}

inline void fill_rect(OccupancyGrid& g, const CellRect& r, CellState s) {
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) g.set(x, y, s);
}

inline CellRect inflated(const CellRect& r, int m) {
    return {r.x0 - m, r.y0 - m, r.x1 + m, r.y1 + m};
}

inline bool rects_overlap(const CellRect& a, const CellRect& b) {
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

// 4-connected flood fill over free, non-blocked cells. Returns reached count.
inline int64_t flood_free(const OccupancyGrid& g, const std::vector<uint8_t>& blocked,
                          const Cell& from, std::vector<uint8_t>& reached) {
    reached.assign(g.cells.size(), 0);
    if (!g.is_free(from) || blocked[g.index(from.x, from.y)]) return 0;
    std::vector<int32_t> queue;
    queue.push_back(static_cast<int32_t>(g.index(from.x, from.y)));
    reached[queue[0]] = 1;
    int64_t n = 0;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (size_t head = 0; head < queue.size(); ++head) {
        const int32_t cur = queue[head];
        ++n;
        const int x = cur % g.width, y = cur / g.width;
        for (int d = 0; d < 4; ++d) {
            const int nx = x + dx[d], ny = y + dy[d];
            if (!g.in_bounds(nx, ny) || g.at(nx, ny) != CellState::Free) continue;
            const auto ni = static_cast<int32_t>(g.index(nx, ny));
            if (reached[ni] || blocked[ni]) continue;
            reached[ni] = 1;
            queue.push_back(ni);
        }
    }
    return n;
}

}  // namespace detail

// One rectangular room with a 1-cell wall ring and unknown exterior padding.
inline Scene make_single_room(double w_m, double h_m, double res = 0.05) {
    const int iw = static_cast<int>(std::lround(w_m / res));
    const int ih = static_cast<int>(std::lround(h_m / res));
    const int pad = 2;
    Scene scene;
    scene.gt = OccupancyGrid(iw + 2 * (pad + 1), ih + 2 * (pad + 1), res);
    detail::fill_rect(scene.gt, {pad, pad, pad + iw + 2, pad + ih + 2}, CellState::Occupied);
    detail::fill_rect(scene.gt, {pad + 1, pad + 1, pad + 1 + iw, pad + 1 + ih}, CellState::Free);
    scene.spawn = {scene.gt.cell_center({pad + 1 + iw / 2, pad + 1 + ih / 2}), 0.0};
    scene.name = "single_room";
    scene.finalize();
    return scene;
}

// Deterministic floor-plan generation: the same (spec, seed) always produces
// the same scene, and every free cell is reachable from the spawn.
inline Scene generate_scene(const SceneGenSpec& spec, uint64_t seed) {
    if (spec.target_area_m2 < 28.0 || spec.target_area_m2 > 251.0)
        throw std::invalid_argument("generate_scene: target area outside [28, 251] m^2");
    if (spec.resolution <= 0.0)
        throw std::invalid_argument("generate_scene: resolution must be positive");

    Rng rng(seed);
    const double res = spec.resolution;
    const double aspect = rng.uniform(spec.aspect_min, 1.0);
    const double w_m = std::sqrt(spec.target_area_m2 / aspect);
    const int cw = std::max(8, static_cast<int>(std::lround(w_m / res)));
    const int ch = std::max(8, static_cast<int>(std::lround(spec.target_area_m2 / w_m / res)));
    const int pad = 2;

    Scene scene;
    scene.gt = OccupancyGrid(cw + 2 * pad, ch + 2 * pad, res);
    OccupancyGrid& g = scene.gt;
    const detail::CellRect footprint{pad, pad, pad + cw, pad + ch};
    detail::fill_rect(g, footprint, CellState::Occupied);
    const detail::CellRect interior{pad + 1, pad + 1, pad + cw - 1, pad + ch - 1};
    detail::fill_rect(g, interior, CellState::Free);

    // Recursive wall placement. Every wall gets at least one doorway.
    const int min_cells = static_cast<int>(std::lround(spec.min_room_m / res));
    std::vector<detail::CellRect> work{interior}, rooms, doors;
    while (!work.empty()) {
        const detail::CellRect r = work.back();
        work.pop_back();
        const double area_r = r.w() * r.h() * res * res;
        const bool can_v = r.w() >= 2 * min_cells + 1;
        const bool can_h = r.h() >= 2 * min_cells + 1;
        if ((!can_v && !can_h) || area_r <= spec.stop_split_area_m2 ||
            (area_r <= 2.0 * spec.stop_split_area_m2 && rng.chance(0.25))) {
            rooms.push_back(r);
            continue;
        }
        const bool vertical = can_v && (!can_h || r.w() > r.h() || (r.w() == r.h() && rng.chance(0.5)));
        if (vertical) {
            const int wx = rng.range(r.x0 + min_cells, r.x1 - 1 - min_cells);
            detail::fill_rect(g, {wx, r.y0, wx + 1, r.y1}, CellState::Occupied);
            const int n_doors = (r.h() * res > 5.0 && rng.chance(0.35)) ? 2 : 1;
            for (int k = 0; k < n_doors; ++k) {
                const int dw = std::max(2, static_cast<int>(std::lround(
                                               rng.uniform(spec.door_min_m, spec.door_max_m) / res)));
                const int start = rng.range(r.y0 + 1, std::max(r.y0 + 1, r.y1 - 1 - dw));
                const detail::CellRect door{wx, start, wx + 1, std::min(start + dw, r.y1)};
                detail::fill_rect(g, door, CellState::Free);
                doors.push_back(door);
            }
            work.push_back({r.x0, r.y0, wx, r.y1});
            work.push_back({wx + 1, r.y0, r.x1, r.y1});
        } else {
            const int wy = rng.range(r.y0 + min_cells, r.y1 - 1 - min_cells);
            detail::fill_rect(g, {r.x0, wy, r.x1, wy + 1}, CellState::Occupied);
            const int n_doors = (r.w() * res > 5.0 && rng.chance(0.35)) ? 2 : 1;
            for (int k = 0; k < n_doors; ++k) {
                const int dw = std::max(2, static_cast<int>(std::lround(
                                               rng.uniform(spec.door_min_m, spec.door_max_m) / res)));
                const int start = rng.range(r.x0 + 1, std::max(r.x0 + 1, r.x1 - 1 - dw));
                const detail::CellRect door{start, wy, std::min(start + dw, r.x1), wy + 1};
                detail::fill_rect(g, door, CellState::Free);
                doors.push_back(door);
            }
            work.push_back({r.x0, r.y0, r.x1, wy});
            work.push_back({r.x0, wy + 1, r.x1, r.y1});
        }
    }

    // Furniture: boxes kept clear of walls and doorways.
    const int margin = 6;  // 0.3 m at default resolution
    auto near_door = [&](const detail::CellRect& r) {
        for (const auto& d : doors)
            if (detail::rects_overlap(detail::inflated(d, 8), r)) return true;
        return false;
    };
    std::vector<detail::CellRect> furniture;
    for (const auto& room : rooms) {
        const double area_r = room.w() * room.h() * res * res;
        const int count = static_cast<int>(std::floor(area_r * spec.furniture_per_m2 + rng.uniform(0.0, 1.0)));
        for (int k = 0; k < count; ++k) {
            for (int attempt = 0; attempt < 20; ++attempt) {
                const int fw = rng.range(3, 10), fh = rng.range(3, 10);
                if (room.w() < fw + 2 * margin + 2 || room.h() < fh + 2 * margin + 2) break;
                const int fx = rng.range(room.x0 + margin, room.x1 - margin - fw);
                const int fy = rng.range(room.y0 + margin, room.y1 - margin - fh);
                const detail::CellRect fr{fx, fy, fx + fw, fy + fh};
                if (!detail::rect_all_free(g, detail::inflated(fr, margin)) || near_door(fr)) continue;
                detail::fill_rect(g, fr, CellState::Occupied);
                furniture.push_back(fr);
                break;
            }
        }
    }

    // Invisible low obstacles: in open space, never crowding doors or walls.
    const int want_invisible = std::min(
        spec.max_invisible,
        static_cast<int>(std::floor(spec.target_area_m2 * spec.invisible_per_m2 + rng.uniform(0.0, 1.0))));
    std::vector<detail::CellRect> invis_rects;
    for (int k = 0; k < want_invisible; ++k) {
        for (int attempt = 0; attempt < 30; ++attempt) {
            const int s = rng.range(3, 4);
            const int fx = rng.range(interior.x0 + 2, interior.x1 - 2 - s);
            const int fy = rng.range(interior.y0 + 2, interior.y1 - 2 - s);
            const detail::CellRect br{fx, fy, fx + s, fy + s};
            if (!detail::rect_all_free(g, detail::inflated(br, 8)) || near_door(br)) continue;
            bool crowded = false;
            for (const auto& other : invis_rects)
                if (detail::rects_overlap(detail::inflated(other, 20), br)) crowded = true;
            if (crowded) continue;
            invis_rects.push_back(br);
            for (int y = br.y0; y < br.y1; ++y)
                for (int x = br.x0; x < br.x1; ++x) scene.invisible_obstacles.push_back({x, y});
            break;
        }
    }

    // Spawn: a free cell with clearance, away from invisible obstacles.
    std::vector<uint8_t> blocked(g.cells.size(), 0);
    for (const Cell& c : scene.invisible_obstacles) blocked[g.index(c.x, c.y)] = 1;
    Cell spawn_cell{-1, -1};
    for (int attempt = 0; attempt < 2000; ++attempt) {
        const int x = rng.range(interior.x0, interior.x1 - 1);
        const int y = rng.range(interior.y0, interior.y1 - 1);
        const detail::CellRect around{x - 3, y - 3, x + 4, y + 4};
        if (!detail::rect_all_free(g, around)) continue;
        bool near_invis = false;
        for (const auto& br : invis_rects)
            if (detail::rects_overlap(detail::inflated(br, 10), around)) near_invis = true;
        if (near_invis) continue;
        spawn_cell = {x, y};
        break;
    }
    if (spawn_cell.x < 0) throw std::runtime_error("generate_scene: no valid spawn location");
    scene.spawn = {g.cell_center(spawn_cell), wrap_angle(rng.uniform(-kPi, kPi))};

    // Connectivity: all traversable free space must be reachable from spawn.
    // Furniture margins make violations nearly impossible, but clutter is
    // dropped (most recent first) if one slips through.
    std::vector<uint8_t> reached;
    auto fully_connected = [&]() {
        const int64_t hit = detail::flood_free(g, blocked, spawn_cell, reached);
        int64_t traversable = 0;
        for (size_t i = 0; i < g.cells.size(); ++i)
            if (g.cells[i] == CellState::Free && !blocked[i]) ++traversable;
        return hit == traversable;
    };
    while (!fully_connected()) {
        if (!invis_rects.empty()) {
            const auto br = invis_rects.back();
            invis_rects.pop_back();
            scene.invisible_obstacles.erase(
                std::remove_if(scene.invisible_obstacles.begin(), scene.invisible_obstacles.end(),
                               [&](const Cell& c) { return br.contains(c.x, c.y); }),
                scene.invisible_obstacles.end());
            for (int y = br.y0; y < br.y1; ++y)
                for (int x = br.x0; x < br.x1; ++x) blocked[g.index(x, y)] = 0;
        } else if (!furniture.empty()) {
            detail::fill_rect(g, furniture.back(), CellState::Free);
            furniture.pop_back();
        } else {
            throw std::runtime_error("generate_scene: could not produce a connected floor plan");
        }
    }

    scene.name = "scene";
    scene.finalize();
    return scene;
}

}  // namespace explore
