#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "explore/geometry.hpp"
#include "explore/scan.hpp"

namespace explore {

// Cell alphabet. The numeric order Unknown < Free < Occupied is what max-pool
// downsampling relies on.
enum class CellState : int8_t {
    Unknown = -1,
    Free = 0,
    Occupied = 1,
};

inline bool is_known(CellState s) { return s != CellState::Unknown; }

// 2D occupancy grid with a metric origin. `origin` is the world position of
// the lower-left corner of cell (0,0); cells are indexed x = column, y = row.
struct OccupancyGrid {
    int width = 0;
    int height = 0;
    double resolution = 0.05;  // m per cell
    Vec2 origin;               // world coords of cell (0,0) corner
    std::vector<CellState> cells;

    OccupancyGrid() = default;
    OccupancyGrid(int w, int h, double res, Vec2 orig = {}, CellState fill = CellState::Unknown)
        : width(w), height(h), resolution(res), origin(orig),
          cells(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1 || res <= 0.0)
            throw std::invalid_argument("OccupancyGrid: dimensions must be >= 1 and resolution > 0");
    }

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool in_bounds(const Cell& c) const { return in_bounds(c.x, c.y); }

    CellState at(int x, int y) const { return cells[index(x, y)]; }
    CellState at(const Cell& c) const { return at(c.x, c.y); }
    void set(int x, int y, CellState s) { cells[index(x, y)] = s; }
    void set(const Cell& c, CellState s) { set(c.x, c.y, s); }

    bool is_free(const Cell& c) const { return in_bounds(c) && at(c) == CellState::Free; }

    Cell world_to_cell(const Vec2& w) const {
        return {static_cast<int>(std::floor((w.x - origin.x) / resolution)),
                static_cast<int>(std::floor((w.y - origin.y) / resolution))};
    }

    Vec2 cell_center(const Cell& c) const {
        return {origin.x + (c.x + 0.5) * resolution, origin.y + (c.y + 0.5) * resolution};
    }

    // Point in cell units for segment traversal (cell = floor(units)).
    Vec2 to_units(const Vec2& w) const {
        return {(w.x - origin.x) / resolution, (w.y - origin.y) / resolution};
    }

    bool contains_world(const Vec2& w) const { return in_bounds(world_to_cell(w)); }

    int64_t count(CellState s) const {
        return std::count(cells.begin(), cells.end(), s);
    }

    int64_t known_count() const {
        return static_cast<int64_t>(cells.size()) - count(CellState::Unknown);
    }

    // Grows the grid (at least doubling per side touched) so the given world
    // rectangle fits. Existing cells keep their world coordinates; new space
    // is Unknown. The origin stays on the resolution lattice.
    void ensure_contains(const Vec2& lo, const Vec2& hi) {
        Cell clo = world_to_cell(lo);
        Cell chi = world_to_cell(hi);
        if (in_bounds(clo) && in_bounds(chi)) return;

        int nx0 = 0, ny0 = 0, nx1 = width, ny1 = height;
        if (clo.x < nx0) nx0 = std::min(clo.x - 1, -width);
        if (clo.y < ny0) ny0 = std::min(clo.y - 1, -height);
        if (chi.x >= nx1) nx1 = std::max(chi.x + 2, 2 * width);
        if (chi.y >= ny1) ny1 = std::max(chi.y + 2, 2 * height);

        OccupancyGrid grown(nx1 - nx0, ny1 - ny0, resolution,
                            {origin.x + nx0 * resolution, origin.y + ny0 * resolution});
        for (int y = 0; y < height; ++y) {
            std::copy_n(cells.begin() + index(0, y), width,
                        grown.cells.begin() + grown.index(-nx0, y - ny0));
        }
        *this = std::move(grown);
    }
};

// Coverage measurement at time t: number/area of known cells and the fraction
// of the ground-truth explorable space they account for.
struct CoverageSample {
    double t = 0.0;
    int64_t abs_cells = 0;
    double abs_area = 0.0;  // m^2
    double rel = 0.0;       // in [0, 1]
};

namespace detail {
struct NoTransitionHook {
    void operator()(const Cell&, CellState, CellState) const {}
};
}  // namespace detail

// Integrates one depth scan taken at `pose` into the grid, in place. Cells
// along each ray become Free, hit endpoints become Occupied. Occupied cells
// are never demoted. The grid grows on demand so the scan always fits.
// `on_transition(cell, old, new)` fires for every actual state change.
template <typename OnTransition>
void integrate_scan_into(OccupancyGrid& grid, const Pose& pose, const DepthScan& scan,
                         OnTransition&& on_transition) {
    if (!grid.contains_world(pose.position))
        throw std::out_of_range("integrate_scan: pose outside grid bounds");
    if (scan.rays.empty()) return;

    Vec2 lo = pose.position, hi = pose.position;
    std::vector<Vec2> endpoints;
    endpoints.reserve(scan.rays.size());
    for (const ScanRay& r : scan.rays) {
        const Vec2 end = pose.position + heading_vector(pose.heading + r.bearing) * r.range;
        endpoints.push_back(end);
        lo.x = std::min(lo.x, end.x);
        lo.y = std::min(lo.y, end.y);
        hi.x = std::max(hi.x, end.x);
        hi.y = std::max(hi.y, end.y);
    }
    grid.ensure_contains(lo, hi);

    auto mark = [&](const Cell& c, CellState s) {
        const CellState old = grid.at(c);
        if (old == s) return;
        grid.set(c, s);
        on_transition(c, old, s);
    };

    // Occupied endpoints first so free marking cannot override them: within
    // one scan, occupied wins.
    for (size_t i = 0; i < scan.rays.size(); ++i) {
        if (!scan.rays[i].hit) continue;
        const Cell c = grid.world_to_cell(endpoints[i]);
        if (grid.in_bounds(c)) mark(c, CellState::Occupied);
    }
    const Vec2 u0 = grid.to_units(pose.position);
    for (size_t i = 0; i < scan.rays.size(); ++i) {
        const Cell end_cell = grid.world_to_cell(endpoints[i]);
        supercover_visit(u0, grid.to_units(endpoints[i]), [&](int x, int y) {
            if (x == end_cell.x && y == end_cell.y) return true;  // endpoint is not freed
            if (grid.in_bounds(x, y) && grid.at(x, y) != CellState::Occupied)
                mark({x, y}, CellState::Free);
            return true;
        });
    }
}

inline void integrate_scan_into(OccupancyGrid& grid, const Pose& pose, const DepthScan& scan) {
    integrate_scan_into(grid, pose, scan, detail::NoTransitionHook{});
}

inline OccupancyGrid integrate_scan(const OccupancyGrid& grid, const Pose& pose,
                                    const DepthScan& scan) {
    OccupancyGrid out = grid;
    integrate_scan_into(out, pose, scan);
    return out;
}

// Max-pool downsampling into a caller-provided grid. Each factor x factor
// block takes the max state under Unknown < Free < Occupied; right/top edges
// are padded with Unknown. Resolution scales by `factor`, origin is kept.
inline void downsample_maxpool_into(const OccupancyGrid& grid, int factor, OccupancyGrid& out) {
    if (factor < 1) throw std::invalid_argument("downsample_maxpool: factor must be >= 1");
    const int ow = (grid.width + factor - 1) / factor;
    const int oh = (grid.height + factor - 1) / factor;
    out.width = ow;
    out.height = oh;
    out.resolution = grid.resolution * factor;
    out.origin = grid.origin;
    out.cells.assign(static_cast<size_t>(ow) * oh, CellState::Unknown);
    for (int y = 0; y < grid.height; ++y) {
        const CellState* row = &grid.cells[grid.index(0, y)];
        CellState* orow = &out.cells[out.index(0, y / factor)];
        for (int x = 0; x < grid.width; ++x) {
            CellState& o = orow[x / factor];
            if (row[x] > o) o = row[x];
        }
    }
}

inline OccupancyGrid downsample_maxpool(const OccupancyGrid& grid, int factor) {
    OccupancyGrid out;
    downsample_maxpool_into(grid, factor, out);
    return out;
}

// Chebyshev dilation of the occupied set by `radius_cells`.
inline void inflate_obstacles_into(const OccupancyGrid& grid, int radius_cells,
                                   OccupancyGrid& out) {
    if (radius_cells < 0) throw std::invalid_argument("inflate_obstacles: radius must be >= 0");
    out = grid;
    if (radius_cells == 0) return;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (grid.at(x, y) != CellState::Occupied) continue;
            const int x0 = std::max(0, x - radius_cells), x1 = std::min(grid.width - 1, x + radius_cells);
            const int y0 = std::max(0, y - radius_cells), y1 = std::min(grid.height - 1, y + radius_cells);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) out.set(xx, yy, CellState::Occupied);
        }
    }
}

inline OccupancyGrid inflate_obstacles(const OccupancyGrid& grid, int radius_cells = 1) {
    OccupancyGrid out;
    inflate_obstacles_into(grid, radius_cells, out);
    return out;
}

// Coverage of `grid` against ground truth `gt`, both registered in the same
// world frame. Absolute coverage counts known cells of `grid`; relative
// coverage is the fraction of gt's known cells whose location is known in
// `grid`, clamped to [0, 1].
inline CoverageSample coverage(const OccupancyGrid& grid, const OccupancyGrid& gt, double t) {
    const int64_t gt_known = gt.known_count();
    if (gt_known == 0)
        throw std::invalid_argument("coverage: ground truth has no explorable cells");

    CoverageSample s;
    s.t = t;
    s.abs_cells = grid.known_count();
    s.abs_area = static_cast<double>(s.abs_cells) * grid.resolution * grid.resolution;

    int64_t seen = 0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            if (!is_known(gt.at(x, y))) continue;
            const Cell c = grid.world_to_cell(gt.cell_center({x, y}));
            if (grid.in_bounds(c) && is_known(grid.at(c))) ++seen;
        }
    }
    s.rel = std::clamp(static_cast<double>(seen) / static_cast<double>(gt_known), 0.0, 1.0);
    return s;
}

// Marks the cell one cell-length ahead of the pose as Occupied (what the bump
// detector writes when forward motion stalls). Returns false and leaves the
// grid unchanged when the ahead-cell is out of bounds.
template <typename OnTransition>
bool mark_cell_ahead_into(OccupancyGrid& grid, const Pose& pose, OnTransition&& on_transition) {
    const Vec2 ahead = pose.position + heading_vector(pose.heading) * grid.resolution;
    const Cell c = grid.world_to_cell(ahead);
    if (!grid.in_bounds(c)) return false;
    const CellState old = grid.at(c);
    if (old != CellState::Occupied) {
        grid.set(c, CellState::Occupied);
        on_transition(c, old, CellState::Occupied);
    }
    return true;
}

inline bool mark_cell_ahead_into(OccupancyGrid& grid, const Pose& pose) {
    return mark_cell_ahead_into(grid, pose, detail::NoTransitionHook{});
}

inline OccupancyGrid mark_cell_ahead(const OccupancyGrid& grid, const Pose& pose,
                                     bool* ok = nullptr) {
    OccupancyGrid out = grid;
    const bool marked = mark_cell_ahead_into(out, pose);
    if (ok) *ok = marked;
    return out;
}

}  // namespace explore
