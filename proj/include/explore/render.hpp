#pragma once

#include <fstream>
#include <string>

#include "explore/grid_map.hpp"
#include "explore/planning.hpp"

namespace explore {

// Writes a grayscale image of the map: unknown gray, free white, occupied
// black, with the path and robot overlaid in distinct values. Identical
// inputs always produce identical bytes.
inline void render_map(const OccupancyGrid& grid, const Pose* pose, const Path* path,
                       const std::string& out_path) {
    std::vector<unsigned char> px(grid.cells.size());
    for (size_t i = 0; i < grid.cells.size(); ++i) {
        const CellState s = grid.cells[i];
        px[i] = s == CellState::Occupied ? 0 : (s == CellState::Free ? 254 : 205);
    }
    auto paint = [&](const Cell& c, unsigned char v) {
        if (grid.in_bounds(c)) px[grid.index(c.x, c.y)] = v;
    };
    if (path) {
        for (size_t i = 0; i + 1 < path->points.size(); ++i) {
            supercover_visit(grid.to_units(path->points[i]), grid.to_units(path->points[i + 1]),
                             [&](int x, int y) {
                                 paint({x, y}, 160);
                                 return true;
                             });
        }
        if (!path->points.empty()) paint(grid.world_to_cell(path->points.back()), 96);
    }
    if (pose) {
        const Cell rc = grid.world_to_cell(pose->position);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) paint({rc.x + dx, rc.y + dy}, 64);
        // One heading pixel so renders show orientation.
        paint(grid.world_to_cell(pose->position + heading_vector(pose->heading) * (2.0 * grid.resolution)), 32);
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("render_map: cannot open " + out_path);
    out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
    for (int y = grid.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(&px[grid.index(0, y)]), grid.width);
    if (!out) throw std::runtime_error("render_map: write failed for " + out_path);
}

}  // namespace explore
