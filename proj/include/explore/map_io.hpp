#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "explore/grid_map.hpp"

namespace explore {

// PGM (P5, maxval 255) map format. Pixel values follow the common map-server
// convention: 0 = occupied, 254 = free, 205 = unknown; anything else maps to
// the nearest of the three on import. Row 0 of the image is the top of the
// map (highest y). Metadata lives in a sidecar text file next to the image:
//   resolution: <m>
//   origin: <x> <y>

inline std::string sidecar_path(const std::string& pgm_path, const std::string& ext) {
    const size_t dot = pgm_path.find_last_of('.');
    const size_t slash = pgm_path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return pgm_path + ext;
    return pgm_path.substr(0, dot) + ext;
}

inline void save_pgm(const OccupancyGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
    out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
    std::string row(static_cast<size_t>(grid.width), '\0');
    for (int y = grid.height - 1; y >= 0; --y) {
        for (int x = 0; x < grid.width; ++x) {
            const CellState s = grid.at(x, y);
            row[static_cast<size_t>(x)] =
                s == CellState::Occupied ? '\0' : (s == CellState::Free ? char(254) : char(205));
        }
        out.write(row.data(), row.size());
    }
    if (!out) throw std::runtime_error("save_pgm: write failed for " + path);

    std::ofstream meta(sidecar_path(path, ".meta"));
    if (!meta) throw std::runtime_error("save_pgm: cannot open sidecar for " + path);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "resolution: %.17g\norigin: %.17g %.17g\n", grid.resolution,
                  grid.origin.x, grid.origin.y);
    meta << buf;
}

namespace detail {
inline int pgm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments per the PGM spec.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw std::runtime_error("load_pgm: truncated header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}
}  // namespace detail

inline OccupancyGrid load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pgm: cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw std::runtime_error("load_pgm: not a P5 PGM: " + path);
    const int w = detail::pgm_next_int(in);
    const int h = detail::pgm_next_int(in);
    const int maxval = detail::pgm_next_int(in);
    if (w < 1 || h < 1 || maxval != 255)
        throw std::runtime_error("load_pgm: unsupported header in " + path);

    double resolution = 0.0;
    Vec2 origin{};
    {
        std::ifstream meta(sidecar_path(path, ".meta"));
        if (!meta) throw std::runtime_error("load_pgm: missing sidecar for " + path);
        std::string line;
        while (std::getline(meta, line)) {
            std::istringstream ls(line);
            std::string key;
            ls >> key;
            if (key == "resolution:") ls >> resolution;
            else if (key == "origin:") ls >> origin.x >> origin.y;
        }
        if (resolution <= 0.0)
            throw std::runtime_error("load_pgm: sidecar lacks a valid resolution for " + path);
    }

    OccupancyGrid grid(w, h, resolution, origin);
    std::string row(static_cast<size_t>(w), '\0');
    for (int y = h - 1; y >= 0; --y) {
        in.read(row.data(), row.size());
        if (!in) throw std::runtime_error("load_pgm: truncated pixel data in " + path);
        for (int x = 0; x < w; ++x) {
            const unsigned v = static_cast<unsigned char>(row[static_cast<size_t>(x)]);
            // Nearest of {0 occupied, 205 unknown, 254 free}.
            CellState s;
            if (v <= 102) s = CellState::Occupied;
            else if (v <= 229) s = CellState::Unknown;
            else s = CellState::Free;
            grid.set(x, y, s);
        }
    }
    return grid;
}

}  // namespace explore
