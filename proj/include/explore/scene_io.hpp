#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "explore/map_io.hpp"
#include "explore/sim.hpp"

namespace explore {

// Scenes persist as the PGM+meta map format plus a JSON sidecar holding the
// spawn pose and the invisible-obstacle cells.
inline void save_scene(const Scene& scene, const std::string& pgm_path) {
    save_pgm(scene.gt, pgm_path);
    nlohmann::ordered_json j;
    j["name"] = scene.name;
    j["spawn"] = {{"x", scene.spawn.position.x},
                  {"y", scene.spawn.position.y},
                  {"heading", scene.spawn.heading}};
    j["area_m2"] = scene.area_m2;
    auto& inv = j["invisible_obstacles"] = nlohmann::ordered_json::array();
    for (const Cell& c : scene.invisible_obstacles) inv.push_back({c.x, c.y});
    std::ofstream out(sidecar_path(pgm_path, ".scene.json"));
    if (!out) throw std::runtime_error("save_scene: cannot open sidecar for " + pgm_path);
    out << j.dump(2) << "\n";
}

inline Scene load_scene(const std::string& pgm_path) {
    Scene scene;
    scene.gt = load_pgm(pgm_path);
    const std::string side = sidecar_path(pgm_path, ".scene.json");
    std::ifstream in(side);
    if (!in) throw std::runtime_error("load_scene: cannot open " + side);
    nlohmann::json j;
    in >> j;
    scene.name = j.value("name", std::string("scene"));
    scene.spawn = {{j["spawn"]["x"].get<double>(), j["spawn"]["y"].get<double>()},
                   j["spawn"]["heading"].get<double>()};
    for (const auto& c : j.value("invisible_obstacles", nlohmann::json::array()))
        scene.invisible_obstacles.push_back({c[0].get<int>(), c[1].get<int>()});
    scene.finalize();
    return scene;
}

}  // namespace explore
