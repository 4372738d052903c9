#pragma once

#include <vector>

namespace explore {

// One depth ray: bearing relative to the robot heading, measured range in
// meters, and whether the ray ended on an obstacle (hit) or ran out of range.
struct ScanRay {
    double bearing = 0.0;
    double range = 0.0;
    bool hit = false;
};

struct DepthScan {
    std::vector<ScanRay> rays;
    double fov = 0.0;        // rad
    double max_range = 0.0;  // m
};

}  // namespace explore
