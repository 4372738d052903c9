// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Heavier batches reuse one shared ablation grid.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "explore/ablation.hpp"
#include "explore/scene_gen.hpp"
#include "explore/scene_io.hpp"
#include "test_util.hpp"

using namespace explore;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

struct Checker {
    int failed = 0;

    void report(int id, const std::string& what, bool ok, const std::string& detail) {
        std::printf("%s  [%d] %s%s%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
};

double now_s() {
    using clk = std::chrono::steady_clock;
    static const auto t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// The shared evaluation corpus: mixed small (<60 m^2) and large scenes.
std::vector<Scene> make_corpus() {
    std::vector<Scene> scenes;
    Rng rng(4242);
    for (int i = 0; i < 12; ++i) {
        SceneGenSpec spec;
        spec.target_area_m2 = rng.uniform(30.0, 52.0);
        scenes.push_back(generate_scene(spec, rng.next()));
        scenes.back().name = fmt("small_%02d", i);
    }
    for (int i = 0; i < 8; ++i) {
        SceneGenSpec spec;
        spec.target_area_m2 = rng.uniform(63.0, 92.0);
        scenes.push_back(generate_scene(spec, rng.next()));
        scenes.back().name = fmt("large_%02d", i);
    }
    return scenes;
}

int worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 2 : static_cast<int>(hw);
}

}  // namespace

int main() {
    Checker check;

    // ----- Criterion 1: ablation trend over >= 20 scenes x 5 seeds --------
    const double t_start = now_s();
    const auto corpus = make_corpus();
    std::vector<const Scene*> scene_ptrs;
    for (const auto& s : corpus) scene_ptrs.push_back(&s);
    const std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
    RunConfig base;  // spec defaults
    const auto abl = run_ablation(scene_ptrs, base, seeds, worker_count());
    const double grid_elapsed = now_s() - t_start;

    {
        const auto& cfg_base = abl.report.configs.front();
        const auto& cfg_full = abl.report.configs.back();
        const double loss_base = cfg_base.mean_tracking_losses;
        const double loss_full = cfg_full.mean_tracking_losses;
        const bool a_ok = loss_full <= 0.8 * loss_base;

        // Mean finish time over mutually finished (scene, seed) runs.
        const size_t per_config = corpus.size() * seeds.size();
        double base_sum = 0.0, full_sum = 0.0;
        int mutual = 0;
        for (size_t i = 0; i < per_config; ++i) {
            const auto& rb = abl.records[i];
            const auto& rf = abl.records[3 * per_config + i];
            if (rb.finished && rf.finished) {
                ++mutual;
                base_sum += rb.finish_time_s;
                full_sum += rf.finish_time_s;
            }
        }
        const bool b_ok = mutual > 0 && full_sum / mutual < base_sum / mutual;

        const size_t last = abl.report.checkpoint_times.size() - 1;
        const double rel_base = cfg_base.cov_rel_all[last];
        const double rel_full = cfg_full.cov_rel_all[last];
        const double gain_large = cfg_full.cov_rel_large[last] - cfg_base.cov_rel_large[last];
        const double gain_small = cfg_full.cov_rel_small[last] - cfg_base.cov_rel_small[last];
        const bool c_ok = rel_full >= rel_base && gain_large >= gain_small;
        const bool time_ok = grid_elapsed < 900.0;

        int failed_runs = 0;
        for (const auto& r : abl.records) failed_runs += r.failed;

        check.report(1, "ablation trend (losses, finish time, coverage), < 15 min",
                     a_ok && b_ok && c_ok && time_ok && failed_runs == 0,
                     fmt("losses %.2f->%.2f, finish %.0fs->%.0fs (mutual %d), rel240 "
                         "%.3f->%.3f, gain L/S %+.3f/%+.3f, %.0fs wall, %d failed",
                         loss_base, loss_full, mutual ? base_sum / mutual : -1.0,
                         mutual ? full_sum / mutual : -1.0, mutual, rel_base, rel_full,
                         gain_large, gain_small, grid_elapsed, failed_runs));
    }

    // ----- Criterion 2: coverage laws ------------------------------------
    {
        bool monotone = true, in_range = true;
        for (const auto& r : abl.records) {
            for (size_t i = 0; i + 1 < r.coverage.size(); ++i)
                if (r.coverage[i].abs_cells > r.coverage[i + 1].abs_cells) monotone = false;
            for (const auto& s : r.coverage)
                if (s.rel < 0.0 || s.rel > 1.0) in_range = false;
        }
        const double t0 = now_s();
        bool oracle_ok = true;
        Rng rng(29);
        for (int iter = 0; iter < 400; ++iter) {
            const int w = rng.range(1, 16), h = rng.range(1, 16);
            const auto g = random_grid(rng, w, h, 0.25, 0.4);
            auto gt = random_grid(rng, w, h, 0.3, 0.2);
            if (gt.known_count() == 0) gt.set(0, 0, CellState::Free);
            const auto s = coverage(g, gt, 0.0);
            int64_t abs_expect = 0, seen = 0, gt_known = 0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    abs_expect += is_known(g.at(x, y));
                    if (is_known(gt.at(x, y))) {
                        ++gt_known;
                        seen += is_known(g.at(x, y));
                    }
                }
            if (s.abs_cells != abs_expect) oracle_ok = false;
            if (s.rel != static_cast<double>(seen) / static_cast<double>(gt_known))
                oracle_ok = false;
        }
        const double oracle_time = now_s() - t0;
        check.report(2, "coverage laws: monotone, rel in [0,1], exhaustive oracle <= 16x16",
                     monotone && in_range && oracle_ok && oracle_time < 10.0,
                     fmt("monotone=%d in_range=%d oracle=%d (%.2fs)", monotone, in_range,
                         oracle_ok, oracle_time));
    }

    // ----- Criterion 3: planner oracles ----------------------------------
    {
        Rng rng(107);
        bool astar_ok = true, theta_le_ok = true, valid_ok = true, euclid_ok = true;
        int solved = 0;
        for (int iter = 0; iter < 200; ++iter) {
            auto g = random_grid(rng, 20, 20, 0.22, 0.12);
            const Cell s{rng.range(0, 19), rng.range(0, 19)};
            const Cell t{rng.range(0, 19), rng.range(0, 19)};
            g.set(s.x, s.y, CellState::Free);
            g.set(t.x, t.y, CellState::Free);
            const auto oracle = dijkstra_steps(g, s, t);
            const auto astar = plan_astar(g, s, t, 0);
            if (astar.has_value() != oracle.has_value()) astar_ok = false;
            const auto theta = plan_theta_star(g, g.cell_center(s), g.cell_center(t), 0);
            if (!oracle || !astar || !theta) continue;
            ++solved;
            if (astar->length != steps_length(*oracle, g.resolution)) astar_ok = false;
            if (theta->length > astar->length + 1e-9) theta_le_ok = false;
            for (size_t i = 0; i + 1 < theta->points.size(); ++i)
                if (!line_of_sight(g, theta->points[i], theta->points[i + 1])) valid_ok = false;
        }
        Rng rng2(211);
        auto open = OccupancyGrid(40, 40, 0.05, {}, CellState::Free);
        for (int iter = 0; iter < 50; ++iter) {
            const Vec2 a{rng2.uniform(0.1, 1.9), rng2.uniform(0.1, 1.9)};
            const Vec2 b{rng2.uniform(0.1, 1.9), rng2.uniform(0.1, 1.9)};
            const auto p = plan_theta_star(open, a, b);
            if (!p || std::abs(p->length - distance(a, b)) > 1e-9) euclid_ok = false;
        }
        check.report(3, "planner oracles: A*=Dijkstra, Theta*<=A*, LOS-valid, Euclid on open",
                     astar_ok && theta_le_ok && valid_ok && euclid_ok && solved >= 60,
                     fmt("solved=%d astar=%d theta_le=%d valid=%d euclid=%d", solved, astar_ok,
                         theta_le_ok, valid_ok, euclid_ok));
    }

    // ----- Criterion 4: frontier oracle ----------------------------------
    {
        Rng rng(211);
        bool ok = true;
        for (int iter = 0; iter < 200 && ok; ++iter) {
            auto g = random_grid(rng, 20, 20, 0.2, 0.35);
            const Cell robot{rng.range(0, 19), rng.range(0, 19)};
            g.set(robot.x, robot.y, CellState::Free);

            // Brute-force scan + union-find oracle.
            std::vector<uint8_t> reach(g.cells.size(), 0);
            std::vector<Cell> q{robot};
            reach[g.index(robot.x, robot.y)] = 1;
            while (!q.empty()) {
                const Cell c = q.back();
                q.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const Cell n{c.x + dx, c.y + dy};
                        if ((dx == 0 && dy == 0) || !g.is_free(n)) continue;
                        if (!reach[g.index(n.x, n.y)]) {
                            reach[g.index(n.x, n.y)] = 1;
                            q.push_back(n);
                        }
                    }
            }
            std::set<std::pair<int, int>> oracle_cells;
            for (int y = 0; y < 20; ++y)
                for (int x = 0; x < 20; ++x) {
                    if (g.at(x, y) != CellState::Free || !reach[g.index(x, y)]) continue;
                    bool unknown_neighbor = false;
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx)
                            if (!(dx == 0 && dy == 0) && g.in_bounds(x + dx, y + dy) &&
                                g.at(x + dx, y + dy) == CellState::Unknown)
                                unknown_neighbor = true;
                    if (unknown_neighbor) oracle_cells.insert({x, y});
                }

            const auto got = detect_frontiers(g, robot, 0);
            std::set<std::pair<int, int>> got_cells;
            size_t total_pts = 0;
            for (const auto& f : got) {
                total_pts += f.points.size();
                for (const Cell& c : f.points) got_cells.insert({c.x, c.y});
            }
            if (got_cells != oracle_cells || total_pts != got_cells.size()) ok = false;

            // Components must be exactly the 8-connected classes: every pair
            // of cells in one frontier connected, no two frontiers adjacent.
            for (size_t i = 0; i < got.size() && ok; ++i)
                for (size_t j = i + 1; j < got.size() && ok; ++j)
                    for (const Cell& a : got[i].points)
                        for (const Cell& b : got[j].points)
                            if (std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1) ok = false;
        }
        check.report(4, "frontier detection equals brute-force scan + union-find", ok, "");
    }

    // ----- Criterion 5: cost-function unit values ------------------------
    {
        const Pose robot{{0.0, 0.0}, 0.0};
        Frontier f3;
        f3.size = 3;
        f3.centroid = {5.0, 0.0};
        const bool v1 = std::abs(cost_baseline(f3, robot, {1.0, 2.0, 0.0}) - (-1.0)) < 1e-12;

        Frontier f4;
        f4.size = 4;
        Path p;
        p.points = {{0.0, 0.0}, {0.0, 1.0}, {2.0, 1.0}};
        f4.centroid = p.points.back();
        const bool v2 =
            std::abs(cost_enhanced(f4, robot, p, {1.0, 1.0, 2.0}) - (kPi - 1.0)) < 1e-12;

        Frontier f5;
        f5.size = 5;
        f5.centroid = {3.0, 4.0};
        const bool v3 = std::abs(cost_baseline(f5, robot, {0.0, 1.0, 0.0}) - (-5.0)) < 1e-12;

        Frontier f1;
        f1.size = 1;
        Path straight;
        straight.points = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
        f1.centroid = straight.points.back();
        const bool v4 =
            std::abs(cost_enhanced(f1, robot, straight, {1.0, 0.0, 10.0}) - 2.0) < 1e-12;

        check.report(5, "cost functions reproduce hand-derived values (1e-12)",
                     v1 && v2 && v3 && v4, fmt("%d %d %d %d", v1, v2, v3, v4));
    }

    // ----- Criterion 6: behavioral contracts ------------------------------
    {
        // Bump: exactly 10 stalled forward ticks at 10 Hz, never when moving.
        bool bump_ok = true;
        {
            BumpDetectorState s;
            const Pose frozen{{1.0, 1.0}, 0.0};
            for (int tick = 1; tick <= 9; ++tick) {
                auto [ev, ns] = bump_update(s, Action::forward(0.1), frozen, 0.1);
                s = ns;
                if (ev) bump_ok = false;
            }
            auto fired = bump_update(s, Action::forward(0.1), frozen, 0.1);
            if (!fired.first) bump_ok = false;
            BumpDetectorState m;
            Pose moving{{0, 0}, 0.0};
            for (int tick = 0; tick < 40; ++tick) {
                moving.position.x += 0.05;
                auto [ev, ns] = bump_update(m, Action::forward(0.1), moving, 0.1);
                m = ns;
                if (ev) bump_ok = false;
            }
            BumpDetectorState r;
            const Pose still{{0, 0}, 0.0};
            for (int tick = 0; tick < 9; ++tick)
                r = bump_update(r, Action::forward(0.1), still, 0.1).second;
            auto after_reset = bump_update(r, Action::turn_left(0.17), still, 0.1);
            if (after_reset.first) bump_ok = false;
        }

        // Look-around: cumulative 2*pi of TurnLeft before any Forward.
        bool look_ok = true;
        {
            FollowerState s = FollowerState::initial();
            double total = 0.0;
            while (s.mode == FollowerMode::LookAround) {
                auto [a, ns] = look_around_step(s);
                s = ns;
                if (!a) break;
                if (a->kind != Action::Kind::TurnLeft) look_ok = false;
                total += a->amount;
            }
            if (std::abs(total - kTwoPi) > 1e-9) look_ok = false;
        }

        // Recovery: pi + nudge + pi exactly.
        bool rec_ok = true;
        {
            FollowerState s;
            s.enter_recovery();
            double turn1 = 0.0, turn2 = 0.0, nudge = 0.0;
            bool forward_seen = false;
            for (int guard = 0; guard < 100; ++guard) {
                auto [a, ns] = recovery_step(s);
                s = ns;
                if (!a) break;
                if (a->kind == Action::Kind::Forward) {
                    forward_seen = true;
                    nudge += a->amount;
                } else {
                    (forward_seen ? turn2 : turn1) += a->amount;
                }
            }
            const FollowerParams p;
            if (std::abs(turn1 - kPi) > 1e-9 || std::abs(turn2 - kPi) > 1e-9) rec_ok = false;
            if (std::abs(nudge - p.forward_nudge) > 1e-9) rec_ok = false;
            if (s.mode != FollowerMode::FollowPath) rec_ok = false;
        }
        check.report(6, "behavioral contracts: bump 1.0 s @10 Hz, look-around 2pi, recovery",
                     bump_ok && look_ok && rec_ok,
                     fmt("bump=%d look=%d recovery=%d", bump_ok, look_ok, rec_ok));
    }

    // ----- Criterion 7: byte-identical outputs, parallel pool -------------
    {
        std::vector<Scene> scenes;
        Rng rng(777);
        for (int i = 0; i < 4; ++i) {
            SceneGenSpec spec;
            spec.target_area_m2 = rng.uniform(29.0, 45.0);
            scenes.push_back(generate_scene(spec, rng.next()));
            scenes.back().name = fmt("det_%d", i);
        }
        std::vector<const Scene*> ptrs;
        for (const auto& s : scenes) ptrs.push_back(&s);
        RunConfig cfg;
        cfg.duration_s = 60.0;
        const std::vector<uint64_t> det_seeds{3, 4};
        std::vector<std::string> csvs, jsons;
        for (const int jobs : {2, 2, 1}) {
            const auto r = run_ablation(ptrs, cfg, det_seeds, jobs);
            csvs.push_back(runs_csv_string(r.records, r.report.checkpoint_times));
            jsons.push_back(report_json(r.report).dump(2));
        }
        const bool ok = csvs[0] == csvs[1] && csvs[0] == csvs[2] && jsons[0] == jsons[1] &&
                        jsons[0] == jsons[2];
        check.report(7, "determinism: repeated + parallel ablation outputs byte-identical", ok,
                     fmt("csv bytes %zu", csvs[0].size()));
    }

    // ----- Criterion 8: corrupted-depth coverage drop ---------------------
    {
        std::vector<Scene> scenes;
        Rng rng(888);
        for (int i = 0; i < 6; ++i) {
            const auto spec = SceneGenSpec::doorway_rich(rng.uniform(42.0, 70.0));
            scenes.push_back(generate_scene(spec, rng.next()));
            scenes.back().name = fmt("doorway_%d", i);
        }
        RunConfig cfg;
        cfg.enhancements = {true, true, true};
        cfg.label = "full";
        // Closure threshold above the preset's 0.5 m doors; values are
        // config, the criterion is the directional drop.
        cfg.sensor.corruption.gap_threshold_m = 0.55;
        const std::vector<uint64_t> seeds8{1, 2, 3};
        double ideal_sum = 0.0, corrupt_sum = 0.0;
        int n = 0;
        bool failed_any = false;
        for (const auto& s : scenes) {
            for (uint64_t seed : seeds8) {
                RunConfig ideal = cfg;
                ideal.depth = DepthMode::Ideal;
                RunConfig corrupt = cfg;
                corrupt.depth = DepthMode::Corrupted;
                const auto ri = run_episode(s, ideal, seed);
                const auto rc = run_episode(s, corrupt, seed);
                if (ri.failed || rc.failed) failed_any = true;
                ideal_sum += ri.coverage.back().rel;
                corrupt_sum += rc.coverage.back().rel;
                ++n;
            }
        }
        const double ideal_mean = ideal_sum / n, corrupt_mean = corrupt_sum / n;
        const bool ok = !failed_any && (ideal_mean - corrupt_mean) >= 0.15;
        check.report(8, "corrupted depth drops mean relative coverage by >= 15 points", ok,
                     fmt("ideal %.3f vs corrupted %.3f (drop %.3f)", ideal_mean, corrupt_mean,
                         ideal_mean - corrupt_mean));
    }

    std::printf("%s (%d criteria failed)\n", check.failed == 0 ? "ALL PASS" : "FAILURES",
                check.failed);
    return check.failed == 0 ? 0 : 1;
}
