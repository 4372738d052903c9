// Command-line front end: single runs, the ablation ladder, scene corpus
// generation, and map rendering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "explore/ablation.hpp"
#include "explore/render.hpp"
#include "explore/scene_gen.hpp"
#include "explore/scene_io.hpp"

namespace fs = std::filesystem;
using namespace explore;

namespace {

std::vector<std::string> list_scene_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".pgm") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .pgm scenes in " + dir);
    return files;
}

void print_summary(const AggregateReport& rep) {
    std::printf("%-20s %14s %18s %18s %12s\n", "config", "mean losses", "finished scenes",
                "avg finish [s]", "finished");
    for (const auto& c : rep.configs) {
        std::printf("%-20s %14.2f %18.2f %18.1f %9d/%d\n", c.label.c_str(),
                    c.mean_tracking_losses, c.finished_scenes_mean, c.mean_finish_time_s,
                    c.finished_runs, c.runs - c.failed);
    }
    const size_t last = rep.checkpoint_times.size() - 1;
    std::printf("relative coverage at t=%gs:", rep.checkpoint_times[last]);
    for (const auto& c : rep.configs)
        std::printf("  %s=%.3f", c.label.c_str(), c.cov_rel_all[last]);
    std::printf("\n");
}

struct CommonFlags {
    std::string config_path;
    std::vector<uint64_t> seeds{1};
    double duration = -1.0;
    bool bump = false;
    bool inflate = false;
    double orientation_gamma = -1.0;
    bool corrupt = false;
    double alpha = -1.0, beta = -1.0;
    std::string out_dir = "out";
    bool trace = false;
    int jobs = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--seed,-s", seeds, "run seeds")->delimiter(',');
        cmd->add_option("--duration", duration, "episode duration [s]");
        cmd->add_flag("--bump-detector", bump, "enable the bump detector");
        cmd->add_flag("--inflate", inflate, "enable map downsampling + obstacle inflation");
        cmd->add_option("--orientation-coef", orientation_gamma,
                        "enable the orientation cost term with this gamma");
        cmd->add_flag("--corrupt-depth", corrupt, "enable the corrupted-depth sensor model");
        cmd->add_option("--alpha", alpha, "path length cost weight");
        cmd->add_option("--beta", beta, "frontier size cost weight");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--trace", trace, "write per-run JSONL traces");
        cmd->add_option("--jobs", jobs, "worker threads");
    }

    RunConfig make_config(const CLI::App* cmd) const {
        RunConfig c;
        if (cmd->count("--config")) c = load_config(config_path);
        if (cmd->count("--duration")) c.duration_s = duration;
        if (cmd->count("--bump-detector")) c.enhancements.bump_detector = true;
        if (cmd->count("--inflate")) c.enhancements.obstacle_expanding = true;
        if (cmd->count("--orientation-coef")) {
            c.enhancements.orientation_coef = true;
            c.cost.gamma = orientation_gamma;
        }
        if (cmd->count("--corrupt-depth")) c.depth = DepthMode::Corrupted;
        if (cmd->count("--alpha")) c.cost.alpha = alpha;
        if (cmd->count("--beta")) c.cost.beta = beta;
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explorebench: deterministic frontier-exploration benchmark"};
    app.require_subcommand(1);

    // --- run -----------------------------------------------------------
    auto* cmd_run = app.add_subcommand("run", "run one episode per seed on one scene");
    std::string scene_path;
    bool do_render = false;
    CommonFlags run_flags;
    cmd_run->add_option("--scene", scene_path, "scene .pgm file")->required();
    cmd_run->add_flag("--render", do_render, "render the final map per run");
    run_flags.attach(cmd_run);

    // --- ablation --------------------------------------------------------
    auto* cmd_abl = app.add_subcommand("ablation", "run the 4-step enhancement ladder");
    std::string scenes_dir;
    std::vector<std::string> scene_paths;
    CommonFlags abl_flags;
    cmd_abl->add_option("--scenes-dir", scenes_dir, "directory of scene .pgm files");
    cmd_abl->add_option("--scene", scene_paths, "individual scene .pgm files");
    abl_flags.attach(cmd_abl);

    // --- gen-scenes -----------------------------------------------------
    auto* cmd_gen = app.add_subcommand("gen-scenes", "generate a scene corpus");
    std::string gen_out = "scenes";
    int gen_count = 20;
    uint64_t gen_seed = 1;
    double area_min = 30.0, area_max = 95.0;
    std::string preset = "default";
    cmd_gen->add_option("--out", gen_out, "output directory")->required();
    cmd_gen->add_option("--count", gen_count, "number of scenes");
    cmd_gen->add_option("--seed", gen_seed, "corpus seed");
    cmd_gen->add_option("--area-min", area_min, "min scene area [m^2]");
    cmd_gen->add_option("--area-max", area_max, "max scene area [m^2]");
    cmd_gen->add_option("--preset", preset, "default|doorway");

    // --- render ---------------------------------------------------------
    auto* cmd_render = app.add_subcommand("render", "render a map .pgm to an image");
    std::string render_map_path, render_out = "map_render.pgm";
    cmd_render->add_option("--map", render_map_path, "map .pgm file")->required();
    cmd_render->add_option("--out", render_out, "output image path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            const Scene scene = load_scene(scene_path);
            RunConfig config = run_flags.make_config(cmd_run);
            fs::create_directories(run_flags.out_dir);
            bool any_failed = false;
            std::vector<RunRecord> records;
            for (uint64_t seed : run_flags.seeds) {
                std::unique_ptr<std::ofstream> trace_file;
                std::unique_ptr<TraceWriter> trace;
                if (run_flags.trace) {
                    char name[128];
                    std::snprintf(name, sizeof(name), "/trace_%s_%llu.jsonl", scene.name.c_str(),
                                  static_cast<unsigned long long>(seed));
                    trace_file = std::make_unique<std::ofstream>(run_flags.out_dir + name);
                    trace = std::make_unique<TraceWriter>(*trace_file);
                }
                OccupancyGrid final_map;
                RunRecord rec = run_episode(scene, config, seed, trace.get(),
                                            do_render ? &final_map : nullptr);
                rec.config_hash = config_hash(config);
                if (do_render && final_map.width > 0) {
                    char name[128];
                    std::snprintf(name, sizeof(name), "/map_%s_%llu.pgm", scene.name.c_str(),
                                  static_cast<unsigned long long>(seed));
                    render_map(final_map, nullptr, nullptr, run_flags.out_dir + name);
                }
                if (rec.failed) {
                    any_failed = true;
                    std::fprintf(stderr, "run failed (seed %llu): %s\n",
                                 static_cast<unsigned long long>(seed), rec.error.c_str());
                } else {
                    std::printf("seed %llu: rel coverage %.3f, finished=%d, losses=%d, bumps=%d\n",
                                static_cast<unsigned long long>(seed), rec.coverage.back().rel,
                                rec.finished ? 1 : 0, rec.tracking_losses, rec.bump_events);
                }
                records.push_back(std::move(rec));
            }
            write_text_file(run_flags.out_dir + "/runs.csv",
                            runs_csv_string(records, detail::checkpoint_times(config)));
            return any_failed ? 1 : 0;
        }

        if (*cmd_abl) {
            std::vector<std::string> files = scene_paths;
            if (!scenes_dir.empty()) {
                auto more = list_scene_files(scenes_dir);
                files.insert(files.end(), more.begin(), more.end());
            }
            if (files.empty()) throw std::runtime_error("ablation: no scenes given");
            std::vector<Scene> scenes;
            scenes.reserve(files.size());
            for (const auto& f : files) scenes.push_back(load_scene(f));
            std::vector<const Scene*> scene_ptrs;
            for (const auto& s : scenes) scene_ptrs.push_back(&s);

            RunConfig base = abl_flags.make_config(cmd_abl);
            const auto t0 = std::chrono::steady_clock::now();
            const auto result = run_ablation(scene_ptrs, base, abl_flags.seeds, abl_flags.jobs,
                                             [](size_t d, size_t total) {
                                                 if (d % 25 == 0 || d == total)
                                                     std::fprintf(stderr, "\r%zu/%zu runs", d, total);
                                             });
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::fprintf(stderr, "\rdone: %zu runs in %.1f s\n", result.records.size(), elapsed);

            fs::create_directories(abl_flags.out_dir);
            write_text_file(abl_flags.out_dir + "/runs.csv",
                            runs_csv_string(result.records, result.report.checkpoint_times));
            write_text_file(abl_flags.out_dir + "/report.json",
                            report_json(result.report).dump(2) + "\n");
            print_summary(result.report);
            for (const auto& r : result.records)
                if (r.failed) {
                    std::fprintf(stderr, "FAILED %s %s seed %llu: %s\n", r.config_label.c_str(),
                                 r.scene_name.c_str(), static_cast<unsigned long long>(r.seed),
                                 r.error.c_str());
                    return 1;
                }
            return 0;
        }

        if (*cmd_gen) {
            fs::create_directories(gen_out);
            Rng corpus_rng(gen_seed);
            for (int i = 0; i < gen_count; ++i) {
                SceneGenSpec spec = preset == "doorway"
                                        ? SceneGenSpec::doorway_rich(
                                              corpus_rng.uniform(area_min, area_max))
                                        : SceneGenSpec{};
                if (preset != "doorway")
                    spec.target_area_m2 = corpus_rng.uniform(area_min, area_max);
                Scene scene = generate_scene(spec, corpus_rng.next());
                char name[64];
                std::snprintf(name, sizeof(name), "scene_%03d", i);
                scene.name = name;
                save_scene(scene, gen_out + "/" + name + ".pgm");
                std::printf("%s: %.1f m^2, %zu invisible cells\n", name, scene.area_m2,
                            scene.invisible_obstacles.size());
            }
            return 0;
        }

        if (*cmd_render) {
            const OccupancyGrid grid = load_pgm(render_map_path);
            render_map(grid, nullptr, nullptr, render_out);
            std::printf("wrote %s\n", render_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
