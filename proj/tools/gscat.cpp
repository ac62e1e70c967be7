// Command-line surface: render frames, compare culling strategies, sweep the
// feature-FIFO depth, generate synthetic scenes, and compute PSNR between
// image files. Exit codes: 0 success, 2 config error, 3 I/O error,
// 4 internal failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gscat/config.hpp"
#include "gscat/image.hpp"
#include "gscat/pipesim.hpp"
#include "gscat/ply.hpp"
#include "gscat/rasterizer.hpp"
#include "gscat/scene.hpp"
#include "gscat/table.hpp"
#include "gscat/trace.hpp"

namespace fs = std::filesystem;
using namespace gscat;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
};

nlohmann::json load_effective_config(const CommonArgs& args) {
    nlohmann::json j = load_config_file(args.config_path);
    for (const auto& kv : args.overrides) apply_override(j, kv);
    if (!args.out_dir.empty()) j["output_dir"] = args.out_dir;
    return j;
}

std::vector<Gaussian3D> load_scene(const RunConfig& cfg) {
    if (cfg.scene_is_spec) return generate_scene(cfg.scene_spec);
    return load_ply(cfg.scene_path);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
}

void write_meta(const std::string& dir, const std::string& command, const nlohmann::json& cfg_json) {
    nlohmann::json meta;
    meta["tool"] = kToolName;
    meta["version"] = kToolVersion;
    meta["command"] = command;
    meta["config_hash"] = config_hash(cfg_json);
    std::ofstream out(dir + "/meta.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/meta.json");
    out << meta.dump(2) << "\n";
}

Table stats_table(const std::string& label, const RenderStats& s) {
    Table t;
    t.columns = {"strategy",     "mean_per_pixel_gaussians",
                 "duplicates_16", "duplicates_8",
                 "duplicates_4",  "skipped_early_term",
                 "degenerate",    "culled"};
    t.rows.push_back({label, s.mean_per_pixel(), s.duplicates16, s.duplicates8, s.duplicates4,
                      s.skipped_early_term, s.degenerate, s.culled});
    return t;
}

int cmd_render(const CommonArgs& args) {
    nlohmann::json cfg_json = load_effective_config(args);
    RunConfig cfg = parse_run_config(cfg_json);
    ensure_out_dir(cfg.output_dir);

    std::vector<Gaussian3D> scene = load_scene(cfg);
    FrameResult result = render_frame(scene, cfg.camera, cfg.strategy, cfg.render);

    write_image(result.image, cfg.output_dir + "/render." + cfg.image_format);
    Table t = stats_table(strategy_kind_name(cfg.strategy.kind), result.stats);
    write_table(t, cfg.output_dir + "/stats.csv", cfg.output_dir + "/stats.json");
    write_meta(cfg.output_dir, "render", cfg_json);
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::vector<std::string>& strategy_names) {
    if (strategy_names.size() < 2)
        throw ConfigError("compare: need at least two strategies");
    nlohmann::json cfg_json = load_effective_config(args);
    RunConfig cfg = parse_run_config(cfg_json);
    ensure_out_dir(cfg.output_dir);

    std::vector<Gaussian3D> scene = load_scene(cfg);
    Strategy exhaustive = cfg.strategy;
    exhaustive.kind = StrategyKind::Exhaustive;
    FrameResult reference = render_frame(scene, cfg.camera, exhaustive, cfg.render);

    Table t;
    t.columns = {"strategy",     "mean_per_pixel_gaussians",
                 "duplicates_16", "duplicates_8",
                 "duplicates_4",  "psnr_vs_exhaustive_db"};
    for (const std::string& name : strategy_names) {
        Strategy s = cfg.strategy;
        s.kind = parse_strategy_kind(name);
        FrameResult r = s.kind == StrategyKind::Exhaustive
                            ? FrameResult{reference.image, reference.stats}
                            : render_frame(scene, cfg.camera, s, cfg.render);
        t.rows.push_back({name, r.stats.mean_per_pixel(), r.stats.duplicates16,
                          r.stats.duplicates8, r.stats.duplicates4,
                          psnr(r.image, reference.image)});
    }
    write_table(t, cfg.output_dir + "/compare.csv", cfg.output_dir + "/compare.json");
    write_meta(cfg.output_dir, "compare", cfg_json);
    return 0;
}

int cmd_sweep_fifo(const CommonArgs& args, const std::vector<int>& depths) {
    nlohmann::json cfg_json = load_effective_config(args);
    RunConfig cfg = parse_run_config(cfg_json);
    ensure_out_dir(cfg.output_dir);

    std::vector<Gaussian3D> scene = load_scene(cfg);
    std::vector<Splat2D> splats = project_scene(scene, cfg.camera, cfg.render.sh_degree);
    FrameTrace trace =
        build_trace(splats, cfg.camera, cfg.strategy.sampling, cfg.strategy.profile, cfg.render);
    write_trace(trace, cfg.output_dir + "/trace.json");

    std::vector<SweepRow> rows = sweep_fifo_depth(trace, cfg.pipe, depths);
    Table t;
    t.columns = {"depth", "cycles", "stall_rate", "speedup"};
    for (const SweepRow& r : rows)
        t.rows.push_back({std::int64_t(r.depth), std::int64_t(r.cycles), r.stall_rate, r.speedup});
    write_table(t, cfg.output_dir + "/sweep.csv", cfg.output_dir + "/sweep.json");
    write_meta(cfg.output_dir, "sweep-fifo", cfg_json);
    return 0;
}

int cmd_gen_scene(const CommonArgs& args) {
    nlohmann::json cfg_json = load_effective_config(args);
    RunConfig cfg = parse_run_config(cfg_json);
    if (!cfg.scene_is_spec)
        throw ConfigError("gen-scene: config must carry a scene spec, not a path");
    ensure_out_dir(cfg.output_dir);
    std::vector<Gaussian3D> scene = generate_scene(cfg.scene_spec);
    write_ply(cfg.output_dir + "/scene.ply", scene);
    write_meta(cfg.output_dir, "gen-scene", cfg_json);
    return 0;
}

int cmd_psnr(const std::string& a_path, const std::string& b_path) {
    Image a = read_image(a_path);
    Image b = read_image(b_path);
    double v = psnr(a, b);
    std::cout << detail::format_double(v) << "\n";
    return 0;
}

void add_common(CLI::App* sub, CommonArgs& args, bool config_required = true) {
    auto* opt = sub->add_option("--config", args.config_path, "JSON run config");
    if (config_required) opt->required();
    sub->add_option("--set", args.overrides, "Override a config key, e.g. --set pipe.fifo_depth=4");
    sub->add_option("--out", args.out_dir, "Output directory (overrides output_dir)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contribution-aware Gaussian-splatting rasterizer and pipeline simulator"};
    app.require_subcommand(1);

    CommonArgs render_args, compare_args, sweep_args, gen_args;
    std::vector<std::string> compare_strategies;
    std::vector<int> sweep_depths{1, 2, 4, 8, 16, 32, 64, 128};
    std::string psnr_a, psnr_b;

    CLI::App* render = app.add_subcommand("render", "Render one frame and write stats");
    add_common(render, render_args);

    CLI::App* compare = app.add_subcommand("compare", "Render the same inputs per strategy");
    add_common(compare, compare_args);
    compare->add_option("--strategies", compare_strategies, "Strategies to compare")
        ->required()
        ->delimiter(',');

    CLI::App* sweep = app.add_subcommand("sweep-fifo", "FIFO-depth sensitivity sweep");
    add_common(sweep, sweep_args);
    sweep->add_option("--depths", sweep_depths, "FIFO depths, strictly increasing")->delimiter(',');

    CLI::App* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene PLY");
    add_common(gen, gen_args);

    CLI::App* psnr_cmd = app.add_subcommand("psnr", "PSNR between two image files");
    psnr_cmd->add_option("a", psnr_a, "First image (.ppm or .png)")->required();
    psnr_cmd->add_option("b", psnr_b, "Second image (.ppm or .png)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (render->parsed()) return cmd_render(render_args);
        if (compare->parsed()) return cmd_compare(compare_args, compare_strategies);
        if (sweep->parsed()) return cmd_sweep_fifo(sweep_args, sweep_depths);
        if (gen->parsed()) return cmd_gen_scene(gen_args);
        if (psnr_cmd->parsed()) return cmd_psnr(psnr_a, psnr_b);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
