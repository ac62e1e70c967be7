#include <catch_amalgamated.hpp>

#include "gscat/config.hpp"

using namespace gscat;

namespace {

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
        "scene": { "seed": 1, "count": 10 },
        "camera": { "width": 64, "height": 64, "fx": 64, "fy": 64, "cx": 32, "cy": 32 },
        "strategy": "hier_cat",
        "sampling": "uniform_dense",
        "profile": "real",
        "output_dir": "out"
    })");
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    RunConfig cfg = parse_run_config(minimal_config());
    CHECK(cfg.scene_is_spec);
    CHECK(cfg.scene_spec.count == 10);
    CHECK(cfg.camera.width == 64);
    CHECK(cfg.strategy.kind == StrategyKind::HierCAT);
    CHECK(cfg.strategy.sampling == SamplingMode::UniformDense);
    CHECK(cfg.strategy.profile == NumericProfile::Real);
    CHECK(cfg.pipe.fifo_depth == 16);
    CHECK(cfg.pipe.ctu_enabled);
    CHECK(cfg.render.early_termination);
    CHECK(cfg.image_format == "ppm");
}

TEST_CASE("unknown keys are rejected with the key name") {
    auto j = minimal_config();
    j["strategyy"] = "tile_aabb";
    try {
        parse_run_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("strategyy") != std::string::npos);
    }

    auto nested = minimal_config();
    nested["pipe"]["fifo_dpeth"] = 4;
    try {
        parse_run_config(nested);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("pipe.fifo_dpeth") != std::string::npos);
    }
}

TEST_CASE("scene accepts a path string") {
    auto j = minimal_config();
    j["scene"] = "scene.ply";
    RunConfig cfg = parse_run_config(j);
    CHECK_FALSE(cfg.scene_is_spec);
    CHECK(cfg.scene_path == "scene.ply");
}

TEST_CASE("camera dimensions pad up to whole tiles") {
    auto j = minimal_config();
    j["camera"]["width"] = 250;
    j["camera"]["height"] = 130;
    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.camera.width == 256);
    CHECK(cfg.camera.height == 144);
}

TEST_CASE("set overrides replace values and win over the file") {
    auto j = minimal_config();
    apply_override(j, "pipe.fifo_depth=4");
    apply_override(j, "profile=mixed");
    apply_override(j, "background=[1,0,0]");
    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.pipe.fifo_depth == 4);
    CHECK(cfg.strategy.profile == NumericProfile::Mixed);
    CHECK(cfg.render.background[0] == 1.0);

    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("a typo through --set is caught as an unknown key") {
    auto j = minimal_config();
    apply_override(j, "pipe.fifo_dept=4");
    CHECK_THROWS_AS(parse_run_config(j), ConfigError);
}

TEST_CASE("bad enum values are named") {
    auto j = minimal_config();
    j["sampling"] = "dense";
    CHECK_THROWS_AS(parse_run_config(j), ConfigError);
    j = minimal_config();
    j["profile"] = "fp4";
    CHECK_THROWS_AS(parse_run_config(j), ConfigError);
    j = minimal_config();
    j["strategy"] = "obb";
    CHECK_THROWS_AS(parse_run_config(j), ConfigError);
}

TEST_CASE("config hash is deterministic and sensitive") {
    auto a = minimal_config();
    auto b = minimal_config();
    CHECK(config_hash(a) == config_hash(b));
    b["profile"] = "mixed";
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("pipe hierarchy violations surface as config errors") {
    auto j = minimal_config();
    j["pipe"]["rendering_cores"] = 2;
    CHECK_THROWS_AS(parse_run_config(j), ConfigError);
}
