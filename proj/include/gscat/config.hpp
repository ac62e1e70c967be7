#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gscat/pipesim.hpp"
#include "gscat/rasterizer.hpp"
#include "gscat/scene.hpp"

namespace gscat {

inline constexpr const char* kToolName = "gscat";
inline constexpr const char* kToolVersion = "0.1.0";

/// Fully parsed run description: scene source, camera, strategy knobs,
/// pipeline model, and output settings. One JSON document round-trips to this.
struct RunConfig {
    bool scene_is_spec = true;
    std::string scene_path;
    SceneSpec scene_spec;
    Camera camera;
    Strategy strategy{StrategyKind::HierCAT, SamplingMode::SmoothFocused, NumericProfile::Mixed};
    PipeConfig pipe;
    RenderConfig render;
    std::string output_dir = "out";
    std::string image_format = "ppm";
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                                const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key: " + context + it.key());
    }
}

template <typename T>
inline void get_if_present(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("config: bad value for key: ") + key);
        }
    }
}

inline void get_range(const nlohmann::json& obj, const char* key, double& lo, double& hi) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(std::string("config: ") + key + " must be [lo, hi]");
    lo = v[0].get<double>();
    hi = v[1].get<double>();
}

}  // namespace detail

inline StrategyKind parse_strategy_kind(const std::string& s) {
    if (s == "tile_aabb") return StrategyKind::TileAABB;
    if (s == "subtile_aabb") return StrategyKind::SubtileAABB;
    if (s == "subtile_obb") return StrategyKind::SubtileOBB;
    if (s == "hier_cat") return StrategyKind::HierCAT;
    if (s == "exhaustive") return StrategyKind::Exhaustive;
    throw ConfigError("config: unknown strategy: " + s);
}

inline std::string strategy_kind_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::TileAABB: return "tile_aabb";
        case StrategyKind::SubtileAABB: return "subtile_aabb";
        case StrategyKind::SubtileOBB: return "subtile_obb";
        case StrategyKind::HierCAT: return "hier_cat";
        case StrategyKind::Exhaustive: return "exhaustive";
    }
    return "?";
}

inline SamplingMode parse_sampling_mode(const std::string& s) {
    if (s == "uniform_dense") return SamplingMode::UniformDense;
    if (s == "uniform_sparse") return SamplingMode::UniformSparse;
    if (s == "smooth_focused") return SamplingMode::SmoothFocused;
    if (s == "spiky_focused") return SamplingMode::SpikyFocused;
    throw ConfigError("config: unknown sampling mode: " + s);
}

inline NumericProfile parse_numeric_profile(const std::string& s) {
    if (s == "real") return NumericProfile::Real;
    if (s == "full16") return NumericProfile::Full16;
    if (s == "full8") return NumericProfile::Full8;
    if (s == "mixed") return NumericProfile::Mixed;
    throw ConfigError("config: unknown numeric profile: " + s);
}

inline SceneSpec parse_scene_spec(const nlohmann::json& j) {
    detail::reject_unknown_keys(j, {"seed", "count", "bounds", "anisotropy", "opacity",
                                    "focal_px", "sh_degree", "rng"},
                                "scene.");
    SceneSpec spec;
    detail::get_if_present(j, "seed", spec.seed);
    detail::get_if_present(j, "count", spec.count);
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        detail::reject_unknown_keys(b, {"min", "max"}, "scene.bounds.");
        auto vec3 = [](const nlohmann::json& v) {
            if (!v.is_array() || v.size() != 3) throw ConfigError("config: bounds need 3 numbers");
            return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
        };
        if (b.contains("min")) spec.bounds_min = vec3(b.at("min"));
        if (b.contains("max")) spec.bounds_max = vec3(b.at("max"));
    }
    if (j.contains("anisotropy")) {
        const auto& a = j.at("anisotropy");
        detail::reject_unknown_keys(a, {"spiky_fraction", "smooth_ratio", "spiky_ratio", "sigma_px"},
                                    "scene.anisotropy.");
        detail::get_if_present(a, "spiky_fraction", spec.spiky_fraction);
        detail::get_range(a, "smooth_ratio", spec.smooth_ratio_min, spec.smooth_ratio_max);
        detail::get_range(a, "spiky_ratio", spec.spiky_ratio_min, spec.spiky_ratio_max);
        detail::get_range(a, "sigma_px", spec.sigma_px_min, spec.sigma_px_max);
    }
    if (j.contains("opacity")) {
        const auto& o = j.at("opacity");
        detail::reject_unknown_keys(o, {"min", "max"}, "scene.opacity.");
        detail::get_if_present(o, "min", spec.opacity_min);
        detail::get_if_present(o, "max", spec.opacity_max);
    }
    detail::get_if_present(j, "focal_px", spec.focal_px);
    detail::get_if_present(j, "sh_degree", spec.sh_degree);
    detail::get_if_present(j, "rng", spec.rng);
    spec.validate();
    return spec;
}

inline Camera parse_camera(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"width", "height", "fx", "fy", "cx", "cy", "world_to_cam", "near", "far"}, "camera.");
    Camera cam;
    detail::get_if_present(j, "width", cam.width);
    detail::get_if_present(j, "height", cam.height);
    detail::get_if_present(j, "fx", cam.fx);
    detail::get_if_present(j, "fy", cam.fy);
    detail::get_if_present(j, "cx", cam.cx);
    detail::get_if_present(j, "cy", cam.cy);
    detail::get_if_present(j, "near", cam.near_z);
    detail::get_if_present(j, "far", cam.far_z);
    if (j.contains("world_to_cam")) {
        const auto& m = j.at("world_to_cam");
        if (!m.is_array() || m.size() != 12)
            throw ConfigError("config: world_to_cam needs 12 numbers (row-major 3x4)");
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) cam.rot.m[r][c] = m[std::size_t(r * 4 + c)].get<double>();
        }
        cam.trans = {m[3].get<double>(), m[7].get<double>(), m[11].get<double>()};
    }
    // Frame sizes are padded up to whole tiles.
    auto pad16 = [](int v) { return (v + 15) / 16 * 16; };
    cam.width = pad16(cam.width);
    cam.height = pad16(cam.height);
    cam.validate();
    return cam;
}

inline PipeConfig parse_pipe_config(const nlohmann::json& j, SamplingMode sampling) {
    detail::reject_unknown_keys(j,
                                {"rendering_cores", "channels_per_core", "vrus_per_channel",
                                 "fifo_depth", "ctu_fifo_depth", "prtus_per_ctu", "ctu_latency",
                                 "vru_pixels_per_cycle", "ctu_enabled"},
                                "pipe.");
    PipeConfig p;
    p.sampling = sampling;
    detail::get_if_present(j, "rendering_cores", p.rendering_cores);
    detail::get_if_present(j, "channels_per_core", p.channels_per_core);
    detail::get_if_present(j, "vrus_per_channel", p.vrus_per_channel);
    detail::get_if_present(j, "fifo_depth", p.fifo_depth);
    detail::get_if_present(j, "ctu_fifo_depth", p.ctu_fifo_depth);
    detail::get_if_present(j, "prtus_per_ctu", p.prtus_per_ctu);
    detail::get_if_present(j, "ctu_latency", p.ctu_latency);
    detail::get_if_present(j, "vru_pixels_per_cycle", p.vru_pixels_per_cycle);
    detail::get_if_present(j, "ctu_enabled", p.ctu_enabled);
    p.validate();
    return p;
}

/// Parse a full run config, rejecting unknown keys at every level.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"scene", "camera", "strategy", "sampling", "profile", "pipe",
                                 "render", "background", "output_dir", "image_format"},
                                "");
    RunConfig cfg;
    if (j.contains("scene")) {
        const auto& s = j.at("scene");
        if (s.is_string()) {
            cfg.scene_is_spec = false;
            cfg.scene_path = s.get<std::string>();
        } else if (s.is_object()) {
            cfg.scene_is_spec = true;
            cfg.scene_spec = parse_scene_spec(s);
        } else {
            throw ConfigError("config: scene must be a path or a scene spec object");
        }
    }
    if (j.contains("camera")) cfg.camera = parse_camera(j.at("camera"));

    std::string sampling = "smooth_focused", profile = "mixed", strategy = "hier_cat";
    detail::get_if_present(j, "strategy", strategy);
    detail::get_if_present(j, "sampling", sampling);
    detail::get_if_present(j, "profile", profile);
    cfg.strategy.kind = parse_strategy_kind(strategy);
    cfg.strategy.sampling = parse_sampling_mode(sampling);
    cfg.strategy.profile = parse_numeric_profile(profile);

    cfg.pipe = parse_pipe_config(j.contains("pipe") ? j.at("pipe") : nlohmann::json::object(),
                                 cfg.strategy.sampling);

    if (j.contains("render")) {
        const auto& r = j.at("render");
        detail::reject_unknown_keys(r, {"early_termination", "sh_degree"}, "render.");
        detail::get_if_present(r, "early_termination", cfg.render.early_termination);
        detail::get_if_present(r, "sh_degree", cfg.render.sh_degree);
        if (cfg.render.sh_degree < 0 || cfg.render.sh_degree > 3)
            throw ConfigError("config: render.sh_degree must be 0..3");
    }
    if (j.contains("background")) {
        const auto& b = j.at("background");
        if (!b.is_array() || b.size() != 3)
            throw ConfigError("config: background must be [r, g, b]");
        for (int c = 0; c < 3; ++c) cfg.render.background[c] = b[std::size_t(c)].get<double>();
    }
    detail::get_if_present(j, "output_dir", cfg.output_dir);
    detail::get_if_present(j, "image_format", cfg.image_format);
    if (cfg.image_format != "ppm" && cfg.image_format != "png")
        throw ConfigError("config: image_format must be ppm or png");
    return cfg;
}

inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error in ") + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
    return j;
}

/// Apply one `--set key=value` override; dotted keys descend into objects.
/// The value is parsed as JSON when possible, else taken as a string.
inline void apply_override(nlohmann::json& j, const std::string& keyval) {
    auto eq = keyval.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("config: --set expects key=value, got: " + keyval);
    std::string key = keyval.substr(0, eq);
    std::string raw = keyval.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;
    }

    nlohmann::json* node = &j;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (part.empty()) throw ConfigError("config: bad --set key: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        if (!node->contains(part) || !(*node)[part].is_object())
            (*node)[part] = nlohmann::json::object();
        node = &(*node)[part];
        start = dot + 1;
    }
}

/// FNV-1a 64 over the canonical dump; stamped into report sidecars.
inline std::string config_hash(const nlohmann::json& j) {
    std::string s = j.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace gscat
