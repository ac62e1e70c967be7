#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gscat/projection.hpp"
#include "gscat/rng.hpp"
#include "gscat/types.hpp"

namespace gscat {

/// Deterministic synthetic-scene recipe. Gaussians are placed in a
/// camera-facing slab; the anisotropy law targets the screen-space axis ratio
/// (after covariance dilation) seen by a fronto-parallel camera with focal
/// length `focal_px`, so the spiky fraction is controllable.
struct SceneSpec {
    std::uint64_t seed = 1;
    std::int64_t count = 0;
    Vec3 bounds_min{-2.4, -2.4, 4.25};
    Vec3 bounds_max{2.4, 2.4, 5.75};

    double spiky_fraction = 0.4;
    double smooth_ratio_min = 1.0, smooth_ratio_max = 2.5;  // dilated axis-ratio targets
    double spiky_ratio_min = 3.05, spiky_ratio_max = 4.0;
    double sigma_px_min = 0.9, sigma_px_max = 2.9;  // projected major-axis sigma, pixels

    double opacity_min = 0.15, opacity_max = 0.95;
    double focal_px = 256.0;
    int sh_degree = 0;  // degree 0 keeps color view-independent
    std::string rng = kRngAlgorithm;

    void validate() const {
        if (count < 0) throw ConfigError("scene: count must be >= 0");
        if (!(bounds_max.x > bounds_min.x && bounds_max.y > bounds_min.y &&
              bounds_max.z > bounds_min.z))
            throw ConfigError("scene: degenerate bounds (zero volume)");
        if (!(sigma_px_min > 0.0 && sigma_px_max >= sigma_px_min))
            throw ConfigError("scene: bad sigma range");
        if (!(smooth_ratio_min >= 1.0 && smooth_ratio_max >= smooth_ratio_min))
            throw ConfigError("scene: bad smooth ratio range");
        if (!(spiky_ratio_min >= 3.0 && spiky_ratio_max >= spiky_ratio_min))
            throw ConfigError("scene: bad spiky ratio range");
        if (!(spiky_fraction >= 0.0 && spiky_fraction <= 1.0))
            throw ConfigError("scene: spiky_fraction must be in [0,1]");
        if (!(opacity_min > 0.0 && opacity_max < 1.0 && opacity_max >= opacity_min))
            throw ConfigError("scene: opacity range must stay inside (0,1)");
        if (!(focal_px > 0.0)) throw ConfigError("scene: focal_px must be positive");
        if (sh_degree < 0 || sh_degree > 3) throw ConfigError("scene: sh_degree must be 0..3");
        if (rng != kRngAlgorithm) throw ConfigError("scene: unknown rng algorithm: " + rng);
    }
};

namespace detail {

// Smallest major sigma (pixels) that admits the target dilated axis ratio
// with a minor sigma of at least kMinMinorSigma.
inline constexpr double kMinMinorSigma = 0.05;

inline double sigma_needed_for_ratio(double ratio) {
    double d = kCovarianceDilation;
    double s2 = ratio * ratio * (d + kMinMinorSigma * kMinMinorSigma) - d;
    return std::sqrt(std::max(0.0, s2));
}

}  // namespace detail

/// Pure function of the spec: identical specs give bit-identical scenes.
inline std::vector<Gaussian3D> generate_scene(const SceneSpec& spec) {
    spec.validate();
    Pcg32 rng(spec.seed);
    std::vector<Gaussian3D> out;
    out.reserve(static_cast<std::size_t>(spec.count));

    for (std::int64_t i = 0; i < spec.count; ++i) {
        Gaussian3D g;
        double px = rng.uniform(spec.bounds_min.x, spec.bounds_max.x);
        double py = rng.uniform(spec.bounds_min.y, spec.bounds_max.y);
        double pz = rng.uniform(spec.bounds_min.z, spec.bounds_max.z);
        g.mean[0] = float(px);
        g.mean[1] = float(py);
        g.mean[2] = float(pz);

        bool spiky = rng.uniform() < spec.spiky_fraction;
        double ratio = spiky ? rng.uniform(spec.spiky_ratio_min, spec.spiky_ratio_max)
                             : rng.uniform(spec.smooth_ratio_min, spec.smooth_ratio_max);
        double sig_lo = std::max(spec.sigma_px_min, detail::sigma_needed_for_ratio(ratio));
        double sig_hi = std::max(spec.sigma_px_max, sig_lo);
        double sigma_a = rng.uniform(sig_lo, sig_hi);
        // Solve the minor sigma from the dilated-ratio target.
        double d = kCovarianceDilation;
        double sb2 = (sigma_a * sigma_a + d) / (ratio * ratio) - d;
        double sigma_b = std::sqrt(std::max(detail::kMinMinorSigma * detail::kMinMinorSigma, sb2));

        // Convert pixel sigmas to world scales at this depth; keep the slab thin in z.
        double to_world = pz / spec.focal_px;
        double sa = sigma_a * to_world;
        double sb = sigma_b * to_world;
        double sc = 0.1 * std::min(sa, sb);
        g.log_scale[0] = float(std::log(sa));
        g.log_scale[1] = float(std::log(sb));
        g.log_scale[2] = float(std::log(sc));

        // In-plane orientation: rotation about the view axis.
        double theta = rng.uniform(0.0, 3.14159265358979323846);
        g.rotation[0] = float(std::cos(theta / 2.0));
        g.rotation[1] = 0.0f;
        g.rotation[2] = 0.0f;
        g.rotation[3] = float(std::sin(theta / 2.0));

        double o = rng.uniform(spec.opacity_min, spec.opacity_max);
        g.opacity_logit = float(std::log(o / (1.0 - o)));

        for (int ch = 0; ch < 3; ++ch) {
            double c = rng.uniform(0.05, 0.95);
            g.sh_dc[ch] = float((c - 0.5) / kSH_C0);
        }
        if (spec.sh_degree > 0) {
            int coeffs = (spec.sh_degree + 1) * (spec.sh_degree + 1) - 1;
            for (int ch = 0; ch < 3; ++ch)
                for (int k = 0; k < coeffs; ++k) {
                    double c = rng.uniform(-0.1, 0.1);
                    g.sh_rest[ch * 15 + k] = float(c);
                }
        }
        out.push_back(g);
    }
    return out;
}

}  // namespace gscat
