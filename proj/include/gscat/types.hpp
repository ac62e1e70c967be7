#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "gscat/math.hpp"

namespace gscat {

/// Bad configuration / parameters. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system / format failures. CLI maps this to exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// One trained scene primitive, stored exactly as the checkpoint stores it:
/// opacity as a pre-sigmoid logit, scales as log of the per-axis std-dev.
/// Activations are applied during projection so loading stays lossless.
struct Gaussian3D {
    float mean[3] = {0, 0, 0};
    float log_scale[3] = {0, 0, 0};
    float rotation[4] = {1, 0, 0, 0};  // unit quaternion, (w, x, y, z)
    float opacity_logit = 0.0f;
    float sh_dc[3] = {0, 0, 0};    // degree-0 spherical-harmonic coefficient per channel
    float sh_rest[45] = {};        // degrees 1..3, channel-major: [R1..R15, G1..G15, B1..B15]
};

/// Pinhole camera with a rigid world-to-camera transform.
/// Width and height are padded up to a multiple of 16 when parsed from config.
struct Camera {
    int width = 256;
    int height = 256;
    double fx = 256.0, fy = 256.0;
    double cx = 128.0, cy = 128.0;
    Mat3 rot;          // world_to_cam rotation
    Vec3 trans;        // world_to_cam translation: x_cam = rot * x_world + trans
    double near_z = 0.1;
    double far_z = 100.0;

    void validate() const {
        if (width <= 0 || height <= 0) throw ConfigError("camera: width/height must be positive");
        if (width % 16 != 0 || height % 16 != 0)
            throw ConfigError("camera: width/height must be multiples of 16");
        if (!(0.0 < near_z && near_z < far_z)) throw ConfigError("camera: need 0 < near < far");
    }

    Vec3 position() const {
        // cam_pos = -R^T * t
        Mat3 rt = rot.transposed();
        Vec3 p = rt * trans;
        return {-p.x, -p.y, -p.z};
    }
};

/// A Gaussian after projection to the image plane.
struct Splat2D {
    Vec2 mu;                          // 2D mean, pixels
    double cxx = 1.0, cxy = 0.0, cyy = 1.0;  // conic = inverse of the dilated 2D covariance
    double depth = 0.0;               // camera-space z
    double opacity = 0.0;             // post-sigmoid, in (0,1)
    double color[3] = {0, 0, 0};
    double lambda1 = 1.0, lambda2 = 1.0;  // eigenvalues of the dilated covariance, l1 >= l2
    Vec2 axis_dir{1.0, 0.0};          // unit direction of the major axis
    bool spiky = false;               // axis ratio sqrt(l1/l2) >= 3

    /// Exponent of the falloff at pixel p: 0.5 * d^T Conic d.
    double falloff_exponent(double px, double py) const {
        double dx = px - mu.x;
        double dy = py - mu.y;
        return 0.5 * (cxx * dx * dx + cyy * dy * dy) + cxy * dx * dy;
    }
};

}  // namespace gscat
