#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>

#include "gscat/types.hpp"

namespace gscat {

// Real spherical-harmonic basis constants, degrees 0..3.
inline constexpr double kSH_C0 = 0.28209479177387814;
inline constexpr double kSH_C1 = 0.4886025119029199;
inline constexpr double kSH_C2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                                     -1.0925484305920792, 0.5462742152960396};
inline constexpr double kSH_C3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                                     0.3731763325901154,  -0.4570457994644658, 2.890611442640554,
                                     -0.5900435899266435};

/// View-dependent color from SH coefficients: 0.5 + sum(coeff * basis(dir)),
/// clamped at 0 from below. `degree` caps how many coefficients are used;
/// `rest` is channel-major (15 coefficients per channel).
inline std::array<double, 3> evaluate_sh(const float* dc, const float* rest, Vec3 dir, int degree) {
    std::array<double, 3> out{};
    double x = dir.x, y = dir.y, z = dir.z;
    for (int ch = 0; ch < 3; ++ch) {
        const float* r = rest + ch * 15;
        double c = kSH_C0 * dc[ch];
        if (degree >= 1) {
            c += -kSH_C1 * y * r[0] + kSH_C1 * z * r[1] - kSH_C1 * x * r[2];
        }
        if (degree >= 2) {
            double xx = x * x, yy = y * y, zz = z * z;
            c += kSH_C2[0] * x * y * r[3] + kSH_C2[1] * y * z * r[4] +
                 kSH_C2[2] * (2.0 * zz - xx - yy) * r[5] + kSH_C2[3] * x * z * r[6] +
                 kSH_C2[4] * (xx - yy) * r[7];
        }
        if (degree >= 3) {
            double xx = x * x, yy = y * y, zz = z * z;
            c += kSH_C3[0] * y * (3.0 * xx - yy) * r[8] + kSH_C3[1] * x * y * z * r[9] +
                 kSH_C3[2] * y * (4.0 * zz - xx - yy) * r[10] +
                 kSH_C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * r[11] +
                 kSH_C3[4] * x * (4.0 * zz - xx - yy) * r[12] +
                 kSH_C3[5] * z * (xx - yy) * r[13] + kSH_C3[6] * x * (xx - 3.0 * yy) * r[14];
        }
        out[ch] = std::max(0.0, c + 0.5);
    }
    return out;
}

/// Spiky means the screen-space ellipse axis ratio sqrt(l1/l2) is >= 3
/// (the boundary counts as spiky).
inline bool classify_spiky(double lambda1, double lambda2) {
    return std::sqrt(lambda1 / lambda2) >= 3.0;
}

struct ProjectStats {
    std::int64_t culled = 0;      // frustum / guard-band rejects
    std::int64_t degenerate = 0;  // non-invertible screen-space covariance
};

// Screen-space covariance dilation, applied to both diagonal entries before
// inversion. Keeps tiny splats well-conditioned.
inline constexpr double kCovarianceDilation = 0.3;

/// EWA projection of one Gaussian. Returns nothing when the Gaussian is
/// frustum-culled (z outside [near, far], or mean outside a 1.3x half-frame
/// guard band) or when the dilated covariance is numerically singular; the
/// latter increments stats->degenerate instead of raising.
inline std::optional<Splat2D> project(const Gaussian3D& g, const Camera& cam, int sh_degree = 3,
                                      ProjectStats* stats = nullptr) {
    Vec3 mean{g.mean[0], g.mean[1], g.mean[2]};
    Vec3 p = cam.rot * mean + cam.trans;
    if (!(p.z >= cam.near_z && p.z <= cam.far_z)) {
        if (stats) stats->culled++;
        return std::nullopt;
    }

    double u = cam.fx * p.x / p.z + cam.cx;
    double v = cam.fy * p.y / p.z + cam.cy;
    double half_w = cam.width / 2.0, half_h = cam.height / 2.0;
    if (std::abs(u - half_w) > 1.3 * half_w || std::abs(v - half_h) > 1.3 * half_h) {
        if (stats) stats->culled++;
        return std::nullopt;
    }

    // Sigma_3D = R * diag(s^2) * R^T
    Mat3 r = rotation_from_quaternion(g.rotation[0], g.rotation[1], g.rotation[2], g.rotation[3]);
    double s2[3] = {std::exp(2.0 * double(g.log_scale[0])), std::exp(2.0 * double(g.log_scale[1])),
                    std::exp(2.0 * double(g.log_scale[2]))};
    Mat3 cov3d;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            cov3d.m[i][j] = r.m[i][0] * s2[0] * r.m[j][0] + r.m[i][1] * s2[1] * r.m[j][1] +
                            r.m[i][2] * s2[2] * r.m[j][2];

    // Rows of J * W, with J the perspective Jacobian at the camera-space mean.
    double jw[2][3];
    double inv_z = 1.0 / p.z;
    double j00 = cam.fx * inv_z, j02 = -cam.fx * p.x * inv_z * inv_z;
    double j11 = cam.fy * inv_z, j12 = -cam.fy * p.y * inv_z * inv_z;
    for (int k = 0; k < 3; ++k) {
        jw[0][k] = j00 * cam.rot.m[0][k] + j02 * cam.rot.m[2][k];
        jw[1][k] = j11 * cam.rot.m[1][k] + j12 * cam.rot.m[2][k];
    }

    // Sigma' = (JW) Sigma_3D (JW)^T, then dilate the diagonal.
    double cov2d[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += jw[i][a] * cov3d.m[a][b] * jw[j][b];
            cov2d[i][j] = s;
        }
    double a = cov2d[0][0] + kCovarianceDilation;
    double b = cov2d[0][1];
    double c = cov2d[1][1] + kCovarianceDilation;

    double det = a * c - b * b;
    if (!std::isfinite(det) || det <= 1e-12 || !std::isfinite(a) || !std::isfinite(c)) {
        if (stats) stats->degenerate++;
        return std::nullopt;
    }

    SymEig2 eig = eigen_sym2(a, b, c);
    if (!(eig.l2 > 0.0)) {
        if (stats) stats->degenerate++;
        return std::nullopt;
    }

    Splat2D out;
    out.mu = {u, v};
    out.cxx = c / det;
    out.cxy = -b / det;
    out.cyy = a / det;
    out.depth = p.z;
    out.opacity = sigmoid(double(g.opacity_logit));
    Vec3 view_dir = (mean - cam.position()).normalized();
    auto color = evaluate_sh(g.sh_dc, g.sh_rest, view_dir, sh_degree);
    out.color[0] = color[0];
    out.color[1] = color[1];
    out.color[2] = color[2];
    out.lambda1 = eig.l1;
    out.lambda2 = eig.l2;
    out.axis_dir = eig.axis;
    out.spiky = classify_spiky(eig.l1, eig.l2);
    return out;
}

}  // namespace gscat
