#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "gscat/projection.hpp"
#include "gscat/rng.hpp"
#include "gscat/scene.hpp"

using namespace gscat;

namespace {

Camera test_camera(int w = 256, int h = 256) {
    Camera cam;
    cam.width = w;
    cam.height = h;
    cam.fx = cam.fy = w;
    cam.cx = w / 2.0;
    cam.cy = h / 2.0;
    cam.near_z = 0.1;
    cam.far_z = 100.0;
    return cam;
}

Gaussian3D iso_gaussian(double scale, double z) {
    Gaussian3D g;
    g.mean[2] = float(z);
    for (int i = 0; i < 3; ++i) g.log_scale[i] = float(std::log(scale));
    return g;
}

}  // namespace

TEST_CASE("isotropic on-axis projection matches the closed form") {
    Camera cam = test_camera();
    double z = 2.0;
    Gaussian3D g = iso_gaussian(0.05, z);
    auto splat = project(g, cam, 0);
    REQUIRE(splat.has_value());
    double s = std::exp(double(g.log_scale[0]));  // scale after float storage
    double expected = std::pow(cam.fx * s / z, 2) + 0.3;
    CHECK(splat->lambda1 == Catch::Approx(expected).epsilon(1e-9));
    CHECK(splat->lambda2 == Catch::Approx(expected).epsilon(1e-9));
    CHECK(splat->mu.x == Catch::Approx(cam.cx));
    CHECK(splat->mu.y == Catch::Approx(cam.cy));
    CHECK(splat->depth == Catch::Approx(z));
    CHECK(splat->cxy == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("behind-camera and out-of-band Gaussians are culled") {
    Camera cam = test_camera();
    ProjectStats stats;
    Gaussian3D behind = iso_gaussian(0.05, -1.0);
    CHECK_FALSE(project(behind, cam, 0, &stats).has_value());
    Gaussian3D past_far = iso_gaussian(0.05, 1000.0);
    CHECK_FALSE(project(past_far, cam, 0, &stats).has_value());
    Gaussian3D off_axis = iso_gaussian(0.05, 2.0);
    off_axis.mean[0] = 10.0f;  // projects far outside the 1.3x half-frame band
    CHECK_FALSE(project(off_axis, cam, 0, &stats).has_value());
    CHECK(stats.culled == 3);
    CHECK(stats.degenerate == 0);
}

TEST_CASE("identity rotation with diagonal scales keeps the conic diagonal") {
    Camera cam = test_camera();
    Gaussian3D g;
    g.mean[2] = 3.0f;
    g.log_scale[0] = float(std::log(0.04));
    g.log_scale[1] = float(std::log(0.01));
    g.log_scale[2] = float(std::log(0.02));
    auto s = project(g, cam, 0);
    REQUIRE(s.has_value());
    CHECK(s->cxy == Catch::Approx(0.0).margin(1e-12));
    CHECK(s->axis_dir.x == Catch::Approx(1.0));
}

TEST_CASE("overflowing scales count as degenerate, never throw") {
    Camera cam = test_camera();
    Gaussian3D g = iso_gaussian(0.05, 2.0);
    g.log_scale[0] = 400.0f;
    ProjectStats stats;
    CHECK_FALSE(project(g, cam, 0, &stats).has_value());
    CHECK(stats.degenerate == 1);
}

TEST_CASE("conic inverts the dilated covariance to 1e-9") {
    Camera cam = test_camera();
    SceneSpec spec;
    spec.seed = 77;
    spec.count = 500;
    for (const Gaussian3D& g : generate_scene(spec)) {
        auto s = project(g, cam, 0);
        if (!s) continue;
        double ax = s->axis_dir.x, ay = s->axis_dir.y;
        double vxx = s->lambda1 * ax * ax + s->lambda2 * ay * ay;
        double vyy = s->lambda1 * ay * ay + s->lambda2 * ax * ax;
        double vxy = (s->lambda1 - s->lambda2) * ax * ay;
        CHECK(s->cxx * vxx + s->cxy * vxy == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(s->cxy * vxy + s->cyy * vyy == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(s->cxx * vxy + s->cxy * vyy == Catch::Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("projection is deterministic") {
    Camera cam = test_camera();
    SceneSpec spec;
    spec.seed = 5;
    spec.count = 200;
    auto scene = generate_scene(spec);
    std::vector<Splat2D> a, b;
    for (const auto& g : scene)
        if (auto s = project(g, cam, 0)) a.push_back(*s);
    for (const auto& g : scene)
        if (auto s = project(g, cam, 0)) b.push_back(*s);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(Splat2D)) == 0);
}

TEST_CASE("shape classification splits at axis ratio 3") {
    CHECK_FALSE(classify_spiky(1.0, 1.0));
    CHECK(classify_spiky(9.0, 1.0));       // ratio exactly 3: spiky
    CHECK_FALSE(classify_spiky(8.9, 1.0));  // sqrt(8.9) < 3
}

TEST_CASE("sh: zero rest gives the view-independent base color") {
    float dc[3] = {0.4f, -0.2f, 1.0f};
    float rest[45] = {};
    auto a = evaluate_sh(dc, rest, Vec3{0, 0, 1}, 3);
    auto b = evaluate_sh(dc, rest, Vec3{1, 0, 0}.normalized(), 3);
    for (int c = 0; c < 3; ++c) {
        CHECK(a[c] == Catch::Approx(std::max(0.0, 0.5 + kSH_C0 * dc[c])));
        CHECK(a[c] == b[c]);
    }
}

TEST_CASE("sh: degree 0 ignores rest coefficients") {
    float dc[3] = {0.1f, 0.2f, 0.3f};
    float rest[45];
    for (int i = 0; i < 45; ++i) rest[i] = 0.7f;
    auto a = evaluate_sh(dc, rest, Vec3{0.3, -0.5, 0.8}.normalized(), 0);
    float zero[45] = {};
    auto b = evaluate_sh(dc, zero, Vec3{0.3, -0.5, 0.8}.normalized(), 0);
    CHECK(a == b);
}

TEST_CASE("sh: degree-1 contribution flips sign for antipodal views") {
    float dc[3] = {};
    float rest[45] = {};
    rest[0] = 0.05f;
    rest[1] = -0.03f;
    rest[2] = 0.02f;
    rest[15] = 0.01f;
    rest[30] = -0.04f;
    Vec3 d = Vec3{0.3, 0.9, -0.2}.normalized();
    auto plus = evaluate_sh(dc, rest, d, 1);
    auto minus = evaluate_sh(dc, rest, Vec3{-d.x, -d.y, -d.z}, 1);
    for (int c = 0; c < 3; ++c) {
        double p = plus[c] - 0.5, m = minus[c] - 0.5;
        CHECK(p == Catch::Approx(-m).margin(1e-12));
    }
}
