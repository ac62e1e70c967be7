#include <catch_amalgamated.hpp>

#include <cmath>

#include "gscat/quantize.hpp"
#include "gscat/rng.hpp"

using namespace gscat;

TEST_CASE("exactly representable values pass through") {
    for (double v : {0.0, 1.0, -1.0, 0.5, 1.5, 0.25, 65504.0, 2048.0}) {
        CHECK(quantize_fp16(v) == v);
    }
    for (double v : {0.0, 1.0, 1.125, -1.125, 448.0, 0.001953125 /* 2^-9 min subnormal */}) {
        CHECK(quantize_fp8(v) == v);
    }
}

TEST_CASE("fp8 rounds 1.1 to the nearest grid point 1.125") {
    CHECK(quantize_fp8(1.1) == 1.125);
    CHECK(quantize_fp8(-1.1) == -1.125);
}

TEST_CASE("ties round to even") {
    // fp8 grid near 1: {1.0, 1.125, ...}; 1.0625 is the midpoint.
    CHECK(quantize_fp8(1.0625) == 1.0);
    CHECK(quantize_fp8(1.1875) == 1.25);  // midpoint of 1.125 / 1.25, rounds to even mantissa
    // fp16 at 2048 has spacing 2.
    CHECK(quantize_fp16(2049.0) == 2048.0);
    CHECK(quantize_fp16(2051.0) == 2052.0);
}

TEST_CASE("saturation clamps to max finite") {
    CHECK(quantize_fp8(1.0e6) == 448.0);
    CHECK(quantize_fp8(-1.0e6) == -448.0);
    CHECK(quantize_fp8(460.0) == 448.0);   // rounds down within the top binade
    CHECK(quantize_fp8(465.0) == 448.0);   // would round up past the max: saturates
    CHECK(quantize_fp16(1.0e9) == 65504.0);
    CHECK(quantize_fp16(65520.0) == 65504.0);
}

TEST_CASE("subnormals") {
    double fp8_min = 0.001953125;  // 2^-9
    CHECK(quantize_fp8(fp8_min) == fp8_min);
    CHECK(quantize_fp8(fp8_min * 1.4) == fp8_min);
    CHECK(quantize_fp8(fp8_min / 2.0) == 0.0);  // tie with zero, even
    CHECK(quantize_fp8(fp8_min * 0.8) == fp8_min);
    double fp16_min = std::ldexp(1.0, -24);
    CHECK(quantize_fp16(fp16_min) == fp16_min);
    CHECK(quantize_fp16(fp16_min / 2.0) == 0.0);
}

TEST_CASE("idempotence and monotonicity on random values") {
    Pcg32 rng(7);
    double prev_x = -1e9, prev16 = quantize_fp16(prev_x), prev8 = quantize_fp8(prev_x);
    for (int i = 0; i < 20000; ++i) {
        double mag = std::ldexp(rng.uniform(0.5, 1.0), int(rng.below(40)) - 20);
        double x = rng.uniform() < 0.5 ? -mag : mag;
        double q16 = quantize_fp16(x);
        double q8 = quantize_fp8(x);
        CHECK(quantize_fp16(q16) == q16);
        CHECK(quantize_fp8(q8) == q8);

        if (x >= prev_x) {
            CHECK(q16 >= prev16);
            CHECK(q8 >= prev8);
        } else {
            CHECK(q16 <= prev16);
            CHECK(q8 <= prev8);
        }
        prev_x = x;
        prev16 = q16;
        prev8 = q8;
    }
}

TEST_CASE("rounding error bounded by half ulp") {
    Pcg32 rng(11);
    for (int i = 0; i < 5000; ++i) {
        double x = rng.uniform(-400.0, 400.0);
        double q = quantize_fp8(x);
        int e2;
        std::frexp(std::abs(x), &e2);
        double ulp = std::ldexp(1.0, std::max(e2 - 1, -6) - 3);
        CHECK(std::abs(q - x) <= ulp / 2.0 + 1e-18);
    }
}
