#pragma once

#include <cmath>

#include "gscat/math.hpp"

namespace gscat {

/// Reduced-precision value grids used by the contribution-test arithmetic.
/// Fp16 is IEEE binary16 (1/5/10). Fp8 is E4M3 (1/4/3) with saturation:
/// out-of-range values clamp to the largest finite magnitude instead of
/// overflowing to infinity.
enum class FloatFormat { Fp16, Fp8E4M3 };

namespace detail {

struct FormatSpec {
    int mantissa_bits;
    int min_normal_exp;   // exponent of the smallest normal, base 2
    double max_finite;
};

inline constexpr FormatSpec kFp16Spec{10, -14, 65504.0};
inline constexpr FormatSpec kFp8Spec{3, -6, 448.0};

}  // namespace detail

/// Round a double onto the target format's value grid with round-to-nearest-even.
/// Subnormals are representable; results beyond the largest finite value
/// saturate. The result is returned as a double that is exactly on the grid,
/// so quantize(quantize(x)) == quantize(x).
inline double quantize(double x, FloatFormat fmt) {
    const detail::FormatSpec& spec = fmt == FloatFormat::Fp16 ? detail::kFp16Spec : detail::kFp8Spec;
    if (x == 0.0 || std::isnan(x)) return x;
    double a = std::abs(x);
    double sign = x < 0.0 ? -1.0 : 1.0;
    if (std::isinf(a)) return sign * spec.max_finite;

    int e2 = 0;
    std::frexp(a, &e2);      // a = f * 2^e2, f in [0.5, 1)
    int exp = e2 - 1;        // a in [2^exp, 2^(exp+1))
    if (exp < spec.min_normal_exp) exp = spec.min_normal_exp;
    // Grid spacing at this magnitude. a / quantum is an exact power-of-two
    // scaling, so the tie test below sees the true fraction.
    double quantum = std::ldexp(1.0, exp - spec.mantissa_bits);
    double r = round_half_even(a / quantum) * quantum;
    if (r > spec.max_finite) r = spec.max_finite;
    return sign * r;
}

inline double quantize_fp16(double x) { return quantize(x, FloatFormat::Fp16); }
inline double quantize_fp8(double x) { return quantize(x, FloatFormat::Fp8E4M3); }

}  // namespace gscat
