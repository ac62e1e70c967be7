#pragma once

#include <cstdint>

namespace gscat {

/// PCG32 (pcg_oneseq_64_xsh_rr_32). Fixed algorithm so that identical seeds
/// give bit-identical streams on every platform; std:: distributions are
/// implementation-defined and are not used anywhere.
class Pcg32 {
  public:
    explicit Pcg32(std::uint64_t seed) : state_(0) {
        next();
        state_ += seed;
        next();
    }

    std::uint32_t next() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + 1442695040888963407ULL;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform double in [0, 1) with 32 bits of randomness.
    double uniform() { return next() * (1.0 / 4294967296.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(uniform() * n); }

  private:
    std::uint64_t state_;
};

inline constexpr const char* kRngAlgorithm = "pcg32";

}  // namespace gscat
