#pragma once

#include <cstdint>
#include <random>

#include "ltv/sysmodel.hpp"

namespace ltv {

/**
 * @brief Seeded sample source with a fully specified bit stream.
 *
 * state_{k+1} = 6364136223846793005 * state_k + 1442695040888963407  (mod 2^64),
 * state_0 = seed. Each draw advances the state once and maps it to
 * (state >> 11) * 2^-53 in [0, 1). Anything that consumes randomness goes
 * through here so other implementations can reproduce the samples exactly.
 */
class Lcg64 {
   public:
    explicit Lcg64(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Entries uniform in [-1, 1), then normalized; redrawn in the (measure-zero) all-zero case.
    Vector unit_vector(int n);
    /// Real parts first, then imaginary parts, each uniform in [-1, 1); normalized.
    CVector unit_cvector(int n);

   private:
    std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL, 1442695040888963407ULL, 0ULL> engine_;
};

inline Vector Lcg64::unit_vector(int n) {
    for (;;) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform(-1.0, 1.0);
        if (const double r = v.norm(); r > 0.0) return v / r;
    }
}

inline CVector Lcg64::unit_cvector(int n) {
    for (;;) {
        Vector re(n), im(n);
        for (int i = 0; i < n; ++i) re(i) = uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) im(i) = uniform(-1.0, 1.0);
        CVector v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(re(i), im(i));
        if (const double r = v.norm(); r > 0.0) return v / r;
    }
}

}  // namespace ltv
