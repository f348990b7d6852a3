#pragma once

// Frozen reference data shared by the unit and acceptance suites. The
// valuations are the exact seed-42 generator output; the scalars below were
// recomputed independently at high precision and must be reproduced by the
// library to the stated tolerances.

#include <array>
#include <cstdint>

namespace golden {

inline constexpr std::uint64_t kSeed = 42;
inline constexpr double kMinValue = 0.0215;
inline constexpr double kResourceA = 15.0;
inline constexpr double kResourceB = 10.0;
inline constexpr double kSmoothing = 50.0;

inline constexpr std::array<double, 10> kValues = {
    0.17902564895600317,  0.15319539728763884,  0.15267041021066768,
    0.13294392064996544,  0.12170222479621637,  0.086529774106829271,
    0.069262291423538125, 0.045265283345287927, 0.037905049223853196,
    0.021499999999999998,
};

// (n-1)/sqrt(v_n (2n-1)) for n = 10, v_n = 0.0215.
inline constexpr double kTermHessian = 14.081420869666893;

}  // namespace golden
