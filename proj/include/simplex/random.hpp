#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace simplex {

// Every random draw in the library flows through this engine. The generator
// is named and seedable so fitted models carry enough information to replay a
// chain bit-for-bit; only the raw 64-bit stream of mt19937_64 is consumed and
// all distributions are implemented here, which keeps traces identical across
// standard-library implementations.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64";

    explicit Rng(uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe to pass to log().
    double uniform01_open_left() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. No cached spare: one value per call so
    // the draw sequence stays a pure function of call order.
    double normal();

    // Gamma(shape, 1) via Marsaglia-Tsang, with the shape+1 boost for
    // shape < 1. shape must be positive.
    double gamma(double shape);

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

// Draws a point on the simplex. All entries of alpha must be strictly
// positive; the result is nonnegative and sums to 1 within 1e-12.
std::vector<double> sample_dirichlet(std::span<const double> alpha, Rng& rng);

// Draws an index with probability weights[i] / sum(weights). Weights are
// unnormalized; they must be nonnegative with at least one positive entry.
int32_t sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace simplex
