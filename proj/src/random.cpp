#include "simplex/random.hpp"

#include <cmath>
#include <numbers>

#include "simplex/errors.hpp"

namespace simplex {

double Rng::normal() {
    const double u1 = uniform01_open_left();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^(1/a); may underflow to 0 for tiny shapes,
        // which the Dirichlet normalization below tolerates.
        const double boosted = gamma(shape + 1.0);
        return boosted * std::pow(uniform01_open_left(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01_open_left();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> sample_dirichlet(std::span<const double> alpha, Rng& rng) {
    if (alpha.empty()) throw NumericError("sample_dirichlet: empty parameter vector");
    for (double a : alpha) {
        if (!(a > 0.0)) throw NumericError("sample_dirichlet: nonpositive parameter");
    }
    std::vector<double> out(alpha.size());
    // With very small shapes every gamma draw can underflow to zero; retry on
    // a fresh slice of the stream rather than divide by zero.
    for (int attempt = 0; attempt < 100; ++attempt) {
        double total = 0.0;
        for (size_t i = 0; i < alpha.size(); ++i) {
            out[i] = rng.gamma(alpha[i]);
            total += out[i];
        }
        if (total > 0.0) {
            for (double& x : out) x /= total;
            return out;
        }
    }
    throw NumericError("sample_dirichlet: all gamma draws underflowed");
}

int32_t sample_categorical(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw NumericError("sample_categorical: empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw NumericError("sample_categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw NumericError("sample_categorical: all weights zero");
    const double u = rng.uniform01() * total;
    double cum = 0.0;
    int32_t last_positive = -1;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int32_t>(i);
        cum += weights[i];
        if (u < cum) return last_positive;
    }
    return last_positive;  // u == total up to rounding
}

}  // namespace simplex
