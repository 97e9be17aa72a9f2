#pragma once

#include "siga/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace siga::detail {

/// Seeded source of circularly-symmetric complex Gaussians.
class ComplexGaussian {
public:
    explicit ComplexGaussian(std::uint64_t seed) : engine_(seed) {}

    /// One CN(0, variance) draw.
    Complex operator()(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    /// Unit-magnitude phase of a standard complex Gaussian draw.
    Complex phase() {
        for (;;) {
            const Complex c = (*this)();
            const double r = std::abs(c);
            if (r > 0.0) {
                return c / r;
            }
        }
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace siga::detail
