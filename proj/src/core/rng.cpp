#include "tanksched/util/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tanksched {

double Rng::next_normal() {
    // u1 in (0,1]: shift away from zero so log() is safe.
    double u1 = 1.0 - next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double Rng::next_truncated_normal(double sigma, double bound) {
    if (sigma <= 0.0) throw std::invalid_argument("truncated normal: sigma must be > 0");
    if (bound <= 0.0) throw std::invalid_argument("truncated normal: bound must be > 0");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        double x = sigma * next_normal();
        if (x >= -bound && x <= bound) return x;
    }
    // Unreachable for any sane sigma/bound ratio; guards a pathological config.
    throw std::runtime_error("truncated normal: rejection sampling did not terminate");
}

}  // namespace tanksched
