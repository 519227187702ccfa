#pragma once
#include <cmath>
#include <cstdint>
#include <random>

namespace hrf {

// Seeded generator with a hand-rolled Box-Muller transform so that
// streams are reproducible across standard library implementations
// (std::normal_distribution is not pinned by the standard).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0,1)
        return (eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0, u2 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

}  // namespace hrf
