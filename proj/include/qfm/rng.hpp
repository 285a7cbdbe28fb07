#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qfm {

// Counter-based stream derivation: every task (sample index, purpose tag)
// gets its own generator from the master seed, so results do not depend on
// scheduling or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed) {
        // warm up so trivially related seeds decorrelate
        for (int i = 0; i < 4; ++i) next_u64();
    }

    static Rng for_task(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t counter) {
        return Rng(splitmix64(splitmix64(master_seed ^ 0x6a09e667f3bcc908ULL) ^ splitmix64(stream) ^
                              splitmix64(counter * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() {
        s_ = splitmix64(s_);
        return s_;
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (deterministic, no library dependence)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t s_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qfm
