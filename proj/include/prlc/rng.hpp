#pragma once

#include <cmath>
#include <cstdint>

namespace prlc {

// xoshiro256++ seeded through SplitMix64.
//
// Stream derivation is deterministic and documented: a stream is identified by
// up to three 64-bit ids (chain, sweep, purpose). Each id is mixed into the
// SplitMix64 state before the four xoshiro words are drawn, so
// Rng(seed, chain, sweep) yields the same sequence on any thread layout.
// MCMC code derives one stream per (chain, sweep) and consumes it sequentially
// over edges/sites within the sweep.
class Rng {
  public:
    explicit Rng(uint64_t seed, uint64_t id1 = 0, uint64_t id2 = 0, uint64_t id3 = 0) {
        uint64_t x = seed;
        x = mix(x ^ (0x9e3779b97f4a7c15ULL * (id1 + 1)));
        x = mix(x ^ (0xbf58476d1ce4e5b9ULL * (id2 + 1)));
        x = mix(x ^ (0x94d049bb133111ebULL * (id3 + 1)));
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            w = mix(x);
        }
        if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0,1)
    double uniform() {
        return ((next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller (explicit, stdlib-independent for reproducibility)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(6.283185307179586477 * u2);
        have_spare_ = true;
        return m * std::cos(6.283185307179586477 * u2);
    }

    // uniform on the unit sphere S^2
    void unit_vector3(double out[3]) {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 6.283185307179586477);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        out[0] = r * std::cos(phi);
        out[1] = r * std::sin(phi);
        out[2] = z;
    }

    void state(uint64_t out[4]) const {
        for (int i = 0; i < 4; ++i) out[i] = s_[i];
    }
    void set_state(const uint64_t in[4]) {
        for (int i = 0; i < 4; ++i) s_[i] = in[i];
        have_spare_ = false;
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace prlc
