#pragma once

#include <cstdint>
#include <cmath>

namespace blm {

// Counter-based Philox4x32-10 stream (Salmon et al., SC 2011).
//
// A stream is addressed by (seed, stream_id): seed fills the key, stream_id
// the upper counter words. Draw order within a stream advances the lower
// counter words only, so streams never collide and any (seed, run index)
// pair yields the same numbers regardless of which thread consumes it.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream_id)),
          ctr3_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        if (++ctr0_ == 0) ++ctr1_;
        spare_ = (static_cast<std::uint64_t>(c2) << 32) | c3;
        have_spare_ = true;
        return (static_cast<std::uint64_t>(c0) << 32) | c1;
    }

    // Uniform on the open interval (0,1); never returns an exact 0 or 1,
    // so logs and reciprocals downstream stay finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform01()); }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    // Marsaglia polar method, one spare cached.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return normal_spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        normal_spare_ = v * f;
        have_normal_ = true;
        return u * f;
    }

    // Standard Cauchy by the polar rejection v/u on the unit half-disc
    // (acceptance rate pi/4, no trig calls).
    double cauchy() {
        double u, v;
        do {
            u = uniform01();
            v = 2.0 * uniform01() - 1.0;
        } while (u * u + v * v >= 1.0);
        return v / u;
    }

    // Standard symmetric alpha-stable variate, Chambers-Mallows-Stuck:
    // scale normalization E[exp(i t X)] = exp(-|t|^alpha).
    double sym_stable(double alpha) {
        if (alpha == 1.0) return cauchy();
        const double half_pi = 1.5707963267948966;
        const double v = half_pi * (2.0 * uniform01() - 1.0);
        const double w = exponential();
        const double a = alpha * v;
        const double t = std::sin(a) / std::pow(std::cos(v), 1.0 / alpha);
        const double s = std::pow(std::cos(v - a) / w, (1.0 - alpha) / alpha);
        return t * s;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint32_t key0_, key1_;
    std::uint32_t ctr0_ = 0, ctr1_ = 0, ctr2_, ctr3_;
    std::uint64_t spare_ = 0;
    double normal_spare_ = 0.0;
    bool have_spare_ = false;
    bool have_normal_ = false;
};

}  // namespace blm
