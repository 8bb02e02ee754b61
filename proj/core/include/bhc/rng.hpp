// rng.hpp — counter-based random streams for reproducible parallel ensembles.
//
// Every trajectory gets its own stream keyed by (root_seed, stream_id), so the
// draw sequence of trajectory i never depends on scheduling, worker count, or
// how many other trajectories exist. The generator is Philox4x64-10: the key
// selects a provably disjoint keystream and the 256-bit block counter walks it.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace bhc {

class Philox4x64 {
public:
    Philox4x64(std::uint64_t key0, std::uint64_t key1) : key_{key0, key1} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return block_[pos_++];
    }

private:
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

    static void mulhilo(std::uint64_t a, std::uint64_t b,
                        std::uint64_t& hi, std::uint64_t& lo) {
        const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    void refill() {
        std::array<std::uint64_t, 4> x = ctr_;
        std::uint64_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, x[0], hi0, lo0);
            mulhilo(kMul1, x[2], hi1, lo1);
            x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        block_ = x;
        if (++ctr_[0] == 0)
            if (++ctr_[1] == 0)
                if (++ctr_[2] == 0) ++ctr_[3];
        pos_ = 0;
    }

    std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> block_{};
    int pos_ = 4;
};

// One independent draw stream. Gaussians come from Box-Muller in fixed pairs,
// so the consumed uniform count per draw is deterministic.
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
        : gen_(root_seed, stream_id) {}

    std::uint64_t next_u64() { return gen_.next_u64(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_.next_u64() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

    // independent standard normals in both quadratures
    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    Philox4x64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bhc
