#pragma once

#include <cmath>
#include <cstdint>

// Philox4x32-10 counter-based generator. Each (master_seed, stream_id) pair
// gives an independent stream, so trajectories are reproducible and
// order-independent under any parallel schedule.

namespace qtherm {

class PhiloxRng {
  public:
    PhiloxRng(std::uint64_t master_seed, std::uint64_t stream_id)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (buf_pos_ >= 2) refill();
        return buf_[buf_pos_++];
    }

    // Uniform in (0, 1], 53-bit resolution.
    double next_double() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (deterministic across platforms).
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    void refill() {
        std::uint32_t x0 = counter_lo_;
        std::uint32_t x1 = static_cast<std::uint32_t>(counter_lo_ >> 32);
        std::uint32_t x2 = stream_lo_;
        std::uint32_t x3 = stream_hi_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * x0;
            const std::uint64_t p1 = 0xCD9E8D57ull * x2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        ++counter_lo_;
        buf_[0] = (static_cast<std::uint64_t>(x1) << 32) | x0;
        buf_[1] = (static_cast<std::uint64_t>(x3) << 32) | x2;
        buf_pos_ = 0;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t counter_lo_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int buf_pos_ = 2;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace qtherm
