#pragma once

#include <array>
#include <cstdint>

#include "fxip/math/normal.hpp"

namespace fxip::math {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A block is fully determined by (key, counter); streams keyed by
/// (seed, path index) give reproducible draws independent of thread
/// scheduling.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    /// The 128-bit counter is (block_lo, block_hi, stream_lo, stream_hi).
    Block operator()(std::uint64_t block) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(block);
        std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
        std::uint32_t c2 = ctr2_;
        std::uint32_t c3 = ctr3_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9U;
            k1 += 0xBB67AE85U;
        }
        return {c0, c1, c2, c3};
    }

private:
    std::uint32_t key0_, key1_, ctr2_, ctr3_;
};

/// Sequential uniform/normal draws from one (seed, path) stream.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path)
        : gen_(seed, path), block_(0), pos_(2) {}

    /// Uniform on (0,1), endpoints excluded.
    double next_uniform() {
        if (pos_ >= 2) {
            vals_ = gen_(block_++);
            pos_ = 0;
        }
        const std::uint64_t hi = vals_[2 * pos_];
        const std::uint64_t lo = vals_[2 * pos_ + 1];
        ++pos_;
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard normal via the inverse CDF.
    double next_normal() { return normal_ppf(next_uniform()); }

private:
    Philox4x32 gen_;
    std::uint64_t block_;
    int pos_;
    Philox4x32::Block vals_{};
};

} // namespace fxip::math
