#pragma once

#include <array>
#include <cstdint>

namespace ghzlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every trial of a run owns the stream (master_seed, trial_index), so the
/// random numbers a trial consumes depend only on those two values, never on
/// execution order or worker count.
struct Philox4x32 {
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t prod0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t prod1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(prod0);
            const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(prod1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// Seeded random stream: key = master seed, counter = (block, stream index).
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          index_(stream_index) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(index_),
                                      static_cast<std::uint32_t>(index_ >> 32)},
                                     key_);
            ++block_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        const std::uint32_t a = next_u32();
        const std::uint32_t b = next_u32();
        constexpr double kInv53 = 1.0 / 9007199254740992.0; // 2^-53
        return ((a >> 5) * 67108864.0 + (b >> 6)) * kInv53;
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t index_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

} // namespace ghzlab
