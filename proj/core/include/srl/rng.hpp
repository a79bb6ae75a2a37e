#pragma once

#include <array>
#include <cstdint>

namespace srl {

/// Philox4x32-10 counter-based generator. Every (seed, stream) pair names an
/// independent sequence, so a chunk of paths draws the same numbers no matter
/// which worker runs it.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static Block encrypt(Block counter, std::array<std::uint32_t, 2> key);

    std::uint32_t next_u32();

    using result_type = std::uint32_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xFFFFFFFFu; }
    result_type operator()() { return next_u32(); }

    /// Uniform on (0, 1) with 53 random bits; never returns 0.
    double next_uniform();
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double next_normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint32_t, 2> key_;
    std::uint64_t counter_ = 0;
    Block buffer_{};
    int index_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace srl
