#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace survlab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Position in the random number tree. A master seed picks the key; the stream
// id picks a disjoint counter range. child(i) derives independent sub-streams,
// so results do not depend on the order in which work is scheduled.
struct RngSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    RngSeed child(std::uint64_t index) const noexcept;
    bool operator==(const RngSeed&) const = default;
};

class RandomStream {
  public:
    using result_type = std::uint64_t;

    explicit RandomStream(RngSeed seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    // Standard normal (Box-Muller; the second variate is cached).
    double normal() noexcept;

    const RngSeed& seed() const noexcept { return seed_; }

  private:
    void refill() noexcept;

    RngSeed seed_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace survlab
