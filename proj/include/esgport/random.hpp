#pragma once

#include <array>
#include <cstdint>

namespace esgport {

/// Philox4x32-10 counter-based generator. A (key, counter) pair maps to a
/// fixed 128-bit block, so independent streams need no shared state.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    Block operator()(Block counter) const noexcept;

private:
    std::array<std::uint32_t, 2> key_;
};

/// Sequential draws from one Philox stream. `stream` selects an independent
/// substream (e.g. a scenario index), so results do not depend on the order in
/// which streams are consumed.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed), stream_(stream) {}

    /// Uniform on the open interval (0,1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller.
    double normal() noexcept;

private:
    std::uint32_t next_word() noexcept;

    Philox4x32 gen_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Philox4x32::Block block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Inverse Gaussian draw with the given mean and shape (Michael, Schucany and
/// Haas transformation).
double sample_inverse_gaussian(RandomStream& rng, double mean, double shape) noexcept;

}  // namespace esgport
