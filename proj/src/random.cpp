#include "esgport/random.hpp"

#include <cmath>
#include <numbers>

namespace esgport {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block ctr) const noexcept {
    auto key = key_;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

std::uint32_t RandomStream::next_word() noexcept {
    if (used_ == 4) {
        block_ = gen_({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
        ++counter_;
        used_ = 0;
    }
    return block_[used_++];
}

double RandomStream::uniform() noexcept {
    const std::uint64_t hi = next_word() >> 5;  // 27 bits
    const std::uint64_t lo = next_word() >> 6;  // 26 bits
    const std::uint64_t bits = (hi << 26) | lo;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double sample_inverse_gaussian(RandomStream& rng, double mean, double shape) noexcept {
    const double n = rng.normal();
    const double y = n * n;
    if (y == 0.0) return mean;
    const double my = mean * y;
    const double root = std::sqrt(my * my + 4.0 * mean * shape * y);
    const double x = mean * 4.0 * mean * shape * y / ((root + my) * (root + my));
    const double u = rng.uniform();
    return u <= mean / (mean + x) ? x : mean * mean / x;
}

}  // namespace esgport
