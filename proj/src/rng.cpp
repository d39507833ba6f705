#include "ablab/rng.hpp"

#include <cmath>
#include <numbers>

namespace ablab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::array<double, 2> box_muller(const RngStream& stream, std::uint64_t block) noexcept {
    const PhiloxCounter counter{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                static_cast<std::uint32_t>(stream.stream_id),
                                static_cast<std::uint32_t>(stream.stream_id >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(stream.master_seed),
                        static_cast<std::uint32_t>(stream.master_seed >> 32)};
    const auto bits = philox4x32(counter, key);
    const double u1 = to_open_unit(bits[0], bits[1]);
    const double u2 = to_open_unit(bits[2], bits[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline double apply_mode(NoiseMode mode, double z) noexcept {
    switch (mode) {
        case NoiseMode::antithetic:
            return -z;
        case NoiseMode::silent:
            return 0.0;
        case NoiseMode::standard:
            break;
    }
    return z;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

double RngStream::normal(std::uint64_t index) const noexcept {
    if (mode == NoiseMode::silent) return 0.0;
    const auto pair = box_muller(*this, index / 2);
    return apply_mode(mode, pair[index % 2]);
}

double RngStream::uniform(std::uint64_t index) const noexcept {
    const PhiloxCounter counter{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    // Distinct key schedule from normal(): flip the high key word.
    const PhiloxKey key{static_cast<std::uint32_t>(master_seed),
                        ~static_cast<std::uint32_t>(master_seed >> 32)};
    const auto bits = philox4x32(counter, key);
    return to_open_unit(bits[0], bits[1]);
}

RngStream RngStream::mirrored() const noexcept {
    RngStream out = *this;
    out.mode = mode == NoiseMode::antithetic ? NoiseMode::standard : NoiseMode::antithetic;
    if (mode == NoiseMode::silent) out.mode = NoiseMode::silent;
    return out;
}

RngStream RngStream::silenced() const noexcept {
    RngStream out = *this;
    out.mode = NoiseMode::silent;
    return out;
}

double NormalSequence::next() noexcept {
    const std::uint64_t index = index_++;
    if (stream_.mode == NoiseMode::silent) return 0.0;
    const std::uint64_t block = index / 2;
    if (block != cached_block_) {
        cache_ = box_muller(stream_, block);
        cached_block_ = block;
    }
    return apply_mode(stream_.mode, cache_[index % 2]);
}

}  // namespace ablab
