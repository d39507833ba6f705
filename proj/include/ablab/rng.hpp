#pragma once

#include <array>
#include <cstdint>

namespace ablab {

// Philox4x32-10 (Salmon et al., SC'11). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

enum class NoiseMode {
    standard,    ///< N(0,1) draws
    antithetic,  ///< negated draws (mirrored Brownian motion)
    silent,      ///< all draws are zero (drift-only runs)
};

/// One reproducible stream of standard normal draws.
///
/// The k-th draw depends only on (master_seed, stream_id, k): the master seed is
/// the Philox key and (k/2, stream_id) is the counter, so streams can be consumed
/// in any order and from any thread.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    NoiseMode mode = NoiseMode::standard;

    /// Random access to the index-th N(0,1) draw.
    [[nodiscard]] double normal(std::uint64_t index) const noexcept;

    /// 53-bit uniform on the open interval (0,1).
    [[nodiscard]] double uniform(std::uint64_t index) const noexcept;

    [[nodiscard]] RngStream mirrored() const noexcept;
    [[nodiscard]] RngStream silenced() const noexcept;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Sequential reader over an RngStream; caches the Box-Muller pair.
class NormalSequence {
public:
    explicit NormalSequence(const RngStream& stream, std::uint64_t start = 0) noexcept
        : stream_(stream), index_(start) {}

    double next() noexcept;

    [[nodiscard]] std::uint64_t position() const noexcept { return index_; }
    [[nodiscard]] const RngStream& stream() const noexcept { return stream_; }

private:
    RngStream stream_;
    std::uint64_t index_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<double, 2> cache_{};
};

/// Independent streams for the two coordinates of replica `replica`.
[[nodiscard]] inline std::array<RngStream, 2> replica_streams(std::uint64_t master_seed,
                                                              std::uint64_t replica) noexcept {
    return {RngStream{master_seed, 2 * replica, NoiseMode::standard},
            RngStream{master_seed, 2 * replica + 1, NoiseMode::standard}};
}

}  // namespace ablab
