#pragma once

#include <array>
#include <cstdint>

#include "hardedge/errors.hpp"

namespace hardedge {

/// Philox4x64-10 block function (Salmon et al.), the counter-based core of
/// every random stream in this project.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// A deterministic stream of variates identified by (seed, stream_id, lane).
///
/// The Philox key is (seed, stream_id); the counter is (block, lane, 0, 0).
/// Streams are plain values: copying one forks an independent replay of the
/// same sequence, and no state is shared between copies. Monte Carlo drivers
/// hand task i the stream (seed, base + i), so results never depend on how
/// tasks are scheduled. Lanes give a task extra, non-overlapping sequences
/// (for example bridge refinements alongside the base increments).
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t lane = 0);

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }
    std::uint64_t lane() const { return lane_; }

    /// Same (seed, stream_id), different lane.
    RandomStream with_lane(std::uint64_t lane) const { return {key_[0], key_[1], lane}; }

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal (Box-Muller; the second variate of each pair is cached).
    double gaussian();

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t lane_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    int buffer_pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Assigns streams to tasks: task i always receives stream (seed, base + i).
struct StreamFamily {
    std::uint64_t seed = 0;
    std::uint64_t base = 0;

    RandomStream stream(std::uint64_t task, std::uint64_t lane = 0) const {
        return RandomStream(seed, base + task, lane);
    }
    /// A disjoint family for a sub-experiment; tags occupy the top 24 bits.
    StreamFamily sub(std::uint64_t tag) const { return {seed, base + (tag << 40)}; }
};

/// Chi index r > 0.
class ChiIndex {
public:
    explicit ChiIndex(double r) : r_(r) {
        detail::require(r > 0.0, "chi index must be positive");
    }
    double value() const { return r_; }

private:
    double r_;
};

double sample_gaussian(RandomStream& stream);

/// Gamma(shape, scale = 1), exact for every shape > 0: Marsaglia-Tsang for
/// shape >= 1 and the U^(1/shape) boost below that.
double sample_gamma(double shape, RandomStream& stream);

/// chi_r = sqrt(2 * Gamma(r / 2)).
double sample_chi(ChiIndex r, RandomStream& stream);

/// E[chi_r^p] = 2^(p/2) Gamma((r + p) / 2) / Gamma(r / 2), for p > -r.
double chi_moment(double r, double p);

}  // namespace hardedge
