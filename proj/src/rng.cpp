#include "hardedge/rng.hpp"

#include <cmath>
#include <numbers>

namespace hardedge {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    __extension__ using u128 = unsigned __int128;
    const u128 product = static_cast<u128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t lane)
    : key_{seed, stream_id}, lane_(lane) {}

void RandomStream::refill() {
    buffer_ = philox4x64({block_, lane_, 0, 0}, key_);
    ++block_;
    buffer_pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (buffer_pos_ == 4) refill();
    return buffer_[buffer_pos_++];
}

double RandomStream::uniform() {
    constexpr double kInv53 = 1.0 / 9007199254740992.0;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kInv53;
}

double RandomStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double sample_gaussian(RandomStream& stream) { return stream.gaussian(); }

double sample_gamma(double shape, RandomStream& stream) {
    detail::require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive");
    if (shape < 1.0) {
        // Gamma(s) = Gamma(s + 1) * U^(1/s); done in log space so tiny shapes
        // do not underflow before the square root in sample_chi.
        const double g = sample_gamma(shape + 1.0, stream);
        const double log_u = std::log(stream.uniform());
        return std::exp(std::log(g) + log_u / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = stream.gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_chi(ChiIndex r, RandomStream& stream) {
    return std::sqrt(2.0 * sample_gamma(0.5 * r.value(), stream));
}

double chi_moment(double r, double p) {
    detail::require(r > 0.0 && p > -r, "chi moment needs r > 0 and p > -r");
    return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (r + p)) - std::lgamma(0.5 * r));
}

}  // namespace hardedge
