#include "rng.hpp"

namespace mdprl {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// Finalizer from splitmix64 (Steele, Lea, Flood 2014).
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

RandomStream RandomStream::split(std::uint64_t index) const {
    // Derive the child key through a second mixing pass so that parent draws
    // and child draws never reuse counter positions.
    std::uint64_t child = mix(key_ ^ mix((index + 1) * kGamma));
    return RandomStream(child, raw_tag{});
}

std::uint64_t RandomStream::bits(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGamma);
}

double RandomStream::u01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

}  // namespace mdprl
