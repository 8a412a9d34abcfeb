#pragma once

#include <cstdint>

namespace mdprl {

// Counter-based random stream: the value at position n is a pure function of
// (key, n), so draws can be addressed out of order and streams can be split
// into statistically independent children. Each solver run owns one stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    // Child stream with an independent key. Stable under the parent's key.
    RandomStream split(std::uint64_t index) const;

    std::uint64_t bits(std::uint64_t counter) const;

    // Uniform double in [0, 1).
    double u01(std::uint64_t counter) const;

    std::uint64_t key() const { return key_; }

private:
    struct raw_tag {};
    RandomStream(std::uint64_t key, raw_tag) : key_(key) {}

    std::uint64_t key_;
};

// Stateful cursor over a RandomStream for callers that just want a sequence.
class RandomSequence {
public:
    explicit RandomSequence(RandomStream stream, std::uint64_t start = 0)
        : stream_(stream), pos_(start) {}
    explicit RandomSequence(std::uint64_t seed) : stream_(seed), pos_(0) {}

    double next() { return stream_.u01(pos_++); }
    std::uint64_t position() const { return pos_; }
    void seek(std::uint64_t pos) { pos_ = pos; }
    const RandomStream& stream() const { return stream_; }

private:
    RandomStream stream_;
    std::uint64_t pos_;
};

}  // namespace mdprl
