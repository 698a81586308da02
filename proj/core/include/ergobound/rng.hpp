#pragma once

#include <array>
#include <cstdint>

namespace ergobound {

/// Philox4x32-10 counter-based bijection (Random123 family).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(Key key) : key_(key) {}

    Counter operator()(Counter ctr) const;

private:
    Key key_;
};

/// Random stream for one simulated path. Its output is a pure function of
/// (seed, path_index), independent of how many other paths exist or the
/// order they run in.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t path_index);

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::uint64_t next_u64();

    Philox4x32 bijection_;
    std::uint64_t path_index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_words_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ergobound
