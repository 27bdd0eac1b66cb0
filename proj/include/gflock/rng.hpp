#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "gflock/errors.hpp"

namespace gflock {

// Seeding discipline: every consumer of randomness owns a named stream
// derived from the master seed. Adding a consumer never perturbs the draws
// of existing streams.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t s = master ^ fnv1a64(name);
    // two mixing rounds so nearby master seeds land far apart
    splitmix64(s);
    return splitmix64(s);
}

// Deterministic random stream. Uniform and Gaussian draws are generated
// from raw engine words rather than std::*_distribution, whose output is
// implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t master, std::string_view name)
        : engine_(derive_stream_seed(master, name)) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // uniform index in {0, .., n-1}
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw degenerate_input("uniform_index: n must be positive");
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller without a cached spare, so the stream state is the engine
    // state alone (required for exact checkpoint round-trips).
    double gaussian(double mean, double stddev) {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void restore_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
        if (!is) throw integrity_error("rng state string failed to parse");
    }

    bool operator==(const RngStream& o) const { return engine_ == o.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace gflock
