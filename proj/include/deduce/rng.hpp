#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace deduce {

// splitmix64 finalizer; used to derive independent stream seeds from a base
// seed plus stage/epoch/batch tags so runs replay exactly.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = mix64(base ^ 0x6a09e667f3bcc909ULL);
    s = mix64(s ^ a);
    s = mix64(s ^ b);
    s = mix64(s ^ c);
    return s;
}

// Deterministic random stream. The engine is the standard-specified
// mt19937_64; the distribution transforms are written out here because the
// std::*_distribution adaptors are implementation-defined and would break
// bit-level reproducibility of saved runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller, pairs cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform index in [0, n); n must be > 0
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace deduce
