#include "projstruct/rng.hpp"

namespace projstruct {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Vec standard_normal(Rng& rng, int n) {
    std::normal_distribution<double> z(0.0, 1.0);
    Vec out(n);
    for (int i = 0; i < n; ++i) out(i) = z(rng);
    return out;
}

}  // namespace projstruct
