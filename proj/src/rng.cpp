#include "crowder/rng.hpp"

namespace crowder {

std::uint64_t Rng::below(std::uint64_t n)
{
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % n;
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag)
{
    Rng mix(parent ^ fnv1a(tag));
    return mix();
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index)
{
    Rng mix(parent + 0x632be59bd9b4e019ULL * (index + 1));
    return mix();
}

}  // namespace crowder
