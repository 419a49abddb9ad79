#ifndef WSETLAB_RNG_HPP
#define WSETLAB_RNG_HPP

#include <cstdint>

namespace wsetlab {

// Counter-based generator: every variate is a pure function of
// (seed, stream, index), so replications can run in any order or thread
// and still reproduce bit-identically.
namespace rng {

inline std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ (stream * 0xd6e8feb86659fd93ULL));
  h = splitmix(h ^ (index * 0xa0761d6478bd642fULL));
  return h;
}

/// Uniform draw in the open interval (0,1); safe to feed into quantile
/// functions (never returns 0 or 1 exactly).
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index) {
  std::uint64_t bits = key(seed, stream, index);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace rng
}  // namespace wsetlab

#endif
