#include "riccap/rng.hpp"

namespace riccap {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

NormalStream::NormalStream(std::uint64_t master, std::uint64_t stream)
    : engine_(substream_seed(master, stream)), normal_(0.0, 1.0) {}

}  // namespace riccap
