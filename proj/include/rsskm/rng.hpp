#ifndef RSSKM_RNG_HPP
#define RSSKM_RNG_HPP

#include <cstdint>
#include <random>

namespace rsskm {

/// SplitMix64 finalizer; used to derive seeds, never as a generator.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// Identifies a reproducible random stream. Identical (seed, stream_id)
/// pairs give identical draw sequences; substreams derive new ids.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t index) const noexcept {
    return {seed, hash_combine(stream_id, index + 1)};
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Engine plus the distributions the library draws from. Owns its state, so
/// one instance per stream and per thread.
class Rng {
public:
  explicit Rng(const RngStream& stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(stream.seed),
                      static_cast<std::uint32_t>(stream.seed >> 32),
                      static_cast<std::uint32_t>(stream.stream_id),
                      static_cast<std::uint32_t>(stream.stream_id >> 32)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  double exponential() { return exponential_(engine_); }
  double uniform() { return uniform_(engine_); }
  double gamma(double shape) {
    std::gamma_distribution<double> g(shape, 1.0);
    return g(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace rsskm

#endif // RSSKM_RNG_HPP
