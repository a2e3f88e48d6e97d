#pragma once

#include <array>
#include <cstdint>

namespace fiaplab {

// Purpose a stream serves. Streams for distinct roles live on disjoint
// counter prefixes, so adding a consumer never perturbs existing draws.
enum class StreamRole : std::uint32_t {
  initial = 0,
  activation = 1,
  routing = 2,
  interaction = 3,
  exogenous = 4,
};

// Philox4x32-10 keyed counter permutation (Salmon et al., SC 2011).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(const Counter& counter, const Key& key);
};

// A reproducible random stream addressed by (master_seed, run, step, role).
//
// Derivation contract (archives depend on it; do not change):
//   key     = {low32(master_seed), high32(master_seed)}
//   counter = {block, run, step, role}
// where `block` enumerates successive 4-word outputs and the other three
// words stay fixed for the stream's lifetime. Distinct (run, step, role)
// triples therefore index disjoint counter ranges of the same keyed
// permutation and yield independent streams on any machine.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint32_t run, std::uint32_t step,
               StreamRole role);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform();

  // Uniform on {0, ..., n-1} via fixed-point scaling of one 64-bit draw;
  // the scaling bias is O(n / 2^64). Requires n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  void refill();

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter buffer_{};
  unsigned pos_ = 4;  // buffer exhausted
};

RandomStream derive_stream(std::uint64_t master_seed, std::uint32_t run,
                           std::uint32_t step, StreamRole role);

// Uniform replica index on {0,...,replica_count-1} \ {self} (0-based),
// realized as one draw on the reduced range plus a shift past `self`.
// Requires replica_count >= 2.
int sample_routing(int replica_count, int self, RandomStream& stream);

}  // namespace fiaplab
