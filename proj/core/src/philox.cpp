#include "fiaplab/philox.hpp"

#include <stdexcept>

namespace fiaplab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(Philox4x32::Counter& ctr, const Philox4x32::Key& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(const Counter& counter, const Key& key) {
  Counter ctr = counter;
  Key k = key;
  round_once(ctr, k);
  for (int r = 1; r < 10; ++r) {
    k[0] += kWeyl0;
    k[1] += kWeyl1;
    round_once(ctr, k);
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint32_t run,
                           std::uint32_t step, StreamRole role)
    : key_{static_cast<std::uint32_t>(master_seed),
           static_cast<std::uint32_t>(master_seed >> 32)},
      counter_{0u, run, step, static_cast<std::uint32_t>(role)} {}

void RandomStream::refill() {
  buffer_ = Philox4x32::generate(counter_, key_);
  ++counter_[0];
  pos_ = 0;
}

std::uint32_t RandomStream::next_u32() {
  if (pos_ == 4) refill();
  return buffer_[pos_++];
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  const auto wide = static_cast<unsigned __int128>(next_u64());
  return static_cast<std::uint64_t>((wide * n) >> 64);
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint32_t run,
                           std::uint32_t step, StreamRole role) {
  return RandomStream(master_seed, run, step, role);
}

int sample_routing(int replica_count, int self, RandomStream& stream) {
  if (replica_count < 2) {
    throw std::invalid_argument("sample_routing: need at least two replicas");
  }
  const auto r = static_cast<int>(
      stream.uniform_index(static_cast<std::uint64_t>(replica_count - 1)));
  return r >= self ? r + 1 : r;
}

}  // namespace fiaplab
