#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace unimodal {

/// Philox4x64-10 block function (Salmon et al., Random123).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

/// Counter-based random source.
///
/// The Philox key is (master seed, stream word); the block counter walks the
/// stream. Substream i of a generator is a pure function of its parent's key
/// and i, so replication i of a parallel loop draws the same numbers whatever
/// thread runs it. A generator is single-owner; hand each worker its own
/// substream instead of sharing one.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  Rng substream(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal (Box-Muller, pairs cached).
  double normal() noexcept;
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) noexcept;

  std::uint64_t master_seed() const noexcept { return key_[0]; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }
  std::uint64_t stream_word() const noexcept { return key_[1]; }
  std::uint64_t block() const noexcept { return block_; }

  /// One-line printable state, e.g. for --show-seed.
  std::string dump() const;

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  Rng(std::array<std::uint64_t, 2> key, std::uint64_t stream_index) noexcept;

  std::array<std::uint64_t, 2> key_;
  std::uint64_t stream_index_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned buffer_pos_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace unimodal
