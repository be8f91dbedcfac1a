#include "unimodal/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace unimodal {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

// SplitMix64 finalizer, used only to derive stream words.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Rng::Rng(std::uint64_t seed) noexcept : Rng({seed, 0}, 0) {}

Rng::Rng(std::array<std::uint64_t, 2> key, std::uint64_t stream_index) noexcept
    : key_(key), stream_index_(stream_index) {}

Rng Rng::substream(std::uint64_t index) const noexcept {
  const std::uint64_t word = mix64(key_[1] + kWeyl0 * (index + 1)) ^ mix64(index);
  return Rng({key_[0], word}, index);
}

std::uint64_t Rng::next_u64() noexcept {
  if (buffer_pos_ == 4) {
    ++block_;
    buffer_ = philox4x64({block_, 0, 0, 0}, key_);
    buffer_pos_ = 0;
  }
  return buffer_[buffer_pos_++];
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t n) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::size_t>(p >> 64);
}

std::string Rng::dump() const {
  std::ostringstream os;
  os << "philox4x64-10 seed=" << key_[0] << " stream=" << stream_index_
     << " stream_word=0x" << std::hex << key_[1] << std::dec
     << " block=" << block_ << " buffer_pos=" << buffer_pos_
     << " spare_normal=" << (has_spare_normal_ ? 1 : 0);
  return os.str();
}

}  // namespace unimodal
