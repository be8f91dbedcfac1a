#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace unimodal {

/// Sorted, finite univariate data. Immutable once built, so it can be shared
/// freely across worker threads.
class Sample {
 public:
  /// Validates (every value finite, at least one value) and sorts.
  static Sample from_values(std::vector<double> values,
                            std::size_t dropped_missing = 0);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t dropped_missing() const noexcept { return dropped_missing_; }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }
  double range() const noexcept { return max() - min(); }

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  Sample(std::vector<double> sorted, std::size_t dropped)
      : values_(std::move(sorted)), dropped_missing_(dropped) {}

  std::vector<double> values_;
  std::size_t dropped_missing_ = 0;
};

enum class HeaderMode { absent, present, detect };

/// Column chosen by 0-based index or by header name.
using ColumnSelector = std::variant<std::size_t, std::string>;

struct LoadOptions {
  std::optional<ColumnSelector> column;
  bool complete_case = false;
  /// 0 picks tab when the first line contains one, comma otherwise.
  char delimiter = 0;
  HeaderMode header = HeaderMode::detect;
};

/// Empty cells and NA / NaN (any case) count as missing.
bool is_missing_token(std::string_view cell) noexcept;

Sample load_sample(std::istream& in, const LoadOptions& options = {});
Sample load_sample(const std::filesystem::path& path,
                   const LoadOptions& options = {});

/// Standard deviation with denominator n - 1. Requires n >= 2.
double sample_sd(const Sample& s);
double sample_mean(std::span<const double> values) noexcept;

}  // namespace unimodal
