#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cpppkit {

/// Capture-recapture summary. Occasions are 0-based here: a release at
/// occasion s (s < k-1) is followed by its first recapture at t > s, or by
/// never being seen again.
struct MArray {
  std::size_t occasions = 0;                 // k
  std::vector<std::int64_t> releases;        // R_s, size k-1
  std::vector<std::int64_t> recaptures;      // z_st row-major, (k-1) x k, zero for t <= s
  std::vector<std::int64_t> never_seen;      // size k-1

  [[nodiscard]] std::int64_t z(std::size_t s, std::size_t t) const { return recaptures[s * occasions + t]; }
  std::int64_t& z(std::size_t s, std::size_t t) { return recaptures[s * occasions + t]; }
};

/// n x k binary sighting matrix. Construction validates that every history
/// has at least one capture and records the first-capture occasion; the
/// m-array is built once and cached since every discrepancy evaluation needs it.
class CaptureHistories {
public:
  CaptureHistories(std::size_t occasions, std::vector<std::uint8_t> cells);

  [[nodiscard]] std::size_t individuals() const noexcept { return n_; }
  [[nodiscard]] std::size_t occasions() const noexcept { return k_; }
  [[nodiscard]] bool seen(std::size_t i, std::size_t t) const { return cells_[i * k_ + t] != 0; }
  [[nodiscard]] std::size_t first_capture(std::size_t i) const { return first_[i]; }
  [[nodiscard]] const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }
  [[nodiscard]] const MArray& marray() const noexcept { return marray_; }

  /// Number of individuals first captured at each occasion.
  [[nodiscard]] std::vector<std::int64_t> release_schedule() const;

private:
  std::size_t n_;
  std::size_t k_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> first_;
  MArray marray_;
};

MArray build_marray(const CaptureHistories& data);

}  // namespace cpppkit
