#include "cpppkit/capture_histories.hpp"

#include <string>

#include "cpppkit/errors.hpp"

namespace cpppkit {

CaptureHistories::CaptureHistories(std::size_t occasions, std::vector<std::uint8_t> cells)
    : n_(0), k_(occasions), cells_(std::move(cells)) {
  if (k_ < 2) throw DomainError("capture histories need at least two occasions");
  if (cells_.empty() || cells_.size() % k_ != 0)
    throw DomainError("capture matrix size is not a positive multiple of the occasion count");
  n_ = cells_.size() / k_;
  first_.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::size_t first = k_;
    for (std::size_t t = 0; t < k_; ++t) {
      const auto v = cells_[i * k_ + t];
      if (v > 1) throw DomainError("capture matrix entries must be 0 or 1");
      if (v == 1 && first == k_) first = t;
    }
    if (first == k_) throw DomainError("individual " + std::to_string(i) + " has no capture");
    first_.push_back(first);
  }
  marray_ = build_marray(*this);
}

std::vector<std::int64_t> CaptureHistories::release_schedule() const {
  std::vector<std::int64_t> schedule(k_, 0);
  for (auto f : first_) ++schedule[f];
  return schedule;
}

MArray build_marray(const CaptureHistories& data) {
  const auto k = data.occasions();
  MArray m;
  m.occasions = k;
  m.releases.assign(k - 1, 0);
  m.recaptures.assign((k - 1) * k, 0);
  m.never_seen.assign(k - 1, 0);
  for (std::size_t i = 0; i < data.individuals(); ++i) {
    std::size_t last = data.first_capture(i);
    for (std::size_t t = last + 1; t < k; ++t) {
      if (!data.seen(i, t)) continue;
      ++m.releases[last];
      ++m.z(last, t);
      last = t;
    }
    if (last < k - 1) {
      ++m.releases[last];
      ++m.never_seen[last];
    }
  }
  return m;
}

}  // namespace cpppkit
