#pragma once

#include <cstdint>
#include <vector>

#include "epikl/field.hpp"

namespace epikl {

inline std::uint64_t ipow(std::uint64_t b, unsigned k) {
  std::uint64_t r = 1;
  while (k--) r *= b;
  return r;
}

// Points of P^{N-1}(F_q), each represented by the vector whose first
// nonzero coordinate is 1. Points are indexed 0..count-1: first by the
// position of the leading 1, then by the trailing coordinates read as a
// base-q number with the last coordinate least significant.
class ProjectiveSpace {
 public:
  ProjectiveSpace(std::uint32_t q, std::size_t N) : q_(q), N_(N) {
    if (N == 0) throw degenerate_input("projective space of a zero vector space");
    block_start_.resize(N + 1, 0);
    for (std::size_t k = 0; k < N; ++k) block_start_[k + 1] = block_start_[k] + ipow(q, static_cast<unsigned>(N - 1 - k));
  }

  std::uint64_t count() const { return block_start_[N_]; }
  std::size_t dim() const { return N_; }

  void decode(std::uint64_t index, std::vector<elem>& v) const {
    v.assign(N_, 0);
    std::size_t k = 0;
    while (index >= block_start_[k + 1]) ++k;
    std::uint64_t r = index - block_start_[k];
    v[k] = 1;
    for (std::size_t j = N_; j-- > k + 1;) {
      v[j] = static_cast<elem>(r % q_);
      r /= q_;
    }
  }

  // Advances v to the next point; returns false after the last one.
  bool next(std::vector<elem>& v) const {
    std::size_t k = 0;
    while (v[k] == 0) ++k;
    for (std::size_t j = N_; j-- > k + 1;) {
      if (++v[j] < q_) return true;
      v[j] = 0;
    }
    if (k + 1 >= N_) return false;
    v[k] = 0;
    v[k + 1] = 1;
    return true;
  }

 private:
  std::uint32_t q_;
  std::size_t N_;
  std::vector<std::uint64_t> block_start_;
};

// Splits [0, total) into `parts` contiguous ranges of near-equal size.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> split_range(std::uint64_t total, unsigned parts) {
  if (parts == 0) parts = 1;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (unsigned i = 0; i < parts; ++i) {
    const std::uint64_t b = total * i / parts, e = total * (i + 1) / parts;
    if (b < e) out.emplace_back(b, e);
  }
  return out;
}

}  // namespace epikl
