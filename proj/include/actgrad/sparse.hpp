#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace actgrad {

/**
 * Sparse real-valued vector. Entries are (index, value) pairs with strictly
 * increasing indices, all indices < dim, and no stored zeros. Backs every
 * feature/parameter interaction in the linear agents.
 */
struct SparseVec {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::uint32_t dim = 0;

  SparseVec() = default;
  explicit SparseVec(std::uint32_t dimension) : dim(dimension) {}

  static SparseVec one_hot(std::uint32_t index, std::uint32_t dimension) {
    if (index >= dimension)
      throw std::invalid_argument("SparseVec::one_hot: index out of range");
    SparseVec v(dimension);
    v.entries.emplace_back(index, 1.0);
    return v;
  }

  std::size_t nnz() const { return entries.size(); }
};

/// Throws std::invalid_argument if the representation invariants are broken.
inline void validate(const SparseVec& v) {
  if (v.dim == 0 && !v.entries.empty())
    throw std::invalid_argument("SparseVec: entries in zero-dimensional vector");
  std::uint32_t prev = 0;
  bool first = true;
  for (const auto& [idx, val] : v.entries) {
    if (idx >= v.dim) throw std::invalid_argument("SparseVec: index out of range");
    if (!first && idx <= prev)
      throw std::invalid_argument("SparseVec: indices not strictly increasing");
    if (val == 0.0) throw std::invalid_argument("SparseVec: stored zero entry");
    if (!std::isfinite(val)) throw std::invalid_argument("SparseVec: non-finite entry");
    prev = idx;
    first = false;
  }
}

/// Builds a SparseVec from possibly unsorted/duplicated terms; merges
/// duplicates and drops exact zeros.
inline SparseVec make_sparse(std::uint32_t dim,
                             std::vector<std::pair<std::uint32_t, double>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec v(dim);
  v.entries.reserve(terms.size());
  for (const auto& [idx, val] : terms) {
    if (idx >= dim) throw std::invalid_argument("make_sparse: index out of range");
    if (!v.entries.empty() && v.entries.back().first == idx)
      v.entries.back().second += val;
    else
      v.entries.emplace_back(idx, val);
  }
  std::erase_if(v.entries, [](const auto& e) { return e.second == 0.0; });
  return v;
}

inline double dot(const SparseVec& a, const SparseVec& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else { acc += ia->second * ib->second; ++ia; ++ib; }
  }
  return acc;
}

inline double dot(std::span<const double> dense, const SparseVec& s) {
  if (dense.size() != s.dim) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (const auto& [idx, val] : s.entries) acc += dense[idx] * val;
  return acc;
}

/// dense += c * s
inline void axpy(std::vector<double>& dense, double c, const SparseVec& s) {
  if (dense.size() != s.dim) throw std::invalid_argument("axpy: dimension mismatch");
  if (c == 0.0) return;
  for (const auto& [idx, val] : s.entries) dense[idx] += c * val;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace actgrad
