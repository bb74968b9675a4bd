#ifndef JETCALC_MULTIINDEX_HPP
#define JETCALC_MULTIINDEX_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "jetcalc/rational.hpp"

namespace jetcalc {

/// A canonical multi-index over base coordinates 1..n: a sorted,
/// non-decreasing sequence of positive integers. The empty index is the
/// order-zero index. Instances are immutable values; every mutating
/// operation returns a fresh canonical copy.
class MultiIndex {
 public:
  MultiIndex() = default;

  /// Sorts the sequence and validates that every entry lies in 1..n.
  /// Throws InvalidIndex otherwise. Idempotent on already-sorted input.
  static MultiIndex canonicalize(std::vector<int> entries, int n);

  /// Builds from entries assumed in range; still sorts.
  static MultiIndex from_sorted_unchecked(std::vector<int> entries);

  int order() const { return static_cast<int>(m_entries.size()); }
  bool empty() const { return m_entries.empty(); }

  /// Multiplicity of the base index i in this multi-index.
  int count(int i) const;

  /// The canonical multi-index with one extra occurrence of i.
  MultiIndex append(int i) const;

  /// Removes one occurrence of i; throws InvalidIndex if absent.
  MultiIndex remove_one(int i) const;

  const std::vector<int>& entries() const { return m_entries; }
  int operator[](std::size_t pos) const { return m_entries[pos]; }

  bool operator==(const MultiIndex&) const = default;

  /// Total order: by length first, then lexicographically on the entries.
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  std::vector<int> m_entries;
};

/// Number of distinct orderings of J: |J|! / (r_1! ... r_n!). The inverse of
/// the normalization factor carried by the jet partial operators. weight of
/// the empty index is 1.
Rational weight(const MultiIndex& J);

/// All canonical multi-indices of length k over 1..n, lexicographically
/// ordered; the count is C(n+k-1, k).
std::vector<MultiIndex> enumerate(int n, int k);

/// All canonical multi-indices of length 0..k over 1..n, shortest first.
std::vector<MultiIndex> enumerate_up_to(int n, int k);

/// Renders as "[j1 j2 ... jk]"; the empty index renders as "[]".
std::string render(const MultiIndex& J);

/// A dense rational array over index tuples in {1..n}^rank, row-major.
/// The storage backing symmetrization projectors and the Fock sectors.
class DenseArray {
 public:
  DenseArray(int n, int rank);

  int n() const { return m_n; }
  int rank() const { return m_rank; }
  std::size_t size() const { return m_data.size(); }

  Rational& at(const std::vector<int>& tuple);
  const Rational& at(const std::vector<int>& tuple) const;

  Rational& operator[](std::size_t flat) { return m_data[flat]; }
  const Rational& operator[](std::size_t flat) const { return m_data[flat]; }

  std::size_t flat_index(const std::vector<int>& tuple) const;

  bool is_zero() const;
  bool operator==(const DenseArray&) const = default;

  DenseArray& operator+=(const DenseArray& other);
  DenseArray& operator-=(const DenseArray& other);
  DenseArray& operator*=(const Rational& scalar);

  /// Calls fn(tuple) for every tuple in {1..n}^rank in row-major order.
  template <typename Fn>
  static void for_each_tuple(int n, int rank, Fn&& fn) {
    std::vector<int> tuple(static_cast<std::size_t>(rank), 1);
    if (rank == 0) {
      fn(tuple);
      return;
    }
    while (true) {
      fn(tuple);
      int pos = rank - 1;
      while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == n) {
        tuple[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++tuple[static_cast<std::size_t>(pos)];
    }
  }

 private:
  int m_n = 1;
  int m_rank = 0;
  std::vector<Rational> m_data;
};

/// Image of the symmetrization projector over the named slot positions
/// (0-based). Idempotent.
DenseArray sym_project(const DenseArray& a, const std::vector<int>& slots);

/// Image of the antisymmetrization projector over the named slot positions
/// (0-based). Idempotent.
DenseArray antisym_project(const DenseArray& a, const std::vector<int>& slots);

}  // namespace jetcalc

#endif
