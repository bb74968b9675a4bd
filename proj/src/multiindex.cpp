#include "jetcalc/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "jetcalc/errors.hpp"

namespace jetcalc {

Rational factorial(int n) {
  Integer acc = 1;
  for (int i = 2; i <= n; ++i) acc *= i;
  return Rational(acc);
}

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return Rational(0);
  Integer acc = 1;
  for (int i = 0; i < k; ++i) {
    acc *= (n - i);
    acc /= (i + 1);  // exact: product of i+1 consecutive integers
  }
  return Rational(acc);
}

std::string to_string(const Rational& value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

MultiIndex MultiIndex::canonicalize(std::vector<int> entries, int n) {
  for (int e : entries) {
    if (e < 1 || e > n) {
      throw InvalidIndex("multi-index entry " + std::to_string(e) +
                         " out of range 1.." + std::to_string(n));
    }
  }
  std::sort(entries.begin(), entries.end());
  MultiIndex result;
  result.m_entries = std::move(entries);
  return result;
}

MultiIndex MultiIndex::from_sorted_unchecked(std::vector<int> entries) {
  std::sort(entries.begin(), entries.end());
  MultiIndex result;
  result.m_entries = std::move(entries);
  return result;
}

int MultiIndex::count(int i) const {
  return static_cast<int>(
      std::count(m_entries.begin(), m_entries.end(), i));
}

MultiIndex MultiIndex::append(int i) const {
  std::vector<int> entries = m_entries;
  entries.insert(std::upper_bound(entries.begin(), entries.end(), i), i);
  MultiIndex result;
  result.m_entries = std::move(entries);
  return result;
}

MultiIndex MultiIndex::remove_one(int i) const {
  auto it = std::find(m_entries.begin(), m_entries.end(), i);
  if (it == m_entries.end()) {
    throw InvalidIndex("multi-index " + jetcalc::render(*this) +
                       " has no entry " + std::to_string(i));
  }
  std::vector<int> entries = m_entries;
  entries.erase(entries.begin() + (it - m_entries.begin()));
  MultiIndex result;
  result.m_entries = std::move(entries);
  return result;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = m_entries.size() <=> other.m_entries.size(); c != 0) return c;
  for (std::size_t i = 0; i < m_entries.size(); ++i) {
    if (auto c = m_entries[i] <=> other.m_entries[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

Rational weight(const MultiIndex& J) {
  Rational result = factorial(J.order());
  int prev = 0;
  int run = 0;
  for (int e : J.entries()) {
    if (e == prev) {
      ++run;
    } else {
      result /= factorial(run);
      prev = e;
      run = 1;
    }
  }
  result /= factorial(run);
  return result;
}

namespace {

void enumerate_rec(int n, int k, int low, std::vector<int>& current,
                   std::vector<MultiIndex>& out) {
  if (k == 0) {
    out.push_back(MultiIndex::from_sorted_unchecked(current));
    return;
  }
  for (int i = low; i <= n; ++i) {
    current.push_back(i);
    enumerate_rec(n, k - 1, i, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate(int n, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> current;
  enumerate_rec(n, k, 1, current, out);
  return out;
}

std::vector<MultiIndex> enumerate_up_to(int n, int k) {
  std::vector<MultiIndex> out;
  for (int len = 0; len <= k; ++len) {
    auto level = enumerate(n, len);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::string render(const MultiIndex& J) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < J.entries().size(); ++i) {
    if (i) out << ' ';
    out << J.entries()[i];
  }
  out << ']';
  return out.str();
}

DenseArray::DenseArray(int n, int rank) : m_n(n), m_rank(rank) {
  std::size_t total = 1;
  for (int i = 0; i < rank; ++i) total *= static_cast<std::size_t>(n);
  m_data.assign(total, Rational(0));
}

std::size_t DenseArray::flat_index(const std::vector<int>& tuple) const {
  std::size_t flat = 0;
  for (int e : tuple) flat = flat * static_cast<std::size_t>(m_n) +
                             static_cast<std::size_t>(e - 1);
  return flat;
}

Rational& DenseArray::at(const std::vector<int>& tuple) {
  return m_data[flat_index(tuple)];
}

const Rational& DenseArray::at(const std::vector<int>& tuple) const {
  return m_data[flat_index(tuple)];
}

bool DenseArray::is_zero() const {
  for (const auto& v : m_data) {
    if (v != 0) return false;
  }
  return true;
}

DenseArray& DenseArray::operator+=(const DenseArray& other) {
  for (std::size_t i = 0; i < m_data.size(); ++i) m_data[i] += other.m_data[i];
  return *this;
}

DenseArray& DenseArray::operator-=(const DenseArray& other) {
  for (std::size_t i = 0; i < m_data.size(); ++i) m_data[i] -= other.m_data[i];
  return *this;
}

DenseArray& DenseArray::operator*=(const Rational& scalar) {
  for (auto& v : m_data) v *= scalar;
  return *this;
}

namespace {

DenseArray project(const DenseArray& a, const std::vector<int>& slots,
                   bool signed_perm) {
  DenseArray result(a.n(), a.rank());
  std::vector<int> perm(slots.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rational norm = factorial(static_cast<int>(slots.size()));
  DenseArray::for_each_tuple(a.n(), a.rank(), [&](const std::vector<int>& t) {
    Rational acc(0);
    std::vector<int> permuted = t;
    std::vector<int> p = perm;
    // Iterate permutations in lexicographic order, tracking parity directly.
    do {
      int inversions = 0;
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
          if (p[i] > p[j]) ++inversions;
      for (std::size_t i = 0; i < slots.size(); ++i)
        permuted[static_cast<std::size_t>(slots[i])] =
            t[static_cast<std::size_t>(slots[static_cast<std::size_t>(
                p[i])])];
      Rational term = a.at(permuted);
      if (signed_perm && (inversions % 2)) term = -term;
      acc += term;
    } while (std::next_permutation(p.begin(), p.end()));
    result.at(t) = acc / norm;
  });
  return result;
}

}  // namespace

DenseArray sym_project(const DenseArray& a, const std::vector<int>& slots) {
  return project(a, slots, false);
}

DenseArray antisym_project(const DenseArray& a, const std::vector<int>& slots) {
  return project(a, slots, true);
}

}  // namespace jetcalc
