#include "jetcalc/fock.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "jetcalc/linalg.hpp"

namespace jetcalc {

void validate(const FockShape& shape) {
  if (shape.n < 1) throw ShapeError("index range must have n >= 1");
  if (shape.k < 0) throw ShapeError("fermionic degree must be >= 0");
  for (int r : shape.bosons)
    if (r < 0) throw ShapeError("bosonic degrees must be >= 0");
}

FockTensor::FockTensor(FockShape shape)
    : m_shape(std::move(shape)), m_components(m_shape.n, m_shape.rank()) {
  validate(m_shape);
}

FockTensor FockTensor::scalar(int n, const Rational& value) {
  FockTensor t(FockShape{n, 0, {}});
  t.m_components[0] = value;
  return t;
}

FockTensor FockTensor::from_components(FockShape shape,
                                       DenseArray components) {
  validate(shape);
  if (components.n() != shape.n || components.rank() != shape.rank())
    throw ShapeError("component array does not match the shape");
  if (shape.k > 1) {
    std::vector<int> slots(shape.k);
    for (int i = 0; i < shape.k; ++i) slots[i] = i;
    components = antisym_project(components, slots);
  }
  for (int alpha = 1; alpha <= shape.groups(); ++alpha) {
    int r = shape.bosons[alpha - 1];
    if (r <= 1) continue;
    std::vector<int> slots(r);
    for (int i = 0; i < r; ++i) slots[i] = shape.group_offset(alpha) + i;
    components = sym_project(components, slots);
  }
  return FockTensor(std::move(shape), std::move(components));
}

FockTensor FockTensor::operator+(const FockTensor& other) const {
  if (m_shape != other.m_shape)
    throw ShapeError("tensor sum requires matching shapes");
  FockTensor out = *this;
  out.m_components += other.m_components;
  return out;
}

FockTensor FockTensor::operator-(const FockTensor& other) const {
  if (m_shape != other.m_shape)
    throw ShapeError("tensor difference requires matching shapes");
  FockTensor out = *this;
  out.m_components -= other.m_components;
  return out;
}

FockTensor FockTensor::scaled(const Rational& c) const {
  FockTensor out = *this;
  out.m_components *= c;
  return out;
}

namespace {

void check_index(int l, int n) {
  if (l < 1 || l > n) throw InvalidIndex("operator index outside 1..n");
}

void check_group(int alpha, const FockShape& shape) {
  if (alpha < 1 || alpha > shape.groups())
    throw InvalidIndex("bosonic group index outside the shape");
}

std::vector<int> without_slot(const std::vector<int>& tuple, int slot) {
  std::vector<int> out;
  out.reserve(tuple.size() - 1);
  for (std::size_t i = 0; i < tuple.size(); ++i)
    if (static_cast<int>(i) != slot) out.push_back(tuple[i]);
  return out;
}

std::vector<int> with_slot(const std::vector<int>& tuple, int slot,
                           int value) {
  std::vector<int> out;
  out.reserve(tuple.size() + 1);
  out.insert(out.end(), tuple.begin(), tuple.begin() + slot);
  out.push_back(value);
  out.insert(out.end(), tuple.begin() + slot, tuple.end());
  return out;
}

}  // namespace

FockTensor create_fermion(int l, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_index(l, s.n);
  FockShape out_shape = s;
  out_shape.k = s.k + 1;
  DenseArray out(s.n, out_shape.rank());
  Rational norm(1, out_shape.k);
  DenseArray::for_each_tuple(s.n, out_shape.rank(), [&](const std::vector<int>& t) {
    Rational value(0);
    for (int p = 0; p < out_shape.k; ++p) {
      if (t[p] != l) continue;
      const Rational& source = x.components().at(without_slot(t, p));
      if (p % 2 == 0)
        value += source;
      else
        value -= source;
    }
    if (value != 0) out.at(t) = value * norm;
  });
  return FockTensor(std::move(out_shape), std::move(out));
}

FockTensor annihilate_fermion(int l, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_index(l, s.n);
  if (s.k == 0) return FockTensor(s);
  FockShape out_shape = s;
  out_shape.k = s.k - 1;
  DenseArray out(s.n, out_shape.rank());
  Rational degree(s.k);
  DenseArray::for_each_tuple(s.n, out_shape.rank(), [&](const std::vector<int>& t) {
    out.at(t) = degree * x.components().at(with_slot(t, 0, l));
  });
  return FockTensor(std::move(out_shape), std::move(out));
}

FockTensor create_boson(int alpha, int l, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_index(l, s.n);
  check_group(alpha, s);
  FockShape out_shape = s;
  out_shape.bosons[alpha - 1] += 1;
  int offset = out_shape.group_offset(alpha);
  int degree = out_shape.bosons[alpha - 1];
  DenseArray out(s.n, out_shape.rank());
  Rational norm(1, degree);
  DenseArray::for_each_tuple(s.n, out_shape.rank(), [&](const std::vector<int>& t) {
    Rational value(0);
    for (int p = 0; p < degree; ++p) {
      if (t[offset + p] != l) continue;
      value += x.components().at(without_slot(t, offset + p));
    }
    if (value != 0) out.at(t) = value * norm;
  });
  return FockTensor(std::move(out_shape), std::move(out));
}

FockTensor annihilate_boson(int alpha, int l, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_index(l, s.n);
  check_group(alpha, s);
  if (s.bosons[alpha - 1] == 0) return FockTensor(s);
  FockShape out_shape = s;
  out_shape.bosons[alpha - 1] -= 1;
  int offset = s.group_offset(alpha);
  Rational degree(s.bosons[alpha - 1]);
  DenseArray out(s.n, out_shape.rank());
  DenseArray::for_each_tuple(s.n, out_shape.rank(), [&](const std::vector<int>& t) {
    out.at(t) = degree * x.components().at(with_slot(t, offset, l));
  });
  return FockTensor(std::move(out_shape), std::move(out));
}

FockTensor apply_B(int alpha, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_group(alpha, s);
  FockShape out_shape = s;
  out_shape.k += 1;
  out_shape.bosons[alpha - 1] += 1;
  FockTensor out(out_shape);
  for (int l = 1; l <= s.n; ++l)
    out = out + create_boson(alpha, l, create_fermion(l, x));
  return out;
}

FockTensor apply_B_star(int alpha, const FockTensor& x) {
  const FockShape& s = x.shape();
  check_group(alpha, s);
  FockShape out_shape = s;
  out_shape.k = std::max(s.k - 1, 0);
  out_shape.bosons[alpha - 1] = std::max(s.bosons[alpha - 1] - 1, 0);
  if (s.k == 0 || s.bosons[alpha - 1] == 0) return FockTensor(out_shape);
  FockTensor out(out_shape);
  for (int l = 1; l <= s.n; ++l)
    out = out + annihilate_boson(alpha, l, annihilate_fermion(l, x));
  return out;
}

bool is_traceless(const FockTensor& x) {
  for (int alpha = 1; alpha <= x.shape().groups(); ++alpha)
    if (!apply_B_star(alpha, x).is_zero()) return false;
  return true;
}

std::pair<int, std::vector<int>> particle_numbers(const FockTensor& x) {
  return {x.shape().k, x.shape().bosons};
}

namespace {

void enumerate_block(int n, int length, bool strict, std::vector<int>& prefix,
                     std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == length) {
    out.push_back(prefix);
    return;
  }
  int low = prefix.empty() ? 1 : prefix.back() + (strict ? 1 : 0);
  for (int v = low; v <= n; ++v) {
    prefix.push_back(v);
    enumerate_block(n, length, strict, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> block_choices(int n, int length, bool strict) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  enumerate_block(n, length, strict, prefix, out);
  return out;
}

int sort_with_parity(std::vector<int>& block) {
  int sign = 1;
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j)
      if (block[j] < block[i]) {
        std::swap(block[i], block[j]);
        sign = -sign;
      }
  return sign;
}

int permutation_parity(const std::vector<int>& arrangement) {
  int inversions = 0;
  for (std::size_t i = 0; i < arrangement.size(); ++i)
    for (std::size_t j = i + 1; j < arrangement.size(); ++j)
      if (arrangement[j] < arrangement[i]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

/// Writes `value` across the whole symmetry orbit of `tuple`. With a `seen`
/// bitmap, clashes with a previously written different value raise
/// SymmetryError; without one, the orbit is assumed fresh.
void fill_orbit(DenseArray& array, const FockShape& shape,
                const std::vector<int>& tuple, const Rational& value,
                std::vector<bool>* seen) {
  std::vector<int> fermion(tuple.begin(), tuple.begin() + shape.k);
  bool repeated = false;
  std::vector<int> sorted_fermion = fermion;
  int base_sign = sort_with_parity(sorted_fermion);
  for (std::size_t i = 0; i + 1 < sorted_fermion.size(); ++i)
    if (sorted_fermion[i] == sorted_fermion[i + 1]) repeated = true;
  if (repeated) {
    if (value != 0)
      throw SymmetryError("antisymmetry forces this component to zero");
    return;
  }

  std::vector<std::vector<int>> group_sorted;
  for (int alpha = 1; alpha <= shape.groups(); ++alpha) {
    int offset = shape.group_offset(alpha);
    std::vector<int> g(tuple.begin() + offset,
                       tuple.begin() + offset + shape.bosons[alpha - 1]);
    std::sort(g.begin(), g.end());
    group_sorted.push_back(std::move(g));
  }

  // Iterate every fermionic arrangement crossed with every distinct
  // arrangement of each bosonic group.
  std::vector<int> farr = sorted_fermion;
  std::sort(farr.begin(), farr.end());
  do {
    int sign = base_sign * permutation_parity(farr);
    Rational signed_value = sign > 0 ? value : Rational(-value);

    std::vector<std::vector<int>> groups = group_sorted;
    std::vector<int> full;
    // Odometer over the distinct permutations of each group.
    while (true) {
      full.clear();
      full.insert(full.end(), farr.begin(), farr.end());
      for (const auto& g : groups) full.insert(full.end(), g.begin(), g.end());
      std::size_t flat = array.flat_index(full);
      if (seen) {
        if ((*seen)[flat] && array[flat] != signed_value)
          throw SymmetryError("conflicting assignments within one symmetry orbit");
        (*seen)[flat] = true;
      }
      array[flat] = signed_value;

      std::size_t g = 0;
      while (g < groups.size() &&
             !std::next_permutation(groups[g].begin(), groups[g].end())) {
        // next_permutation wrapped this group back to sorted order; carry on.
        ++g;
      }
      if (g == groups.size()) break;
    }
  } while (std::next_permutation(farr.begin(), farr.end()));
}

}  // namespace

std::vector<std::vector<int>> canonical_tuples(const FockShape& shape) {
  std::vector<std::vector<int>> out;
  if (shape.k > shape.n) return out;  // the sector is zero
  auto fermions = block_choices(shape.n, shape.k, true);
  std::vector<std::vector<std::vector<int>>> groups;
  for (int r : shape.bosons) groups.push_back(block_choices(shape.n, r, false));

  std::vector<std::size_t> cursor(groups.size(), 0);
  for (const auto& f : fermions) {
    std::fill(cursor.begin(), cursor.end(), 0);
    bool more = true;
    while (more) {
      std::vector<int> tuple = f;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& block = groups[g][cursor[g]];
        tuple.insert(tuple.end(), block.begin(), block.end());
      }
      out.push_back(std::move(tuple));

      more = false;
      for (std::size_t g = groups.size(); g-- > 0;) {
        if (++cursor[g] < groups[g].size()) {
          more = true;
          break;
        }
        cursor[g] = 0;
      }
    }
  }
  return out;
}

FockTensor basis_tensor(const FockShape& shape,
                        const std::vector<int>& tuple) {
  validate(shape);
  if (static_cast<int>(tuple.size()) != shape.rank())
    throw ShapeError("tuple length does not match the shape rank");
  DenseArray array(shape.n, shape.rank());
  fill_orbit(array, shape, tuple, Rational(1), nullptr);
  return FockTensor::from_components(shape, std::move(array));
}

namespace {

struct BColumnSystem {
  std::vector<FockShape> part_shapes;
  std::vector<std::vector<std::vector<int>>> part_tuples;
  std::vector<bool> degenerate;
  Matrix columns;
};

FockShape lowered_shape(const FockShape& s, int alpha) {
  FockShape out = s;
  out.k -= 1;
  out.bosons[alpha - 1] -= 1;
  return out;
}

FockShape clamped_shape(const FockShape& s, int alpha) {
  FockShape out = s;
  out.k = std::max(out.k - 1, 0);
  out.bosons[alpha - 1] = std::max(out.bosons[alpha - 1] - 1, 0);
  return out;
}

/// Columns of the linear map (X_1,..,X_s) -> sum_alpha B_alpha X_alpha,
/// expressed in the canonical symmetry-reduced parameterization.
BColumnSystem build_b_columns(const FockShape& target, int s) {
  BColumnSystem sys;
  std::size_t total_cols = 0;
  for (int alpha = 1; alpha <= s; ++alpha) {
    bool bad = target.k - 1 < 0 || target.bosons[alpha - 1] - 1 < 0;
    sys.degenerate.push_back(bad);
    if (bad) {
      sys.part_shapes.push_back(clamped_shape(target, alpha));
      sys.part_tuples.emplace_back();
      continue;
    }
    FockShape lowered = lowered_shape(target, alpha);
    sys.part_shapes.push_back(lowered);
    sys.part_tuples.push_back(canonical_tuples(lowered));
    total_cols += sys.part_tuples.back().size();
  }

  std::size_t rows = 1;
  for (int i = 0; i < target.rank(); ++i) rows *= target.n;
  sys.columns = Matrix(rows, total_cols);
  std::size_t col = 0;
  for (int alpha = 1; alpha <= s; ++alpha) {
    if (sys.degenerate[alpha - 1]) continue;
    for (const auto& tuple : sys.part_tuples[alpha - 1]) {
      FockTensor image =
          apply_B(alpha, basis_tensor(sys.part_shapes[alpha - 1], tuple));
      for (std::size_t row = 0; row < rows; ++row)
        sys.columns.at(row, col) = image.components()[row];
      ++col;
    }
  }
  return sys;
}

std::vector<FockTensor> assemble_parts(const BColumnSystem& sys,
                                       const std::vector<Rational>& coeffs) {
  std::vector<FockTensor> parts;
  std::size_t cursor = 0;
  for (std::size_t a = 0; a < sys.part_shapes.size(); ++a) {
    FockTensor part(sys.part_shapes[a]);
    if (!sys.degenerate[a]) {
      for (const auto& tuple : sys.part_tuples[a]) {
        const Rational& c = coeffs[cursor++];
        if (c != 0) part = part + basis_tensor(sys.part_shapes[a], tuple).scaled(c);
      }
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

std::vector<Rational> flatten(const FockTensor& x) {
  std::vector<Rational> out(x.components().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.components()[i];
  return out;
}

std::string describe_nonzero_component(const FockTensor& x);

}  // namespace

TraceDecomposition trace_decompose(const FockTensor& x) {
  const FockShape& s = x.shape();
  if (s.groups() > s.n - s.k)
    throw ShapeConstraint(
        "trace decomposition requires the number of bosonic groups to be at "
        "most n minus the fermionic degree");
  BColumnSystem sys = build_b_columns(s, s.groups());
  std::vector<Rational> coeffs =
      least_squares_min_norm(sys.columns, flatten(x));
  std::vector<FockTensor> parts = assemble_parts(sys, coeffs);
  FockTensor projected(s);
  for (int alpha = 1; alpha <= s.groups(); ++alpha)
    if (!sys.degenerate[alpha - 1])
      projected = projected + apply_B(alpha, parts[alpha - 1]);
  return TraceDecomposition{x - projected, std::move(parts)};
}

std::vector<FockTensor> solve_kernel_representation(const FockTensor& x,
                                                    int s) {
  const FockShape& shape = x.shape();
  if (s < 1 || s > shape.groups())
    throw InvalidIndex("the number of parts must lie within the shape's groups");

  FockTensor chained = x;
  for (int alpha = s; alpha >= 1; --alpha) chained = apply_B(alpha, chained);
  if (!chained.is_zero())
    throw NotInKernel("the iterated raising operators do not annihilate the "
                      "input; nonzero component " +
                      describe_nonzero_component(chained));

  BColumnSystem sys = build_b_columns(shape, s);
  std::vector<Rational> coeffs =
      least_squares_min_norm(sys.columns, flatten(x));
  std::vector<FockTensor> parts = assemble_parts(sys, coeffs);
  FockTensor reassembled(shape);
  for (int alpha = 1; alpha <= s; ++alpha)
    if (!sys.degenerate[alpha - 1])
      reassembled = reassembled + apply_B(alpha, parts[alpha - 1]);
  FockTensor residual = x - reassembled;
  if (!residual.is_zero())
    throw NotInKernel("no exact representation exists; nonzero residual "
                      "component " +
                      describe_nonzero_component(residual));
  return parts;
}

namespace {

std::string render_entry_tuple(const FockShape& shape,
                               const std::vector<int>& tuple) {
  std::ostringstream out;
  out << '[';
  for (int i = 0; i < shape.k; ++i) {
    if (i > 0) out << ' ';
    out << tuple[i];
  }
  for (int alpha = 1; alpha <= shape.groups(); ++alpha) {
    out << ';';
    int offset = shape.group_offset(alpha);
    for (int i = 0; i < shape.bosons[alpha - 1]; ++i)
      out << ' ' << tuple[offset + i];
  }
  out << ']';
  return out.str();
}

std::string describe_nonzero_component(const FockTensor& x) {
  std::string found = "(none)";
  bool done = false;
  DenseArray::for_each_tuple(
      x.shape().n, x.shape().rank(), [&](const std::vector<int>& t) {
        if (done) return;
        const Rational& v = x.components().at(t);
        if (v != 0) {
          found = render_entry_tuple(x.shape(), t) + " = " + to_string(v);
          done = true;
        }
      });
  return found;
}

std::vector<int> parse_entry_tuple(const std::string& text,
                                   const FockShape& shape) {
  std::string inner = text;
  auto open = inner.find('[');
  auto close = inner.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("component tuple must be bracketed", 0);
  inner = inner.substr(open + 1, close - open - 1);

  std::vector<std::string> blocks;
  std::size_t start = 0;
  while (true) {
    auto semi = inner.find(';', start);
    if (semi == std::string::npos) {
      blocks.push_back(inner.substr(start));
      break;
    }
    blocks.push_back(inner.substr(start, semi - start));
    start = semi + 1;
  }
  if (static_cast<int>(blocks.size()) != 1 + shape.groups())
    throw ShapeError("component tuple has the wrong number of ';' blocks");

  std::vector<int> tuple;
  std::vector<int> expected_sizes{shape.k};
  for (int r : shape.bosons) expected_sizes.push_back(r);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::istringstream in(blocks[b]);
    int value = 0, count = 0;
    while (in >> value) {
      if (value < 1 || value > shape.n)
        throw InvalidIndex("component index outside 1..n");
      tuple.push_back(value);
      ++count;
    }
    if (count != expected_sizes[b])
      throw ShapeError("component tuple block has the wrong length");
  }
  return tuple;
}

Rational parse_rational_token(const std::string& token) {
  try {
    return Rational(token);
  } catch (const std::exception&) {
    throw ParseError("malformed rational '" + token + "'", 0);
  }
}

}  // namespace

FockTensor parse_tensor(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FockShape shape;
  bool have_shape = false;
  DenseArray array(1, 0);
  std::vector<bool> seen;

  while (std::getline(in, line)) {
    std::string trimmed = line;
    auto begin = trimmed.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = trimmed.find_last_not_of(" \t\r");
    trimmed = trimmed.substr(begin, end - begin + 1);
    if (trimmed.empty()) continue;

    if (!have_shape) {
      if (trimmed.rfind("shape:", 0) != 0)
        throw ParseError("tensor text must begin with a 'shape:' line", 0);
      std::istringstream header(trimmed.substr(6));
      std::string field;
      int n = -1, k = -1;
      std::vector<int> bosons;
      bool have_bosons = false;
      while (header >> field) {
        if (field.rfind("n=", 0) == 0) {
          n = std::stoi(field.substr(2));
        } else if (field.rfind("k=", 0) == 0) {
          k = std::stoi(field.substr(2));
        } else if (field.rfind("bosons=[", 0) == 0) {
          std::string list = field.substr(8);
          while (!list.empty() && list.back() != ']') {
            std::string more;
            if (!(header >> more))
              throw ParseError("unterminated bosons list in shape header", 0);
            list += ' ' + more;
          }
          if (list.empty() || list.back() != ']')
            throw ParseError("unterminated bosons list in shape header", 0);
          list.pop_back();
          std::istringstream items(list);
          int r = 0;
          while (items >> r) bosons.push_back(r);
          have_bosons = true;
        } else {
          throw ParseError("unknown shape field '" + field + "'", 0);
        }
      }
      if (n < 0 || k < 0 || !have_bosons)
        throw ParseError("shape header needs n=, k= and bosons=[...]", 0);
      shape = FockShape{n, k, std::move(bosons)};
      validate(shape);
      array = DenseArray(shape.n, shape.rank());
      seen.assign(array.size(), false);
      have_shape = true;
      continue;
    }

    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ParseError("component line must look like '[...] = value'", 0);
    std::vector<int> tuple = parse_entry_tuple(trimmed.substr(0, eq), shape);
    std::string value_text = trimmed.substr(eq + 1);
    auto vb = value_text.find_first_not_of(" \t");
    if (vb == std::string::npos)
      throw ParseError("missing value after '='", 0);
    auto ve = value_text.find_last_not_of(" \t");
    Rational value = parse_rational_token(value_text.substr(vb, ve - vb + 1));
    fill_orbit(array, shape, tuple, value, &seen);
  }
  if (!have_shape)
    throw ParseError("tensor text must begin with a 'shape:' line", 0);
  return FockTensor::from_components(shape, std::move(array));
}

std::string write_tensor(const FockTensor& x) {
  const FockShape& shape = x.shape();
  std::ostringstream out;
  out << "shape: n=" << shape.n << " k=" << shape.k << " bosons=[";
  for (int g = 0; g < shape.groups(); ++g) {
    if (g > 0) out << ' ';
    out << shape.bosons[g];
  }
  out << "]\n";
  for (const auto& tuple : canonical_tuples(shape)) {
    const Rational& v = x.components().at(tuple);
    if (v == 0) continue;
    out << render_entry_tuple(shape, tuple) << " = " << to_string(v) << '\n';
  }
  return out.str();
}

}  // namespace jetcalc
