#include "jetcalc/variational.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/errors.hpp"

namespace jetcalc {

namespace {

/// Checks that every coordinate generator of e fits the chart: base indices
/// in 1..n, fibre indices in 1..m, multi-index entries in 1..n.
void validate_generators(const Expr& e, const JetSpec& spec) {
  for (const Generator& g : e.coordinate_generators()) {
    if (g.kind == GenKind::Base) {
      if (g.index < 1 || g.index > spec.n)
        throw InvalidIndex("base coordinate outside 1..n");
    } else {
      if (g.index < 1 || g.index > spec.m)
        throw InvalidIndex("fibre coordinate outside 1..m");
      for (int entry : g.jet.entries())
        if (entry < 1 || entry > spec.n)
          throw InvalidIndex("jet multi-index entry outside 1..n");
    }
  }
}

void validate_coefficient(const Expr& e, const JetSpec& spec,
                          const char* what) {
  validate_generators(e, spec);
  if (e.jet_order() > spec.r)
    throw OrderExceeded(std::string(what) + " exceeds the chart order");
}

Rational sign_of(int parity) { return Rational(parity % 2 == 0 ? 1 : -1); }

/// Formal derivative truncated at the chart of order `top`: the base partial
/// plus the fibre contributions y^sigma_{Ji} d/dy^sigma_J for |J| <= top-1
/// only. The result stays on the chart of order `top`.
Expr truncated_total_derivative(const Expr& f, int i, int top) {
  Expr acc = f.partial_base(i);
  for (const Generator& g : f.coordinate_generators()) {
    if (g.kind != GenKind::Jet || g.jet.order() > top - 1) continue;
    acc += Expr::jet(g.index, g.jet.append(i)) * f.plain_partial(g);
  }
  return acc;
}

/// Parity sign of a tuple that permutes 1..n, by inversion count.
Rational permutation_sign(const std::vector<int>& tuple) {
  int inversions = 0;
  for (std::size_t a = 0; a < tuple.size(); ++a)
    for (std::size_t b = a + 1; b < tuple.size(); ++b)
      if (tuple[a] > tuple[b]) ++inversions;
  return sign_of(inversions);
}

MultiIndex join(const MultiIndex& I, const MultiIndex& J, int n) {
  std::vector<int> entries = I.entries();
  entries.insert(entries.end(), J.entries().begin(), J.entries().end());
  return MultiIndex::canonicalize(std::move(entries), n);
}

void validate_couples(const std::vector<JetCouple>& couples,
                      const JetSpec& spec) {
  for (const auto& [index, sigma] : couples) {
    if (index.order() != spec.r - 1)
      throw ShapeError("couple multi-index must have length r-1");
    if (sigma < 1 || sigma > spec.m)
      throw InvalidIndex("couple fibre index outside 1..m");
    for (int entry : index.entries())
      if (entry < 1 || entry > spec.n)
        throw InvalidIndex("couple multi-index entry outside 1..n");
  }
}

/// Product of the multiplicity weights of the couple multi-indices; the
/// factor a canonical couple sum picks up relative to the ordered-tuple sum.
Rational couple_weights(const std::vector<JetCouple>& couples) {
  Rational acc(1);
  for (const auto& couple : couples) acc *= weight(couple.first);
  return acc;
}

/// Sorts couples and base indices of a family key, tracking the permutation
/// parity. Degenerate keys (a repeated couple or base index) are flagged.
struct CanonicalKey {
  AntisymmetricFamily::Key key;
  Rational sign;
  bool degenerate = false;
};

template <typename T>
int sort_with_parity(std::vector<T>& values) {
  int swaps = 0;
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = a + 1; b < values.size(); ++b)
      if (values[b] < values[a]) {
        std::swap(values[a], values[b]);
        ++swaps;
      }
  return swaps;
}

CanonicalKey canonical_key(std::vector<JetCouple> couples,
                           std::vector<int> base) {
  CanonicalKey out;
  int swaps = sort_with_parity(couples) + sort_with_parity(base);
  out.sign = sign_of(swaps);
  out.degenerate =
      std::adjacent_find(couples.begin(), couples.end()) != couples.end() ||
      std::adjacent_find(base.begin(), base.end()) != base.end();
  out.key = {std::move(couples), std::move(base)};
  return out;
}

/// All strictly increasing k-element picks from a sorted pool, visited in
/// lexicographic order.
template <typename T, typename Fn>
void for_each_combination(const std::vector<T>& pool, int k, Fn&& fn) {
  std::vector<T> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  auto recurse = [&](auto&& self, std::size_t from, int left) -> void {
    if (left == 0) {
      fn(chosen);
      return;
    }
    for (std::size_t at = from; at + static_cast<std::size_t>(left) <=
                                pool.size();
         ++at) {
      chosen.push_back(pool[at]);
      self(self, at + 1, left - 1);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0, k);
}

}  // namespace

Lagrangian::Lagrangian(JetSpec spec_, Expr density_)
    : spec(spec_), density(std::move(density_)) {
  validate(spec);
  validate_coefficient(density, spec, "Lagrangian density");
}

SourceForm::SourceForm(JetSpec spec_, std::vector<Expr> components_)
    : spec(spec_), components(std::move(components_)) {
  validate(spec);
  if (static_cast<int>(components.size()) != spec.m)
    throw ShapeError("source form needs one component per fibre coordinate");
  for (const Expr& c : components)
    validate_coefficient(c, spec, "source form component");
}

const Expr& SourceForm::component(int sigma) const {
  if (sigma < 1 || sigma > spec.m)
    throw InvalidIndex("fibre coordinate outside 1..m");
  return components[static_cast<std::size_t>(sigma - 1)];
}

SourceForm euler_lagrange(const Lagrangian& lag) {
  const JetSpec& spec = lag.spec;
  std::vector<Expr> components;
  components.reserve(static_cast<std::size_t>(spec.m));
  for (int sigma = 1; sigma <= spec.m; ++sigma) {
    Expr acc;
    for (const MultiIndex& J : enumerate_up_to(spec.n, spec.r)) {
      Expr part = lag.density.plain_partial_jet(sigma, J);
      if (part.is_zero()) continue;
      acc += part.total_derivative_multi(J).scaled(sign_of(J.order()));
    }
    components.push_back(acc);
  }
  return SourceForm(spec.with_order(2 * spec.r), std::move(components));
}

Expr lie_euler(const Lagrangian& lag, int sigma, const MultiIndex& I) {
  const JetSpec& spec = lag.spec;
  if (sigma < 1 || sigma > spec.m)
    throw InvalidIndex("fibre coordinate outside 1..m");
  for (int entry : I.entries())
    if (entry < 1 || entry > spec.n)
      throw InvalidIndex("multi-index entry outside 1..n");
  if (I.order() > spec.r)
    throw OrderExceeded("operator multi-index longer than the chart order");

  Expr acc;
  for (int k = 0; k <= spec.r - I.order(); ++k) {
    Rational factor = binomial(I.order() + k, I.order()) * sign_of(k);
    for (const MultiIndex& J : enumerate(spec.n, k)) {
      Expr part = lag.density.partial_jet(sigma, join(I, J, spec.n));
      if (part.is_zero()) continue;
      acc += part.total_derivative_multi(J).scaled(factor * weight(J));
    }
  }
  return acc;
}

OperatorTable euler_decompose(const JetSpec& spec, const OperatorTable& P,
                              int r) {
  validate(spec);
  if (r < 0) throw ShapeError("operator order must be >= 0");
  for (const auto& [I, row] : P) {
    if (I.order() > r)
      throw OrderExceeded("operator table key longer than the order");
    for (int entry : I.entries())
      if (entry < 1 || entry > spec.n)
        throw InvalidIndex("operator table key entry outside 1..n");
    if (static_cast<int>(row.size()) != spec.m)
      throw ShapeError("operator table needs one entry per fibre coordinate");
  }

  auto lookup = [&](const MultiIndex& I, int sigma) -> Expr {
    auto it = P.find(I);
    if (it == P.end()) return Expr::zero();
    return it->second[static_cast<std::size_t>(sigma - 1)];
  };

  OperatorTable Q;
  for (const MultiIndex& I : enumerate_up_to(spec.n, r)) {
    std::vector<Expr> row;
    row.reserve(static_cast<std::size_t>(spec.m));
    for (int sigma = 1; sigma <= spec.m; ++sigma) {
      Expr acc;
      for (int k = 0; k <= r - I.order(); ++k) {
        Rational factor = binomial(I.order() + k, I.order()) * sign_of(k);
        for (const MultiIndex& J : enumerate(spec.n, k)) {
          Expr part = lookup(join(I, J, spec.n), sigma);
          if (part.is_zero()) continue;
          acc += part.total_derivative_multi(J).scaled(factor * weight(J));
        }
      }
      row.push_back(acc);
    }
    Q.emplace(I, std::move(row));
  }
  return Q;
}

const Expr& HelmholtzTable::entry(const MultiIndex& J, int sigma,
                                  int nu) const {
  auto it = entries.find(J);
  if (it == entries.end()) throw InvalidIndex("no table row for this index");
  if (sigma < 1 || sigma > spec.m || nu < 1 || nu > spec.m)
    throw InvalidIndex("fibre coordinate outside 1..m");
  return it->second[static_cast<std::size_t>((sigma - 1) * spec.m + nu - 1)];
}

bool HelmholtzTable::all_zero() const {
  for (const auto& [J, row] : entries)
    for (const Expr& e : row)
      if (!e.is_zero()) return false;
  return true;
}

HelmholtzTable helmholtz(const SourceForm& source) {
  const JetSpec& spec = source.spec;
  const int s = spec.r;
  HelmholtzTable table;
  table.spec = spec.with_order(2 * s + 1);
  table.source_order = s;

  for (const MultiIndex& J : enumerate_up_to(spec.n, s)) {
    std::vector<Expr> row(static_cast<std::size_t>(spec.m * spec.m));
    for (int sigma = 1; sigma <= spec.m; ++sigma) {
      for (int nu = 1; nu <= spec.m; ++nu) {
        Expr direct = source.component(sigma).partial_jet(nu, J);
        Expr transposed =
            lie_euler(Lagrangian(spec, source.component(nu)), sigma, J);
        row[static_cast<std::size_t>((sigma - 1) * spec.m + nu - 1)] =
            direct - transposed.scaled(sign_of(J.order()));
      }
    }
    table.entries.emplace(J, std::move(row));
  }
  return table;
}

bool is_locally_variational(const SourceForm& source) {
  return helmholtz(source).all_zero();
}

Lagrangian tonti_lagrangian(const SourceForm& source) {
  Expr density;
  for (int sigma = 1; sigma <= source.spec.m; ++sigma) {
    Expr scaled;
    for (const auto& [degree, part] :
         homogeneous_components(source.component(sigma)))
      scaled += part.scaled(Rational(1, degree + 1));
    density += Expr::jet(sigma, MultiIndex()) * scaled;
  }
  return Lagrangian(source.spec, std::move(density));
}

bool is_variationally_trivial(const Lagrangian& lag) {
  for (const Expr& component : euler_lagrange(lag).components)
    if (!component.is_zero()) return false;
  return true;
}

Expr hyper_jacobian(const JetSpec& spec, const std::vector<JetCouple>& couples,
                    const std::vector<int>& tail) {
  validate(spec);
  const int s = static_cast<int>(couples.size());
  if (s > spec.n)
    throw ShapeError("more couples than base dimensions");
  if (static_cast<int>(tail.size()) != spec.n - s)
    throw ShapeError("tail must fix the remaining n-s slots");
  if (s > 0 && spec.r < 1)
    throw ShapeError("jet couples need a chart of order >= 1");
  validate_couples(couples, spec);
  for (int i : tail)
    if (i < 1 || i > spec.n) throw InvalidIndex("tail entry outside 1..n");

  std::vector<bool> used(static_cast<std::size_t>(spec.n) + 1, false);
  for (int i : tail) {
    if (used[static_cast<std::size_t>(i)]) return Expr::zero();
    used[static_cast<std::size_t>(i)] = true;
  }
  std::vector<int> free_slots;
  for (int i = 1; i <= spec.n; ++i)
    if (!used[static_cast<std::size_t>(i)]) free_slots.push_back(i);

  Expr acc;
  std::vector<int> full(static_cast<std::size_t>(spec.n));
  do {
    std::copy(free_slots.begin(), free_slots.end(), full.begin());
    std::copy(tail.begin(), tail.end(),
              full.begin() + static_cast<std::ptrdiff_t>(free_slots.size()));
    Expr term = Expr::constant(1);
    for (int l = 0; l < s; ++l)
      term *= Expr::jet(couples[static_cast<std::size_t>(l)].second,
                        couples[static_cast<std::size_t>(l)].first.append(
                            full[static_cast<std::size_t>(l)]));
    acc += term.scaled(permutation_sign(full));
  } while (std::next_permutation(free_slots.begin(), free_slots.end()));
  return acc;
}

bool AntisymmetricFamily::Key::operator<(const Key& other) const {
  if (couples != other.couples) return couples < other.couples;
  return base < other.base;
}

AntisymmetricFamily::AntisymmetricFamily(JetSpec spec, int slots)
    : m_spec(spec), m_slots(slots) {
  validate(m_spec);
  if (m_spec.r < 1)
    throw ShapeError("coefficient families need a chart of order >= 1");
  if (slots < 0 || slots > m_spec.n)
    throw ShapeError("slot count outside 0..n");
}

void AntisymmetricFamily::set(const std::vector<JetCouple>& couples,
                              const std::vector<int>& base,
                              const Expr& value) {
  if (static_cast<int>(couples.size() + base.size()) != m_slots)
    throw ShapeError("couples plus base indices must fill the slots");
  validate_couples(couples, m_spec);
  for (int i : base)
    if (i < 1 || i > m_spec.n) throw InvalidIndex("base index outside 1..n");
  validate_generators(value, m_spec);
  if (value.jet_order() > m_spec.r - 1)
    throw OrderExceeded("family coefficient exceeds order r-1");

  CanonicalKey canon = canonical_key(couples, base);
  if (canon.degenerate) {
    if (!value.is_zero())
      throw SymmetryError("antisymmetry forces this coefficient to zero");
    return;
  }
  Expr stored = value.scaled(canon.sign);
  auto it = m_entries.find(canon.key);
  if (it != m_entries.end()) {
    if (!(it->second == stored))
      throw SymmetryError("conflicting coefficients for one key orbit");
    return;
  }
  m_entries.emplace(std::move(canon.key), std::move(stored));
}

Expr AntisymmetricFamily::coefficient(const std::vector<JetCouple>& couples,
                                      const std::vector<int>& base) const {
  if (static_cast<int>(couples.size() + base.size()) != m_slots)
    throw ShapeError("couples plus base indices must fill the slots");
  CanonicalKey canon = canonical_key(couples, base);
  if (canon.degenerate) return Expr::zero();
  auto it = m_entries.find(canon.key);
  if (it == m_entries.end()) return Expr::zero();
  return it->second.scaled(canon.sign);
}

std::pair<Lagrangian, std::vector<Expr>> trivial_lagrangian_from_coeffs(
    const AntisymmetricFamily& coeffs) {
  const JetSpec& spec = coeffs.spec();
  if (coeffs.slots() != spec.n - 1)
    throw ShapeError("trivial Lagrangian coefficients need n-1 slots");

  std::vector<JetCouple> universe;
  for (const MultiIndex& I : enumerate(spec.n, spec.r - 1))
    for (int sigma = 1; sigma <= spec.m; ++sigma)
      universe.emplace_back(I, sigma);

  std::vector<int> base_pool;
  for (int i = 1; i <= spec.n; ++i) base_pool.push_back(i);

  // Density coefficient at a canonical slot assignment: one fibre partial
  // per couple slot and one truncated formal derivative per base slot, with
  // the sign alternating along the slot positions.
  auto density_coefficient = [&](const std::vector<JetCouple>& couples,
                                 const std::vector<int>& base) -> Expr {
    const int s = static_cast<int>(couples.size());
    Expr acc;
    for (int k = 1; k <= s; ++k) {
      std::vector<JetCouple> rest = couples;
      rest.erase(rest.begin() + (k - 1));
      Expr inner = coeffs.coefficient(rest, base);
      if (inner.is_zero()) continue;
      const JetCouple& removed = couples[static_cast<std::size_t>(k - 1)];
      acc += inner.partial_jet(removed.second, removed.first)
                 .scaled(sign_of(k - 1));
    }
    for (int k = s + 1; k <= spec.n; ++k) {
      std::vector<int> rest = base;
      rest.erase(rest.begin() + (k - s - 1));
      Expr inner = coeffs.coefficient(couples, rest);
      if (inner.is_zero()) continue;
      int direction = base[static_cast<std::size_t>(k - s - 1)];
      acc += truncated_total_derivative(inner, direction, spec.r - 1)
                 .scaled(sign_of(k - 1));
    }
    return acc;
  };

  Expr density;
  for (int s = 0; s <= spec.n; ++s) {
    for_each_combination(universe, s, [&](const std::vector<JetCouple>& cs) {
      for_each_combination(
          base_pool, spec.n - s, [&](const std::vector<int>& bs) {
            Expr value = density_coefficient(cs, bs);
            if (value.is_zero()) return;
            density += value * hyper_jacobian(spec, cs, bs)
                                   .scaled(couple_weights(cs));
          });
    });
  }

  std::vector<Expr> flux(static_cast<std::size_t>(spec.n));
  for (const auto& [key, value] : coeffs.entries()) {
    if (value.is_zero()) continue;
    const int s = static_cast<int>(key.couples.size());
    Rational factor = couple_weights(key.couples) * sign_of(s);
    for (int j = 1; j <= spec.n; ++j) {
      std::vector<int> tail;
      tail.push_back(j);
      tail.insert(tail.end(), key.base.begin(), key.base.end());
      Expr jac = hyper_jacobian(spec, key.couples, tail);
      if (jac.is_zero()) continue;
      flux[static_cast<std::size_t>(j - 1)] += value * jac.scaled(factor);
    }
  }

  return {Lagrangian(spec, std::move(density)), std::move(flux)};
}

bool check_highest_order_system(const Lagrangian& lag) {
  const JetSpec& spec = lag.spec;
  for (const MultiIndex& slots : enumerate(spec.n, 2 * spec.r)) {
    for (int rho = 1; rho <= spec.m; ++rho) {
      for (int sigma = rho; sigma <= spec.m; ++sigma) {
        Expr sum;
        std::vector<int> arrangement = slots.entries();
        do {
          std::vector<int> first(arrangement.begin(),
                                 arrangement.begin() + spec.r);
          std::vector<int> second(arrangement.begin() + spec.r,
                                  arrangement.end());
          sum += lag.density
                     .partial_jet(sigma,
                                  MultiIndex::canonicalize(second, spec.n))
                     .partial_jet(rho,
                                  MultiIndex::canonicalize(first, spec.n));
        } while (
            std::next_permutation(arrangement.begin(), arrangement.end()));
        if (!sum.is_zero()) return false;
      }
    }
  }
  return true;
}

SourceForm hyper_jacobian_source_form(
    const std::vector<AntisymmetricFamily>& families) {
  if (families.empty())
    throw ShapeError("a source form needs at least one coefficient family");
  const JetSpec& spec = families.front().spec();
  if (static_cast<int>(families.size()) != spec.m)
    throw ShapeError("one coefficient family per fibre coordinate required");
  for (const AntisymmetricFamily& family : families) {
    if (!(family.spec() == spec))
      throw ShapeError("coefficient families must share one chart");
    if (family.slots() != spec.n)
      throw ShapeError("source form coefficients need n slots");
  }

  std::vector<Rational> factorial(static_cast<std::size_t>(spec.n) + 1,
                                  Rational(1));
  for (int k = 1; k <= spec.n; ++k)
    factorial[static_cast<std::size_t>(k)] =
        factorial[static_cast<std::size_t>(k - 1)] * Rational(k);

  std::vector<Expr> components;
  components.reserve(static_cast<std::size_t>(spec.m));
  for (int sigma = 1; sigma <= spec.m; ++sigma) {
    Expr acc;
    for (const auto& [key, value] :
         families[static_cast<std::size_t>(sigma - 1)].entries()) {
      if (value.is_zero()) continue;
      const int s = static_cast<int>(key.couples.size());
      Rational factor = factorial[static_cast<std::size_t>(s)] *
                        factorial[static_cast<std::size_t>(spec.n - s)] *
                        couple_weights(key.couples);
      Expr jac = hyper_jacobian(spec, key.couples, key.base);
      if (jac.is_zero()) continue;
      acc += value * jac.scaled(factor);
    }
    components.push_back(std::move(acc));
  }
  return SourceForm(spec, std::move(components));
}

}  // namespace jetcalc
