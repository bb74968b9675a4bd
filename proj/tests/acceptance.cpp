// End-to-end acceptance checks for the jet calculus engine. Each criterion
// prints one PASS/FAIL line; the process exits nonzero when any fails.
// Everything except the last criterion is exact rational arithmetic; the
// discretized-action cross-check uses doubles with a pinned 1e-6 tolerance.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/errors.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/fock.hpp"
#include "jetcalc/forms.hpp"
#include "jetcalc/linalg.hpp"
#include "jetcalc/multiindex.hpp"
#include "jetcalc/prolong.hpp"
#include "jetcalc/rational.hpp"
#include "jetcalc/variational.hpp"

using namespace jetcalc;

namespace {

Expr random_poly(std::mt19937& rng, const JetSpec& spec, int max_terms = 3,
                 int max_factors = 2) {
  std::vector<Generator> pool;
  for (int i = 1; i <= spec.n; ++i) pool.push_back(Generator::base(i));
  for (int sigma = 1; sigma <= spec.m; ++sigma)
    for (int k = 0; k <= spec.r; ++k)
      for (const auto& J : enumerate(spec.n, k))
        pool.push_back(Generator::jet_coord(sigma, J));

  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> denom(1, 3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> nfactors(0, max_factors);

  Expr e;
  const int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    Expr factor = Expr::constant(Rational(coeff(rng), denom(rng)));
    const int factors = nfactors(rng);
    for (int f = 0; f < factors; ++f) {
      const Generator& g = pool[pick(rng)];
      factor = factor * (g.kind == GenKind::Base ? Expr::base(g.index)
                                                 : Expr::jet(g.index, g.jet));
    }
    e += factor;
  }
  return e;
}

DiffForm random_form(std::mt19937& rng, const JetSpec& spec, int degree) {
  std::vector<CoframeSymbol> symbols;
  for (int i = 1; i <= spec.n; ++i) symbols.push_back(CoframeSymbol::dx(i));
  for (int sigma = 1; sigma <= spec.m; ++sigma)
    for (int k = 0; k <= spec.r; ++k)
      for (const auto& J : enumerate(spec.n, k))
        symbols.push_back(CoframeSymbol::dy(sigma, J));

  DiffForm out(spec, degree, FormBasis::Coordinate);
  std::uniform_int_distribution<int> keep(0, 2);
  std::vector<std::size_t> choice(static_cast<std::size_t>(degree));
  const std::function<void(std::size_t, std::size_t)> rec =
      [&](std::size_t slot, std::size_t from) {
        if (slot == choice.size()) {
          if (keep(rng) == 0) {
            Word word;
            for (std::size_t c : choice) word.push_back(symbols[c]);
            out.add_term(word, random_poly(rng, spec));
          }
          return;
        }
        for (std::size_t i = from; i < symbols.size(); ++i) {
          choice[slot] = i;
          rec(slot + 1, i + 1);
        }
      };
  rec(0, 0);
  return out;
}

FockTensor random_tensor(std::mt19937& rng, const FockShape& shape) {
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  DenseArray raw(shape.n, shape.rank());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = Rational(num(rng), den(rng));
  return FockTensor::from_components(shape, std::move(raw));
}

/// Fills a coefficient family with random order-(r-1) polynomials on a
/// random subset of its canonical keys.
AntisymmetricFamily random_family(std::mt19937& rng, const JetSpec& spec,
                                  int slots) {
  AntisymmetricFamily family(spec, slots);
  JetSpec low = spec.with_order(spec.r - 1);

  std::vector<JetCouple> universe;
  for (const MultiIndex& I : enumerate(spec.n, spec.r - 1))
    for (int sigma = 1; sigma <= spec.m; ++sigma)
      universe.emplace_back(I, sigma);

  std::uniform_int_distribution<int> keep(0, 1);
  std::vector<std::size_t> couple_at;
  auto emit = [&](int s) {
    std::vector<JetCouple> couples;
    for (std::size_t at : couple_at) couples.push_back(universe[at]);
    auto bases = [&](auto&& self, int from, int left,
                     std::vector<int>& chosen) -> void {
      if (left == 0) {
        if (keep(rng)) family.set(couples, chosen, random_poly(rng, low));
        return;
      }
      for (int b = from; b <= spec.n - left + 1; ++b) {
        chosen.push_back(b);
        self(self, b + 1, left - 1, chosen);
        chosen.pop_back();
      }
    };
    std::vector<int> chosen;
    bases(bases, 1, slots - s, chosen);
  };
  const std::function<void(std::size_t, int)> couples_rec =
      [&](std::size_t from, int s) {
        emit(s);
        for (std::size_t at = from; at < universe.size(); ++at) {
          couple_at.push_back(at);
          couples_rec(at + 1, s + 1);
          couple_at.pop_back();
        }
      };
  couples_rec(0, 0);
  return family;
}

const std::vector<JetSpec>& small_bundles() {
  static const std::vector<JetSpec> bundles{
      {1, 1, 1}, {1, 1, 2}, {2, 1, 1}, {1, 2, 1}, {2, 2, 1}, {2, 1, 2}};
  return bundles;
}

bool divergences_have_zero_equations() {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const JetSpec spec = small_bundles()[trial % small_bundles().size()];
    Expr divergence;
    for (int j = 1; j <= spec.n; ++j)
      divergence += random_poly(rng, spec).total_derivative(j);
    Lagrangian lag(spec.with_order(spec.r + 1), divergence);
    for (const Expr& component : euler_lagrange(lag).components)
      if (!component.is_zero()) return false;
  }
  return true;
}

bool equations_from_densities_pass_helmholtz() {
  std::mt19937 rng(202);
  for (int trial = 0; trial < 30; ++trial) {
    JetSpec spec = small_bundles()[trial % small_bundles().size()];
    if (spec.n == 2 && spec.r == 2) spec = spec.with_order(1);
    SourceForm source = euler_lagrange(Lagrangian(spec, random_poly(rng, spec)));
    if (!helmholtz(source).all_zero()) return false;
    if (!is_locally_variational(source)) return false;
  }
  return true;
}

bool homotopy_density_recovers_equations() {
  std::mt19937 rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const JetSpec spec = trial % 4 == 3 ? JetSpec{1, 1, 2}
                                        : small_bundles()[trial % 3];
    SourceForm source = euler_lagrange(Lagrangian(spec, random_poly(rng, spec)));
    SourceForm again = euler_lagrange(tonti_lagrangian(source));
    if (again.components.size() != source.components.size()) return false;
    for (std::size_t i = 0; i < source.components.size(); ++i)
      if (!(again.components[i] == source.components[i])) return false;
  }
  return true;
}

bool contact_grading_sums_to_the_pullback() {
  std::mt19937 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    const JetSpec spec = trial % 3 == 2 ? JetSpec{1, 1, 2} : JetSpec{2, 2, 1};
    const int q = 1 + trial % 3;
    DiffForm rho = random_form(rng, spec, q);
    DiffForm sum(spec.with_order(spec.r + 1), q, FormBasis::Contact);
    for (int k = 0; k <= q; ++k) sum = sum + contact_component(rho, k);
    if (!(sum == to_contact_basis(rho))) return false;
    if (!(contact_component(rho, 0) == horizontalize(rho))) return false;

    DiffForm a = random_form(rng, spec, 1);
    DiffForm b = random_form(rng, spec, 1 + trial % 2);
    if (!(horizontalize(wedge(a, b)) ==
          wedge(horizontalize(a), horizontalize(b))))
      return false;
  }
  return true;
}

bool fibre_homotopy_reconstructs_forms() {
  std::mt19937 rng(505);
  for (int trial = 0; trial < 30; ++trial) {
    const JetSpec spec = trial % 3 == 2 ? JetSpec{2, 1, 1} : JetSpec{2, 2, 1};
    const int q = 1 + trial % 2;
    DiffForm rho = random_form(rng, spec, q);
    DiffForm recon = contact_homotopy(exterior_derivative(rho)) +
                     exterior_derivative(contact_homotopy(rho)) +
                     zero_section_pullback(rho);
    if (!(recon == rho)) return false;

    for (int k = 1; k <= q; ++k) {
      DiffForm lhs = to_coordinate_basis(
          contact_component(contact_homotopy(rho), k - 1));
      if (!(lhs == contact_homotopy(contact_component(rho, k)))) return false;
    }

    DiffForm contact_rho =
        wedge(to_coordinate_basis(omega_form(spec, 1 + trial % spec.m,
                                             MultiIndex())),
              random_form(rng, spec, q - 1));
    if (!zero_section_pullback(contact_rho).is_zero()) return false;
    if (!(contact_homotopy(exterior_derivative(contact_rho)) +
              exterior_derivative(contact_homotopy(contact_rho)) ==
          contact_rho))
      return false;
  }
  return true;
}

bool derivative_commutators_hold() {
  std::mt19937 rng(606);
  for (int trial = 0; trial < 50; ++trial) {
    const JetSpec spec = small_bundles()[trial % small_bundles().size()];
    Expr f = random_poly(rng, spec, 4, 3);

    std::uniform_int_distribution<int> base(1, spec.n);
    std::uniform_int_distribution<int> fibre(1, spec.m);
    std::uniform_int_distribution<int> length(1, spec.r);
    const int i = base(rng);
    const int sigma = fibre(rng);
    std::vector<int> raw(static_cast<std::size_t>(length(rng)));
    for (int& entry : raw) entry = base(rng);
    const MultiIndex J = MultiIndex::canonicalize(raw, spec.n);

    Expr lhs = f.total_derivative(i).partial_jet(sigma, J) -
               f.partial_jet(sigma, J).total_derivative(i);
    Expr rhs;
    for (int entry : J.entries())
      if (entry == i) rhs += f.partial_jet(sigma, J.remove_one(i));
    rhs = rhs.scaled(Rational(1, J.order()));
    if (!(lhs == rhs)) return false;

    const int j = base(rng);
    if (!(f.total_derivative(i).total_derivative(j) ==
          f.total_derivative(j).total_derivative(i)))
      return false;
  }
  return true;
}

bool ladder_relations_hold_on_full_bases() {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= 3; ++k) {
      const FockShape shape{n, k, {}};
      for (const auto& tuple : canonical_tuples(shape)) {
        FockTensor x = basis_tensor(shape, tuple);
        for (int l = 1; l <= n; ++l)
          for (int m = 1; m <= n; ++m) {
            FockTensor anti = annihilate_fermion(l, create_fermion(m, x));
            if (k > 0) anti = anti + create_fermion(m, annihilate_fermion(l, x));
            if (!(anti == (l == m ? x : x.scaled(Rational(0))))) return false;
            if (!(create_fermion(l, create_fermion(m, x)) +
                  create_fermion(m, create_fermion(l, x)))
                     .is_zero())
              return false;
            if (k >= 2 && !(annihilate_fermion(l, annihilate_fermion(m, x)) +
                            annihilate_fermion(m, annihilate_fermion(l, x)))
                               .is_zero())
              return false;
          }
      }
    }
    for (int r = 0; r <= 3; ++r) {
      const FockShape shape{n, 0, {r}};
      for (const auto& tuple : canonical_tuples(shape)) {
        FockTensor x = basis_tensor(shape, tuple);
        for (int l = 1; l <= n; ++l)
          for (int m = 1; m <= n; ++m) {
            FockTensor comm = annihilate_boson(1, l, create_boson(1, m, x));
            if (r > 0) comm = comm - create_boson(1, m, annihilate_boson(1, l, x));
            if (!(comm == (l == m ? x : x.scaled(Rational(0))))) return false;
            if (!(create_boson(1, l, create_boson(1, m, x)) ==
                  create_boson(1, m, create_boson(1, l, x))))
              return false;
            if (r >= 2 && !(annihilate_boson(1, l, annihilate_boson(1, m, x)) ==
                            annihilate_boson(1, m, annihilate_boson(1, l, x))))
              return false;
          }
      }
    }
    // Mixed sectors: nilpotence, anticommutation, and the number identity
    // {B, B*} = (r - k + n) on each sector.
    for (int k = 0; k <= std::min(n, 3); ++k)
      for (int r = 0; r <= 3; ++r) {
        const FockShape shape{n, k, {r}};
        for (const auto& tuple : canonical_tuples(shape)) {
          FockTensor x = basis_tensor(shape, tuple);
          if (!apply_B(1, apply_B(1, x)).is_zero()) return false;
          FockTensor anti = apply_B_star(1, apply_B(1, x));
          if (k > 0 && r > 0) anti = anti + apply_B(1, apply_B_star(1, x));
          if (!(anti == x.scaled(Rational(r - k + n)))) return false;
        }
      }
    for (int k = 0; k <= std::min(n, 2); ++k)
      for (int r1 = 0; r1 <= 2; ++r1)
        for (int r2 = 0; r2 <= 2; ++r2) {
          const FockShape shape{n, k, {r1, r2}};
          for (const auto& tuple : canonical_tuples(shape)) {
            FockTensor x = basis_tensor(shape, tuple);
            if (!apply_B(1, apply_B(1, x)).is_zero()) return false;
            if (!apply_B(2, apply_B(2, x)).is_zero()) return false;
            if (!(apply_B(1, apply_B(2, x)) + apply_B(2, apply_B(1, x)))
                     .is_zero())
              return false;
          }
        }
  }
  return true;
}

bool paired_raising_maps_are_jointly_injective() {
  const int n = 2;
  for (int r1 = 0; r1 <= 3; ++r1)
    for (int r2 = 0; r2 <= 3; ++r2) {
      const FockShape domain{n, 0, {r1, r2}};
      const std::vector<std::vector<int>> basis = canonical_tuples(domain);
      const FockShape raised{n, 2, {r1 + 1, r2 + 1}};
      const std::vector<std::vector<int>> targets = canonical_tuples(raised);

      Matrix map(targets.size(), basis.size());
      for (std::size_t col = 0; col < basis.size(); ++col) {
        FockTensor image =
            apply_B(1, apply_B(2, basis_tensor(domain, basis[col])));
        for (std::size_t row = 0; row < targets.size(); ++row)
          map.at(row, col) = image.at(targets[row]);
      }
      if (rank(map) != basis.size()) return false;
    }
  return true;
}

bool trace_decomposition_splits_and_reassembles() {
  std::mt19937 rng(707);
  const std::vector<FockShape> shapes{{2, 1, {1}}, {2, 1, {2}}, {2, 1, {3}},
                                      {3, 1, {1, 2}}, {3, 2, {2}}, {2, 0, {2}}};
  for (int trial = 0; trial < 30; ++trial) {
    const FockShape& shape = shapes[trial % shapes.size()];
    FockTensor x = random_tensor(rng, shape);
    TraceDecomposition split = trace_decompose(x);
    if (!is_traceless(split.traceless)) return false;

    FockTensor rebuilt = split.traceless;
    for (std::size_t alpha = 0; alpha < split.parts.size(); ++alpha)
      rebuilt = rebuilt + apply_B(static_cast<int>(alpha) + 1,
                                  split.parts[alpha]);
    if (!(rebuilt == x)) return false;

    TraceDecomposition again = trace_decompose(x);
    if (!(again.traceless == split.traceless)) return false;
    if (again.parts.size() != split.parts.size()) return false;
    for (std::size_t alpha = 0; alpha < split.parts.size(); ++alpha)
      if (!(again.parts[alpha] == split.parts[alpha])) return false;
  }
  return true;
}

bool constructed_trivial_densities_check_out() {
  std::mt19937 rng(808);
  const std::vector<JetSpec> bundles{{1, 1, 1}, {2, 1, 1}, {2, 2, 1},
                                     {1, 1, 2}, {2, 1, 2}};
  for (int trial = 0; trial < 20; ++trial) {
    const JetSpec spec = bundles[trial % bundles.size()];
    auto [lag, flux] = trivial_lagrangian_from_coeffs(
        random_family(rng, spec, spec.n - 1));

    Expr divergence;
    for (int j = 1; j <= spec.n; ++j)
      divergence += flux[static_cast<std::size_t>(j) - 1].total_derivative(j);
    if (!(lag.density == divergence)) return false;

    for (const Expr& component : euler_lagrange(lag).components)
      if (!component.is_zero()) return false;
    if (!check_highest_order_system(lag)) return false;
  }
  return true;
}

bool contact_forms_reassemble_from_structure() {
  std::mt19937 rng(909);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 1 + trial % 2;
    const int r = 1 + (trial / 2) % 2;
    const JetSpec spec{2, m, r};

    DiffForm rho(spec, 2, FormBasis::Contact);
    for (int sigma = 1; sigma <= m; ++sigma)
      for (const MultiIndex& J : enumerate_up_to(2, r - 1)) {
        DiffForm phi(spec, 1, FormBasis::Contact);
        for (int i = 1; i <= 2; ++i)
          phi.add_term({CoframeSymbol::dx(i)}, random_poly(rng, spec));
        rho = rho + wedge(omega_form(spec, sigma, J), phi);
        if (J.order() == r - 1)
          rho = rho + wedge(domega_form(spec, sigma, J),
                            DiffForm::function(spec, random_poly(rng, spec)));
      }
    if (!is_contact(rho)) return false;

    StructureDecomposition dec = contact_structure_decomposition(rho);
    DiffForm rebuilt(spec, 2, FormBasis::Contact);
    for (const auto& [key, phi] : dec.phi)
      rebuilt = rebuilt + wedge(omega_form(spec, key.second, key.first), phi);
    for (const auto& [key, psi] : dec.psi)
      rebuilt = rebuilt + wedge(domega_form(spec, key.second, key.first), psi);
    if (!(to_coordinate_basis(rebuilt) == to_coordinate_basis(rho)))
      return false;
  }
  return true;
}

bool equations_transform_naturally() {
  const JetSpec line{1, 1, 1};
  auto L = [](const JetSpec& spec, const std::string& text) {
    return Lagrangian(spec, parse_expr(text, spec));
  };
  auto E = [](const JetSpec& spec, const std::string& text) {
    return parse_expr(text, spec);
  };

  const std::vector<BundleMorphism> line_maps{
      BundleMorphism::identity(line),
      {line, {E(line, "2*x1")}, {E(line, "y1")}},
      {line, {E(line, "x1 + 1")}, {E(line, "y1")}},
      {line, {E(line, "x1")}, {E(line, "2*y1")}},
      {line, {E(line, "x1")}, {E(line, "y1 + x1^2")}},
      {line, {E(line, "-x1")}, {E(line, "y1 - 1")}},
  };
  const std::vector<Lagrangian> line_densities{
      L(line, "1/2*y1_[1]^2"),
      L(line, "1/2*y1^2 + x1*y1_[1]"),
      L(line, "y1*y1_[1] + y1^3"),
  };

  const JetSpec plane{2, 2, 1};
  const std::vector<BundleMorphism> plane_maps{
      BundleMorphism::identity(plane),
      {plane,
       {E(plane, "x1 + x2"), E(plane, "x2")},
       {E(plane, "y1"), E(plane, "y2")}},
      {plane,
       {E(plane, "x1 + x2"), E(plane, "x2")},
       {E(plane, "y1 + y2"), E(plane, "y2 + x1")}},
      {plane,
       {E(plane, "x2"), E(plane, "x1")},
       {E(plane, "y2"), E(plane, "y1")}},
  };
  const std::vector<Lagrangian> plane_densities{
      L(plane, "1/2*y1_[1]^2 + 1/2*y2_[2]^2 + y1*y2"),
      L(plane, "y1_[2]*y2_[1] + x1*y1"),
  };

  for (const BundleMorphism& phi : line_maps)
    for (const Lagrangian& lag : line_densities)
      if (!check_el_naturality(phi, lag)) return false;
  for (const BundleMorphism& phi : plane_maps)
    for (const Lagrangian& lag : plane_densities)
      if (!check_el_naturality(phi, lag)) return false;

  // The contact ideal is stable under pullback by prolonged morphisms,
  // including on second-order charts.
  auto contact_pullbacks = [](const BundleMorphism& phi, const JetSpec& spec) {
    for (int sigma = 1; sigma <= spec.m; ++sigma)
      for (const MultiIndex& J : enumerate_up_to(spec.n, spec.r - 1))
        if (!is_contact(pullback_form(phi, omega_form(spec, sigma, J))))
          return false;
    return true;
  };
  for (const BundleMorphism& phi : line_maps)
    if (!contact_pullbacks(phi, line)) return false;
  for (const BundleMorphism& phi : plane_maps)
    if (!contact_pullbacks(phi, plane)) return false;

  const JetSpec line2 = line.with_order(2);
  const BundleMorphism bent{line2, {E(line2, "2*x1")},
                            {E(line2, "y1 + x1^2")}};
  if (!contact_pullbacks(bent, line2)) return false;
  const JetSpec plane2{2, 1, 2};
  const BundleMorphism tilted{plane2,
                              {E(plane2, "x1 + x2"), E(plane2, "x2")},
                              {E(plane2, "y1 + x1")}};
  if (!contact_pullbacks(tilted, plane2)) return false;
  return true;
}

/// Compares the symbolic equation against the gradient of the action of a
/// periodic 64-point discretization, with the jet slots filled by iterated
/// central differences (so the summation-by-parts structure is exact and
/// only floating-point noise remains).
bool discretized_action_gradient_matches() {
  const JetSpec line{1, 1, 1};
  const int N = 64;
  const double h = 2.0 * M_PI / N;
  const double eps = 1e-5;
  const double tolerance = 1e-6;

  const Generator gx = Generator::base(1);
  const Generator gy = Generator::jet_coord(1, MultiIndex());
  const Generator gy1 = Generator::jet_coord(1, MultiIndex::canonicalize({1}, 1));
  const Generator gy11 =
      Generator::jet_coord(1, MultiIndex::canonicalize({1, 1}, 1));

  std::vector<double> u(N);
  for (int k = 0; k < N; ++k)
    u[k] = std::sin(k * h) + 0.5 * std::cos(2.0 * k * h);

  auto shift = [&](const std::vector<double>& v, int k, int by) {
    return v[static_cast<std::size_t>(((k + by) % N + N) % N)];
  };
  auto central = [&](const std::vector<double>& v) {
    std::vector<double> out(N);
    for (int k = 0; k < N; ++k)
      out[k] = (shift(v, k, 1) - shift(v, k, -1)) / (2.0 * h);
    return out;
  };

  for (const std::string& text :
       {std::string("1/2*y1_[1]^2"), std::string("1/2*(y1^2 - y1_[1]^2)")}) {
    const Expr density = parse_expr(text, line);
    const Expr equation =
        euler_lagrange(Lagrangian(line, density)).component(1);

    auto action = [&](const std::vector<double>& v) {
      const std::vector<double> v1 = central(v);
      double total = 0.0;
      for (int k = 0; k < N; ++k)
        total += density.eval_double(
            {{gx, k * h}, {gy, v[k]}, {gy1, v1[k]}});
      return total * h;
    };

    const std::vector<double> u1 = central(u);
    const std::vector<double> u2 = central(u1);
    for (int k = 0; k < N; ++k) {
      const double symbolic = equation.eval_double(
          {{gx, k * h}, {gy, u[k]}, {gy1, u1[k]}, {gy11, u2[k]}});
      std::vector<double> bumped = u;
      bumped[k] = u[k] + eps;
      const double up = action(bumped);
      bumped[k] = u[k] - eps;
      const double down = action(bumped);
      const double gradient = (up - down) / (2.0 * eps * h);
      if (std::abs(symbolic - gradient) > tolerance) return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  int failures = 0;
  auto criterion = [&failures](const std::string& name, bool (*check)()) {
    const auto start = std::chrono::steady_clock::now();
    const bool ok = check();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  ("
              << std::fixed << std::setprecision(1) << seconds << "s)"
              << std::endl;
    if (!ok) ++failures;
  };

  criterion("euler_lagrange annihilates total divergences (50 random fluxes)",
            divergences_have_zero_equations);
  criterion("helmholtz vanishes on euler_lagrange output (30 random densities)",
            equations_from_densities_pass_helmholtz);
  criterion("tonti_lagrangian reproduces its source form (20 round trips)",
            homotopy_density_recovers_equations);
  criterion("contact components grade the chart pullback (30 random forms)",
            contact_grading_sums_to_the_pullback);
  criterion("fibre homotopy reconstructs forms (30 random forms)",
            fibre_homotopy_reconstructs_forms);
  criterion("partials and total derivatives commute as graded shifts (50 cases)",
            derivative_commutators_hold);
  criterion("ladder operator relations hold on full bases (n <= 3, degrees <= 3)",
            ladder_relations_hold_on_full_bases);
  criterion("paired raising maps have trivial joint kernel (n = 2, degrees <= 3)",
            paired_raising_maps_are_jointly_injective);
  criterion("trace decomposition splits, reassembles, and repeats (30 tensors)",
            trace_decomposition_splits_and_reassembles);
  criterion("constructed trivial densities are exact divergences (20 families)",
            constructed_trivial_densities_check_out);
  criterion("contact forms reassemble from their structure decomposition (10)",
            contact_forms_reassemble_from_structure);
  criterion("equations transform naturally under fibred maps (10 x 5)",
            equations_transform_naturally);
  criterion("symbolic equations match the discretized action gradient (1e-6)",
            discretized_action_gradient_matches);

  if (failures != 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
