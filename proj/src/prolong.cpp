#include "jetcalc/prolong.hpp"

#include <optional>
#include <string>
#include <utility>

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

/// Gauss-Jordan inverse with determinant tracking; empty when singular.
std::optional<std::pair<Matrix, Rational>> inverse_with_determinant(Matrix a) {
  const std::size_t n = a.rows();
  Matrix inverse = Matrix::identity(n);
  Rational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a.at(pivot, col) == Rational(0)) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a.at(pivot, c), a.at(col, c));
        std::swap(inverse.at(pivot, c), inverse.at(col, c));
      }
      det = det * Rational(-1);
    }
    Rational lead = a.at(col, col);
    det = det * lead;
    for (std::size_t c = 0; c < n; ++c) {
      a.at(col, c) = a.at(col, c) / lead;
      inverse.at(col, c) = inverse.at(col, c) / lead;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      Rational factor = a.at(row, col);
      if (factor == Rational(0)) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a.at(row, c) = a.at(row, c) - factor * a.at(col, c);
        inverse.at(row, c) = inverse.at(row, c) - factor * inverse.at(col, c);
      }
    }
  }
  return std::make_pair(inverse, det);
}

}  // namespace

ProjectableField::ProjectableField(JetSpec spec, std::vector<Expr> base,
                                   std::vector<Expr> fibre)
    : m_spec(spec), m_base(std::move(base)), m_fibre(std::move(fibre)) {
  validate(m_spec);
  if (static_cast<int>(m_base.size()) != m_spec.n)
    throw ShapeError("one base component per base coordinate required");
  if (static_cast<int>(m_fibre.size()) != m_spec.m)
    throw ShapeError("one fibre component per fibre coordinate required");
  for (const Expr& a : m_base) {
    validate_generators(a, m_spec);
    if (a.depends_on_fibre())
      throw ShapeError("base components must depend on base coordinates only");
  }
  for (const Expr& b : m_fibre) {
    validate_generators(b, m_spec);
    if (b.jet_order() > 0)
      throw OrderExceeded("fibre components must have jet order zero");
  }
}

const Expr& ProjectableField::base_component(int i) const {
  if (i < 1 || i > m_spec.n) throw InvalidIndex("base index outside 1..n");
  return m_base[static_cast<std::size_t>(i - 1)];
}

const Expr& ProjectableField::fibre_component(int sigma) const {
  if (sigma < 1 || sigma > m_spec.m)
    throw InvalidIndex("fibre index outside 1..m");
  return m_fibre[static_cast<std::size_t>(sigma - 1)];
}

BundleMorphism::BundleMorphism(JetSpec spec, std::vector<Expr> base,
                               std::vector<Expr> fibre)
    : m_spec(spec), m_base(std::move(base)), m_fibre(std::move(fibre)) {
  validate(m_spec);
  if (static_cast<int>(m_base.size()) != m_spec.n)
    throw ShapeError("one base component per base coordinate required");
  if (static_cast<int>(m_fibre.size()) != m_spec.m)
    throw ShapeError("one fibre component per fibre coordinate required");
  Matrix jacobian(static_cast<std::size_t>(m_spec.n),
                  static_cast<std::size_t>(m_spec.n));
  for (int i = 1; i <= m_spec.n; ++i) {
    const Expr& f = m_base[static_cast<std::size_t>(i - 1)];
    validate_generators(f, m_spec);
    if (f.depends_on_fibre())
      throw UnsupportedBaseMap(
          "base map must depend on base coordinates only");
    if (f.has_function_atoms())
      throw UnsupportedBaseMap("base map must be affine");
    for (int j = 1; j <= m_spec.n; ++j) {
      Expr slope = f.partial_base(j);
      if (!slope.is_constant())
        throw UnsupportedBaseMap("base map must be affine");
      jacobian.at(static_cast<std::size_t>(i - 1),
                  static_cast<std::size_t>(j - 1)) = slope.constant_value();
    }
  }
  auto inverted = inverse_with_determinant(jacobian);
  if (!inverted)
    throw SingularJacobian("the base Jacobian is not invertible");
  m_inverse = inverted->first;
  m_det = inverted->second;
  for (const Expr& F : m_fibre) {
    validate_generators(F, m_spec);
    if (F.jet_order() > 0)
      throw OrderExceeded("fibre map components must have jet order zero");
    if (F.has_function_atoms())
      throw ShapeError("fibre map components must be polynomial");
  }
}

BundleMorphism BundleMorphism::identity(const JetSpec& spec) {
  std::vector<Expr> base;
  for (int i = 1; i <= spec.n; ++i) base.push_back(Expr::base(i));
  std::vector<Expr> fibre;
  for (int sigma = 1; sigma <= spec.m; ++sigma)
    fibre.push_back(Expr::jet(sigma, MultiIndex()));
  return BundleMorphism(spec, std::move(base), std::move(fibre));
}

const Expr& BundleMorphism::base_component(int i) const {
  if (i < 1 || i > m_spec.n) throw InvalidIndex("base index outside 1..n");
  return m_base[static_cast<std::size_t>(i - 1)];
}

const Expr& BundleMorphism::fibre_component(int sigma) const {
  if (sigma < 1 || sigma > m_spec.m)
    throw InvalidIndex("fibre index outside 1..m");
  return m_fibre[static_cast<std::size_t>(sigma - 1)];
}

const Rational& BundleMorphism::inverse_jacobian(int l, int i) const {
  if (l < 1 || l > m_spec.n || i < 1 || i > m_spec.n)
    throw InvalidIndex("Jacobian index outside 1..n");
  return m_inverse.at(static_cast<std::size_t>(l - 1),
                      static_cast<std::size_t>(i - 1));
}

ProlongedField prolong_projectable(const ProjectableField& xi, int order) {
  if (order < 0) throw ShapeError("prolongation order must be nonnegative");
  const JetSpec& chart = xi.chart();
  ProlongedField out;
  out.spec = chart.with_order(order);
  for (int i = 1; i <= chart.n; ++i)
    out.base.push_back(xi.base_component(i));
  for (int sigma = 1; sigma <= chart.m; ++sigma)
    out.vertical[{sigma, MultiIndex()}] = xi.fibre_component(sigma);
  for (int k = 1; k <= order; ++k) {
    for (const MultiIndex& J : enumerate(chart.n, k)) {
      int i = J.entries().back();
      MultiIndex parent = J.remove_one(i);
      for (int sigma = 1; sigma <= chart.m; ++sigma) {
        Expr value = out.vertical[{sigma, parent}].total_derivative(i);
        for (int l = 1; l <= chart.n; ++l) {
          Expr slope = xi.base_component(l).partial_base(i);
          if (!slope.is_zero())
            value -= Expr::jet(sigma, parent.append(l)) * slope;
        }
        out.vertical[{sigma, J}] = value;
      }
    }
  }
  return out;
}

std::map<std::pair<int, MultiIndex>, Expr> prolong_morphism(
    const BundleMorphism& phi, int order) {
  if (order < 0) throw ShapeError("prolongation order must be nonnegative");
  const JetSpec& chart = phi.chart();
  std::map<std::pair<int, MultiIndex>, Expr> out;
  for (int sigma = 1; sigma <= chart.m; ++sigma)
    out[{sigma, MultiIndex()}] = phi.fibre_component(sigma);
  for (int k = 1; k <= order; ++k) {
    for (const MultiIndex& J : enumerate(chart.n, k)) {
      int i = J.entries().back();
      MultiIndex parent = J.remove_one(i);
      for (int sigma = 1; sigma <= chart.m; ++sigma) {
        Expr value;
        for (int l = 1; l <= chart.n; ++l) {
          const Rational& q = phi.inverse_jacobian(l, i);
          if (q == Rational(0)) continue;
          value += out[{sigma, parent}].total_derivative(l).scaled(q);
        }
        out[{sigma, J}] = value;
      }
    }
  }
  return out;
}

std::map<Generator, Expr> morphism_substitution(const BundleMorphism& phi,
                                                int order) {
  std::map<Generator, Expr> images;
  for (int i = 1; i <= phi.chart().n; ++i)
    images[Generator::base(i)] = phi.base_component(i);
  for (const auto& [slot, value] : prolong_morphism(phi, order))
    images[Generator::jet_coord(slot.first, slot.second)] = value;
  return images;
}

DiffForm pullback_form(const BundleMorphism& phi, const DiffForm& rho) {
  const JetSpec& spec = rho.chart();
  if (!phi.chart().same_bundle(spec))
    throw ShapeError("the morphism and the form must share one bundle");
  DiffForm source = to_coordinate_basis(rho);
  std::map<Generator, Expr> images = morphism_substitution(phi, spec.r);
  std::map<std::pair<int, MultiIndex>, Expr> components =
      prolong_morphism(phi, spec.r);

  auto symbol_differential = [&](const CoframeSymbol& symbol) {
    Expr target = symbol.kind == SymbolKind::DX
                      ? phi.base_component(symbol.index)
                      : components.at({symbol.index, symbol.jet});
    return exterior_derivative(DiffForm::function(spec, target));
  };

  DiffForm result(spec, source.degree(), FormBasis::Coordinate);
  for (const auto& [word, coeff] : source.terms()) {
    DiffForm factor = DiffForm::function(spec, coeff.substitute(images));
    for (const CoframeSymbol& symbol : word)
      factor = wedge(factor, symbol_differential(symbol));
    result = result + factor;
  }
  return result;
}

Lagrangian pullback_lagrangian(const BundleMorphism& phi,
                               const Lagrangian& lag) {
  if (!phi.chart().same_bundle(lag.spec))
    throw ShapeError("the morphism and the density must share one bundle");
  std::map<Generator, Expr> images = morphism_substitution(phi, lag.spec.r);
  Expr density =
      lag.density.substitute(images).scaled(phi.jacobian_determinant());
  return Lagrangian(lag.spec, density);
}

BundleMorphism parse_morphism(const std::string& text, const JetSpec& spec) {
  std::vector<Expr> base;
  std::vector<Expr> fibre;
  JetSpec point = spec.with_order(0);
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    std::size_t offset = start;
    start = end + 1;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t colon = line.find(':', first);
    if (colon == std::string::npos)
      throw ParseError("expected a 'base:' or 'fibre:' line", offset + first);
    std::string field = line.substr(first, colon - first);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
      field.pop_back();
    Expr value = parse_expr(line.substr(colon + 1), point);
    if (field == "base")
      base.push_back(value);
    else if (field == "fibre")
      fibre.push_back(value);
    else
      throw ParseError("unknown field '" + field + "'", offset + first);
  }
  return BundleMorphism(spec, std::move(base), std::move(fibre));
}

bool check_el_naturality(const BundleMorphism& phi, const Lagrangian& lag) {
  SourceForm transformed = euler_lagrange(pullback_lagrangian(phi, lag));
  SourceForm original = euler_lagrange(lag);
  std::map<Generator, Expr> images =
      morphism_substitution(phi, 2 * lag.spec.r);
  for (int sigma = 1; sigma <= lag.spec.m; ++sigma) {
    Expr expected;
    for (int nu = 1; nu <= lag.spec.m; ++nu)
      expected += phi.fibre_component(nu).plain_partial_jet(sigma,
                                                            MultiIndex()) *
                  original.component(nu).substitute(images);
    expected = expected.scaled(phi.jacobian_determinant());
    if (!(transformed.component(sigma) == expected)) return false;
  }
  return true;
}

}  // namespace jetcalc
