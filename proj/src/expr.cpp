#include "jetcalc/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace jetcalc {

void validate(const JetSpec& spec) {
  if (spec.n < 1 || spec.m < 1 || spec.r < 0) {
    throw ShapeError("chart requires n >= 1, m >= 1, r >= 0");
  }
}

Generator Generator::base(int i) {
  Generator g;
  g.kind = GenKind::Base;
  g.index = i;
  return g;
}

Generator Generator::jet_coord(int sigma, MultiIndex J) {
  Generator g;
  g.kind = GenKind::Jet;
  g.index = sigma;
  g.jet = std::move(J);
  return g;
}

Generator Generator::func(Elem fn, const Expr& argument) {
  Generator g;
  g.kind = GenKind::Func;
  g.fn = fn;
  g.arg = std::make_shared<const Expr>(argument);
  return g;
}

int compare(const Generator& a, const Generator& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case GenKind::Base:
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      return 0;
    case GenKind::Jet: {
      auto c = a.jet.order() <=> b.jet.order();
      if (c != 0) return c < 0 ? -1 : 1;
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      auto l = a.jet <=> b.jet;
      if (l != 0) return l < 0 ? -1 : 1;
      return 0;
    }
    case GenKind::Func: {
      if (a.fn != b.fn) return a.fn < b.fn ? -1 : 1;
      return compare(*a.arg, *b.arg);
    }
  }
  return 0;
}

bool operator<(const Generator& a, const Generator& b) {
  return compare(a, b) < 0;
}

bool operator==(const Generator& a, const Generator& b) {
  return compare(a, b) == 0;
}

int compare(const Monomial& a, const Monomial& b) {
  std::size_t len = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < len; ++i) {
    int c = compare(a.factors[i].gen, b.factors[i].gen);
    if (c != 0) return c;
    if (a.factors[i].exponent != b.factors[i].exponent)
      return a.factors[i].exponent < b.factors[i].exponent ? -1 : 1;
  }
  if (a.factors.size() != b.factors.size())
    return a.factors.size() < b.factors.size() ? -1 : 1;
  return 0;
}

int compare(const Expr& a, const Expr& b) {
  std::size_t len = std::min(a.m_terms.size(), b.m_terms.size());
  for (std::size_t i = 0; i < len; ++i) {
    int c = compare(a.m_terms[i].mono, b.m_terms[i].mono);
    if (c != 0) return c;
    if (a.m_terms[i].coeff != b.m_terms[i].coeff)
      return a.m_terms[i].coeff < b.m_terms[i].coeff ? -1 : 1;
  }
  if (a.m_terms.size() != b.m_terms.size())
    return a.m_terms.size() < b.m_terms.size() ? -1 : 1;
  return 0;
}

bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

Expr make_expr(std::vector<Term> terms) {
  Expr e;
  e.m_terms = std::move(terms);
  e.normalize();
  return e;
}

void Expr::normalize() {
  for (auto& term : m_terms) {
    auto& f = term.mono.factors;
    std::sort(f.begin(), f.end(), [](const Factor& x, const Factor& y) {
      return compare(x.gen, y.gen) < 0;
    });
    // Merge equal adjacent generators.
    std::vector<Factor> merged;
    for (auto& factor : f) {
      if (!merged.empty() && compare(merged.back().gen, factor.gen) == 0) {
        merged.back().exponent += factor.exponent;
      } else {
        merged.push_back(factor);
      }
    }
    std::erase_if(merged, [](const Factor& x) { return x.exponent == 0; });
    f = std::move(merged);
  }
  std::sort(m_terms.begin(), m_terms.end(), [](const Term& a, const Term& b) {
    return compare(a.mono, b.mono) < 0;
  });
  std::vector<Term> collected;
  for (auto& term : m_terms) {
    if (!collected.empty() && compare(collected.back().mono, term.mono) == 0) {
      collected.back().coeff += term.coeff;
    } else {
      collected.push_back(std::move(term));
    }
  }
  std::erase_if(collected, [](const Term& t) { return t.coeff == 0; });
  m_terms = std::move(collected);
}

Expr Expr::constant(const Rational& c) {
  Expr e;
  if (c != 0) e.m_terms.push_back(Term{c, Monomial{}});
  return e;
}

Expr Expr::base(int i) {
  Expr e;
  e.m_terms.push_back(Term{Rational(1), Monomial{{Factor{Generator::base(i), 1}}}});
  return e;
}

Expr Expr::jet(int sigma, const MultiIndex& J) {
  Expr e;
  e.m_terms.push_back(
      Term{Rational(1), Monomial{{Factor{Generator::jet_coord(sigma, J), 1}}}});
  return e;
}

Expr Expr::apply(Elem fn, const Expr& argument) {
  Expr e;
  e.m_terms.push_back(
      Term{Rational(1), Monomial{{Factor{Generator::func(fn, argument), 1}}}});
  return e;
}

bool Expr::is_constant() const {
  return m_terms.empty() ||
         (m_terms.size() == 1 && m_terms[0].mono.factors.empty());
}

Rational Expr::constant_value() const {
  if (m_terms.empty()) return Rational(0);
  if (m_terms.size() == 1 && m_terms[0].mono.factors.empty())
    return m_terms[0].coeff;
  throw ShapeError("expression is not a constant");
}

Expr Expr::operator+(const Expr& other) const {
  std::vector<Term> terms = m_terms;
  terms.insert(terms.end(), other.m_terms.begin(), other.m_terms.end());
  return make_expr(std::move(terms));
}

Expr Expr::operator-(const Expr& other) const { return *this + (-other); }

Expr Expr::operator-() const {
  std::vector<Term> terms = m_terms;
  for (auto& t : terms) t.coeff = -t.coeff;
  Expr e;
  e.m_terms = std::move(terms);
  return e;
}

Expr Expr::operator*(const Expr& other) const {
  std::vector<Term> terms;
  terms.reserve(m_terms.size() * other.m_terms.size());
  for (const auto& a : m_terms) {
    for (const auto& b : other.m_terms) {
      Term t;
      t.coeff = a.coeff * b.coeff;
      t.mono.factors = a.mono.factors;
      t.mono.factors.insert(t.mono.factors.end(), b.mono.factors.begin(),
                            b.mono.factors.end());
      terms.push_back(std::move(t));
    }
  }
  return make_expr(std::move(terms));
}

Expr& Expr::operator+=(const Expr& other) { return *this = *this + other; }
Expr& Expr::operator-=(const Expr& other) { return *this = *this - other; }
Expr& Expr::operator*=(const Expr& other) { return *this = *this * other; }

Expr Expr::scaled(const Rational& c) const {
  if (c == 0) return Expr();
  std::vector<Term> terms = m_terms;
  for (auto& t : terms) t.coeff *= c;
  Expr e;
  e.m_terms = std::move(terms);
  return e;
}

Expr Expr::pow(int exponent) const {
  if (exponent < 0) throw UnsupportedDivision("negative exponent");
  Expr acc = Expr::constant(1);
  for (int i = 0; i < exponent; ++i) acc *= *this;
  return acc;
}

bool Expr::operator==(const Expr& other) const {
  return compare(*this, other) == 0;
}

namespace {

int generator_jet_order(const Generator& g) {
  switch (g.kind) {
    case GenKind::Base:
      return 0;
    case GenKind::Jet:
      return g.jet.order();
    case GenKind::Func:
      return g.arg->jet_order();
  }
  return 0;
}

bool generator_depends_on_fibre(const Generator& g) {
  switch (g.kind) {
    case GenKind::Base:
      return false;
    case GenKind::Jet:
      return true;
    case GenKind::Func:
      return g.arg->depends_on_fibre();
  }
  return false;
}

}  // namespace

int Expr::jet_order() const {
  int order = 0;
  for (const auto& term : m_terms)
    for (const auto& factor : term.mono.factors)
      order = std::max(order, generator_jet_order(factor.gen));
  return order;
}

bool Expr::polynomial_in_fibre() const {
  for (const auto& term : m_terms)
    for (const auto& factor : term.mono.factors)
      if (factor.gen.kind == GenKind::Func &&
          generator_depends_on_fibre(factor.gen))
        return false;
  return true;
}

bool Expr::depends_on_fibre() const {
  for (const auto& term : m_terms)
    for (const auto& factor : term.mono.factors)
      if (generator_depends_on_fibre(factor.gen)) return true;
  return false;
}

bool Expr::has_function_atoms() const {
  for (const auto& term : m_terms)
    for (const auto& factor : term.mono.factors) {
      if (factor.gen.kind == GenKind::Func) return true;
    }
  return false;
}

std::set<Generator> Expr::top_level_generators() const {
  std::set<Generator> out;
  for (const auto& term : m_terms)
    for (const auto& factor : term.mono.factors) out.insert(factor.gen);
  return out;
}

std::set<Generator> Expr::coordinate_generators() const {
  std::set<Generator> out;
  for (const auto& term : m_terms) {
    for (const auto& factor : term.mono.factors) {
      if (factor.gen.kind == GenKind::Func) {
        auto inner = factor.gen.arg->coordinate_generators();
        out.insert(inner.begin(), inner.end());
      } else {
        out.insert(factor.gen);
      }
    }
  }
  return out;
}

namespace {

/// Derivative of a single generator under a derivation that acts on base and
/// jet generators via `leaf` (returning the image expression). Handles the
/// elementary-function chain rule; ln with a non-constant derivative is
/// rejected because it would need a reciprocal.
Expr derive_generator(const Generator& g,
                      const std::function<Expr(const Generator&)>& leaf);

Expr derive_expr(const Expr& e,
                 const std::function<Expr(const Generator&)>& leaf) {
  Expr result;
  for (const auto& term : e.terms()) {
    for (std::size_t i = 0; i < term.mono.factors.size(); ++i) {
      const Factor& factor = term.mono.factors[i];
      Expr dgen = derive_generator(factor.gen, leaf);
      if (dgen.is_zero()) continue;
      // coeff * exponent * g^(exponent-1) * dgen * (other factors)
      Expr piece = Expr::constant(term.coeff * factor.exponent);
      for (std::size_t j = 0; j < term.mono.factors.size(); ++j) {
        const Factor& other = term.mono.factors[j];
        int exponent = other.exponent - (i == j ? 1 : 0);
        if (exponent == 0) continue;
        piece *= make_expr(
            {Term{Rational(1), Monomial{{Factor{other.gen, exponent}}}}});
      }
      piece *= dgen;
      result += piece;
    }
  }
  return result;
}

Expr derive_generator(const Generator& g,
                      const std::function<Expr(const Generator&)>& leaf) {
  if (g.kind != GenKind::Func) return leaf(g);
  Expr du = derive_expr(*g.arg, leaf);
  if (du.is_zero()) return Expr();
  switch (g.fn) {
    case Elem::Sin:
      return Expr::apply(Elem::Cos, *g.arg) * du;
    case Elem::Cos:
      return -(Expr::apply(Elem::Sin, *g.arg) * du);
    case Elem::Exp:
      return Expr::apply(Elem::Exp, *g.arg) * du;
    case Elem::Ln:
      throw UnsupportedDivision(
          "derivative of ln would need a reciprocal of its argument");
  }
  return Expr();
}

}  // namespace

Expr Expr::plain_partial(const Generator& g) const {
  return derive_expr(*this, [&g](const Generator& leaf) {
    return compare(leaf, g) == 0 ? Expr::constant(1) : Expr();
  });
}

Expr Expr::partial_jet(int sigma, const MultiIndex& J) const {
  Expr plain = plain_partial_jet(sigma, J);
  Rational w = weight(J);
  return plain.scaled(Rational(1) / w);
}

Expr Expr::total_derivative(int i) const {
  return derive_expr(*this, [i](const Generator& leaf) -> Expr {
    switch (leaf.kind) {
      case GenKind::Base:
        return leaf.index == i ? Expr::constant(1) : Expr();
      case GenKind::Jet:
        return Expr::jet(leaf.index, leaf.jet.append(i));
      case GenKind::Func:
        return Expr();  // unreachable: handled by derive_generator
    }
    return Expr();
  });
}

Expr Expr::total_derivative_multi(const MultiIndex& J) const {
  Expr acc = *this;
  for (int i : J.entries()) acc = acc.total_derivative(i);
  return acc;
}

Expr Expr::scale_fibre(const Rational& t) const {
  std::map<Generator, Expr> images;
  for (const auto& g : coordinate_generators()) {
    if (g.kind == GenKind::Jet)
      images[g] = Expr::jet(g.index, g.jet).scaled(t);
  }
  return substitute(images);
}

Expr Expr::substitute(const std::map<Generator, Expr>& images) const {
  Expr result;
  for (const auto& term : m_terms) {
    Expr piece = Expr::constant(term.coeff);
    for (const auto& factor : term.mono.factors) {
      Expr image;
      if (factor.gen.kind == GenKind::Func) {
        auto it = images.find(factor.gen);
        if (it != images.end()) {
          image = it->second;
        } else {
          image = Expr::apply(factor.gen.fn, factor.gen.arg->substitute(images));
        }
      } else {
        auto it = images.find(factor.gen);
        image = (it != images.end())
                    ? it->second
                    : make_expr({Term{Rational(1),
                                      Monomial{{Factor{factor.gen, 1}}}}});
      }
      piece *= image.pow(factor.exponent);
    }
    result += piece;
  }
  return result;
}

int fibre_degree(const Monomial& mono) {
  int degree = 0;
  for (const auto& factor : mono.factors) {
    switch (factor.gen.kind) {
      case GenKind::Base:
        break;
      case GenKind::Jet:
        degree += factor.exponent;
        break;
      case GenKind::Func:
        if (factor.gen.arg->depends_on_fibre())
          throw NonPolynomialInFibre(
              "elementary function of a fibre-dependent argument");
        break;
    }
  }
  return degree;
}

std::map<int, Expr> homogeneous_components(const Expr& e) {
  std::map<int, Expr> out;
  for (const auto& term : e.terms()) {
    int d = fibre_degree(term.mono);
    Expr piece = make_expr({term});
    auto [it, inserted] = out.emplace(d, piece);
    if (!inserted) it->second += piece;
  }
  return out;
}

Rational Expr::eval(const std::map<Generator, Rational>& point) const {
  Rational total(0);
  for (const auto& term : m_terms) {
    Rational value = term.coeff;
    for (const auto& factor : term.mono.factors) {
      if (factor.gen.kind == GenKind::Func)
        throw NonPolynomialInFibre(
            "exact evaluation defined for polynomial expressions only");
      auto it = point.find(factor.gen);
      if (it == point.end())
        throw UnboundGenerator("no value assigned to a generator");
      Rational base = it->second;
      for (int k = 0; k < factor.exponent; ++k) value *= base;
    }
    total += value;
  }
  return total;
}

double Expr::eval_double(const std::map<Generator, double>& point) const {
  double total = 0.0;
  for (const auto& term : m_terms) {
    double value = to_double(term.coeff);
    for (const auto& factor : term.mono.factors) {
      double base = 0.0;
      if (factor.gen.kind == GenKind::Func) {
        double inner = factor.gen.arg->eval_double(point);
        switch (factor.gen.fn) {
          case Elem::Sin:
            base = std::sin(inner);
            break;
          case Elem::Cos:
            base = std::cos(inner);
            break;
          case Elem::Exp:
            base = std::exp(inner);
            break;
          case Elem::Ln:
            base = std::log(inner);
            break;
        }
      } else {
        auto it = point.find(factor.gen);
        if (it == point.end())
          throw UnboundGenerator("no value assigned to a generator");
        base = it->second;
      }
      value *= std::pow(base, factor.exponent);
    }
    total += value;
  }
  return total;
}

namespace {

const char* elem_name(Elem fn) {
  switch (fn) {
    case Elem::Sin:
      return "sin";
    case Elem::Cos:
      return "cos";
    case Elem::Exp:
      return "exp";
    case Elem::Ln:
      return "ln";
  }
  return "?";
}

std::string render_generator(const Generator& g) {
  std::ostringstream out;
  switch (g.kind) {
    case GenKind::Base:
      out << 'x' << g.index;
      break;
    case GenKind::Jet:
      out << 'y' << g.index;
      if (g.jet.order() > 0) out << '_' << render(g.jet);
      break;
    case GenKind::Func:
      out << elem_name(g.fn) << '(' << render(*g.arg) << ')';
      break;
  }
  return out.str();
}

std::string render_term_magnitude(const Term& term) {
  std::ostringstream out;
  Rational magnitude = term.coeff < 0 ? Rational(-term.coeff) : term.coeff;
  bool printed = false;
  if (term.mono.factors.empty()) {
    out << to_string(magnitude);
    printed = true;
  } else if (magnitude != 1) {
    out << to_string(magnitude);
    printed = true;
  }
  for (const auto& factor : term.mono.factors) {
    if (printed) out << '*';
    out << render_generator(factor.gen);
    if (factor.exponent != 1) out << '^' << factor.exponent;
    printed = true;
  }
  return out.str();
}

}  // namespace

std::string render(const Expr& e) {
  if (e.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& term : e.terms()) {
    bool negative = term.coeff < 0;
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? " - " : " + ");
    }
    out << render_term_magnitude(term);
    first = false;
  }
  return out.str();
}

}  // namespace jetcalc
