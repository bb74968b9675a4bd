#ifndef JETCALC_EXPR_HPP
#define JETCALC_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "jetcalc/errors.hpp"
#include "jetcalc/multiindex.hpp"
#include "jetcalc/rational.hpp"

namespace jetcalc {

/// Identifies the chart all expressions of a problem live on: base dimension
/// n, fibre dimension m, jet order r.
struct JetSpec {
  int n = 1;
  int m = 1;
  int r = 0;

  /// Same chart up to the jet order. Raising the order keeps every generator
  /// valid, so specs are compared by (n, m) for compatibility and by r for
  /// order bookkeeping.
  bool same_bundle(const JetSpec& other) const {
    return n == other.n && m == other.m;
  }
  JetSpec with_order(int order) const { return JetSpec{n, m, order}; }
  bool operator==(const JetSpec&) const = default;
};

/// Throws ShapeError unless n >= 1, m >= 1, r >= 0.
void validate(const JetSpec& spec);

class Expr;

enum class GenKind : unsigned char { Base, Jet, Func };
enum class Elem : unsigned char { Sin, Cos, Exp, Ln };

/// An atomic generator of the polynomial algebra: a base coordinate x^i, a
/// jet coordinate y^sigma_J (J canonical), or an elementary function applied
/// to a canonical sub-expression. Generators are ordered totally: base
/// coordinates by i, then jet coordinates by (|J|, sigma, J), then function
/// atoms by (function, argument).
struct Generator {
  GenKind kind = GenKind::Base;
  int index = 0;    // i for Base, sigma for Jet
  MultiIndex jet;   // for Jet
  Elem fn = Elem::Sin;
  std::shared_ptr<const Expr> arg;  // for Func; structurally canonical

  static Generator base(int i);
  static Generator jet_coord(int sigma, MultiIndex J);
  static Generator func(Elem fn, const Expr& argument);
};

int compare(const Generator& a, const Generator& b);
bool operator<(const Generator& a, const Generator& b);
bool operator==(const Generator& a, const Generator& b);

struct Factor {
  Generator gen;
  int exponent = 1;
};

/// A product of generator powers, factors sorted by the generator order.
/// The empty monomial is the constant monomial.
struct Monomial {
  std::vector<Factor> factors;
};

int compare(const Monomial& a, const Monomial& b);

struct Term {
  Rational coeff;
  Monomial mono;
};

/// An exact polynomial over the rationals in the generators, kept in
/// canonical form: terms sorted by monomial, like terms collected, zero
/// coefficients dropped, rationals in lowest terms. Immutable value type.
class Expr {
 public:
  Expr() = default;

  static Expr zero() { return Expr(); }
  static Expr constant(const Rational& c);
  static Expr constant(long c) { return constant(Rational(c)); }
  static Expr base(int i);
  static Expr jet(int sigma, const MultiIndex& J);
  static Expr apply(Elem fn, const Expr& argument);

  const std::vector<Term>& terms() const { return m_terms; }
  bool is_zero() const { return m_terms.empty(); }
  bool is_constant() const;
  /// The value when is_constant(); throws ShapeError otherwise.
  Rational constant_value() const;

  Expr operator+(const Expr& other) const;
  Expr operator-(const Expr& other) const;
  Expr operator-() const;
  Expr operator*(const Expr& other) const;
  Expr& operator+=(const Expr& other);
  Expr& operator-=(const Expr& other);
  Expr& operator*=(const Expr& other);
  Expr scaled(const Rational& c) const;
  Expr pow(int exponent) const;  // exponent >= 0

  bool operator==(const Expr& other) const;

  /// Max |J| over jet generators present, including inside function
  /// arguments; 0 when none.
  int jet_order() const;

  /// True when no elementary-function atom has a fibre-dependent argument.
  bool polynomial_in_fibre() const;

  /// True when some generator is a jet coordinate or a fibre-dependent
  /// function atom.
  bool depends_on_fibre() const;

  /// True when an elementary-function atom occurs anywhere.
  bool has_function_atoms() const;

  /// All generators occurring at the top level of monomials (function atoms
  /// are reported as whole generators, their argument generators are not
  /// expanded).
  std::set<Generator> top_level_generators() const;

  /// Base and jet generators occurring anywhere, including inside function
  /// arguments.
  std::set<Generator> coordinate_generators() const;

  /// Plain partial derivative with respect to a base or jet generator,
  /// treating every other generator as independent; chains through function
  /// atoms. Throws UnsupportedDivision when the chain rule needs 1/u.
  Expr plain_partial(const Generator& g) const;

  /// d/dx^i holding jet coordinates fixed: plain partial with respect to x^i.
  Expr partial_base(int i) const { return plain_partial(Generator::base(i)); }

  /// Plain partial with respect to y^sigma_J.
  Expr plain_partial_jet(int sigma, const MultiIndex& J) const {
    return plain_partial(Generator::jet_coord(sigma, J));
  }

  /// Normalized jet partial: (r_1! ... r_n!/|J|!) times the plain partial,
  /// i.e. plain_partial / weight(J).
  Expr partial_jet(int sigma, const MultiIndex& J) const;

  /// Formal (total) derivative: d_i x^j = delta, d_i y^sigma_J = y^sigma_{Ji},
  /// Leibniz and chain rules. Raises the jet order by one.
  Expr total_derivative(int i) const;

  /// Iterated total derivative over the entries of J.
  Expr total_derivative_multi(const MultiIndex& J) const;

  /// Replaces every jet coordinate y^sigma_J by t * y^sigma_J.
  Expr scale_fibre(const Rational& t) const;

  /// Simultaneous substitution of base/jet generators by expressions.
  /// Generators absent from the map are kept; function atoms are rebuilt
  /// around their substituted arguments.
  Expr substitute(const std::map<Generator, Expr>& images) const;

  /// Exact evaluation; every base/jet generator present must be assigned.
  /// Throws UnboundGenerator when one is missing and NonPolynomialInFibre
  /// when a function atom occurs (use eval_double for those).
  Rational eval(const std::map<Generator, Rational>& point) const;

  /// Floating-point evaluation, function atoms included.
  double eval_double(const std::map<Generator, double>& point) const;

 private:
  std::vector<Term> m_terms;

  void normalize();
  friend int compare(const Expr& a, const Expr& b);
  friend Expr make_expr(std::vector<Term> terms);
};

int compare(const Expr& a, const Expr& b);
bool operator<(const Expr& a, const Expr& b);

/// Assembles an expression from raw terms and normalizes it.
Expr make_expr(std::vector<Term> terms);

/// Splits into homogeneous components of total fibre degree, keyed by
/// degree; requires polynomial fibre dependence (NonPolynomialInFibre).
std::map<int, Expr> homogeneous_components(const Expr& e);

/// Total fibre degree of a monomial-wise polynomial expression; 0 for the
/// zero expression. Throws NonPolynomialInFibre.
int fibre_degree(const Monomial& mono);

/// Canonical rendering per the documented grammar; parse(render(e)) == e.
std::string render(const Expr& e);

/// Parses the expression grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*     ("/" only by a rational)
///   factor := "-" factor | atom ("^" nonneg-integer)?
///   atom   := rational | coord | func "(" expr ")" | "(" expr ")"
///   coord  := "x" int | "y" int ("_[" int (" " int)* "]")?
///   func   := "sin"|"cos"|"exp"|"ln"
/// Whitespace-insensitive. Indices are validated against the spec
/// (InvalidIndex) and jet orders against spec.r (OrderExceeded).
Expr parse_expr(const std::string& text, const JetSpec& spec);

}  // namespace jetcalc

#endif
