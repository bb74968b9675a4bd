#ifndef JETCALC_FORMS_HPP
#define JETCALC_FORMS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/expr.hpp"

namespace jetcalc {

enum class SymbolKind : unsigned char { DX, DY, OMEGA };

/// A coframe symbol on a jet chart: dx^i, dy^sigma_J, or the contact symbol
/// w^sigma_J standing for dy^sigma_J - y^sigma_{Jj} dx^j. Totally ordered:
/// all DX by i, then OMEGA/DY by (|J|, sigma, J) with OMEGA preceding DY at
/// an equal key.
struct CoframeSymbol {
  SymbolKind kind = SymbolKind::DX;
  int index = 0;   // i for DX, sigma otherwise
  MultiIndex jet;  // for DY and OMEGA

  static CoframeSymbol dx(int i) { return {SymbolKind::DX, i, MultiIndex()}; }
  static CoframeSymbol dy(int sigma, MultiIndex J) {
    return {SymbolKind::DY, sigma, std::move(J)};
  }
  static CoframeSymbol omega(int sigma, MultiIndex J) {
    return {SymbolKind::OMEGA, sigma, std::move(J)};
  }
};

int compare(const CoframeSymbol& a, const CoframeSymbol& b);
bool operator<(const CoframeSymbol& a, const CoframeSymbol& b);
bool operator==(const CoframeSymbol& a, const CoframeSymbol& b);

using Word = std::vector<CoframeSymbol>;

enum class FormBasis : unsigned char { Coordinate, Contact };

/// An exterior form on a jet chart, stored as a map from strictly increasing
/// coframe words to nonzero coefficients. Two representations are used:
/// the coordinate basis (dx, dy only) and the contact basis (dx, w, and dy
/// restricted to the chart's top order). Conversions between them are the
/// only place the substitution w = dy - y dx lives.
class DiffForm {
 public:
  DiffForm(JetSpec spec, int degree, FormBasis basis);

  static DiffForm function(const JetSpec& spec, const Expr& value);

  const JetSpec& chart() const { return m_spec; }
  int degree() const { return m_degree; }
  FormBasis basis() const { return m_basis; }
  const std::map<Word, Expr>& terms() const { return m_terms; }
  bool is_zero() const { return m_terms.empty(); }

  /// The coefficient of a degree-0 form; throws ShapeError on higher degree.
  Expr coefficient() const;

  /// Adds coeff * (the wedge of the word's symbols), sorting the word and
  /// tracking the sign; repeated symbols annihilate the contribution.
  /// Symbols are validated against the chart and basis tag.
  void add_term(Word word, const Expr& coeff);

  DiffForm operator+(const DiffForm& other) const;
  DiffForm operator-(const DiffForm& other) const;
  DiffForm operator-() const;
  DiffForm scaled(const Rational& c) const;
  /// Multiplies every coefficient by a scalar expression.
  DiffForm times(const Expr& factor) const;
  bool operator==(const DiffForm& other) const = default;

 private:
  JetSpec m_spec;
  int m_degree = 0;
  FormBasis m_basis = FormBasis::Coordinate;
  std::map<Word, Expr> m_terms;
};

/// Graded-commutative product. Operands must share the chart and basis tag
/// (BasisMismatch).
DiffForm wedge(const DiffForm& a, const DiffForm& b);

/// The 1-form dx^i.
DiffForm dx_form(const JetSpec& spec, int i);
/// The 1-form dy^sigma_J on the coordinate basis.
DiffForm dy_form(const JetSpec& spec, int sigma, const MultiIndex& J);
/// The contact 1-form w^sigma_J, |J| <= r-1.
DiffForm omega_form(const JetSpec& spec, int sigma, const MultiIndex& J);
/// The differential of w^sigma_J on the same chart: -w^sigma_{Ji} /\ dx^i
/// for |J| <= r-2, and -dy^sigma_{Ji} /\ dx^i at the top layer |J| = r-1.
DiffForm domega_form(const JetSpec& spec, int sigma, const MultiIndex& J);
/// The base volume form dx^1 /\ ... /\ dx^n.
DiffForm volume_form(const JetSpec& spec);
/// theta_i = (-1)^{i-1} dx^1 /\ ... omitting dx^i ... /\ dx^n, so that
/// dx^j /\ theta_i = delta^j_i theta_0.
DiffForm volume_contraction(const JetSpec& spec, int i);

/// Exterior derivative. Acts on the coordinate basis; a contact-basis input
/// is converted internally and the result converted back (raising the chart
/// order by one). Satisfies d(d rho) = 0 and the graded Leibniz rule.
DiffForm exterior_derivative(const DiffForm& rho);

/// Rewrites every dy-symbol through w = dy - y dx; the result lives on the
/// chart one order higher, in the contact basis.
DiffForm to_contact_basis(const DiffForm& rho);

/// Expands every w-symbol as dy - y dx on the same chart, yielding the
/// coordinate basis.
DiffForm to_coordinate_basis(const DiffForm& rho);

/// Re-tags a form onto a higher-order chart; a contact-basis form has its
/// top-order dy-symbols rewritten through w on the way up.
DiffForm promoted(const DiffForm& rho, int order);

/// The k-contact component p_k: the terms of the contact-basis image whose
/// words hold exactly k w-symbols. The components sum to the contact-basis
/// image, p_0 is the horizontal part, and
/// p_k(a /\ b) = sum_{l+s=k} p_l a /\ p_s b.
DiffForm contact_component(const DiffForm& rho, int k);

/// The horizontal part h rho = p_0 rho: dx passes through, dy^sigma_J goes
/// to y^sigma_{Jj} dx^j, w-symbols die. Multiplicative over the wedge.
DiffForm horizontalize(const DiffForm& rho);

/// A form is contact when its horizontal part vanishes identically.
bool is_contact(const DiffForm& rho);

/// For degree q > n (DegreeTooLow otherwise): true when p_{q-n} rho = 0.
bool is_strongly_contact(const DiffForm& rho);

/// The fibre-scaling homotopy operator A: integrates the dt-component of
/// the pullback of rho under y -> t y exactly over t in [0, 1], dropping
/// the degree by one. For every rho,
///   rho = A(d rho) + d(A rho) + zero_section_pullback(rho),
/// and for contact rho the last summand vanishes. Also
/// p_{k-1}(A rho) = A(p_k rho). Coefficients must be polynomial in the
/// fibre generators (NonPolynomialInFibre).
DiffForm contact_homotopy(const DiffForm& rho);

/// Pulls back along the zero section composed with the projection to the
/// base: jet generators become 0, dy- and w-symbols die, dx survives.
DiffForm zero_section_pullback(const DiffForm& rho);

/// A vertical vector field on the fibre bundle, xi = xi^sigma d/dy^sigma,
/// with coefficients of jet order at most the chart order.
class Evolution {
 public:
  Evolution(JetSpec spec, std::vector<Expr> components);

  const JetSpec& chart() const { return m_spec; }
  const Expr& component(int sigma) const;
  /// Highest jet order actually used by the coefficients.
  int order() const;

 private:
  JetSpec m_spec;
  std::vector<Expr> m_components;
};

/// A vector field on a jet chart with explicit coefficients for every slot:
/// base components xi^i and vertical components Xi^sigma_J for |J| up to
/// the chart order.
struct ProlongedField {
  JetSpec spec;
  std::vector<Expr> base;  // indexed 0..n-1 for xi^1..xi^n
  std::map<std::pair<int, MultiIndex>, Expr> vertical;
};

/// The jet prolongation of an evolution: vertical coefficients d_J xi^sigma
/// for all |J| <= order, zero base part.
ProlongedField prolong_evolution(const Evolution& xi, int order);

/// Interior product i_xi rho. The field must cover the form's chart order
/// (OrderMismatch). Contact symbols pair through their coordinate
/// expansion: <xi, w^sigma_J> = Xi^sigma_J - y^sigma_{Jl} xi^l.
DiffForm interior_product(const ProlongedField& xi, const DiffForm& rho);

/// Lie derivative along the prolonged evolution, via the homotopy formula
/// L = i d + d i, computed on the chart raised by the coefficient order of
/// xi. Preserves the contact ideal.
DiffForm lie_derivative(const Evolution& xi, const DiffForm& rho);

/// h(d rho): the total exterior derivative. On functions it is
/// (d_i f) dx^i; it squares to zero.
DiffForm total_exterior_derivative(const DiffForm& rho);

struct StructureDecomposition {
  /// (J, sigma) -> Phi^J_sigma, |J| <= r-1.
  std::map<std::pair<MultiIndex, int>, DiffForm> phi;
  /// (I, sigma) -> Psi^I_sigma, |I| = r-1.
  std::map<std::pair<MultiIndex, int>, DiffForm> psi;
};

/// Writes a contact form of degree 2 <= q <= n as
///   rho = sum_{|J| <= r-1} w^sigma_J /\ Phi^J_sigma
///       + sum_{|I| = r-1} dw^sigma_I /\ Psi^I_sigma
/// on its own chart. The w-part is read off directly; the dy-only residue
/// is encoded into mixed symmetry tensors, certified and resolved through
/// the kernel-representation solver, and the Psi coefficients are the
/// minimum-norm solution of the resulting exact linear systems.
/// Errors: NotContact when h rho != 0; NonPolynomialInFibre; ShapeError for
/// a degree or chart order outside the theorem's range.
StructureDecomposition contact_structure_decomposition(const DiffForm& rho);

/// Canonical rendering: one term per word, sorted, wedge spelled "/\".
std::string render(const DiffForm& rho);

/// Parses the form grammar over the expression grammar: atoms dx1,
/// dy1_[1 2], w1_[1]; '*' and '/\' both wedge (a scalar is a 0-form);
/// '/' divides by a rational; '^' requires a scalar base. All terms of a
/// sum must agree in degree. The basis tag is contact exactly when a
/// w-symbol occurs.
DiffForm parse_form(const std::string& text, const JetSpec& spec);

}  // namespace jetcalc

#endif
