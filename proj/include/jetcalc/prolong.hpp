#ifndef JETCALC_PROLONG_HPP
#define JETCALC_PROLONG_HPP

#include <map>
#include <utility>
#include <vector>

#include "jetcalc/expr.hpp"
#include "jetcalc/forms.hpp"
#include "jetcalc/linalg.hpp"
#include "jetcalc/multiindex.hpp"
#include "jetcalc/rational.hpp"
#include "jetcalc/variational.hpp"

namespace jetcalc {

/// A projectable vector field xi = a^i(x) d/dx^i + b^sigma(x,y) d/dy^sigma.
/// The base components may involve base coordinates only; the fibre
/// components are expressions of jet order zero.
class ProjectableField {
 public:
  ProjectableField(JetSpec spec, std::vector<Expr> base,
                   std::vector<Expr> fibre);

  const JetSpec& chart() const { return m_spec; }
  const Expr& base_component(int i) const;
  const Expr& fibre_component(int sigma) const;

 private:
  JetSpec m_spec;
  std::vector<Expr> m_base;
  std::vector<Expr> m_fibre;
};

/// A fibred map phi(x, y) = (f(x), F(x, y)). The base map must be affine
/// with a constant invertible Jacobian, so its inverse Jacobian is an exact
/// rational matrix; the fibre map is polynomial of jet order zero.
/// Violations raise UnsupportedBaseMap or SingularJacobian for the base map
/// and ShapeError or OrderExceeded for the fibre map.
class BundleMorphism {
 public:
  BundleMorphism(JetSpec spec, std::vector<Expr> base, std::vector<Expr> fibre);

  static BundleMorphism identity(const JetSpec& spec);

  const JetSpec& chart() const { return m_spec; }
  const Expr& base_component(int i) const;
  const Expr& fibre_component(int sigma) const;

  /// det(df/dx), a nonzero constant.
  const Rational& jacobian_determinant() const { return m_det; }
  /// Entry Q^l_i of the inverse base Jacobian, so Q^l_i df^i/dx^p is the
  /// identity matrix.
  const Rational& inverse_jacobian(int l, int i) const;

 private:
  JetSpec m_spec;
  std::vector<Expr> m_base;
  std::vector<Expr> m_fibre;
  Matrix m_inverse;
  Rational m_det;
};

/// The jet prolongation of a projectable field: base part a^i and vertical
/// coefficients grown by the recurrence
///   b^sigma_{Ji} = d_i b^sigma_J - y^sigma_{Jl} d_i a^l
/// up to |J| <= order. With vanishing base part this reduces to the
/// prolongation of an evolution, d_J b^sigma.
ProlongedField prolong_projectable(const ProjectableField& xi, int order);

/// The prolonged components of a fibred map on canonical multi-indices:
/// (sigma, J) -> F^sigma_J with F^sigma_empty the fibre map itself and
///   F^sigma_{Ji} = Q^l_i d_l F^sigma_J.
/// Each F^sigma_J is polynomial of jet order at most |J|.
std::map<std::pair<int, MultiIndex>, Expr> prolong_morphism(
    const BundleMorphism& phi, int order);

/// The substitution realizing composition with the prolonged map: base
/// generators go to the base map, jet generators of order up to the given
/// bound go to the prolonged components.
std::map<Generator, Expr> morphism_substitution(const BundleMorphism& phi,
                                                int order);

/// Pullback of an exterior form along the prolonged morphism. Coefficients
/// are composed with the prolonged components; each coordinate coframe
/// symbol becomes the differential of its pulled-back coordinate function,
/// so the operation commutes with the exterior derivative. Contact forms
/// pull back to contact forms. The result is on the same chart, in the
/// coordinate basis.
DiffForm pullback_form(const BundleMorphism& phi, const DiffForm& rho);

/// The density of the pulled-back Lagrange form: det(df/dx) times the
/// density composed with the prolonged morphism.
Lagrangian pullback_lagrangian(const BundleMorphism& phi,
                               const Lagrangian& lag);

/// Verifies the transformation law of the Euler-Lagrange expressions under
/// the fibred map: for every sigma,
///   E_sigma(pullback) = det(df/dx) (d F^nu / d y^sigma)
///                       (E_nu(density) composed with the prolonged map).
/// Exact identity of expressions; true for every invertible morphism.
bool check_el_naturality(const BundleMorphism& phi, const Lagrangian& lag);

/// Reads a fibred map from structured text: one "base: <expression>" line
/// per base coordinate followed by one "fibre: <expression>" line per fibre
/// coordinate, in coordinate order. Blank lines and lines starting with '#'
/// are skipped. Wrong field names raise ParseError, wrong counts ShapeError.
BundleMorphism parse_morphism(const std::string& text, const JetSpec& spec);

}  // namespace jetcalc

#endif
