#ifndef JETCALC_VARIATIONAL_HPP
#define JETCALC_VARIATIONAL_HPP

#include <map>
#include <utility>
#include <vector>

#include "jetcalc/expr.hpp"
#include "jetcalc/multiindex.hpp"

namespace jetcalc {

/// A Lagrangian density L on the chart of `spec`; the associated horizontal
/// form is L dx^1 ^ ... ^ dx^n. The constructor validates the chart
/// (ShapeError), the coefficient order (OrderExceeded) and the generator
/// ranges (InvalidIndex).
struct Lagrangian {
  Lagrangian(JetSpec spec, Expr density);

  JetSpec spec;
  Expr density;
};

/// A differential equation with one component T_sigma per fibre coordinate;
/// the associated form is T_sigma w^sigma ^ dx^1 ^ ... ^ dx^n. Validation as
/// for Lagrangian, plus a component-count check (ShapeError).
struct SourceForm {
  SourceForm(JetSpec spec, std::vector<Expr> components);

  JetSpec spec;
  std::vector<Expr> components;

  /// Component for the fibre index sigma in 1..m.
  const Expr& component(int sigma) const;
};

/// The Euler-Lagrange expressions of a density of order r:
///   T_sigma = sum over canonical |J| <= r of (-1)^|J| d_J (dL/dy^sigma_J)
/// with the plain partial. The result lives on the chart of order 2r; it is
/// zero exactly when the density is a total divergence.
SourceForm euler_lagrange(const Lagrangian& lag);

/// The higher Euler operator attached to the multi-index I:
///   E^I_sigma(L) = sum over |J| <= r - |I| of
///       (-1)^|J| C(|I|+|J|, |I|) d_J (normalized d^{IJ}_sigma L),
/// where the sum runs over all ordered tuples J, realized canonically with
/// multiplicity weight(J). E^{empty}_sigma is the Euler-Lagrange component.
/// Throws OrderExceeded when |I| > r and InvalidIndex for bad sigma or I.
Expr lie_euler(const Lagrangian& lag, int sigma, const MultiIndex& I);

/// Coefficient table of a total differential operator: for each canonical
/// multi-index one expression per fibre component. Absent keys are zero.
using OperatorTable = std::map<MultiIndex, std::vector<Expr>>;

/// Rewrites the operator sum_I (d_I xi^sigma) P^I_sigma in the pushed-down
/// form sum_I d_I (xi^sigma Q^I_sigma):
///   Q^I_sigma = sum over |J| <= r - |I| of
///       (-1)^|J| C(|I|+|J|, |I|) d_J P^{IJ}_sigma.
/// P is given on canonical keys with |I| <= r and m entries per key; the
/// result table is complete on all canonical |I| <= r. The rewriting is
/// unique, which pins every sign convention used here.
OperatorTable euler_decompose(const JetSpec& spec, const OperatorTable& P,
                              int r);

/// The obstruction table of a source form of order s, computed on the chart
/// of order 2s+1:
///   H^J_{sigma nu} = normalized d^J_nu T_sigma - (-1)^|J| E^J_sigma(T_nu)
/// for all canonical |J| <= s. The table vanishes identically exactly when
/// the source form is locally variational.
struct HelmholtzTable {
  JetSpec spec;
  int source_order = 0;
  /// Keyed by J; the value holds m*m entries, row (sigma-1), column (nu-1).
  std::map<MultiIndex, std::vector<Expr>> entries;

  const Expr& entry(const MultiIndex& J, int sigma, int nu) const;
  bool all_zero() const;
};

HelmholtzTable helmholtz(const SourceForm& source);

/// True when every Helmholtz entry is the zero expression. Exact on
/// polynomial data; with elementary-function atoms a "true" is sound while a
/// "false" may be spurious, since only the canonical form is inspected.
bool is_locally_variational(const SourceForm& source);

/// The fibre-scaling reconstruction of a Lagrangian from a variational
/// source form: the fibre-degree-d part of T_sigma enters y^sigma T_sigma
/// with the factor 1/(d+1). The result keeps the order of the input. Throws
/// NonPolynomialInFibre when a component is not fibre-polynomial.
Lagrangian tonti_lagrangian(const SourceForm& source);

/// True when every Euler-Lagrange component of the density vanishes.
bool is_variationally_trivial(const Lagrangian& lag);

/// A (multi-index, fibre-index) couple labelling one jet slot of a
/// hyper-Jacobian or of an antisymmetric coefficient family.
using JetCouple = std::pair<MultiIndex, int>;

/// The hyper-Jacobian determinant polynomial
///   J^{sigma_1..sigma_s, tail}_{I_1..I_s}
///     = eps^{i_1..i_s, tail} y^{sigma_1}_{I_1 i_1} ... y^{sigma_s}_{I_s i_s}
/// where each |I_l| = r-1, the tail fixes the last n-s slots of the
/// Levi-Civita symbol and the first s slots are contracted. Throws
/// ShapeError for wrong couple or tail arity and InvalidIndex for
/// out-of-range entries.
Expr hyper_jacobian(const JetSpec& spec, const std::vector<JetCouple>& couples,
                    const std::vector<int>& tail);

/// A family of coefficients A^{I_1..I_s}_{sigma_1..sigma_s, b_{s+1}..b_q}
/// over a fixed slot count q: s jet couples with |I_l| = r-1 followed by
/// q-s base indices, for every s = 0..q. The family is antisymmetric under
/// couple permutations and under base-index permutations separately, so
/// values are stored on keys with strictly increasing couples and base
/// entries; lookups resolve the permutation sign, and keys with a repeated
/// couple or base index are identically zero. Coefficients must have order
/// at most r-1.
class AntisymmetricFamily {
 public:
  /// Requires spec.r >= 1 and 0 <= slots <= spec.n (ShapeError).
  AntisymmetricFamily(JetSpec spec, int slots);

  const JetSpec& spec() const { return m_spec; }
  int slots() const { return m_slots; }

  /// Registers a value on the key given by the couples and base indices, in
  /// any order. Throws SymmetryError when the value contradicts an already
  /// registered entry or is nonzero on a degenerate key, OrderExceeded when
  /// its order exceeds r-1, ShapeError for wrong arity, InvalidIndex for
  /// out-of-range entries.
  void set(const std::vector<JetCouple>& couples, const std::vector<int>& base,
           const Expr& value);

  /// Signed lookup; zero for unset or degenerate keys.
  Expr coefficient(const std::vector<JetCouple>& couples,
                   const std::vector<int>& base) const;

  struct Key {
    std::vector<JetCouple> couples;
    std::vector<int> base;
    bool operator<(const Key& other) const;
  };

  /// The registered entries on canonical keys (strictly increasing couples
  /// and base indices).
  const std::map<Key, Expr>& entries() const { return m_entries; }

 private:
  JetSpec m_spec;
  int m_slots = 0;
  std::map<Key, Expr> m_entries;
};

/// Builds the general variationally trivial Lagrangian of order r from an
/// antisymmetric family on q = n-1 slots with coefficients on the chart of
/// order r-1, together with the flux components V^j realizing it as a total
/// divergence:
///   L = d_j V^j,  euler_lagrange(L) = 0.
/// The density is the hyper-Jacobian polynomial whose coefficients are
/// produced from the family by one fibre derivative per added couple and one
/// truncated formal derivative per added base slot, with alternating signs.
std::pair<Lagrangian, std::vector<Expr>> trivial_lagrangian_from_coeffs(
    const AntisymmetricFamily& coeffs);

/// Decides the second-order system that characterizes densities which are
/// polynomial in the top-order coordinates with determinant structure: for
/// every choice of rho, sigma and index tuple (i_1..i_2r), the symmetrization
/// over all 2r slots of
///   normalized d^{i_1..i_r}_rho normalized d^{i_{r+1}..i_2r}_sigma L
/// must vanish. For r = 0 the condition degenerates to the vanishing of all
/// second fibre partials. Every density built by
/// trivial_lagrangian_from_coeffs passes.
bool check_highest_order_system(const Lagrangian& lag);

/// Assembles the source form whose components are hyper-Jacobian
/// polynomials: one antisymmetric family on q = n slots per fibre component
/// sigma, contracted against the hyper-Jacobians over all ordered index
/// assignments (no symmetry factor):
///   T_sigma = sum over s, couples, tail of
///       coeff_sigma(couples, tail) J(couples, tail).
/// Families must share the spec and have order-(r-1) coefficients; the
/// result is a source form of order r. Local variationality of the result
/// depends on the coefficients and is left to the caller to test.
SourceForm hyper_jacobian_source_form(
    const std::vector<AntisymmetricFamily>& families);

}  // namespace jetcalc

#endif
