#ifndef JETCALC_FOCK_HPP
#define JETCALC_FOCK_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/errors.hpp"
#include "jetcalc/multiindex.hpp"
#include "jetcalc/rational.hpp"

namespace jetcalc {

/// Sector of the mixed tensor algebra over indices 1..n: one antisymmetric
/// block of k slots followed by one symmetric block per bosonic group, of
/// degrees bosons[0], bosons[1], ... A sector with k > n holds only the zero
/// tensor.
struct FockShape {
  int n = 1;
  int k = 0;
  std::vector<int> bosons;

  int groups() const { return static_cast<int>(bosons.size()); }
  int rank() const {
    int total = k;
    for (int r : bosons) total += r;
    return total;
  }
  /// 0-based slot offset of bosonic group alpha (1-based alpha).
  int group_offset(int alpha) const {
    int offset = k;
    for (int g = 1; g < alpha; ++g) offset += bosons[g - 1];
    return offset;
  }
  bool operator==(const FockShape&) const = default;
};

/// Throws ShapeError unless n >= 1, k >= 0 and every bosonic degree >= 0.
void validate(const FockShape& shape);

/// A tensor with the symmetry type of its shape: antisymmetric in the
/// fermionic slots, symmetric within each bosonic group. Components are
/// stored densely over {1..n}^rank with the fermionic slots first.
class FockTensor {
 public:
  /// The zero tensor of the given shape.
  explicit FockTensor(FockShape shape);

  /// Degree-zero tensor (no slots at all) holding a single value.
  static FockTensor scalar(int n, const Rational& value);

  /// Projects the array onto the symmetry type of the shape.
  static FockTensor from_components(FockShape shape, DenseArray components);

  const FockShape& shape() const { return m_shape; }
  const DenseArray& components() const { return m_components; }
  bool is_zero() const { return m_components.is_zero(); }

  const Rational& at(const std::vector<int>& tuple) const {
    return m_components.at(tuple);
  }

  FockTensor operator+(const FockTensor& other) const;
  FockTensor operator-(const FockTensor& other) const;
  FockTensor scaled(const Rational& c) const;
  bool operator==(const FockTensor&) const = default;

 private:
  FockShape m_shape;
  DenseArray m_components;

  FockTensor(FockShape shape, DenseArray components)
      : m_shape(std::move(shape)), m_components(std::move(components)) {}

  // The ladder operators build arrays that carry the shape's symmetry type
  // by construction, so they bypass the projection in from_components.
  friend FockTensor create_fermion(int l, const FockTensor& x);
  friend FockTensor annihilate_fermion(int l, const FockTensor& x);
  friend FockTensor create_boson(int alpha, int l, const FockTensor& x);
  friend FockTensor annihilate_boson(int alpha, int l, const FockTensor& x);
};

/// Fermionic creation: one more antisymmetric slot, l in 1..n. The image of
/// f under antisymmetrized insertion in the leading slot,
///   (a*_l f)^{i_1..i_k} = (1/k) sum_p (-1)^{p-1} delta_l^{i_p} f^{..no i_p..}.
FockTensor create_fermion(int l, const FockTensor& x);

/// Fermionic annihilation, the pairing partner of create_fermion: contracts
/// the leading antisymmetric slot with l and multiplies by the old degree,
///   (a^l f)^{i_1..i_k} = (k+1) f^{l,i_1..i_k}.
/// On a degree-0 fermionic block returns the zero tensor of the same shape.
/// Together they satisfy {a^l, a*_m} = delta^l_m and {a^l,a^m} = 0 exactly.
FockTensor annihilate_fermion(int l, const FockTensor& x);

/// Bosonic creation on group alpha (1-based):
///   (b*_l f)^{j_1..j_r} = (1/r) sum_p delta_l^{j_p} f^{..no j_p..}.
FockTensor create_boson(int alpha, int l, const FockTensor& x);

/// Bosonic annihilation on group alpha: contracts the leading slot of the
/// group with l and multiplies by the old degree,
///   (b^l f)^{j_1..j_r} = (r+1) f^{l,j_1..j_r}.
/// On a degree-0 group returns the zero tensor of the same shape. Together
/// they satisfy [b^l, b*_m] = delta^l_m and [b^l,b^m] = 0 exactly.
FockTensor annihilate_boson(int alpha, int l, const FockTensor& x);

/// B_alpha = sum_l b*_(alpha)l a*_l: raises the fermionic degree and the
/// degree of group alpha by one. Nilpotent: B_alpha^2 = 0, and
/// {B_alpha, B_beta} = 0. When the fermionic degree would exceed n the
/// result is the zero tensor (of the raised shape).
FockTensor apply_B(int alpha, const FockTensor& x);

/// B*_alpha = sum_l b^l_(alpha) a^l, the pairing adjoint of B_alpha up to a
/// positive sector constant; lowers both degrees by one.
FockTensor apply_B_star(int alpha, const FockTensor& x);

/// True iff B*_alpha x = 0 for every group alpha; vacuously true when the
/// fermionic degree or every group degree is zero.
bool is_traceless(const FockTensor& x);

struct TraceDecomposition {
  FockTensor traceless;            // X0, unique
  std::vector<FockTensor> parts;   // X_alpha with X = X0 + sum B_alpha X_alpha
};

/// Splits x into its unique traceless part plus a sum of B_alpha images,
/// by exact orthogonal projection (componentwise pairing, rational normal
/// equations). The parts follow the documented minimum-norm tie-break over
/// the canonical symmetry-reduced parameterization.
/// Requires groups() <= n - k; otherwise throws ShapeConstraint.
TraceDecomposition trace_decompose(const FockTensor& x);

/// Solves x = sum_{alpha=1..s} B_alpha x_alpha exactly, returning the
/// minimum-norm parts. Requires B_1 ... B_s x = 0; when that fails, or no
/// exact representation exists, throws NotInKernel naming a nonzero residual
/// component.
std::vector<FockTensor> solve_kernel_representation(const FockTensor& x,
                                                    int s);

/// The particle numbers encoded in the shape: fermionic degree and the
/// bosonic degree of each group.
std::pair<int, std::vector<int>> particle_numbers(const FockTensor& x);

/// Canonical index combinations of a shape: strictly increasing fermionic
/// tuple, non-decreasing tuple per bosonic group, enumerated in row-major
/// order. Projected unit tensors on these representatives form a basis of
/// the sector.
std::vector<std::vector<int>> canonical_tuples(const FockShape& shape);

/// Basis tensor supported on the orbit of the given canonical tuple, with
/// value 1 at the representative.
FockTensor basis_tensor(const FockShape& shape, const std::vector<int>& tuple);

/// Text form:
///   shape: n=2 k=1 bosons=[1]
///   [2; 1] = -1/2
/// Each line after the header assigns one component; the tuple lists the
/// fermionic indices, then one ';'-separated block per bosonic group.
/// Omitted components are zero; listed ones are completed across their
/// symmetry orbit, and conflicting assignments raise SymmetryError.
FockTensor parse_tensor(const std::string& text);
std::string write_tensor(const FockTensor& x);

}  // namespace jetcalc

#endif
