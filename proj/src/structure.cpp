#include <algorithm>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "jetcalc/fock.hpp"
#include "jetcalc/forms.hpp"
#include "jetcalc/linalg.hpp"

namespace jetcalc {

namespace {

/// Rewrites the form on its own chart with w-symbols up to order r-1 and
/// dy-symbols kept at the top order only. Unlike to_contact_basis this does
/// not raise the chart order, which is what makes the decomposition an
/// identity of forms on the original chart.
DiffForm contact_rep_same_chart(const DiffForm& rho) {
  if (rho.basis() == FormBasis::Contact) return rho;
  const JetSpec spec = rho.chart();
  DiffForm out(spec, rho.degree(), FormBasis::Contact);
  struct State {
    Word word;
    Expr coeff;
  };
  for (const auto& [word, c] : rho.terms()) {
    std::vector<State> states{{Word{}, c}};
    for (const CoframeSymbol& sym : word) {
      std::vector<State> next;
      if (sym.kind == SymbolKind::DY && sym.jet.order() <= spec.r - 1) {
        for (const State& st : states) {
          State with_omega{st.word, st.coeff};
          with_omega.word.push_back(CoframeSymbol::omega(sym.index, sym.jet));
          next.push_back(std::move(with_omega));
          for (int j = 1; j <= spec.n; ++j) {
            State with_dx{st.word,
                          st.coeff * Expr::jet(sym.index, sym.jet.append(j))};
            with_dx.word.push_back(CoframeSymbol::dx(j));
            next.push_back(std::move(with_dx));
          }
        }
      } else {
        for (const State& st : states) {
          State kept{st.word, st.coeff};
          kept.word.push_back(sym);
          next.push_back(std::move(kept));
        }
      }
      states = std::move(next);
    }
    for (State& st : states) out.add_term(std::move(st.word), st.coeff);
  }
  return out;
}

struct ResidueSplit {
  std::vector<int> dx;                             // strictly increasing
  std::vector<std::pair<int, MultiIndex>> couples;  // (sigma, P), |P| = r
};

ResidueSplit split_residue_word(const Word& word) {
  ResidueSplit out;
  for (const CoframeSymbol& s : word) {
    if (s.kind == SymbolKind::DX)
      out.dx.push_back(s.index);
    else
      out.couples.emplace_back(s.index, s.jet);
  }
  return out;
}

/// The tensor encoding of one residue word with a rational coefficient:
///   value = (-1)^{s u} c / (weight(P_1) ... weight(P_s)),
/// written at the word's slot tuple and spread over the symmetry orbit,
/// including the sign-alternating spread over permutations of couples that
/// share a fibre index.
void dictionary_accumulate(const FockShape& shape, const Word& word,
                           const Rational& c, FockTensor& acc) {
  const ResidueSplit parts = split_residue_word(word);
  const int s = static_cast<int>(parts.couples.size());
  const int u = static_cast<int>(parts.dx.size());
  Rational value = (s * u) % 2 == 0 ? c : -c;
  for (const auto& [sigma, P] : parts.couples) value /= weight(P);

  // Positions of couples grouped by equal fibre index.
  std::vector<std::vector<int>> blocks;
  for (int l = 0; l < s; ++l) {
    if (l > 0 && parts.couples[static_cast<std::size_t>(l)].first ==
                     parts.couples[static_cast<std::size_t>(l - 1)].first)
      blocks.back().push_back(l);
    else
      blocks.push_back({l});
  }

  std::vector<int> assignment(static_cast<std::size_t>(s));
  for (int l = 0; l < s; ++l) assignment[static_cast<std::size_t>(l)] = l;

  const std::function<void(std::size_t, int)> spread = [&](std::size_t block,
                                                           int parity) {
    if (block == blocks.size()) {
      std::vector<int> tuple(parts.dx.begin(), parts.dx.end());
      for (int l = 0; l < s; ++l) {
        const MultiIndex& P =
            parts.couples[static_cast<std::size_t>(
                              assignment[static_cast<std::size_t>(l)])]
                .second;
        tuple.insert(tuple.end(), P.entries().begin(), P.entries().end());
      }
      const Rational signed_value = parity % 2 == 0 ? value : -value;
      acc = acc + basis_tensor(shape, tuple).scaled(signed_value);
      return;
    }
    std::vector<int> perm = blocks[block];
    std::sort(perm.begin(), perm.end());
    do {
      int inversions = 0;
      for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
          if (perm[a] > perm[b]) ++inversions;
      for (std::size_t a = 0; a < perm.size(); ++a)
        assignment[static_cast<std::size_t>(blocks[block][a])] = perm[a];
      spread(block + 1, parity + inversions);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (std::size_t a = 0; a < perm.size(); ++a)
      assignment[static_cast<std::size_t>(blocks[block][a])] =
          blocks[block][a];
  };
  spread(0, 0);
}

FockTensor dictionary_tensor(const FockShape& shape, const DiffForm& piece) {
  FockTensor acc(shape);
  for (const auto& [word, c] : piece.terms()) {
    if (!c.is_constant())
      throw ShapeError("dictionary pieces must have constant coefficients");
    dictionary_accumulate(shape, word, c.constant_value(), acc);
  }
  return acc;
}

std::vector<Rational> flatten(const FockTensor& x) {
  std::vector<Rational> out(x.components().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.components()[i];
  return out;
}

struct Unknown {
  int sigma = 0;
  MultiIndex lowered;  // I' with |I'| = r - 1
  Word tail;           // the (q-2)-word multiplying dw^sigma_I'
};

/// The exact linear system expressing a residue stratum as
/// sum dw^sigma_I' /\ G: one column per admissible (sigma, I', tail).
struct StratumSystem {
  std::vector<Unknown> unknowns;
  Matrix columns;  // rows: flattened tensor entries
};

std::vector<Word> enumerate_tails(const JetSpec& spec, int length,
                                  const std::vector<int>& remaining_sigmas) {
  std::vector<CoframeSymbol> universe;
  for (int i = 1; i <= spec.n; ++i) universe.push_back(CoframeSymbol::dx(i));
  for (int sigma = 1; sigma <= spec.m; ++sigma)
    for (const MultiIndex& K : enumerate(spec.n, spec.r))
      universe.push_back(CoframeSymbol::dy(sigma, K));
  std::sort(universe.begin(), universe.end());

  std::vector<Word> out;
  Word current;
  const std::function<void(std::size_t)> recurse = [&](std::size_t from) {
    if (static_cast<int>(current.size()) == length) {
      std::vector<int> sigmas;
      for (const CoframeSymbol& s : current)
        if (s.kind == SymbolKind::DY) sigmas.push_back(s.index);
      if (sigmas == remaining_sigmas) out.push_back(current);
      return;
    }
    for (std::size_t i = from; i < universe.size(); ++i) {
      current.push_back(universe[i]);
      recurse(i + 1);
      current.pop_back();
    }
  };
  recurse(0);
  return out;
}

StratumSystem build_stratum_system(const JetSpec& spec, int q,
                                   const std::vector<int>& sigmas,
                                   const FockShape& shape) {
  StratumSystem sys;
  std::vector<int> distinct = sigmas;
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  for (int sigma : distinct) {
    std::vector<int> remaining = sigmas;
    remaining.erase(
        std::find(remaining.begin(), remaining.end(), sigma));
    for (const MultiIndex& lowered : enumerate(spec.n, spec.r - 1))
      for (const Word& tail : enumerate_tails(spec, q - 2, remaining))
        sys.unknowns.push_back({sigma, lowered, tail});
  }

  std::size_t rows = 1;
  for (int i = 0; i < shape.rank(); ++i)
    rows *= static_cast<std::size_t>(shape.n);
  sys.columns = Matrix(rows, sys.unknowns.size());
  for (std::size_t col = 0; col < sys.unknowns.size(); ++col) {
    const Unknown& unk = sys.unknowns[col];
    DiffForm tail_form(spec, q - 2, FormBasis::Contact);
    tail_form.add_term(unk.tail, Expr::constant(1));
    const DiffForm piece =
        wedge(domega_form(spec, unk.sigma, unk.lowered), tail_form);
    const std::vector<Rational> flat =
        flatten(dictionary_tensor(shape, piece));
    for (std::size_t row = 0; row < rows; ++row)
      sys.columns.at(row, col) = flat[row];
  }
  return sys;
}

}  // namespace

StructureDecomposition contact_structure_decomposition(const DiffForm& rho) {
  const JetSpec spec = rho.chart();
  const int q = rho.degree();
  const int r = spec.r;
  if (q < 2 || q > spec.n)
    throw ShapeError("structure decomposition needs degree 2..n");
  if (r < 1) throw ShapeError("structure decomposition needs chart order >= 1");
  for (const auto& [word, c] : rho.terms())
    if (!c.polynomial_in_fibre())
      throw NonPolynomialInFibre(
          "structure decomposition needs fibre-polynomial coefficients");
  if (!is_contact(rho))
    throw NotContact("structure decomposition needs a contact form");

  const DiffForm sc = contact_rep_same_chart(rho);
  StructureDecomposition out;

  // Residue tensors per (sorted fibre tuple, coefficient monomial).
  std::map<std::pair<std::vector<int>, Expr>, FockTensor> strata;

  for (const auto& [word, c] : sc.terms()) {
    std::size_t first_omega = word.size();
    for (std::size_t p = 0; p < word.size(); ++p)
      if (word[p].kind == SymbolKind::OMEGA) {
        first_omega = p;
        break;
      }
    if (first_omega < word.size()) {
      const CoframeSymbol& w = word[first_omega];
      Word sub;
      for (std::size_t p = 0; p < word.size(); ++p)
        if (p != first_omega) sub.push_back(word[p]);
      const Rational sign = first_omega % 2 == 0 ? Rational(1) : Rational(-1);
      const auto key = std::make_pair(w.jet, w.index);
      auto it = out.phi.try_emplace(key, DiffForm(spec, q - 1, FormBasis::Contact))
                    .first;
      it->second.add_term(std::move(sub), c.scaled(sign));
      continue;
    }
    const ResidueSplit parts = split_residue_word(word);
    const int s = static_cast<int>(parts.couples.size());
    if (s == 0)
      throw NotContact("contact form has a purely horizontal residue");
    std::vector<int> sigmas;
    for (const auto& [sigma, P] : parts.couples) sigmas.push_back(sigma);
    const FockShape shape{spec.n, q - s, std::vector<int>(static_cast<std::size_t>(s), r)};
    for (const Term& term : c.terms()) {
      const Expr mono = make_expr({Term{Rational(1), term.mono}});
      auto it = strata.try_emplace(std::make_pair(sigmas, mono),
                                   FockTensor(shape))
                               .first;
      dictionary_accumulate(shape, word, term.coeff, it->second);
    }
  }

  std::map<std::vector<int>, StratumSystem> systems;
  for (const auto& [key, tensor] : strata) {
    const auto& [sigmas, mono] = key;
    const int s = static_cast<int>(sigmas.size());
    if (tensor.is_zero()) continue;
    if (s == q)
      throw NotContact("contact form has a nonzero saturated dy-residue");

    std::vector<FockTensor> certified;
    try {
      certified = solve_kernel_representation(tensor, s);
    } catch (const NotInKernel&) {
      throw NotContact("the dy-residue violates the kernel conditions");
    }
    FockTensor rhs_tensor(tensor.shape());
    for (int alpha = 1; alpha <= s; ++alpha)
      rhs_tensor = rhs_tensor +
                   apply_B(alpha, certified[static_cast<std::size_t>(alpha - 1)]);

    auto sit = systems.find(sigmas);
    if (sit == systems.end())
      sit = systems
                .emplace(sigmas,
                         build_stratum_system(spec, q, sigmas, tensor.shape()))
                .first;
    const StratumSystem& sys = sit->second;

    const std::vector<Rational> rhs = flatten(rhs_tensor);
    const std::vector<Rational> g = least_squares_min_norm(sys.columns, rhs);
    if (!(sys.columns * g == rhs))
      throw NotContact("the dy-residue admits no dw-representation");

    for (std::size_t col = 0; col < sys.unknowns.size(); ++col) {
      if (g[col] == 0) continue;
      const Unknown& unk = sys.unknowns[col];
      const auto key2 = std::make_pair(unk.lowered, unk.sigma);
      auto pit = out.psi.try_emplace(key2,
                                     DiffForm(spec, q - 2, FormBasis::Contact))
                     .first;
      pit->second.add_term(unk.tail, mono.scaled(g[col]));
    }
  }

  return out;
}

}  // namespace jetcalc
