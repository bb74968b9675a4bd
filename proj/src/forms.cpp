#include "jetcalc/forms.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <utility>

namespace jetcalc {

namespace {

int kind_rank(SymbolKind k) { return k == SymbolKind::OMEGA ? 0 : 1; }

int cmp_int(int a, int b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

int compare(const CoframeSymbol& a, const CoframeSymbol& b) {
  const bool a_dx = a.kind == SymbolKind::DX;
  const bool b_dx = b.kind == SymbolKind::DX;
  if (a_dx != b_dx) return a_dx ? -1 : 1;
  if (a_dx) return cmp_int(a.index, b.index);
  if (int c = cmp_int(a.jet.order(), b.jet.order())) return c;
  if (int c = cmp_int(a.index, b.index)) return c;
  if (a.jet != b.jet) return a.jet < b.jet ? -1 : 1;
  return cmp_int(kind_rank(a.kind), kind_rank(b.kind));
}

bool operator<(const CoframeSymbol& a, const CoframeSymbol& b) {
  return compare(a, b) < 0;
}

bool operator==(const CoframeSymbol& a, const CoframeSymbol& b) {
  return compare(a, b) == 0;
}

namespace {

void validate_symbol(const JetSpec& spec, FormBasis basis,
                     const CoframeSymbol& s) {
  switch (s.kind) {
    case SymbolKind::DX:
      if (s.index < 1 || s.index > spec.n)
        throw InvalidIndex("base index out of range in coframe symbol");
      return;
    case SymbolKind::DY:
      if (s.index < 1 || s.index > spec.m)
        throw InvalidIndex("fibre index out of range in coframe symbol");
      MultiIndex::canonicalize(s.jet.entries(), spec.n);
      if (s.jet.order() > spec.r)
        throw OrderExceeded("dy symbol beyond the chart order");
      if (basis == FormBasis::Contact && s.jet.order() != spec.r)
        throw BasisMismatch(
            "the contact basis keeps dy symbols only at the top order");
      return;
    case SymbolKind::OMEGA:
      if (basis == FormBasis::Coordinate)
        throw BasisMismatch("contact symbol in a coordinate-basis form");
      if (s.index < 1 || s.index > spec.m)
        throw InvalidIndex("fibre index out of range in coframe symbol");
      MultiIndex::canonicalize(s.jet.entries(), spec.n);
      if (s.jet.order() > spec.r - 1)
        throw OrderExceeded("contact symbol beyond order r-1");
      return;
  }
}

}  // namespace

DiffForm::DiffForm(JetSpec spec, int degree, FormBasis basis)
    : m_spec(spec), m_degree(degree), m_basis(basis) {
  validate(spec);
  if (degree < 0) throw ShapeError("form degree must be nonnegative");
  // A 0-form carries no coframe symbols, so the tag is normalized away.
  if (degree == 0) m_basis = FormBasis::Coordinate;
  if (m_basis == FormBasis::Contact && spec.r < 1)
    throw BasisMismatch("the contact basis needs a chart of order >= 1");
}

DiffForm DiffForm::function(const JetSpec& spec, const Expr& value) {
  DiffForm out(spec, 0, FormBasis::Coordinate);
  out.add_term({}, value);
  return out;
}

Expr DiffForm::coefficient() const {
  if (m_degree != 0) throw ShapeError("coefficient() needs a degree-0 form");
  if (m_terms.empty()) return Expr::zero();
  return m_terms.begin()->second;
}

void DiffForm::add_term(Word word, const Expr& coeff) {
  if (coeff.is_zero()) return;
  if (static_cast<int>(word.size()) != m_degree)
    throw ShapeError("word length does not match the form degree");
  for (const CoframeSymbol& s : word) validate_symbol(m_spec, m_basis, s);
  int sign = 1;
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && compare(word[j], word[j - 1]) < 0) {
      std::swap(word[j], word[j - 1]);
      --j;
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < word.size(); ++i)
    if (word[i] == word[i - 1]) return;
  Expr& slot = m_terms[word];
  slot += sign < 0 ? -coeff : coeff;
  if (slot.is_zero()) m_terms.erase(word);
}

DiffForm DiffForm::operator+(const DiffForm& other) const {
  if (!m_spec.same_bundle(other.m_spec))
    throw ShapeError("cannot add forms over different bundles");
  // A zero 0-form acts as the neutral element for any degree.
  if (other.is_zero() && other.m_degree == 0 && m_degree != 0) return *this;
  if (is_zero() && m_degree == 0 && other.m_degree != 0) return other;
  if (m_spec.r != other.m_spec.r)
    throw ShapeError("cannot add forms on charts of different order");
  if (m_degree != other.m_degree)
    throw ShapeError("cannot add forms of different degree");
  if (m_degree > 0 && m_basis != other.m_basis)
    throw BasisMismatch("cannot add forms in different bases");
  DiffForm out = *this;
  for (const auto& [word, c] : other.m_terms) {
    Expr& slot = out.m_terms[word];
    slot += c;
    if (slot.is_zero()) out.m_terms.erase(word);
  }
  return out;
}

DiffForm DiffForm::operator-(const DiffForm& other) const {
  return *this + (-other);
}

DiffForm DiffForm::operator-() const { return scaled(Rational(-1)); }

DiffForm DiffForm::scaled(const Rational& c) const {
  DiffForm out(m_spec, m_degree, m_basis);
  if (c == 0) return out;
  for (const auto& [word, coeff] : m_terms) out.m_terms[word] = coeff.scaled(c);
  return out;
}

DiffForm DiffForm::times(const Expr& factor) const {
  DiffForm out(m_spec, m_degree, m_basis);
  for (const auto& [word, coeff] : m_terms) {
    Expr c = coeff * factor;
    if (!c.is_zero()) out.m_terms[word] = std::move(c);
  }
  return out;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  if (!a.chart().same_bundle(b.chart()) || a.chart().r != b.chart().r)
    throw ShapeError("cannot wedge forms on different charts");
  // A scalar factor is basis-agnostic; otherwise the tags must agree.
  if (a.degree() > 0 && b.degree() > 0 && a.basis() != b.basis())
    throw BasisMismatch("cannot wedge forms in different bases");
  FormBasis basis = a.degree() > 0 ? a.basis() : b.basis();
  DiffForm out(a.chart(), a.degree() + b.degree(), basis);
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      Word word = wa;
      word.insert(word.end(), wb.begin(), wb.end());
      out.add_term(std::move(word), ca * cb);
    }
  }
  return out;
}

DiffForm dx_form(const JetSpec& spec, int i) {
  DiffForm out(spec, 1, FormBasis::Coordinate);
  out.add_term({CoframeSymbol::dx(i)}, Expr::constant(1));
  return out;
}

DiffForm dy_form(const JetSpec& spec, int sigma, const MultiIndex& J) {
  DiffForm out(spec, 1, FormBasis::Coordinate);
  out.add_term({CoframeSymbol::dy(sigma, J)}, Expr::constant(1));
  return out;
}

DiffForm omega_form(const JetSpec& spec, int sigma, const MultiIndex& J) {
  DiffForm out(spec, 1, FormBasis::Contact);
  out.add_term({CoframeSymbol::omega(sigma, J)}, Expr::constant(1));
  return out;
}

DiffForm domega_form(const JetSpec& spec, int sigma, const MultiIndex& J) {
  DiffForm out(spec, 2, FormBasis::Contact);
  if (J.order() > spec.r - 1)
    throw OrderExceeded("contact symbol beyond order r-1");
  for (int j = 1; j <= spec.n; ++j) {
    CoframeSymbol raised = J.order() == spec.r - 1
                               ? CoframeSymbol::dy(sigma, J.append(j))
                               : CoframeSymbol::omega(sigma, J.append(j));
    out.add_term({raised, CoframeSymbol::dx(j)}, Expr::constant(-1));
  }
  return out;
}

DiffForm volume_form(const JetSpec& spec) {
  DiffForm out(spec, spec.n, FormBasis::Coordinate);
  Word word;
  for (int i = 1; i <= spec.n; ++i) word.push_back(CoframeSymbol::dx(i));
  out.add_term(std::move(word), Expr::constant(1));
  return out;
}

DiffForm volume_contraction(const JetSpec& spec, int i) {
  if (i < 1 || i > spec.n) throw InvalidIndex("base index out of range");
  DiffForm out(spec, spec.n - 1, FormBasis::Coordinate);
  Word word;
  for (int j = 1; j <= spec.n; ++j)
    if (j != i) word.push_back(CoframeSymbol::dx(j));
  Rational sign = (i - 1) % 2 == 0 ? Rational(1) : Rational(-1);
  out.add_term(std::move(word), Expr::constant(sign));
  return out;
}

namespace {

struct Choice {
  CoframeSymbol sym;
  Expr coeff;
};

/// Expands every symbol of every word through `image` (a sum of weighted
/// replacement symbols) and accumulates into `out`.
void expand_into(const DiffForm& rho, DiffForm& out,
                 const std::function<std::vector<Choice>(const CoframeSymbol&)>&
                     image) {
  struct State {
    Word word;
    Expr coeff;
  };
  for (const auto& [word, c] : rho.terms()) {
    std::vector<State> states{{Word{}, c}};
    for (const CoframeSymbol& sym : word) {
      std::vector<Choice> choices = image(sym);
      std::vector<State> next;
      next.reserve(states.size() * choices.size());
      for (const State& st : states) {
        for (const Choice& ch : choices) {
          Expr cc = st.coeff * ch.coeff;
          if (cc.is_zero()) continue;
          State ns{st.word, std::move(cc)};
          ns.word.push_back(ch.sym);
          next.push_back(std::move(ns));
        }
      }
      states = std::move(next);
    }
    for (State& st : states) out.add_term(std::move(st.word), st.coeff);
  }
}

std::vector<Choice> omega_expansion(const JetSpec& spec, int sigma,
                                    const MultiIndex& J) {
  std::vector<Choice> out;
  out.push_back({CoframeSymbol::omega(sigma, J), Expr::constant(1)});
  for (int j = 1; j <= spec.n; ++j)
    out.push_back({CoframeSymbol::dx(j), Expr::jet(sigma, J.append(j))});
  return out;
}

std::vector<Choice> dy_expansion(const JetSpec& spec, int sigma,
                                 const MultiIndex& J) {
  std::vector<Choice> out;
  out.push_back({CoframeSymbol::dy(sigma, J), Expr::constant(1)});
  for (int j = 1; j <= spec.n; ++j)
    out.push_back({CoframeSymbol::dx(j), Expr::jet(sigma, J.append(j)) * Expr::constant(-1)});
  return out;
}

}  // namespace

DiffForm to_contact_basis(const DiffForm& rho) {
  const JetSpec up = rho.chart().with_order(rho.chart().r + 1);
  DiffForm out(up, rho.degree(), FormBasis::Contact);
  expand_into(rho, out, [&](const CoframeSymbol& s) -> std::vector<Choice> {
    if (s.kind == SymbolKind::DY) return omega_expansion(up, s.index, s.jet);
    return {{s, Expr::constant(1)}};
  });
  return out;
}

DiffForm to_coordinate_basis(const DiffForm& rho) {
  if (rho.basis() == FormBasis::Coordinate) return rho;
  DiffForm out(rho.chart(), rho.degree(), FormBasis::Coordinate);
  expand_into(rho, out, [&](const CoframeSymbol& s) -> std::vector<Choice> {
    if (s.kind == SymbolKind::OMEGA)
      return dy_expansion(rho.chart(), s.index, s.jet);
    return {{s, Expr::constant(1)}};
  });
  return out;
}

DiffForm promoted(const DiffForm& rho, int order) {
  if (order < rho.chart().r)
    throw ShapeError("cannot demote a form to a lower-order chart");
  if (order == rho.chart().r) return rho;
  const JetSpec up = rho.chart().with_order(order);
  DiffForm out(up, rho.degree(), rho.basis());
  if (rho.basis() == FormBasis::Coordinate) {
    for (const auto& [word, c] : rho.terms()) out.add_term(word, c);
    return out;
  }
  // Former top-order dy symbols become expressible through w on the way up.
  expand_into(rho, out, [&](const CoframeSymbol& s) -> std::vector<Choice> {
    if (s.kind == SymbolKind::DY) return omega_expansion(up, s.index, s.jet);
    return {{s, Expr::constant(1)}};
  });
  return out;
}

DiffForm exterior_derivative(const DiffForm& rho) {
  if (rho.basis() == FormBasis::Contact)
    return to_contact_basis(exterior_derivative(to_coordinate_basis(rho)));
  DiffForm out(rho.chart(), rho.degree() + 1, FormBasis::Coordinate);
  for (const auto& [word, c] : rho.terms()) {
    for (const Generator& g : c.coordinate_generators()) {
      Expr dc = c.plain_partial(g);
      if (dc.is_zero()) continue;
      Word extended;
      extended.reserve(word.size() + 1);
      extended.push_back(g.kind == GenKind::Base
                             ? CoframeSymbol::dx(g.index)
                             : CoframeSymbol::dy(g.index, g.jet));
      extended.insert(extended.end(), word.begin(), word.end());
      out.add_term(std::move(extended), dc);
    }
  }
  return out;
}

DiffForm contact_component(const DiffForm& rho, int k) {
  if (k < 0 || k > rho.degree())
    throw InvalidIndex("contact component outside 0..degree");
  DiffForm cc = to_contact_basis(rho);
  DiffForm out(cc.chart(), cc.degree(), FormBasis::Contact);
  for (const auto& [word, c] : cc.terms()) {
    int omegas = 0;
    for (const CoframeSymbol& s : word)
      if (s.kind == SymbolKind::OMEGA) ++omegas;
    if (omegas == k) out.add_term(word, c);
  }
  return out;
}

DiffForm horizontalize(const DiffForm& rho) { return contact_component(rho, 0); }

bool is_contact(const DiffForm& rho) { return horizontalize(rho).is_zero(); }

bool is_strongly_contact(const DiffForm& rho) {
  if (rho.degree() <= rho.chart().n)
    throw DegreeTooLow("strong contactness is defined for degree > n");
  return contact_component(rho, rho.degree() - rho.chart().n).is_zero();
}

DiffForm contact_homotopy(const DiffForm& rho0) {
  DiffForm rho = to_coordinate_basis(rho0);
  if (rho.degree() == 0) return DiffForm(rho.chart(), 0, FormBasis::Coordinate);
  DiffForm out(rho.chart(), rho.degree() - 1, FormBasis::Coordinate);
  for (const auto& [word, c] : rho.terms()) {
    int fibre_syms = 0;
    for (const CoframeSymbol& s : word)
      if (s.kind == SymbolKind::DY) ++fibre_syms;
    if (fibre_syms == 0) continue;
    const std::map<int, Expr> parts = homogeneous_components(c);
    for (std::size_t p = 0; p < word.size(); ++p) {
      if (word[p].kind != SymbolKind::DY) continue;
      const Expr y = Expr::jet(word[p].index, word[p].jet);
      Word sub;
      sub.reserve(word.size() - 1);
      for (std::size_t q = 0; q < word.size(); ++q)
        if (q != p) sub.push_back(word[q]);
      const Rational sign = p % 2 == 0 ? Rational(1) : Rational(-1);
      for (const auto& [deg, part] : parts) {
        const Rational factor = sign / Rational(deg + fibre_syms);
        out.add_term(sub, (part * y).scaled(factor));
      }
    }
  }
  return out;
}

DiffForm zero_section_pullback(const DiffForm& rho) {
  DiffForm out(rho.chart(), rho.degree(), rho.basis());
  for (const auto& [word, c] : rho.terms()) {
    bool horizontal = true;
    for (const CoframeSymbol& s : word)
      if (s.kind != SymbolKind::DX) {
        horizontal = false;
        break;
      }
    if (!horizontal) continue;
    std::map<Generator, Expr> images;
    for (const Generator& g : c.coordinate_generators())
      if (g.kind == GenKind::Jet) images.emplace(g, Expr::zero());
    out.add_term(word, c.substitute(images));
  }
  return out;
}

Evolution::Evolution(JetSpec spec, std::vector<Expr> components)
    : m_spec(spec), m_components(std::move(components)) {
  validate(m_spec);
  if (static_cast<int>(m_components.size()) != m_spec.m)
    throw ShapeError("an evolution needs one component per fibre coordinate");
  for (const Expr& c : m_components)
    if (c.jet_order() > m_spec.r)
      throw OrderExceeded("evolution component beyond the chart order");
}

const Expr& Evolution::component(int sigma) const {
  if (sigma < 1 || sigma > m_spec.m)
    throw InvalidIndex("fibre index out of range");
  return m_components[static_cast<std::size_t>(sigma - 1)];
}

int Evolution::order() const {
  int best = 0;
  for (const Expr& c : m_components) best = std::max(best, c.jet_order());
  return best;
}

ProlongedField prolong_evolution(const Evolution& xi, int order) {
  if (order < 0) throw ShapeError("prolongation order must be nonnegative");
  ProlongedField out;
  out.spec = xi.chart().with_order(order);
  out.base.assign(static_cast<std::size_t>(out.spec.n), Expr::zero());
  for (int sigma = 1; sigma <= out.spec.m; ++sigma)
    for (const MultiIndex& J : enumerate_up_to(out.spec.n, order))
      out.vertical.emplace(std::make_pair(sigma, J),
                           xi.component(sigma).total_derivative_multi(J));
  return out;
}

namespace {

Expr field_pairing(const ProlongedField& xi, const CoframeSymbol& s) {
  if (s.kind == SymbolKind::DX)
    return xi.base[static_cast<std::size_t>(s.index - 1)];
  auto it = xi.vertical.find(std::make_pair(s.index, s.jet));
  if (it == xi.vertical.end())
    throw OrderMismatch("field is not prolonged far enough for this form");
  Expr value = it->second;
  if (s.kind == SymbolKind::OMEGA) {
    for (int l = 1; l <= xi.spec.n; ++l) {
      const Expr& xl = xi.base[static_cast<std::size_t>(l - 1)];
      if (!xl.is_zero()) value -= Expr::jet(s.index, s.jet.append(l)) * xl;
    }
  }
  return value;
}

}  // namespace

DiffForm interior_product(const ProlongedField& xi, const DiffForm& rho) {
  if (!xi.spec.same_bundle(rho.chart()) || xi.spec.r < rho.chart().r)
    throw OrderMismatch("field chart does not cover the form chart");
  if (rho.degree() == 0)
    return DiffForm(rho.chart(), 0, FormBasis::Coordinate);
  DiffForm out(rho.chart(), rho.degree() - 1, rho.basis());
  for (const auto& [word, c] : rho.terms()) {
    for (std::size_t p = 0; p < word.size(); ++p) {
      Expr paired = field_pairing(xi, word[p]);
      if (paired.is_zero()) continue;
      Word sub;
      sub.reserve(word.size() - 1);
      for (std::size_t q = 0; q < word.size(); ++q)
        if (q != p) sub.push_back(word[q]);
      const Rational sign = p % 2 == 0 ? Rational(1) : Rational(-1);
      out.add_term(sub, (c * paired).scaled(sign));
    }
  }
  return out;
}

DiffForm lie_derivative(const Evolution& xi, const DiffForm& rho) {
  if (!xi.chart().same_bundle(rho.chart()))
    throw OrderMismatch("evolution and form live over different bundles");
  const int working = rho.chart().r + xi.order();
  const DiffForm work = promoted(to_coordinate_basis(rho), working);
  const ProlongedField field = prolong_evolution(xi, working);
  if (rho.degree() == 0)
    return interior_product(field, exterior_derivative(work));
  return interior_product(field, exterior_derivative(work)) +
         exterior_derivative(interior_product(field, work));
}

DiffForm total_exterior_derivative(const DiffForm& rho) {
  return horizontalize(exterior_derivative(rho));
}

namespace {

std::string symbol_text(const CoframeSymbol& s) {
  std::string out;
  switch (s.kind) {
    case SymbolKind::DX:
      return "dx" + std::to_string(s.index);
    case SymbolKind::DY:
      out = "dy" + std::to_string(s.index);
      break;
    case SymbolKind::OMEGA:
      out = "w" + std::to_string(s.index);
      break;
  }
  if (!s.jet.empty()) out += "_" + render(s.jet);
  return out;
}

}  // namespace

std::string render(const DiffForm& rho) {
  if (rho.degree() == 0) return render(rho.coefficient());
  if (rho.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [word, c] : rho.terms()) {
    std::string body;
    bool negative = false;
    if (c.terms().size() == 1) {
      const Rational& k = c.terms().front().coeff;
      Expr magnitude = k < 0 ? -c : c;
      negative = k < 0;
      std::string cs = render(magnitude);
      if (cs != "1") body = cs + "*";
    } else {
      body = "(" + render(c) + ")*";
    }
    for (std::size_t p = 0; p < word.size(); ++p) {
      if (p > 0) body += " /\\ ";
      body += symbol_text(word[p]);
    }
    if (first) {
      out += negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " + body : " + " + body;
    }
  }
  return out;
}

namespace {

/// Recursive-descent parser over the form grammar. Scalars are degree-0
/// forms, so '*' and '/\' share one meaning and parenthesized sums work at
/// either level.
class FormParser {
 public:
  FormParser(const std::string& text, const JetSpec& spec, FormBasis basis)
      : m_text(text), m_spec(spec), m_basis(basis) {}

  DiffForm run() {
    DiffForm out = parse_sum();
    skip_ws();
    if (m_pos != m_text.size())
      throw ParseError("unexpected trailing input", m_pos);
    return out;
  }

 private:
  const std::string& m_text;
  const JetSpec& m_spec;
  FormBasis m_basis;
  std::size_t m_pos = 0;

  void skip_ws() {
    while (m_pos < m_text.size() &&
           std::isspace(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
  }

  char peek() {
    skip_ws();
    return m_pos < m_text.size() ? m_text[m_pos] : '\0';
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++m_pos;
    return true;
  }

  bool consume_wedge() {
    skip_ws();
    if (m_pos + 1 < m_text.size() && m_text[m_pos] == '/' &&
        m_text[m_pos + 1] == '\\') {
      m_pos += 2;
      return true;
    }
    return false;
  }

  DiffForm scalar(const Expr& value) const {
    DiffForm out(m_spec, 0, m_basis);
    out.add_term({}, value);
    return out;
  }

  DiffForm parse_sum() {
    DiffForm acc = parse_product();
    while (true) {
      if (consume('+')) {
        acc = acc + parse_product();
      } else if (peek() == '-') {
        ++m_pos;
        acc = acc - parse_product();
      } else {
        return acc;
      }
    }
  }

  DiffForm parse_product() {
    DiffForm acc = parse_signed();
    while (true) {
      if (consume_wedge()) {
        acc = wedge(acc, parse_signed());
      } else if (consume('*')) {
        acc = wedge(acc, parse_signed());
      } else if (peek() == '/') {
        const std::size_t at = m_pos;
        ++m_pos;
        DiffForm rhs = parse_signed();
        if (rhs.degree() != 0)
          throw UnsupportedDivision("division by a form (at position " +
                                    std::to_string(at) + ")");
        Expr divisor = rhs.coefficient();
        if (!divisor.is_constant())
          throw UnsupportedDivision(
              "division by a non-constant expression (at position " +
              std::to_string(at) + ")");
        if (divisor.is_zero()) throw ParseError("division by zero", at);
        acc = acc.scaled(Rational(1) / divisor.constant_value());
      } else {
        return acc;
      }
    }
  }

  DiffForm parse_signed() {
    if (peek() == '-') {
      ++m_pos;
      return -parse_signed();
    }
    return parse_power();
  }

  DiffForm parse_power() {
    DiffForm base = parse_atom();
    if (peek() != '^') return base;
    const std::size_t at = m_pos;
    ++m_pos;
    if (peek() == '-') throw ParseError("exponent must be nonnegative", m_pos);
    int e = parse_small_int();
    if (base.degree() != 0)
      throw ParseError("exponent requires a scalar base", at);
    return scalar(base.coefficient().pow(e));
  }

  DiffForm parse_atom() {
    skip_ws();
    if (m_pos >= m_text.size()) throw ParseError("unexpected end", m_pos);
    const char c = m_text[m_pos];
    if (c == '(') {
      ++m_pos;
      DiffForm inner = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", m_pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
      return scalar(Expr::constant(Rational(parse_integer())));
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_named();
    throw ParseError("unexpected character", m_pos);
  }

  Integer parse_integer() {
    skip_ws();
    const std::size_t start = m_pos;
    while (m_pos < m_text.size() &&
           std::isdigit(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
    if (m_pos == start) throw ParseError("expected an integer", m_pos);
    return Integer(m_text.substr(start, m_pos - start));
  }

  int parse_small_int() {
    const std::size_t at = m_pos;
    Integer v = parse_integer();
    if (v > 1000000) throw ParseError("integer too large", at);
    return static_cast<int>(v);
  }

  MultiIndex parse_jet_suffix() {
    if (peek() != '_') return MultiIndex();
    ++m_pos;
    if (!consume('[')) throw ParseError("expected '[' after '_'", m_pos);
    std::vector<int> entries;
    while (peek() != ']') entries.push_back(parse_small_int());
    ++m_pos;  // ']'
    return MultiIndex::canonicalize(std::move(entries), m_spec.n);
  }

  DiffForm one_form(CoframeSymbol sym) {
    DiffForm out(m_spec, 1, m_basis);
    out.add_term({std::move(sym)}, Expr::constant(1));
    return out;
  }

  DiffForm parse_named() {
    const std::size_t start = m_pos;
    while (m_pos < m_text.size() &&
           std::isalpha(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
    const std::string name = m_text.substr(start, m_pos - start);
    if (name == "dx") return one_form(CoframeSymbol::dx(parse_small_int()));
    if (name == "dy") {
      int sigma = parse_small_int();
      return one_form(CoframeSymbol::dy(sigma, parse_jet_suffix()));
    }
    if (name == "w") {
      int sigma = parse_small_int();
      return one_form(CoframeSymbol::omega(sigma, parse_jet_suffix()));
    }
    if (name == "x") {
      int i = parse_small_int();
      if (i < 1 || i > m_spec.n)
        throw InvalidIndex("base index out of range");
      return scalar(Expr::base(i));
    }
    if (name == "y") {
      int sigma = parse_small_int();
      if (sigma < 1 || sigma > m_spec.m)
        throw InvalidIndex("fibre index out of range");
      MultiIndex J = parse_jet_suffix();
      if (J.order() > m_spec.r)
        throw OrderExceeded("jet order beyond the chart order");
      return scalar(Expr::jet(sigma, J));
    }
    Elem fn;
    if (name == "sin") {
      fn = Elem::Sin;
    } else if (name == "cos") {
      fn = Elem::Cos;
    } else if (name == "exp") {
      fn = Elem::Exp;
    } else if (name == "ln") {
      fn = Elem::Ln;
    } else {
      throw ParseError("unknown name '" + name + "'", start);
    }
    if (!consume('(')) throw ParseError("expected '(' after function", m_pos);
    DiffForm arg = parse_sum();
    if (!consume(')')) throw ParseError("expected ')'", m_pos);
    if (arg.degree() != 0)
      throw ParseError("function argument must be a scalar", start);
    return scalar(Expr::apply(fn, arg.coefficient()));
  }
};

bool mentions_contact_symbol(const std::string& text) {
  for (std::size_t i = 0; i + 1 < text.size(); ++i)
    if (text[i] == 'w' && std::isdigit(static_cast<unsigned char>(text[i + 1])))
      return true;
  return false;
}

}  // namespace

DiffForm parse_form(const std::string& text, const JetSpec& spec) {
  validate(spec);
  const FormBasis basis = mentions_contact_symbol(text)
                              ? FormBasis::Contact
                              : FormBasis::Coordinate;
  return FormParser(text, spec, basis).run();
}

}  // namespace jetcalc
