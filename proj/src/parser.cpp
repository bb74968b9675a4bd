#include <cctype>
#include <string>
#include <vector>

#include "jetcalc/expr.hpp"

namespace jetcalc {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const JetSpec& spec)
      : m_text(text), m_spec(spec) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (m_pos != m_text.size())
      throw ParseError("unexpected trailing input", m_pos);
    return e;
  }

 private:
  const std::string& m_text;
  JetSpec m_spec;
  std::size_t m_pos = 0;

  void skip_ws() {
    while (m_pos < m_text.size() &&
           std::isspace(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
  }

  int peek() {
    skip_ws();
    return m_pos < m_text.size() ? static_cast<unsigned char>(m_text[m_pos])
                                 : -1;
  }

  bool consume(char c) {
    if (peek() == c) {
      ++m_pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) throw ParseError(std::string("expected ") + what, m_pos);
  }

  Integer parse_integer() {
    skip_ws();
    std::size_t start = m_pos;
    while (m_pos < m_text.size() &&
           std::isdigit(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
    if (m_pos == start) throw ParseError("expected an integer", m_pos);
    return Integer(m_text.substr(start, m_pos - start));
  }

  int parse_small_int() {
    Integer v = parse_integer();
    if (v > 1000000) throw ParseError("index out of range", m_pos);
    return v.convert_to<int>();
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = m_pos;
    while (m_pos < m_text.size() &&
           std::isalpha(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
    return m_text.substr(start, m_pos - start);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      if (consume('+')) {
        e += parse_term();
      } else if (consume('-')) {
        e -= parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (true) {
      if (consume('*')) {
        e *= parse_factor();
      } else if (consume('/')) {
        std::size_t at = m_pos;
        Expr divisor = parse_factor();
        if (!divisor.is_constant())
          throw UnsupportedDivision(
              "division is supported only by rational constants (at position " +
              std::to_string(at) + ")");
        Rational value = divisor.constant_value();
        if (value == 0) throw ParseError("division by zero", at);
        e = e.scaled(Rational(1) / value);
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    if (consume('-')) return -parse_factor();
    Expr e = parse_atom();
    if (consume('^')) {
      skip_ws();
      if (peek() == '-')
        throw ParseError("exponent must be a nonnegative integer", m_pos);
      int exponent = parse_small_int();
      e = e.pow(exponent);
    }
    return e;
  }

  Expr parse_atom() {
    int c = peek();
    if (c == '(') {
      ++m_pos;
      Expr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(c)) return Expr::constant(Rational(parse_integer()));
    if (std::isalpha(c)) {
      std::size_t at = m_pos;
      std::string name = parse_name();
      if (name == "x") return parse_base_coord(at);
      if (name == "y") return parse_jet_coord(at);
      if (name == "sin") return parse_call(Elem::Sin);
      if (name == "cos") return parse_call(Elem::Cos);
      if (name == "exp") return parse_call(Elem::Exp);
      if (name == "ln") return parse_call(Elem::Ln);
      throw ParseError("unknown name '" + name + "'", at);
    }
    throw ParseError("expected an atom", m_pos);
  }

  Expr parse_base_coord(std::size_t at) {
    int i = parse_small_int();
    if (i < 1 || i > m_spec.n)
      throw InvalidIndex("base index " + std::to_string(i) +
                         " outside 1.." + std::to_string(m_spec.n) +
                         " (at position " + std::to_string(at) + ")");
    return Expr::base(i);
  }

  Expr parse_jet_coord(std::size_t at) {
    int sigma = parse_small_int();
    if (sigma < 1 || sigma > m_spec.m)
      throw InvalidIndex("fibre index " + std::to_string(sigma) +
                         " outside 1.." + std::to_string(m_spec.m) +
                         " (at position " + std::to_string(at) + ")");
    std::vector<int> entries;
    skip_ws();
    if (m_pos < m_text.size() && m_text[m_pos] == '_') {
      ++m_pos;
      expect('[', "'[' after '_'");
      entries.push_back(parse_small_int());
      while (peek() != ']') entries.push_back(parse_small_int());
      expect(']', "']'");
    }
    if (static_cast<int>(entries.size()) > m_spec.r)
      throw OrderExceeded("jet order " + std::to_string(entries.size()) +
                          " exceeds chart order " + std::to_string(m_spec.r));
    MultiIndex J = MultiIndex::canonicalize(entries, m_spec.n);
    return Expr::jet(sigma, J);
  }

  Expr parse_call(Elem fn) {
    expect('(', "'(' after function name");
    Expr argument = parse_expr();
    expect(')', "')'");
    return Expr::apply(fn, argument);
  }
};

}  // namespace

Expr parse_expr(const std::string& text, const JetSpec& spec) {
  validate(spec);
  return Parser(text, spec).run();
}

}  // namespace jetcalc
