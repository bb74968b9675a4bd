#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "jetcalc/errors.hpp"
#include "jetcalc/expr.hpp"

using namespace jetcalc;

namespace {

MultiIndex mi(std::initializer_list<int> entries, int n) {
  return MultiIndex::canonicalize(std::vector<int>(entries), n);
}

/// Random polynomial in x-coordinates and jet coordinates up to the chart
/// order, with small rational coefficients. Deterministic per seed.
Expr random_poly(std::mt19937& rng, const JetSpec& spec, int max_terms = 4,
                 int max_factors = 3) {
  std::vector<Generator> pool;
  for (int i = 1; i <= spec.n; ++i) pool.push_back(Generator::base(i));
  for (int sigma = 1; sigma <= spec.m; ++sigma)
    for (int k = 0; k <= spec.r; ++k)
      for (const auto& J : enumerate(spec.n, k))
        pool.push_back(Generator::jet_coord(sigma, J));

  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<int> denom(1, 4);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> nfactors(0, max_factors);
  std::uniform_int_distribution<int> expo(1, 2);

  Expr e;
  int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    Expr mono = Expr::constant(Rational(coeff(rng), denom(rng)));
    int factors = nfactors(rng);
    for (int f = 0; f < factors; ++f) {
      const Generator& g = pool[pick(rng)];
      Expr atom = g.kind == GenKind::Base ? Expr::base(g.index)
                                          : Expr::jet(g.index, g.jet);
      mono *= atom.pow(expo(rng));
    }
    e += mono;
  }
  return e;
}

}  // namespace

TEST_CASE("arithmetic normal form") {
  Expr x1 = Expr::base(1);
  Expr x2 = Expr::base(2);
  CHECK(x1 + x2 == x2 + x1);
  CHECK((x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2);
  CHECK((x1 - x1).is_zero());
  CHECK(Expr::constant(Rational(2, 4)) == Expr::constant(Rational(1, 2)));
  Expr u = Expr::jet(1, mi({1}, 2));
  CHECK(u * u == u.pow(2));
  CHECK((u - u * Expr::constant(1)).is_zero());
  CHECK(u.scaled(Rational(3)) == u + u + u);
}

TEST_CASE("parser round trips and canonicalizes") {
  JetSpec spec{2, 2, 2};
  Expr e = parse_expr("1/2*y1_[1]^2", spec);
  Expr manual = Expr::jet(1, mi({1}, 2)).pow(2).scaled(Rational(1, 2));
  CHECK(e == manual);

  CHECK(parse_expr("y1_[2 1]", spec) == Expr::jet(1, mi({1, 2}, 2)));
  CHECK(parse_expr("y2", spec) == Expr::jet(2, mi({}, 2)));
  CHECK(parse_expr("x2 - x2", spec).is_zero());
  CHECK(parse_expr("-3/4", spec) == Expr::constant(Rational(-3, 4)));
  CHECK(parse_expr("(x1+x2)^2", spec) ==
        parse_expr("x1^2 + 2*x1*x2 + x2^2", spec));
  CHECK(parse_expr("sin(x1)*cos(x2)", spec) ==
        Expr::apply(Elem::Sin, Expr::base(1)) *
            Expr::apply(Elem::Cos, Expr::base(2)));
  CHECK(parse_expr("2*exp(y1)", spec) ==
        Expr::apply(Elem::Exp, Expr::jet(1, mi({}, 2))).scaled(2));
}

TEST_CASE("parser rejections") {
  JetSpec spec{2, 2, 2};
  CHECK_THROWS_AS(parse_expr("y1/x1", spec), UnsupportedDivision);
  CHECK_THROWS_AS(parse_expr("x1/0", spec), ParseError);
  CHECK_THROWS_AS(parse_expr("x3", spec), InvalidIndex);
  CHECK_THROWS_AS(parse_expr("y3", spec), InvalidIndex);
  CHECK_THROWS_AS(parse_expr("y1_[3]", spec), InvalidIndex);
  CHECK_THROWS_AS(parse_expr("y1_[1 1 1]", spec), OrderExceeded);
  CHECK_THROWS_AS(parse_expr("x1 +", spec), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 x2", spec), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x1)", spec), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^-2", spec), ParseError);
  CHECK_THROWS_AS(parse_expr("ln(", spec), ParseError);
  try {
    parse_expr("x1 + @", spec);
    CHECK(false);
  } catch (const ParseError& err) {
    CHECK(err.position == 5);
  }
}

TEST_CASE("render and parse are inverse") {
  JetSpec spec{2, 2, 2};
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 100; ++trial) {
    Expr e = random_poly(rng, spec);
    CHECK(parse_expr(render(e), spec) == e);
  }
  Expr f = Expr::apply(Elem::Sin, Expr::base(1) * Expr::base(2)) *
               Expr::jet(1, mi({1, 2}, 2)) -
           Expr::apply(Elem::Ln, Expr::constant(2));
  CHECK(parse_expr(render(f), spec) == f);
  CHECK(render(Expr::zero()) == "0");
}

TEST_CASE("plain and normalized jet partials") {
  Expr u12 = Expr::jet(1, mi({1, 2}, 2));
  Expr u11 = Expr::jet(1, mi({1, 1}, 2));

  CHECK(u12.plain_partial_jet(1, mi({1, 2}, 2)) == Expr::constant(1));
  // weight([1 2]) = 2, so the normalized partial halves the plain one.
  CHECK(u12.partial_jet(1, mi({1, 2}, 2)) == Expr::constant(Rational(1, 2)));
  CHECK(u11.partial_jet(1, mi({1, 1}, 2)) == Expr::constant(1));
  CHECK(u12.partial_jet(1, mi({1, 1}, 2)).is_zero());

  Expr e = u12 * u12 * Expr::base(1);
  CHECK(e.plain_partial_jet(1, mi({1, 2}, 2)) ==
        u12.scaled(2) * Expr::base(1));
  CHECK(e.partial_base(1) == u12 * u12);
}

TEST_CASE("total derivative basics") {
  Expr y = Expr::jet(1, mi({}, 2));
  Expr y1 = Expr::jet(1, mi({1}, 2));
  Expr y11 = Expr::jet(1, mi({1, 1}, 2));

  CHECK((y * y1).total_derivative(1) == y1 * y1 + y * y11);
  CHECK(Expr::base(1).total_derivative(1) == Expr::constant(1));
  CHECK(Expr::base(1).total_derivative(2).is_zero());
  CHECK(y.total_derivative(1) == y1);
  CHECK(y1.total_derivative(1) == y11);
  CHECK((y * y1).total_derivative(1).jet_order() == 2);

  // Chain rule through function atoms.
  CHECK(Expr::apply(Elem::Sin, Expr::base(1)).total_derivative(1) ==
        Expr::apply(Elem::Cos, Expr::base(1)));
  CHECK(Expr::apply(Elem::Exp, y).total_derivative(1) ==
        Expr::apply(Elem::Exp, y) * y1);
  CHECK(Expr::apply(Elem::Ln, Expr::constant(2)).total_derivative(1).is_zero());
  CHECK_THROWS_AS(Expr::apply(Elem::Ln, Expr::base(1)).total_derivative(1),
                  UnsupportedDivision);
}

TEST_CASE("total derivatives commute") {
  JetSpec spec{2, 2, 2};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    Expr f = random_poly(rng, spec);
    CHECK(f.total_derivative(1).total_derivative(2) ==
          f.total_derivative(2).total_derivative(1));
  }
  Expr g = parse_expr("sin(x1*x2)*y1 + y2_[1 2]^2", spec);
  CHECK(g.total_derivative(1).total_derivative(2) ==
        g.total_derivative(2).total_derivative(1));
}

TEST_CASE("iterated total derivative ignores multi-index ordering") {
  JetSpec spec{2, 1, 1};
  std::mt19937 rng(11);
  Expr f = random_poly(rng, spec);
  Expr a = f.total_derivative(1).total_derivative(2);
  CHECK(f.total_derivative_multi(mi({1, 2}, 2)) == a);
  CHECK(f.total_derivative_multi(mi({2, 1}, 2)) == a);
  CHECK(f.total_derivative_multi(mi({}, 2)) == f);
}

TEST_CASE("normalized partials and total derivatives interleave") {
  // [partial^{j_1..j_k}_sigma, d_i] f = (1/k) sum_l delta^{j_l}_i
  // partial^{j_1..j_k minus j_l}_sigma f, with normalized partials.
  JetSpec spec{2, 1, 2};
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Expr f = random_poly(rng, spec);
    for (int i = 1; i <= 2; ++i) {
      std::vector<MultiIndex> tries = {mi({1}, 2), mi({2}, 2), mi({1, 2}, 2),
                                       mi({1, 1}, 2), mi({2, 2}, 2)};
      for (const auto& J : tries) {
        Expr lhs = f.total_derivative(i).partial_jet(1, J) -
                   f.partial_jet(1, J).total_derivative(i);
        Expr rhs;
        int k = J.order();
        for (int l = 0; l < k; ++l) {
          if (J[l] != i) continue;
          rhs += f.partial_jet(1, J.remove_one(J[l])).scaled(Rational(1, k));
        }
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("fibre scaling and homogeneous components") {
  JetSpec spec{2, 1, 2};
  Expr e = parse_expr("x1 + 2*y1*y1_[1] + y1_[1 1]^3", spec);
  auto parts = homogeneous_components(e);
  REQUIRE(parts.size() == 3);
  CHECK(parts.at(0) == Expr::base(1));
  CHECK(parts.at(2) == parse_expr("2*y1*y1_[1]", spec));
  CHECK(parts.at(3) == parse_expr("y1_[1 1]^3", spec));

  // scale_fibre(t) multiplies each degree-d component by t^d.
  Rational t(2, 3);
  Expr scaled = e.scale_fibre(t);
  Expr rebuilt;
  for (const auto& [degree, part] : parts) {
    Rational power(1);
    for (int k = 0; k < degree; ++k) power *= t;
    rebuilt += part.scaled(power);
  }
  CHECK(scaled == rebuilt);

  CHECK_THROWS_AS(homogeneous_components(parse_expr("sin(y1)", spec)),
                  NonPolynomialInFibre);
  CHECK(homogeneous_components(parse_expr("sin(x1)*y1", spec)).at(1) ==
        parse_expr("sin(x1)*y1", spec));
}

TEST_CASE("substitution") {
  JetSpec spec{2, 2, 1};
  Expr e = parse_expr("y1^2 + y2_[1]", spec);
  std::map<Generator, Expr> images;
  images[Generator::jet_coord(1, mi({}, 2))] = parse_expr("x1 + x2", spec);
  images[Generator::jet_coord(2, mi({1}, 2))] = Expr::constant(-1);
  CHECK(e.substitute(images) == parse_expr("(x1+x2)^2 - 1", spec));

  // Substitution reaches inside function atoms.
  Expr f = Expr::apply(Elem::Sin, Expr::jet(1, mi({}, 2)));
  CHECK(f.substitute(images) ==
        Expr::apply(Elem::Sin, parse_expr("x1 + x2", spec)));
}

TEST_CASE("evaluation") {
  JetSpec spec{1, 1, 1};
  Expr e = parse_expr("1/2*y1^2 + x1", spec);
  std::map<Generator, Rational> point;
  point[Generator::base(1)] = Rational(0);
  point[Generator::jet_coord(1, mi({}, 1))] = Rational(3);
  CHECK(e.eval(point) == Rational(9, 2));

  std::map<Generator, Rational> missing;
  missing[Generator::base(1)] = Rational(0);
  CHECK_THROWS_AS(e.eval(missing), UnboundGenerator);
  CHECK_THROWS_AS(parse_expr("sin(x1)", spec).eval(point),
                  NonPolynomialInFibre);

  std::map<Generator, double> dpoint;
  dpoint[Generator::base(1)] = 0.5;
  dpoint[Generator::jet_coord(1, mi({}, 1))] = 2.0;
  CHECK(e.eval_double(dpoint) == doctest::Approx(2.5));
  CHECK(parse_expr("sin(x1)", spec).eval_double(dpoint) ==
        doctest::Approx(std::sin(0.5)));
}

TEST_CASE("structure queries") {
  JetSpec spec{2, 2, 2};
  Expr e = parse_expr("sin(x1)*y1_[1 2] + x2", spec);
  CHECK(e.jet_order() == 2);
  CHECK(e.depends_on_fibre());
  CHECK(e.polynomial_in_fibre());
  CHECK(e.has_function_atoms());
  CHECK_FALSE(parse_expr("sin(y1)", spec).polynomial_in_fibre());
  CHECK_FALSE(parse_expr("x1^3", spec).depends_on_fibre());
  CHECK(parse_expr("x1^3", spec).jet_order() == 0);
  CHECK(Expr::apply(Elem::Exp, Expr::jet(1, mi({1, 1}, 2))).jet_order() == 2);

  auto gens = parse_expr("x1*y2 + sin(x2*y1)", spec).coordinate_generators();
  CHECK(gens.count(Generator::base(1)) == 1);
  CHECK(gens.count(Generator::base(2)) == 1);
  CHECK(gens.count(Generator::jet_coord(1, mi({}, 2))) == 1);
  CHECK(gens.count(Generator::jet_coord(2, mi({}, 2))) == 1);
}
