#include <catch2/catch_amalgamated.hpp>

#include "calibron/exterior.hpp"
#include "calibron/rng.hpp"
#include "oracles.hpp"

using namespace calibron::exterior;
using calibron::SplitRng;

TEST_CASE("RealVector validates dimensions and finiteness") {
  REQUIRE_THROWS_AS(RealVector(0), std::invalid_argument);
  REQUIRE_THROWS_AS(RealVector(9), std::invalid_argument);
  REQUIRE_THROWS_AS(RealVector({1.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
  RealVector v{1.0, 2.0, 3.0};
  REQUIRE(v.dim() == 3);
  REQUIRE(v[1] == 2.0);
  REQUIRE(RealVector::unit(7, 3)[2] == 1.0);
  REQUIRE_THROWS_AS(RealVector::unit(3, 4), std::invalid_argument);
  REQUIRE(v.dot(RealVector{1.0, 0.0, 1.0}) == 4.0);
}

TEST_CASE("MultiIndex canonical form and ordering") {
  REQUIRE_THROWS_AS(MultiIndex({2, 2}), std::invalid_argument);
  REQUIRE_THROWS_AS(MultiIndex({3, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(MultiIndex({0}), std::invalid_argument);
  REQUIRE_THROWS_AS(MultiIndex({9}), std::invalid_argument);
  MultiIndex a{1, 4};
  MultiIndex b{2, 3};
  REQUIRE(a.degree() == 2);
  REQUIRE(a.contains(4));
  REQUIRE_FALSE(a.contains(2));
  // Lexicographic tuple order, not bitmask numeric order: (1,4) < (2,3).
  REQUIRE(a < b);
  REQUIRE_FALSE(b < a);
  REQUIRE(MultiIndex{} < MultiIndex{1});
  REQUIRE(a.indices() == std::vector<int>{1, 4});
}

TEST_CASE("KForm stores canonical sparse terms") {
  KForm f(7, 2);
  f.set_term(MultiIndex{1, 2}, 1.5);
  f.add_term(MultiIndex{1, 2}, -1.5);
  REQUIRE(f.term_count() == 0);  // exact zero pruned
  f.set_term(MultiIndex{2, 3}, 0.0);
  REQUIRE(f.term_count() == 0);
  REQUIRE_THROWS_AS(f.set_term(MultiIndex{1, 2, 3}, 1.0), std::invalid_argument);  // degree mismatch
  KForm g(3, 2);
  REQUIRE_THROWS_AS(g.set_term(MultiIndex{2, 4}, 1.0), std::invalid_argument);  // index > dim
  REQUIRE_THROWS_AS(KForm(7, 8), std::invalid_argument);
}

TEST_CASE("wedge: basis product, bilinearity, graded anticommutativity") {
  KForm e1 = KForm::basis(7, MultiIndex{1});
  KForm e2 = KForm::basis(7, MultiIndex{2});
  KForm w = wedge(e1, e2);
  REQUIRE(w.term_count() == 1);
  REQUIRE(w.coefficient(MultiIndex{1, 2}) == 1.0);
  REQUIRE(wedge(e2, e1).coefficient(MultiIndex{1, 2}) == -1.0);

  SplitRng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform01() * 5.0);  // 4..8
    const int k = 1 + static_cast<int>(rng.uniform01() * 2.0);
    const int l = 1 + static_cast<int>(rng.uniform01() * std::min(2, n - k));
    if (k + l > n) continue;
    KForm a = oracles::random_form(rng, n, k);
    KForm b = oracles::random_form(rng, n, l);
    KForm ab = wedge(a, b);
    KForm ba = wedge(b, a);
    const double sign = (k * l) % 2 == 0 ? 1.0 : -1.0;
    KForm diff = ab - sign * ba;
    for (const auto& [idx, c] : diff.terms()) REQUIRE(std::fabs(c) < 1e-14);

    // distributes over addition
    KForm c = oracles::random_form(rng, n, l);
    KForm lhs = wedge(a, b + c);
    KForm rhs = wedge(a, b) + wedge(a, c);
    KForm d2 = lhs - rhs;
    for (const auto& [idx, cc] : d2.terms()) REQUIRE(std::fabs(cc) < 1e-14);
  }

  REQUIRE_THROWS_AS(wedge(KForm(7, 1), KForm(6, 1)), std::invalid_argument);
  REQUIRE_THROWS_AS(wedge(KForm(3, 2), KForm(3, 2)), std::invalid_argument);  // degree overflow
}

TEST_CASE("wedge associativity on random triples") {
  SplitRng rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    KForm a = oracles::random_form(rng, 7, 1);
    KForm b = oracles::random_form(rng, 7, 1);
    KForm c = oracles::random_form(rng, 7, 2);
    KForm lhs = wedge(wedge(a, b), c);
    KForm rhs = wedge(a, wedge(b, c));
    KForm diff = lhs - rhs;
    for (const auto& [idx, cc] : diff.terms()) REQUIRE(std::fabs(cc) < 1e-13);
  }
}

TEST_CASE("evaluate: alternating and multilinear") {
  SplitRng rng(103);
  KForm f = oracles::random_form(rng, 5, 3);
  auto frame = oracles::random_frame(rng, 5, 3);
  const double base = evaluate(f, frame);
  std::vector<RealVector> swapped{frame[1], frame[0], frame[2]};
  REQUIRE_THAT(evaluate(f, swapped), Catch::Matchers::WithinAbs(-base, 1e-13));
  std::vector<RealVector> cycled{frame[2], frame[0], frame[1]};
  REQUIRE_THAT(evaluate(f, cycled), Catch::Matchers::WithinAbs(base, 1e-13));
  // repeated vector kills the value
  std::vector<RealVector> degenerate{frame[0], frame[0], frame[2]};
  REQUIRE_THAT(evaluate(f, degenerate), Catch::Matchers::WithinAbs(0.0, 1e-13));
  REQUIRE_THROWS_AS(evaluate(f, {frame[0]}), std::invalid_argument);
}

TEST_CASE("evaluate agrees with the dense brute-force oracle") {
  SplitRng rng(104);
  int cases = 0;
  while (cases < 1200) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 7.0);  // 2..8
    const int k = 1 + static_cast<int>(rng.uniform01() * static_cast<double>(std::min(n, 4)));
    KForm f = oracles::random_form(rng, n, k);
    auto frame = oracles::random_frame(rng, n, k);
    const double got = evaluate(f, frame);
    const double want = oracles::dense_evaluate(f, frame);
    const double scale = std::max({1.0, std::fabs(got), std::fabs(want)});
    REQUIRE(std::fabs(got - want) / scale < 1e-12);
    ++cases;
  }
}

TEST_CASE("evaluate shuffle expansions for small degrees") {
  SplitRng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 6.0);
    KForm a = oracles::random_form(rng, n, 1);
    KForm b = oracles::random_form(rng, n, 1);
    auto fr = oracles::random_frame(rng, n, 2);
    const double lhs = evaluate(wedge(a, b), fr);
    const double rhs = evaluate(a, {fr[0]}) * evaluate(b, {fr[1]}) - evaluate(a, {fr[1]}) * evaluate(b, {fr[0]});
    REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-12));

    if (n >= 3) {
      KForm c = oracles::random_form(rng, n, 2);
      auto f3 = oracles::random_frame(rng, n, 3);
      const double l3 = evaluate(wedge(a, c), f3);
      const double r3 = evaluate(a, {f3[0]}) * evaluate(c, {f3[1], f3[2]}) -
                        evaluate(a, {f3[1]}) * evaluate(c, {f3[0], f3[2]}) +
                        evaluate(a, {f3[2]}) * evaluate(c, {f3[0], f3[1]});
      REQUIRE_THAT(l3, Catch::Matchers::WithinAbs(r3, 1e-12));
    }
  }
}

TEST_CASE("hodge_star: double application sign and volume form") {
  // star(1) on R^7 is the volume form
  KForm one(7, 0);
  one.set_term(MultiIndex{}, 1.0);
  KForm vol = hodge_star(one);
  REQUIRE(vol.term_count() == 1);
  REQUIRE(vol.coefficient(MultiIndex{1, 2, 3, 4, 5, 6, 7}) == 1.0);

  SplitRng rng(106);
  for (int n = 1; n <= 8; ++n) {
    for (int k = 0; k <= std::min(n, 4); ++k) {
      KForm f = oracles::random_form(rng, n, k);
      KForm ss = hodge_star(hodge_star(f));
      const double sign = (k * (n - k)) % 2 == 0 ? 1.0 : -1.0;
      KForm diff = ss - sign * f;
      REQUIRE(diff.term_count() == 0);  // coefficients are exact +-1 products
    }
  }
}

TEST_CASE("hodge_star is an isometry for the form inner product") {
  SplitRng rng(107);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 7.0);
    const int k = static_cast<int>(rng.uniform01() * static_cast<double>(std::min(n, 4) + 1));
    KForm a = oracles::random_form(rng, n, k);
    KForm b = oracles::random_form(rng, n, k);
    REQUIRE_THAT(oracles::form_inner(hodge_star(a), hodge_star(b)),
                 Catch::Matchers::WithinAbs(oracles::form_inner(a, b), 1e-12));
  }
}

TEST_CASE("gram_volume matches hand values and the QR oracle") {
  std::vector<RealVector> onb{RealVector::unit(7, 1), RealVector::unit(7, 2), RealVector::unit(7, 3)};
  REQUIRE_THAT(gram_volume(onb), Catch::Matchers::WithinAbs(1.0, 1e-15));
  std::vector<RealVector> scaled{2.0 * RealVector::unit(4, 1), RealVector::unit(4, 2)};
  REQUIRE_THAT(gram_volume(scaled), Catch::Matchers::WithinAbs(2.0, 1e-15));
  // dependent frame
  RealVector v{1.0, 2.0, 0.0};
  std::vector<RealVector> dep{v, 2.0 * v};
  REQUIRE(gram_volume(dep) < 1e-12);

  SplitRng rng(108);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 7.0);
    const int k = 1 + static_cast<int>(rng.uniform01() * static_cast<double>(std::min(n, 4)));
    auto frame = oracles::random_frame(rng, n, k);
    const double got = gram_volume(frame);
    const double want = oracles::qr_volume(frame);
    REQUIRE(std::fabs(got - want) / std::max(1.0, want) < 1e-12);
  }
}

TEST_CASE("interior_product basics and adjointness to evaluation") {
  KForm e12 = KForm::basis(3, MultiIndex{1, 2});
  KForm r1 = interior_product(RealVector::unit(3, 1), e12);
  REQUIRE(r1.term_count() == 1);
  REQUIRE(r1.coefficient(MultiIndex{2}) == 1.0);
  KForm r2 = interior_product(RealVector::unit(3, 2), e12);
  REQUIRE(r2.coefficient(MultiIndex{1}) == -1.0);
  REQUIRE(interior_product(RealVector::unit(3, 3), e12).term_count() == 0);
  KForm deg0(3, 0);
  REQUIRE_THROWS_AS(interior_product(RealVector::unit(3, 1), deg0), std::invalid_argument);

  SplitRng rng(109);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 6.0);
    const int k = 2 + static_cast<int>(rng.uniform01() * static_cast<double>(std::min(n, 4) - 1));
    KForm f = oracles::random_form(rng, n, k);
    RealVector v = rng.gaussian_vector(n);
    auto rest = oracles::random_frame(rng, n, k - 1);
    std::vector<RealVector> full{v};
    full.insert(full.end(), rest.begin(), rest.end());
    REQUIRE_THAT(evaluate(interior_product(v, f), rest),
                 Catch::Matchers::WithinAbs(evaluate(f, full), 1e-11));
  }
}

TEST_CASE("debug dump prints one term per line in lexicographic order") {
  KForm f(7, 2);
  f.set_term(MultiIndex{2, 3}, -1.0);
  f.set_term(MultiIndex{1, 4}, 1.0);
  f.set_term(MultiIndex{1, 2}, 0.5);
  REQUIRE(f.dump() == "+0.5 e12\n+1 e14\n-1 e23\n");
}
