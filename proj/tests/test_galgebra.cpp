#include "doctest.h"

#include "oracles.hpp"
#include "qstruct/galgebra.hpp"

using namespace qstruct;

TEST_CASE("rational parsing and printing") {
  CHECK(rat_str(rat_parse("3/6")) == "1/2");
  CHECK(rat_str(rat_parse("-4/2")) == "-2");
  CHECK(rat_str(rat_parse("0/7")) == "0");
  CHECK(rat_str(rat_parse("+5")) == "5");
  CHECK(rat_str(rat_parse("−3/4")) == "-3/4");
  CHECK_THROWS_AS(rat_parse("1.5"), Error);
  CHECK_THROWS_AS(rat_parse(""), Error);
  CHECK_THROWS_AS(rat_parse("1/0"), Error);
  CHECK_THROWS_AS(rat_parse("a/b"), Error);
}

TEST_CASE("chart rejects bad coordinates") {
  CHECK_THROWS_AS(make_chart({{"q", 0}}), Error);
  CHECK_THROWS_AS(make_chart({{"q", 1}, {"q", 2}}), Error);
  CHECK_THROWS_AS(make_chart({{"", 1}}), Error);
  auto c = make_chart({{"a", 1}, {"b", 2}});
  CHECK(c->parity(0) == 1);
  CHECK(c->parity(1) == 0);
  CHECK(c->index("b") == 1);
  CHECK_THROWS_AS(c->index("missing"), Error);
}

TEST_CASE("normalize matches brute-force word sorting") {
  std::mt19937_64 rng(12345);
  for (int rep = 0; rep < 200; ++rep) {
    auto chart = oracle::random_chart(rng, 5, 3);
    std::uniform_int_distribution<std::size_t> len(0, 6), pick(0, chart->size() - 1);
    std::vector<std::size_t> word;
    const std::size_t l = len(rng);
    for (std::size_t i = 0; i < l; ++i) word.push_back(pick(rng));
    const auto nf = normalize(*chart, word);
    const auto [sign, sorted] = oracle::sort_word(*chart, word);
    CHECK(nf.sign == sign);
    if (sign != 0) {
      Expo e(chart->size(), 0);
      for (const std::size_t i : sorted) e[i] += 1;
      CHECK(nf.expo == e);
    }
  }
}

TEST_CASE("product and derivative match brute-force words") {
  std::mt19937_64 rng(777);
  for (int rep = 0; rep < 200; ++rep) {
    auto chart = oracle::random_chart(rng, 5, 3);
    const auto wa = oracle::random_word_poly(rng, *chart, 4, 4);
    const auto wb = oracle::random_word_poly(rng, *chart, 4, 4);
    const Poly a = oracle::to_poly(chart, wa);
    const Poly b = oracle::to_poly(chart, wb);
    CHECK(a * b == oracle::to_poly(chart, oracle::mul(wa, wb)));
    std::uniform_int_distribution<std::size_t> pick(0, chart->size() - 1);
    const std::size_t k = pick(rng);
    CHECK(a.left_derive(k) == oracle::to_poly(chart, oracle::derive(*chart, wa, k)));
  }
}

TEST_CASE("graded commutativity and associativity") {
  std::mt19937_64 rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    const Poly a = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly b = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly c = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    CHECK((a * b) * c == a * (b * c));
    // Split into homogeneous parts to check commutation signs.
    for (int da = 0; da <= 9; ++da)
      for (int db = 0; db <= 9; ++db) {
        const Poly pa = a.graded_part(da), pb = b.graded_part(db);
        if (pa.is_zero() || pb.is_zero()) continue;
        const int sign = (da & 1) && (db & 1) ? -1 : 1;
        CHECK(pa * pb == Rat(sign) * (pb * pa));
      }
  }
}

TEST_CASE("left derivative is a graded derivation") {
  std::mt19937_64 rng(90210);
  for (int rep = 0; rep < 100; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    std::uniform_int_distribution<std::size_t> pick(0, chart->size() - 1);
    const std::size_t k = pick(rng);
    const int pk = chart->parity(k);
    const Poly a = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly b = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    for (int da = 0; da <= 9; ++da) {
      const Poly pa = a.graded_part(da);
      if (pa.is_zero()) continue;
      const int sign = (pk && (da & 1)) ? -1 : 1;
      CHECK((pa * b).left_derive(k) ==
            pa.left_derive(k) * b + Rat(sign) * (pa * b.left_derive(k)));
    }
  }
}

TEST_CASE("substitution is an algebra morphism") {
  std::mt19937_64 rng(5150);
  for (int rep = 0; rep < 60; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    // Images: random homogeneous polynomials of the right degrees.
    std::vector<Poly> images;
    bool ok = true;
    for (std::size_t i = 0; i < chart->size(); ++i) {
      Poly im(chart);
      const auto wp = oracle::random_word_poly(rng, *chart, 3, 3);
      im = oracle::to_poly(chart, wp).graded_part(chart->degree(i));
      images.push_back(im);
      if (!im.is_zero() && *im.homogeneous_degree() != chart->degree(i)) ok = false;
    }
    REQUIRE(ok);
    const Poly a = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly b = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    CHECK(substitute(a * b, chart, images) ==
          substitute(a, chart, images) * substitute(b, chart, images));
    CHECK(substitute(a + b, chart, images) ==
          substitute(a, chart, images) + substitute(b, chart, images));
  }
}

TEST_CASE("substitution rejects degree mismatches") {
  auto chart = make_chart({{"a", 1}, {"b", 2}});
  std::vector<Poly> bad{Poly::coordinate(chart, 1), Poly::coordinate(chart, 1)};
  CHECK_THROWS_AS(substitute(Poly::coordinate(chart, 0), chart, bad), Error);
}

TEST_CASE("rational linear algebra") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<long> entry(-3, 3);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    const std::size_t rows = dim(rng), cols = dim(rng);
    RatMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = entry(rng);
    const auto kiq = kernel_image_quotient(m);
    // Kernel vectors annihilate.
    for (const auto& v : kiq.kernel)
      for (std::size_t i = 0; i < rows; ++i) {
        Rat s;
        for (std::size_t j = 0; j < cols; ++j) s += m.at(i, j) * v[j];
        CHECK(sgn(s) == 0);
      }
    // Rank-nullity.
    CHECK(kiq.kernel.size() + kiq.image_pivots.size() == cols);
    // Cokernel projection kills every column of m.
    const auto& q = kiq.cokernel;
    CHECK(q.kept.size() == rows - kiq.image_pivots.size());
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < q.kept.size(); ++i) {
        Rat s;
        for (std::size_t r = 0; r < rows; ++r) s += q.proj.at(i, r) * m.at(r, j);
        CHECK(sgn(s) == 0);
      }
    // Projection restricted to kept coordinates is the identity.
    for (std::size_t i = 0; i < q.kept.size(); ++i)
      for (std::size_t k2 = 0; k2 < q.kept.size(); ++k2)
        CHECK(q.proj.at(i, q.kept[k2]) == Rat(i == k2 ? 1 : 0));
  }
}

TEST_CASE("json round trips") {
  auto chart = make_chart({{"a", 1}, {"b", 2}, {"c", 3}});
  CHECK(*chart_from_json(chart_to_json(*chart)) == *chart);
  Poly p(chart);
  p += Rat(-3, 2) * (Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1));
  p += Poly::coordinate(chart, 2);
  const Poly q = poly_from_json(poly_to_json(p), chart);
  CHECK(p == q);
  // Accumulation across repeated monomials.
  const Json dup = Json::parse(
      R"([{"coeff":"1/2","monomial":{"a":1}},{"coeff":"1/2","monomial":{"a":1}}])");
  CHECK(poly_from_json(dup, chart) == Poly::coordinate(chart, 0));
  CHECK_THROWS_AS(poly_from_json(Json::parse(R"([{"coeff":"0.5","monomial":{}}])"), chart),
                  Error);
  CHECK_THROWS_AS(poly_from_json(Json::parse(R"([{"coeff":"1","monomial":{"a":2}}])"), chart),
                  Error);
}
