#include "doctest.h"

#include "oracles.hpp"
#include "qstruct/linfty.hpp"

using namespace qstruct;

namespace {

VectorField rotation_q(ChartPtr chart) {
  VectorField q(chart, 1);
  q.set_component(0, -(Poly::coordinate(chart, 1) * Poly::coordinate(chart, 2)));
  q.set_component(1, -(Poly::coordinate(chart, 2) * Poly::coordinate(chart, 0)));
  q.set_component(2, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1)));
  return q;
}

/// Antisymmetric binary constants violating Jacobi: [e1,e2]=e1, [e1,e3]=e3,
/// [e2,e3]=0 has Jacobiator e3 on (e1,e2,e3).
VectorField non_jacobi_q(ChartPtr chart) {
  VectorField q(chart, 1);
  q.set_component(0, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1)));
  q.set_component(2, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 2)));
  return q;
}

/// Random degree +1 field with homogeneous components.
VectorField random_q(std::mt19937_64& rng, ChartPtr chart) {
  VectorField x(chart, 1);
  for (std::size_t i = 0; i < chart->size(); ++i)
    x.set_component(i, oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 4))
                           .graded_part(1 + chart->degree(i)));
  return x;
}

bool all_zero(const std::vector<Rat>& v) {
  for (const auto& c : v)
    if (sgn(c) != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("unshuffle enumeration") {
  CHECK(unshuffles(4, 2).size() == 6);
  CHECK(unshuffles(5, 1).size() == 5);
  CHECK(unshuffles(3, 3).size() == 1);
  for (const auto& [sel, rest] : unshuffles(5, 2)) {
    CHECK(std::is_sorted(sel.begin(), sel.end()));
    CHECK(std::is_sorted(rest.begin(), rest.end()));
    CHECK(sel.size() + rest.size() == 5);
  }
}

TEST_CASE("bracket lookup carries the symmetric Koszul sign") {
  auto chart = make_chart({{"a", 1}, {"b", 1}, {"c", 1}, {"x", 2}, {"y", 2}, {"w", 3}});
  BracketTable t(chart);
  t.add({0, 1}, 2, Rat(1));
  // Swapping two odd inputs flips the sign.
  CHECK(t.bracket({1, 0})[2] == Rat(-1));
  CHECK(t.bracket({0, 1})[2] == Rat(1));
  // Repeated odd input is forced to vanish.
  CHECK(all_zero(t.bracket({0, 0})));
  CHECK_THROWS_AS(t.add({0, 0}, 2, Rat(1)), Error);
  // Even inputs commute freely, repeated or not.
  t.add({3, 4}, 5, Rat(2));
  CHECK(t.bracket({4, 3})[5] == Rat(2));
  t.add({3, 3}, 5, Rat(7));
  CHECK(t.bracket({3, 3})[5] == Rat(7));
  // Moving an even input past an odd one costs nothing.
  t.add({0, 3}, 4, Rat(5));
  CHECK(t.bracket({3, 0})[4] == Rat(5));
  // Degree balance enforced.
  CHECK_THROWS_AS(t.add({0, 1}, 3, Rat(1)), Error);
}

TEST_CASE("extraction round trips through reconstruction") {
  std::mt19937_64 rng(808);
  for (int rep = 0; rep < 50; ++rep) {
    auto chart = oracle::random_chart(rng, 5, 3);
    const VectorField q = random_q(rng, chart);
    const BracketTable t = extract_brackets(q);
    CHECK(brackets_to_q(t) == q);
  }
}

TEST_CASE("normalization of repeated inputs matches the field coefficients") {
  // Q = q_a q_a d/dq_x on an even coordinate: the quadratic bracket of
  // (a,a) carries 2! times the coefficient.
  auto chart = make_chart({{"a", 2}, {"x", 3}});
  VectorField q(chart, 1);
  Expo e{2, 0};
  q.set_component(1, Poly::monomial(chart, e, Rat(5)));
  const BracketTable t = extract_brackets(q);
  CHECK(t.bracket({0, 0})[1] == Rat(10));
  CHECK(brackets_to_q(t) == q);
}

TEST_CASE("jacobi defects vanish exactly for homological fields") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  const BracketTable good = extract_brackets(rotation_q(chart));
  CHECK(jacobi_all(good, 5).empty());
  CHECK(ln_jacobi_all(shift_table(good), 5).empty());

  const BracketTable bad = extract_brackets(non_jacobi_q(chart));
  CHECK_FALSE(jacobi_all(bad, 5).empty());
  CHECK_FALSE(ln_jacobi_all(shift_table(bad), 5).empty());
}

TEST_CASE("jacobi equivalence with nilpotency on random tables") {
  std::mt19937_64 rng(424242);
  int nilpotent_seen = 0, violating_seen = 0;
  for (int rep = 0; rep < 60; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    const VectorField q = random_q(rng, chart);
    const BracketTable t = extract_brackets(q);
    const bool nil = vf_square(q).is_zero();
    const bool jac = jacobi_all(t, t.max_arity()).empty();
    const bool lnjac = ln_jacobi_all(shift_table(t), t.max_arity()).empty();
    CHECK(nil == jac);
    CHECK(nil == lnjac);
    (nil ? nilpotent_seen : violating_seen) += 1;
  }
  CHECK(violating_seen > 0);
}

TEST_CASE("defects in both conventions vanish together argumentwise") {
  std::mt19937_64 rng(616);
  for (int rep = 0; rep < 40; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 2);
    const VectorField q = random_q(rng, chart);
    const BracketTable t = extract_brackets(q);
    const LnAlgebra l = shift_table(t);
    std::uniform_int_distribution<std::size_t> msz(1, 4), pick(0, chart->size() - 1);
    const std::size_t m = msz(rng);
    std::vector<std::size_t> args;
    for (std::size_t i = 0; i < m; ++i) args.push_back(pick(rng));
    // Skip argument lists killed by symmetry in either convention.
    bool degenerate = false;
    for (std::size_t i = 0; i < m && !degenerate; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (args[i] == args[j]) degenerate = true;
    if (degenerate) continue;
    CHECK(all_zero(jacobi_defect(t, m, args)) == all_zero(ln_jacobi_defect(l, m, args)));
  }
}

TEST_CASE("shift and unshift are mutually inverse") {
  std::mt19937_64 rng(321);
  for (int rep = 0; rep < 40; ++rep) {
    auto chart = oracle::random_chart(rng, 5, 3);
    const BracketTable t = extract_brackets(random_q(rng, chart));
    const LnAlgebra l = shift_table(t);
    CHECK(unshift_table(l) == t);
    // Sign spot check: a binary bracket of two degree-2 coordinates picks
    // up exactly one desuspension sign.
    for (const auto& [key, vec] : t.entries()) {
      if (key.size() != 2) continue;
      if (chart->degree(key[0]) == 2 && chart->degree(key[1]) == 2) {
        const auto lv = l.bracket(key);
        for (std::size_t b = 0; b < vec.size(); ++b) CHECK(lv[b] == Rat(-vec[b]));
      }
    }
  }
}

TEST_CASE("table json round trip") {
  auto chart = make_chart({{"a", 1}, {"b", 1}, {"x", 2}});
  BracketTable t(chart);
  t.add({0, 1}, 0, Rat(1, 2));
  t.add({2}, 0, Rat(-1));
  t.add({0, 2}, 2, Rat(3));
  const BracketTable u = bracket_table_from_json(bracket_table_to_json(t), chart);
  CHECK(u == t);
}

TEST_CASE("truncation of a two-step complex") {
  // x (1) <- y (2) by the unary constant; u (2) <- z (3) independently.
  auto chart = make_chart({{"x", 1}, {"y", 2}, {"u", 2}, {"z", 3}});
  VectorField q(chart, 1);
  q.set_component(0, Poly::coordinate(chart, 1));
  q.set_component(2, Poly::coordinate(chart, 3));
  REQUIRE(vf_square(q).is_zero());

  SUBCASE("ker mode keeps the image of the unary constants") {
    const TruncationResult r = truncate_ker(q, 2);
    CHECK(r.chart->size() == 2);
    CHECK(r.chart->name(1) == "y");
    CHECK(r.morphism_violations.empty());
    CHECK(vf_square(r.field).is_zero());
    // Dropped direction projects to zero.
    CHECK(r.projection[2].is_zero());
    CHECK(r.projection[3].is_zero());
    CHECK(r.field.component(0) == Poly::coordinate(r.chart, 1));
  }

  SUBCASE("im mode quotients by the incoming unary image") {
    const TruncationResult r = truncate_im(q, 2);
    CHECK(r.chart->size() == 2);
    CHECK(r.chart->name(1) == "y");
    CHECK(r.morphism_violations.empty());
    CHECK(vf_square(r.field).is_zero());
    CHECK(r.projection[2].is_zero());
  }

  SUBCASE("naive mode keeps the whole level") {
    const TruncationResult r = truncate(q, 2, TruncateMode::Naive);
    CHECK(r.chart->size() == 3);
    CHECK(r.morphism_violations.empty());
  }

  SUBCASE("degree bounds enforced") {
    CHECK_THROWS_AS(truncate_ker(q, 1), Error);
    CHECK_THROWS_AS(truncate_ker(q, 4), Error);
  }
}

TEST_CASE("truncation requires a homological field") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}, {"x", 2}});
  const VectorField broken = non_jacobi_q(chart);
  CHECK_FALSE(vf_square(broken).is_zero());
  CHECK_THROWS_AS(truncate_ker(broken, 2), Error);
}

TEST_CASE("tangent lift preserves nilpotency both ways") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  const BracketTable t = extract_brackets(rotation_q(chart));
  const LiftResult lift = tangent_lift_ln(t);
  CHECK(vf_square(lift.q_prime).is_zero());
  CHECK(jacobi_all(lift.table, lift.table.max_arity()).empty());

  const LiftResult bad = tangent_lift_ln(extract_brackets(non_jacobi_q(chart)));
  CHECK_FALSE(vf_square(bad.q_prime).is_zero());
  CHECK_FALSE(jacobi_all(bad.table, bad.table.max_arity()).empty());
}
