#include <random>

#include "doctest.h"

#include "oracles.hpp"
#include "qstruct/fieldstrength.hpp"

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

/// Random polynomial supported on the first m coordinates of a chart.
Poly random_on_block(std::mt19937_64& rng, ChartPtr chart, std::size_t m) {
  std::uniform_int_distribution<std::size_t> len(0, 3), pick(0, m - 1);
  std::uniform_int_distribution<int> terms(1, 4);
  Poly p(chart);
  for (int t = 0; t < terms(rng); ++t) {
    std::vector<std::size_t> word;
    for (std::size_t k = len(rng); k > 0; --k) word.push_back(pick(rng));
    const NormalForm nf = normalize(*chart, word);
    if (nf.sign == 0) continue;
    p.add_term(nf.expo, Rat(nf.sign) * oracle::random_rat(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("section context layout and differentials") {
  auto fiber = make_chart({{"e1", 1}, {"e2", 1}, {"b", 2}});
  SectionCtx ctx(fiber, false, {{"l", -1}});
  CHECK(ctx.n() == 3);
  CHECK(ctx.up()->size() == 9);
  CHECK(ctx.down()->size() == 15);
  CHECK(ctx.up()->name(0) == "e1");
  CHECK(ctx.down()->name(ctx.a_down(2)) == "A:b");
  CHECK(ctx.down()->name(ctx.da_down(0)) == "dA:e1");
  CHECK(ctx.down()->name(ctx.f_down(1)) == "F:e2");

  const ParamBlock& l = ctx.block("l");
  CHECK(l.up[0] >= 0);
  CHECK(ctx.up()->degree(static_cast<std::size_t>(l.up[0])) == 0);
  CHECK(ctx.up()->degree(static_cast<std::size_t>(l.up[2])) == 1);
  CHECK(ctx.up()->name(static_cast<std::size_t>(l.dup[0])) == "dl:e1");

  // d moves parameters to their differentials and kills fiber coordinates.
  CHECK(ctx.d_up_apply(Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[0]))) ==
        Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.dup[0])));
  CHECK(ctx.d_up_apply(Poly::coordinate(ctx.up(), 0)).is_zero());
  CHECK(vf_square(ctx.d_up()).is_zero());

  // Downstairs d: A to dA, squares to zero, F rejected.
  const Poly a0 = Poly::coordinate(ctx.down(), ctx.a_down(0));
  CHECK(ctx.d_down_apply(a0) == Poly::coordinate(ctx.down(), ctx.da_down(0)));
  CHECK(ctx.d_down_apply(ctx.d_down_apply(a0)).is_zero());
  CHECK_THROWS_AS(ctx.d_down_apply(Poly::coordinate(ctx.down(), ctx.f_down(0))), Error);

  // Parameters ride along the section pullback.
  const Poly mixed = Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[0])) *
                     Poly::coordinate(ctx.up(), 1);
  const Poly pulled = ctx.a_star(mixed);
  Expo want(ctx.down()->size(), 0);
  want[static_cast<std::size_t>(l.down[0])] = 1;
  want[ctx.a_down(1)] = 1;
  CHECK(pulled == Poly::monomial(ctx.down(), want, Rat(1)));
}

TEST_CASE("field strengths reproduce the curvature ansatz") {
  auto fiber = make_chart({{"q1", 1}, {"q2", 1}, {"q3", 1}, {"u", 2}});
  VectorField q(fiber, 1);
  // Q^1 = -q2 q3 + u, rotation elsewhere.
  q.set_component(0, -(Poly::coordinate(fiber, 1) * Poly::coordinate(fiber, 2)) +
                         Poly::coordinate(fiber, 3));
  q.set_component(1, -(Poly::coordinate(fiber, 2) * Poly::coordinate(fiber, 0)));
  q.set_component(2, -(Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1)));
  SectionCtx ctx(fiber);
  const auto f = field_strength(ctx, q);
  const Poly a1 = Poly::coordinate(ctx.down(), ctx.a_down(0));
  const Poly a2 = Poly::coordinate(ctx.down(), ctx.a_down(1));
  const Poly a3 = Poly::coordinate(ctx.down(), ctx.a_down(2));
  const Poly au = Poly::coordinate(ctx.down(), ctx.a_down(3));
  CHECK(f[0] == Poly::coordinate(ctx.down(), ctx.da_down(0)) + a2 * a3 - au);
  CHECK(f[1] == Poly::coordinate(ctx.down(), ctx.da_down(1)) + a3 * a1);
  CHECK(f[3] == Poly::coordinate(ctx.down(), ctx.da_down(3)));

  SUBCASE("abelian field strengths are exact") {
    const auto f0 = field_strength(ctx, VectorField(fiber, 1));
    for (std::size_t i = 0; i < ctx.n(); ++i)
      CHECK(f0[i] == Poly::coordinate(ctx.down(), ctx.da_down(i)));
  }
}

TEST_CASE("extension satisfies the Leibniz rule over the section") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int rep = 0; rep < 120; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    SectionCtx ctx(chart);
    const VectorField q = random_q(rng, chart);
    const Poly full = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly r = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    if (full.is_zero()) continue;
    // Pick a homogeneous slice actually present in the sample.
    std::vector<int> degrees;
    for (const auto& [e, c] : full.terms()) degrees.push_back(expo_degree(*chart, e));
    const Poly p = full.graded_part(degrees[std::uniform_int_distribution<std::size_t>(
        0, degrees.size() - 1)(rng)]);
    const int sign = (*p.homogeneous_degree()) % 2 == 0 ? 1 : -1;
    const Poly lhs = f_extend(ctx, q, p * r);
    const Poly rhs = f_extend(ctx, q, p) * ctx.a_star_fiber(r) +
                     Rat(sign) * (ctx.a_star_fiber(p) * f_extend(ctx, q, r));
    CHECK(lhs == rhs);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("master identity holds for arbitrary degree +1 fields") {
  std::mt19937_64 rng(515151);
  int non_nilpotent = 0;
  for (int rep = 0; rep < 50; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    const VectorField q = random_q(rng, chart);
    if (!vf_square(q).is_zero()) ++non_nilpotent;
    SectionCtx ctx(chart);
    for (const Poly& defect : bianchi_defect(ctx, q)) CHECK(defect.is_zero());
  }
  CHECK(non_nilpotent > 0);
}

TEST_CASE("F basis rewriting is a bijection") {
  std::mt19937_64 rng(7702);
  for (int rep = 0; rep < 40; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    SectionCtx ctx(chart);
    const VectorField q = random_q(rng, chart);
    const Poly p = random_on_block(rng, ctx.down(), 2 * ctx.n());
    CHECK(from_F_basis(ctx, q, to_F_basis(ctx, q, p)) == p);
  }
  // Field strengths rewrite to bare F generators.
  auto fiber = make_chart({{"a", 1}, {"b", 1}, {"c", 1}});
  SectionCtx ctx(fiber);
  const VectorField q = rotation_q(fiber);
  const auto f = field_strength(ctx, q);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(to_F_basis(ctx, q, f[i]) == Poly::coordinate(ctx.down(), ctx.f_down(i)));
}

TEST_CASE("differential ideal membership separates nilpotent fields") {
  auto fiber = make_chart({{"a", 1}, {"b", 1}, {"c", 1}});
  SectionCtx ctx(fiber);

  SUBCASE("homological: bianchi lands in the ideal with the rotation pattern") {
    const VectorField q = rotation_q(fiber);
    const auto f = field_strength(ctx, q);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(ideal_member(ctx, q, ctx.d_down_apply(f[i])));
    // dF^1 = F^2 A^3 - F^3 A^2 in the F basis.
    const Poly expected =
        Poly::coordinate(ctx.down(), ctx.f_down(1)) * Poly::coordinate(ctx.down(), ctx.a_down(2)) -
        Poly::coordinate(ctx.down(), ctx.f_down(2)) * Poly::coordinate(ctx.down(), ctx.a_down(1));
    CHECK(to_F_basis(ctx, q, ctx.d_down_apply(f[0])) == expected);
    const Json rows = f_basis_report(ctx, q);
    for (const auto& row : rows) CHECK(row.at("ideal_member").get<bool>());
    CHECK(rows[0].at("F_coefficients").size() == 2);
  }

  SUBCASE("non-nilpotent: defect vanishes but membership fails") {
    const VectorField q = non_jacobi_q(fiber);
    REQUIRE_FALSE(vf_square(q).is_zero());
    for (const Poly& defect : bianchi_defect(ctx, q)) CHECK(defect.is_zero());
    const auto f = field_strength(ctx, q);
    bool any_outside = false;
    for (std::size_t i = 0; i < 3; ++i)
      if (!ideal_member(ctx, q, ctx.d_down_apply(f[i]))) any_outside = true;
    CHECK(any_outside);
    const Json rows = f_basis_report(ctx, q);
    bool reported = false;
    for (const auto& row : rows)
      if (!row.at("ideal_member").get<bool>()) reported = true;
    CHECK(reported);
  }
}

TEST_CASE("tangent pullback intertwines the differentials exactly when nilpotent") {
  auto fiber = make_chart({{"a", 1}, {"b", 1}, {"c", 1}});
  SectionCtx ctx(fiber, true);
  TangentChart t(fiber);
  std::mt19937_64 rng(11);

  SUBCASE("generator images") {
    const VectorField q = rotation_q(fiber);
    const auto f = field_strength(ctx, q);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(ctx.f_star_f(Poly::coordinate(ctx.up(), ctx.bar_up(i))) ==
            Poly::coordinate(ctx.down(), ctx.f_down(i)));
      CHECK(ctx.f_star(q, Poly::coordinate(ctx.up(), ctx.bar_up(i))) == f[i]);
      CHECK(ctx.f_star(q, Poly::coordinate(ctx.up(), i)) ==
            Poly::coordinate(ctx.down(), ctx.a_down(i)));
    }
  }

  SUBCASE("chain map property") {
    const VectorField q = rotation_q(fiber);
    const VectorField qp = ctx.up_field(tangent_prolongation(t, q));
    for (int rep = 0; rep < 30; ++rep) {
      const Poly p = ctx.up_embed(oracle::to_poly(t.full(), oracle::random_word_poly(rng, *t.full(), 3, 3)));
      CHECK(ctx.d_down_apply(ctx.f_star(q, p)) == ctx.f_star(q, qp.apply(p)));
    }
  }

  SUBCASE("failure for a non-nilpotent field") {
    const VectorField q = non_jacobi_q(fiber);
    const VectorField qp = ctx.up_field(tangent_prolongation(t, q));
    bool violated = false;
    for (std::size_t i = 0; i < 3 && !violated; ++i) {
      const Poly bar = Poly::coordinate(ctx.up(), ctx.bar_up(i));
      violated = ctx.d_down_apply(ctx.f_star(q, bar)) != ctx.f_star(q, qp.apply(bar));
    }
    CHECK(violated);
  }
}

TEST_CASE("nonholonomic bases invert exactly") {
  auto fiber = make_chart({{"x", 1}, {"y", 2}});
  NonholonomicBasis b = identity_basis(fiber);
  b.omega[1][0] = Rat(3) * Poly::coordinate(fiber, 0);
  const auto nu = invert_basis(b);
  CHECK(nu[0][0] == Poly::constant(fiber, Rat(1)));
  CHECK(nu[1][0] == Rat(-3) * Poly::coordinate(fiber, 0));
  CHECK(nu[1][1] == Poly::constant(fiber, Rat(1)));
  CHECK(nu[0][1].is_zero());

  SUBCASE("degree mismatch rejected") {
    NonholonomicBasis bad = identity_basis(fiber);
    bad.omega[0][1] = Poly::coordinate(fiber, 0);
    CHECK_THROWS_AS(invert_basis(bad), Error);
  }
  SUBCASE("singular constant part rejected") {
    NonholonomicBasis bad = identity_basis(fiber);
    bad.omega[0][0] = Poly::zero(fiber);
    CHECK_THROWS_AS(invert_basis(bad), Error);
  }
}

TEST_CASE("h basis bianchi with identity basis matches the holonomic rewrite") {
  auto fiber = make_chart({{"a", 1}, {"b", 1}, {"c", 1}});
  const VectorField q = rotation_q(fiber);
  SectionCtx ctx(fiber);
  const auto f = field_strength(ctx, q);
  const HBasisBianchi h = h_basis_bianchi(q, identity_basis(fiber));
  std::vector<Poly> rename(ctx.down()->size(), Poly());
  for (std::size_t i = 0; i < 3; ++i) {
    rename[ctx.a_down(i)] = Poly::coordinate(h.out, i);
    rename[ctx.f_down(i)] = Poly::coordinate(h.out, 3 + i);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const Poly holonomic = substitute(to_F_basis(ctx, q, ctx.d_down_apply(f[i])), h.out, rename);
    CHECK(h.d_h[i] == holonomic);
  }
}

TEST_CASE("h basis bianchi is exact under expansion") {
  // Two-level fiber with polynomial basis corrections and constant mixing.
  auto fiber = make_chart({{"x1", 1}, {"x2", 1}, {"y", 2}, {"z", 3}});
  VectorField q(fiber, 1);
  q.set_component(0, -(Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1)));
  q.set_component(2, Poly::coordinate(fiber, 1) * Poly::coordinate(fiber, 2));
  REQUIRE(vf_square(q).is_zero());

  NonholonomicBasis b = identity_basis(fiber);
  b.omega[1][0] = Poly::constant(fiber, Rat(4));
  b.omega[2][0] = Rat(5) * Poly::coordinate(fiber, 1);
  b.omega[3][0] = -Poly::coordinate(fiber, 2);
  b.omega[3][1] = Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1);
  b.omega[3][2] = Rat(2) * Poly::coordinate(fiber, 0);

  const HBasisBianchi h = h_basis_bianchi(q, b);
  SectionCtx ctx(fiber);
  const auto f = field_strength(ctx, q);

  // Expand H^i downstairs and compare d H^i against the returned identity.
  std::vector<Poly> a_images(fiber->size());
  for (std::size_t i = 0; i < fiber->size(); ++i)
    a_images[i] = Poly::coordinate(ctx.down(), ctx.a_down(i));
  std::vector<Poly> h_expanded;
  for (std::size_t i = 0; i < fiber->size(); ++i) {
    Poly acc(ctx.down());
    for (std::size_t j = 0; j < fiber->size(); ++j) {
      if (b.omega[i][j].is_zero()) continue;
      acc += substitute(b.omega[i][j], ctx.down(), a_images) * f[j];
    }
    h_expanded.push_back(acc);
  }
  std::vector<Poly> out_images(h.out->size());
  for (std::size_t i = 0; i < fiber->size(); ++i) {
    out_images[i] = Poly::coordinate(ctx.down(), ctx.a_down(i));
    out_images[fiber->size() + i] = h_expanded[i];
  }
  for (std::size_t i = 0; i < fiber->size(); ++i) {
    const Poly lhs = ctx.d_down_apply(h_expanded[i]);
    const Poly rhs = substitute(h.d_h[i], ctx.down(), out_images);
    CHECK(lhs == rhs);
  }

  SUBCASE("non-nilpotent fields rejected") {
    CHECK_THROWS_AS(h_basis_bianchi(non_jacobi_q(fiber), identity_basis(fiber)), Error);
  }
}
