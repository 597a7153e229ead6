#include <random>

#include "doctest.h"

#include "oracles.hpp"
#include "qstruct/gauge.hpp"

using namespace qstruct;

namespace {

VectorField rotation_q(ChartPtr chart) {
  VectorField q(chart, 1);
  q.set_component(0, -(Poly::coordinate(chart, 1) * Poly::coordinate(chart, 2)));
  q.set_component(1, -(Poly::coordinate(chart, 2) * Poly::coordinate(chart, 0)));
  q.set_component(2, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1)));
  return q;
}

/// Rotation coefficients plus a top generator fed by the volume cocycle:
/// Q^u = q1 q2 q3. Homological.
VectorField string_q(ChartPtr chart) {
  VectorField q = rotation_q(chart);
  q.set_component(3, Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1) *
                         Poly::coordinate(chart, 2));
  return q;
}

ChartPtr string_chart() {
  return make_chart({{"e1", 1}, {"e2", 1}, {"e3", 1}, {"u", 2}});
}

/// Fiber-constant generator from one parameter block.
VectorField constant_eps(const SectionCtx& ctx, const std::string& label) {
  const ParamBlock& block = ctx.block(label);
  VectorField eps(ctx.up(), -1);
  for (std::size_t i = 0; i < ctx.n(); ++i)
    if (block.up[i] >= 0)
      eps.set_component(i, Poly::coordinate(ctx.up(), static_cast<std::size_t>(block.up[i])));
  return eps;
}

VectorField random_vertical(std::mt19937_64& rng, const SectionCtx& ctx, int degree) {
  VectorField eps(ctx.up(), degree);
  const std::size_t rows = ctx.has_bars() ? 2 * ctx.n() : ctx.n();
  for (std::size_t i = 0; i < rows; ++i) {
    const Poly sample =
        oracle::to_poly(ctx.up(), oracle::random_word_poly(rng, *ctx.up(), 3, 4));
    const Poly part = sample.graded_part(degree + ctx.up()->degree(i));
    if (!part.is_zero()) eps.set_component(i, part);
  }
  return eps;
}

}  // namespace

TEST_CASE("gauge variation reproduces the minimal coupling pattern") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, false, {{"l", -1}});
  const VectorField eps = constant_eps(ctx, "l");
  const auto delta = gauge_delta(ctx, q, eps);

  const ParamBlock& l = ctx.block("l");
  const auto lam = [&](std::size_t i) {
    return Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.down[i]));
  };
  const auto dlam = [&](std::size_t i) {
    return Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.ddown[i]));
  };
  const auto a = [&](std::size_t i) { return Poly::coordinate(ctx.down(), ctx.a_down(i)); };

  // delta A^1 = d l^1 - l^2 A^3 + l^3 A^2.
  CHECK(delta[0] == dlam(0) - lam(1) * a(2) + lam(2) * a(1));
  // delta A^u = d l^u + l^1 A^2 A^3 - l^2 A^1 A^3 + l^3 A^1 A^2.
  CHECK(delta[3] == dlam(3) + lam(0) * a(1) * a(2) - lam(1) * a(0) * a(2) +
                        lam(2) * a(0) * a(1));
}

TEST_CASE("generator validation rejects parameter motion and wrong degrees") {
  auto fiber = string_chart();
  SectionCtx ctx(fiber, false, {{"l", -1}});
  VectorField bad(ctx.up(), -1);
  const ParamBlock& l = ctx.block("l");
  bad.set_component(static_cast<std::size_t>(l.up[3]),
                    Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[0])));
  CHECK_THROWS_AS(check_generator(ctx, bad), Error);
  CHECK_THROWS_AS(check_generator(ctx, VectorField(ctx.up(), -2)), Error);
  CHECK_NOTHROW(check_generator(ctx, VectorField(ctx.up(), -2), -2));
}

TEST_CASE("total differential is homological exactly for homological fields") {
  auto fiber = string_chart();
  SectionCtx plain(fiber, false, {{"l", -1}});
  SectionCtx barred(fiber, true, {{"l", -1}});
  CHECK(vf_square(total_Q(plain, string_q(fiber))).is_zero());
  CHECK(vf_square(total_Q(barred, string_q(fiber))).is_zero());

  VectorField broken(fiber, 1);
  broken.set_component(0, -(Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1)));
  broken.set_component(2, -(Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 2)));
  CHECK_FALSE(vf_square(total_Q(plain, broken)).is_zero());
  CHECK_FALSE(vf_square(total_Q(barred, broken)).is_zero());
}

TEST_CASE("covariance check locates failing entries") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  const std::size_t n = fiber->size();
  PolyMatrix w(n, std::vector<Poly>(n)), v(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i) {
    w[i][i] = Poly::constant(fiber, Rat(1));
    for (std::size_t b = 0; b < n; ++b) v[i][b] = q.component(i).left_derive(b);
  }
  CHECK(covariance_check(q, w, v).covariant);

  v[0][1] += Poly::coordinate(fiber, 2);
  const CovarianceReport rep = covariance_check(q, w, v);
  CHECK_FALSE(rep.covariant);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].alpha == 0);
  CHECK(rep.failures[0].beta == 1);
  CHECK(rep.failures[0].difference == Poly::coordinate(fiber, 2));
}

TEST_CASE("derived bracket of constant generators composes the coefficients") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -1}});
  const VectorField eps = constant_eps(ctx, "l");
  const VectorField epsp = constant_eps(ctx, "m");
  const VectorField hat = derived_bracket(ctx, q, eps, epsp);

  const ParamBlock& l = ctx.block("l");
  const ParamBlock& m = ctx.block("m");
  const auto lam = [&](std::size_t i) {
    return Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[i]));
  };
  const auto mu = [&](std::size_t i) {
    return Poly::coordinate(ctx.up(), static_cast<std::size_t>(m.up[i]));
  };
  // hat^1 = l^2 m^3 - l^3 m^2 and cyclic: the commutator of rotations.
  CHECK(hat.component(0) == lam(1) * mu(2) - lam(2) * mu(1));
  CHECK(hat.component(1) == lam(2) * mu(0) - lam(0) * mu(2));
  CHECK(hat.component(2) == lam(0) * mu(1) - lam(1) * mu(0));
}

TEST_CASE("derived bracket symmetrization identity") {
  // [[D,e],e'] + [[D,e'],e] = [D,[e,e']] for any degree +1 D; pure graded
  // algebra, so random non-homological fields must satisfy it too.
  std::mt19937_64 rng(4242);
  auto fiber = string_chart();
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -1}});
  for (int rep = 0; rep < 15; ++rep) {
    VectorField q(fiber, 1);
    for (std::size_t i = 0; i < fiber->size(); ++i) {
      const Poly part =
          oracle::to_poly(fiber, oracle::random_word_poly(rng, *fiber, 3, 3))
              .graded_part(1 + fiber->degree(i));
      if (!part.is_zero()) q.set_component(i, part);
    }
    const VectorField eps = random_vertical(rng, ctx, -1);
    const VectorField epsp = random_vertical(rng, ctx, -1);
    VectorField lhs = derived_bracket(ctx, q, eps, epsp);
    lhs += derived_bracket(ctx, q, epsp, eps);
    const VectorField rhs = vf_commutator(total_Q(ctx, q), vf_commutator(eps, epsp));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("commutator closes up to field strength terms") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -1}});
  const CommutatorReport rep =
      commutator_defect(ctx, q, unit_family(ctx, "l"), unit_family(ctx, "m"));

  CHECK_FALSE(rep.closed);
  CHECK(rep.f_linear);
  // The level-one rows close exactly; the top row picks up the cocycle
  // defect H_{abc} l^a m^b F^c.
  CHECK(rep.defect[0].is_zero());
  CHECK(rep.defect[1].is_zero());
  CHECK(rep.defect[2].is_zero());
  const ParamBlock& l = ctx.block("l");
  const ParamBlock& m = ctx.block("m");
  const auto lam = [&](std::size_t i) {
    return Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.down[i]));
  };
  const auto mu = [&](std::size_t i) {
    return Poly::coordinate(ctx.down(), static_cast<std::size_t>(m.down[i]));
  };
  const auto f = [&](std::size_t i) { return Poly::coordinate(ctx.down(), ctx.f_down(i)); };
  Poly expected(ctx.down());
  expected += (lam(0) * mu(1) - lam(1) * mu(0)) * f(2);
  expected += (lam(1) * mu(2) - lam(2) * mu(1)) * f(0);
  expected += (lam(2) * mu(0) - lam(0) * mu(2)) * f(1);
  CHECK(rep.defect[3] == expected);

  CHECK(rep.json.at("closed") == Json(false));
  CHECK(rep.json.at("defect_terms").size() == 1);
  CHECK(rep.json.at("defect_terms")[0].at("coordinate") == "u");
  CHECK(rep.json.at("new_parameters").contains("e1"));

  SUBCASE("pure rotation sector closes exactly") {
    auto small = make_chart({{"e1", 1}, {"e2", 1}, {"e3", 1}});
    SectionCtx sctx(small, false, {{"l", -1}, {"m", -1}});
    const CommutatorReport closed = commutator_defect(
        sctx, rotation_q(small), unit_family(sctx, "l"), unit_family(sctx, "m"));
    CHECK(closed.closed);
    CHECK(closed.f_linear);
    CHECK(closed.json.at("defect_terms").empty());
  }
}

TEST_CASE("defects stay in the ideal across rescaled homological fields") {
  std::mt19937_64 rng(90210);
  auto fiber = string_chart();
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -1}});
  for (int rep = 0; rep < 8; ++rep) {
    // Scaling the rotation block and the cocycle row independently keeps
    // the field homological.
    const Rat c = oracle::random_rat(rng);
    const Rat h = oracle::random_rat(rng);
    VectorField q = rotation_q(fiber);
    q *= c;
    q.set_component(3, h * (Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1) *
                            Poly::coordinate(fiber, 2)));
    REQUIRE(vf_square(q).is_zero());
    const CommutatorReport report =
        commutator_defect(ctx, q, unit_family(ctx, "l"), unit_family(ctx, "m"));
    CHECK(report.f_linear);
    for (const Poly& row : report.defect) CHECK(f_free_part(ctx, row).is_zero());
  }
}

TEST_CASE("family validation and instantiation") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -1}});

  SUBCASE("quadratic parameter dependence is rejected") {
    GaugeFamily bad = unit_family(ctx, "l");
    const ParamBlock& l = ctx.block("l");
    // Degree balances (two degree zero parameters against one fiber
    // coordinate), so only the linearity check can reject this.
    bad.generator.set_component(
        3, Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[0])) *
               Poly::coordinate(ctx.up(), static_cast<std::size_t>(l.up[1])) *
               Poly::coordinate(ctx.up(), 2));
    CHECK_THROWS_AS(check_family(ctx, bad), Error);
  }
  SUBCASE("foreign parameters are rejected") {
    GaugeFamily bad = unit_family(ctx, "l");
    const ParamBlock& m = ctx.block("m");
    bad.generator.set_component(
        0, Poly::coordinate(ctx.up(), static_cast<std::size_t>(m.up[0])));
    CHECK_THROWS_AS(check_family(ctx, bad), Error);
  }
  SUBCASE("instantiating the bare slots reproduces the family variation") {
    const GaugeFamily fam = unit_family(ctx, "l");
    const ParamBlock& l = ctx.block("l");
    std::vector<Poly> bare;
    for (std::size_t b = 0; b < ctx.n(); ++b)
      bare.push_back(Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.down[b])));
    CHECK(instantiate_delta(ctx, q, fam, bare) == gauge_delta(ctx, q, fam.generator));
  }
}

TEST_CASE("tangent lift regenerates the barred ansatz") {
  // String fiber with one extra degree 3 coordinate so both correction
  // slots have room for a barred term.
  auto fiber = make_chart({{"e1", 1}, {"e2", 1}, {"e3", 1}, {"u", 2}, {"s", 3}});
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, true, {{"l", -1}});
  const TangentChart t(fiber);
  const std::size_t n = fiber->size();

  // Zero section: unit w, v = dQ; barred corrections deform v and w by
  // tangent terms of matching degree.
  PolyMatrix wbar(n, std::vector<Poly>(n)), vbar(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i) {
    wbar[i][i] = Poly::constant(t.full(), Rat(1));
    for (std::size_t b = 0; b < n; ++b)
      vbar[i][b] = t.include(q.component(i).left_derive(b));
  }
  // v̄^u_2 += 3 d̄q^3 and w̄^s_1 += d̄q^2: field-strength terms in the
  // variations of A^u and A^s.
  vbar[3][1] += Rat(3) * Poly::coordinate(t.full(), t.bar_index(2));
  wbar[4][0] += Poly::coordinate(t.full(), t.bar_index(1));

  const VectorField lifted = lifted_epsilon(ctx, q, "l", wbar, vbar);
  const auto delta = gauge_delta(ctx, q, lifted);

  const ParamBlock& l = ctx.block("l");
  for (std::size_t alpha = 0; alpha < n; ++alpha) {
    Poly expected(ctx.down());
    for (std::size_t b = 0; b < n; ++b) {
      if (l.down[b] >= 0 && !wbar[alpha][b].is_zero())
        expected += Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.ddown[b])) *
                    ctx.f_star(q, ctx.up_embed(wbar[alpha][b]));
      if (l.down[b] >= 0 && !vbar[alpha][b].is_zero())
        expected += Poly::coordinate(ctx.down(), static_cast<std::size_t>(l.down[b])) *
                    ctx.f_star(q, ctx.up_embed(vbar[alpha][b]));
    }
    CHECK(delta[alpha] == expected);
  }

  SUBCASE("non-covariant zero section is rejected") {
    vbar[0][1] += t.include(Poly::coordinate(fiber, 2));
    CHECK_THROWS_AS(lifted_epsilon(ctx, q, "l", wbar, vbar), Error);
  }
}

TEST_CASE("barred and plain arenas agree on unit family commutators") {
  // A unit family has no barred coefficients, so the f* path must land on
  // the same defect as the plain pullback.
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx plain(fiber, false, {{"l", -1}, {"m", -1}});
  SectionCtx barred(fiber, true, {{"l", -1}, {"m", -1}});
  const CommutatorReport a =
      commutator_defect(plain, q, unit_family(plain, "l"), unit_family(plain, "m"));
  const CommutatorReport b =
      commutator_defect(barred, q, unit_family(barred, "l"), unit_family(barred, "m"));
  CHECK(a.closed == b.closed);
  CHECK(a.f_linear == b.f_linear);
  REQUIRE(a.defect.size() == b.defect.size());
  for (std::size_t i = 0; i < a.defect.size(); ++i)
    CHECK(poly_str(a.defect[i]) == poly_str(b.defect[i]));
}

TEST_CASE("flatness distinguishes flat from curved coefficients") {
  auto fiber = make_chart({{"x", 1}, {"y", 1}, {"t", 2}});
  const std::size_t m = fiber->size();
  PolyTensor3 n(m, PolyMatrix(m, std::vector<Poly>(m)));
  CHECK(flatness(fiber, n).flat);

  // n^t_{xy} = x is curved: r^t_{xxy} = 2.
  n[2][0][1] = Poly::coordinate(fiber, 0);
  const FlatnessReport rep = flatness(fiber, n);
  CHECK_FALSE(rep.flat);
  CHECK(rep.r[2][0][0][1] == Poly::constant(fiber, Rat(2)));
}

TEST_CASE("exact shifts leave the variation unchanged") {
  auto fiber = string_chart();
  const VectorField q = string_q(fiber);
  SectionCtx ctx(fiber, false, {{"l", -1}, {"m", -2}});
  const VectorField eps = constant_eps(ctx, "l");
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const VectorField eta = random_vertical(rng, ctx, -2);
    CHECK(residual_shift(ctx, q, eps, eta).invariant);
  }

  SUBCASE("non-homological fields are detected") {
    // Q e1 = -e1 e2 + u, Q u = e1 e2 e3: the square hits e1 with a term
    // containing u, which a shift along u can see.
    VectorField broken(fiber, 1);
    broken.set_component(0, -(Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1)) +
                                Poly::coordinate(fiber, 3));
    broken.set_component(3, Poly::coordinate(fiber, 0) * Poly::coordinate(fiber, 1) *
                                Poly::coordinate(fiber, 2));
    REQUIRE_FALSE(vf_square(broken).is_zero());
    const ParamBlock& m = ctx.block("m");
    VectorField eta(ctx.up(), -2);
    eta.set_component(3, Poly::coordinate(ctx.up(), static_cast<std::size_t>(m.up[3])));
    CHECK_FALSE(residual_shift(ctx, broken, eps, eta).invariant);
  }
}
