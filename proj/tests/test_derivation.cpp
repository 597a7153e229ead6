#include "doctest.h"

#include "oracles.hpp"
#include "qstruct/derivation.hpp"

using namespace qstruct;

namespace {

/// Random field of the given degree with homogeneous components.
VectorField random_field(std::mt19937_64& rng, ChartPtr chart, int degree) {
  VectorField x(chart, degree);
  for (std::size_t i = 0; i < chart->size(); ++i) {
    const int want = degree + chart->degree(i);
    if (want < 0) continue;
    const Poly p = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 4))
                       .graded_part(want);
    x.set_component(i, p);
  }
  return x;
}

/// Chevalley-Eilenberg style field of a 3-dimensional rotation algebra:
/// three odd degree-1 coordinates, components -q_b q_c cyclically.
VectorField rotation_q(ChartPtr chart) {
  VectorField q(chart, 1);
  q.set_component(0, -(Poly::coordinate(chart, 1) * Poly::coordinate(chart, 2)));
  q.set_component(1, -(Poly::coordinate(chart, 2) * Poly::coordinate(chart, 0)));
  q.set_component(2, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1)));
  return q;
}

/// Antisymmetric binary constants violating Jacobi: [e1,e2]=e1,
/// [e1,e3]=e3, [e2,e3]=0 has Jacobiator e3 on (e1,e2,e3).
VectorField non_jacobi_q(ChartPtr chart) {
  VectorField q(chart, 1);
  q.set_component(0, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 1)));
  q.set_component(2, -(Poly::coordinate(chart, 0) * Poly::coordinate(chart, 2)));
  return q;
}

}  // namespace

TEST_CASE("component validation") {
  auto chart = make_chart({{"a", 1}, {"b", 2}});
  VectorField x(chart, 1);
  CHECK_THROWS_AS(x.set_component(0, Poly::coordinate(chart, 0)), Error);
  x.set_component(0, Poly::coordinate(chart, 1));
  CHECK(x.component(0) == Poly::coordinate(chart, 1));
  x.set_component(0, Poly::zero(chart));
  CHECK(x.is_zero());
}

TEST_CASE("application is a graded derivation") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 80; ++rep) {
    auto chart = oracle::random_chart(rng, 4, 3);
    std::uniform_int_distribution<int> deg(-2, 2);
    const VectorField x = random_field(rng, chart, deg(rng));
    const Poly a = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    const Poly b = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    for (int da = 0; da <= 9; ++da) {
      const Poly pa = a.graded_part(da);
      if (pa.is_zero()) continue;
      const int sign = (x.parity() && (da & 1)) ? -1 : 1;
      CHECK(x.apply(pa * b) == x.apply(pa) * b + Rat(sign) * (pa * x.apply(b)));
    }
  }
}

TEST_CASE("commutator identities") {
  std::mt19937_64 rng(515);
  for (int rep = 0; rep < 40; ++rep) {
    auto chart = oracle::random_chart(rng, 3, 3);
    std::uniform_int_distribution<int> deg(-1, 2);
    const VectorField x = random_field(rng, chart, deg(rng));
    const VectorField y = random_field(rng, chart, deg(rng));
    const VectorField z = random_field(rng, chart, deg(rng));
    const int sxy = (x.parity() && y.parity()) ? -1 : 1;

    // Operator identity on random polynomials.
    const Poly p = oracle::to_poly(chart, oracle::random_word_poly(rng, *chart, 3, 3));
    CHECK(vf_commutator(x, y).apply(p) ==
          x.apply(y.apply(p)) - Rat(sxy) * y.apply(x.apply(p)));

    // Graded antisymmetry.
    CHECK(vf_commutator(x, y) == Rat(-sxy) * vf_commutator(y, x));

    // Graded Jacobi.
    const int sxz = (x.parity() && z.parity()) ? -1 : 1;
    VectorField lhs = vf_commutator(x, vf_commutator(y, z));
    VectorField rhs = vf_commutator(vf_commutator(x, y), z) +
                      Rat(sxy) * vf_commutator(y, vf_commutator(x, z));
    CHECK(lhs == rhs);
    (void)sxz;
  }
}

TEST_CASE("square detects homological fields") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  CHECK(vf_square(rotation_q(chart)).is_zero());
  CHECK_FALSE(vf_square(non_jacobi_q(chart)).is_zero());
  VectorField even(chart, 2);
  CHECK_THROWS_AS(vf_square(even), Error);
}

TEST_CASE("tangent chart structure") {
  auto base = make_chart({{"a", 1}, {"b", 2}});
  TangentChart t(base);
  CHECK(t.full()->size() == 4);
  CHECK(t.full()->name(2) == "d:a");
  CHECK(t.full()->degree(2) == 2);
  CHECK(t.full()->degree(3) == 3);

  const VectorField d = de_rham(t);
  CHECK(vf_square(d).is_zero());

  // Round trip through the zero section.
  const Poly p = Poly::coordinate(base, 0) * Poly::coordinate(base, 1);
  CHECK(t.restrict_to_base(t.include(p)) == p);
}

TEST_CASE("lie derivative reproduces the field and anticommutes with d") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    auto base = oracle::random_chart(rng, 3, 2);
    TangentChart t(base);
    std::uniform_int_distribution<int> deg(0, 2);
    const VectorField x = random_field(rng, base, deg(rng));
    const VectorField lx = lie_derivative(t, x);
    for (std::size_t i = 0; i < base->size(); ++i)
      CHECK(lx.component(i) == t.include(x.component(i)));
    // Graded commutator with the de Rham field vanishes.
    CHECK(vf_commutator(lx, de_rham(t)).is_zero());
  }
}

TEST_CASE("tangent prolongation nilpotent iff the base field is") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  TangentChart t(chart);
  CHECK(vf_square(tangent_prolongation(t, rotation_q(chart))).is_zero());
  CHECK_FALSE(vf_square(tangent_prolongation(t, non_jacobi_q(chart))).is_zero());
}

TEST_CASE("conjugation by an invertible linear change is reversible") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  const VectorField q = rotation_q(chart);
  // New basis: a1+a2, a2, a3.
  std::vector<Poly> to_old{Poly::coordinate(chart, 0) + Poly::coordinate(chart, 1),
                           Poly::coordinate(chart, 1), Poly::coordinate(chart, 2)};
  std::vector<Poly> from_old{Poly::coordinate(chart, 0) - Poly::coordinate(chart, 1),
                             Poly::coordinate(chart, 1), Poly::coordinate(chart, 2)};
  const VectorField moved = vf_conjugate(q, chart, to_old, from_old);
  const VectorField back = vf_conjugate(moved, chart, from_old, to_old);
  CHECK(back == q);
  CHECK(vf_square(moved).is_zero());
}

TEST_CASE("vector field json round trip") {
  auto chart = make_chart({{"a1", 1}, {"a2", 1}, {"a3", 1}});
  const VectorField q = rotation_q(chart);
  CHECK(vf_from_json(vf_to_json(q), chart) == q);
}
