#pragma once

/// Graded derivations of a chart's polynomial algebra: vector fields with
/// polynomial components acting by left derivatives, their commutators and
/// squares, shifted tangent charts, the fiberwise de Rham differential,
/// contractions, and Lie derivatives.

#include <map>

#include "qstruct/galgebra.hpp"

namespace qstruct {

/// X = sum_i X^i d/dq_i with X(p) = sum_i X^i * left_derive(p, i).
/// Invariant: each stored component is nonzero and homogeneous of degree
/// deg(X) + deg(q_i); absent components are zero. With that grading X is
/// a graded derivation: X(pq) = X(p) q + (-1)^{|X||p|} p X(q).
class VectorField {
 public:
  VectorField() = default;
  VectorField(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {}

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }
  int parity() const { return degree_ & 1; }
  bool is_zero() const { return components_.empty(); }

  /// Stores a component; zero erases. Throws when the polynomial is not
  /// homogeneous of degree deg(X) + deg(q_i).
  void set_component(std::size_t i, Poly p);
  /// Component polynomial, zero when absent.
  Poly component(std::size_t i) const;
  const std::map<std::size_t, Poly>& components() const { return components_; }

  Poly apply(const Poly& p) const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(const Rat& c);
  bool operator==(const VectorField& o) const;

 private:
  ChartPtr chart_;
  int degree_ = 0;
  std::map<std::size_t, Poly> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(const Rat& c, VectorField x);

/// Graded commutator [X,Y] = X Y - (-1)^{|X||Y|} Y X, a vector field of
/// degree |X|+|Y| with components X(Y^i) - (-1)^{|X||Y|} Y(X^i).
VectorField vf_commutator(const VectorField& x, const VectorField& y);

/// Square of an odd vector field, computed both as (1/2)[X,X] and by
/// direct double application to every coordinate; throws on internal
/// disagreement. X is homological iff the result is zero.
VectorField vf_square(const VectorField& x);

/// Conjugated field rho o X o psi on a new chart. to_old gives the image
/// psi(new coordinate) in the old chart; from_old gives rho(old
/// coordinate) in the new chart. When rho and psi are mutually inverse
/// this is the coordinate change of X; callers verify weaker contracts
/// (projection compatibility) themselves.
VectorField vf_conjugate(const VectorField& x, ChartPtr new_chart,
                         const std::vector<Poly>& to_old,
                         const std::vector<Poly>& from_old);

/// Shifted tangent chart: the base coordinates followed by one barred
/// coordinate per base coordinate, named by prefix and carrying degree
/// deg(q) + 1. Base coordinates keep their indices.
class TangentChart {
 public:
  explicit TangentChart(ChartPtr base, std::string prefix = "d:");

  const ChartPtr& base() const { return base_; }
  const ChartPtr& full() const { return full_; }
  const std::string& prefix() const { return prefix_; }
  std::size_t base_size() const { return base_->size(); }
  std::size_t bar_index(std::size_t i) const { return base_->size() + i; }
  bool is_bar(std::size_t i) const { return i >= base_->size(); }

  /// Inclusion of a base polynomial along the zero-section projection.
  Poly include(const Poly& p) const;
  /// Restriction to the zero tangent section: barred coordinates to zero.
  Poly restrict_to_base(const Poly& p) const;

 private:
  ChartPtr base_;
  ChartPtr full_;
  std::string prefix_;
};

/// Fiberwise de Rham differential on the tangent chart: q_i to d:q_i,
/// barred coordinates to zero. Degree +1, squares to zero.
VectorField de_rham(const TangentChart& t);

/// Contraction with a base field: d:q_i to X^i, base coordinates to zero.
/// Degree deg(X) - 1.
VectorField contraction(const TangentChart& t, const VectorField& x);

/// Lie derivative [iota_X, de_rham]; on base coordinates it reproduces X,
/// on barred coordinates it is the signed derivative of X's components.
VectorField lie_derivative(const TangentChart& t, const VectorField& x);

/// Tangent prolongation d̄ + L_X of a degree +1 field; homological iff X is.
VectorField tangent_prolongation(const TangentChart& t, const VectorField& x);

/// Vector field JSON: {"degree":1,"components":{"q1":<polynomial>,...}}.
VectorField vf_from_json(const Json& j, ChartPtr chart);
Json vf_to_json(const VectorField& x);

}  // namespace qstruct
