#pragma once

/// Strong homotopy Lie structures in two equivalent dress codes: graded
/// symmetric bracket tables over a positively graded chart (the shifted
/// convention mirroring a degree +1 vector field) and graded antisymmetric
/// bracket systems on the unshifted space. Includes extraction from and
/// reconstruction of homological fields, Jacobi defect evaluation in both
/// conventions, degree truncations, and tangent lifts.

#include "qstruct/derivation.hpp"
#include "qstruct/galgebra.hpp"

namespace qstruct {

/// All (m,k)-unshuffles as pairs of ascending position lists.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> unshuffles(
    std::size_t m, std::size_t k);

/// Koszul sign of reordering arguments with the given parities into the
/// order perm (perm lists original positions): parity of the number of
/// inverted odd-odd pairs.
int koszul_sign(const std::vector<int>& parities, const std::vector<std::size_t>& perm);

/// Antisymmetric Koszul sign sgn(perm) * koszul_sign(...).
int chi_sign(const std::vector<int>& parities, const std::vector<std::size_t>& perm);

/// Graded symmetric bracket constants over a chart: entry (inputs -> out)
/// holds the coefficient of the basis element dual to q_out in the
/// bracket of the inputs' dual elements. Keys are ascending index lists;
/// lookups in arbitrary order carry the symmetric Koszul sign of the
/// sort. Invariants: arity at most max chart degree + 2, input degrees
/// sum to output degree + 1, no entry with a repeated odd input.
class BracketTable {
 public:
  explicit BracketTable(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t max_arity() const { return max_arity_; }

  /// Accumulates c into the entry; inputs may be in any order.
  void add(const std::vector<std::size_t>& inputs, std::size_t out, const Rat& c);

  /// Dense output vector of the bracket of args (any order).
  std::vector<Rat> bracket(const std::vector<std::size_t>& args) const;

  const std::map<std::vector<std::size_t>, std::vector<Rat>>& entries() const {
    return entries_;
  }
  bool operator==(const BracketTable& o) const;

 private:
  ChartPtr chart_;
  std::size_t max_arity_ = 0;
  std::map<std::vector<std::size_t>, std::vector<Rat>> entries_;
};

/// Graded antisymmetric bracket constants on the unshifted space. Basis
/// element i has degree 1 - deg(q_i) (so degree-1 coordinates pair with
/// degree-0 elements). Lookups carry the antisymmetric sign chi.
class LnAlgebra {
 public:
  explicit LnAlgebra(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t max_arity() const { return max_arity_; }
  int v_degree(std::size_t i) const { return 1 - chart_->degree(i); }
  int v_parity(std::size_t i) const { return (chart_->degree(i) + 1) & 1; }

  void add(const std::vector<std::size_t>& inputs, std::size_t out, const Rat& c);
  std::vector<Rat> bracket(const std::vector<std::size_t>& args) const;

  const std::map<std::vector<std::size_t>, std::vector<Rat>>& entries() const {
    return entries_;
  }
  bool operator==(const LnAlgebra& o) const;

 private:
  ChartPtr chart_;
  std::size_t max_arity_ = 0;
  std::map<std::vector<std::size_t>, std::vector<Rat>> entries_;
};

/// Reads the bracket constants off a pointed degree +1 vector field: the
/// arity-j entry is the coefficient of the matching monomial in Q^out
/// times the product of the monomial's factorials. Inverse of
/// brackets_to_q. Throws when Q has a constant term or degree != +1.
BracketTable extract_brackets(const VectorField& q);

/// Degree +1 field with components sum C / (prod e!) * monomial.
VectorField brackets_to_q(const BracketTable& t);

/// Defect of the graded symmetric homotopy Jacobi identity of arity m at
/// the given argument list: sum over k and (m,k)-unshuffles of the
/// epsilon-signed nested bracket. Dense output vector; zero for every m
/// and argument choice iff brackets_to_q squares to zero.
std::vector<Rat> jacobi_defect(const BracketTable& t, std::size_t m,
                               const std::vector<std::size_t>& args);

/// Defect of the antisymmetric-convention Jacobi identity with the
/// (-1)^{k(m-k)} prefactor and chi signs.
std::vector<Rat> ln_jacobi_defect(const LnAlgebra& l, std::size_t m,
                                  const std::vector<std::size_t>& args);

struct JacobiViolation {
  std::size_t m = 0;
  std::vector<std::size_t> args;
  std::vector<Rat> defect;
};

/// All nonzero Jacobi defects over ascending argument multisets (repeated
/// odd coordinates skipped) for arities 1..m_max.
std::vector<JacobiViolation> jacobi_all(const BracketTable& t, std::size_t m_max);
std::vector<JacobiViolation> ln_jacobi_all(const LnAlgebra& l, std::size_t m_max);

/// Convention change: the antisymmetric constant equals the symmetric one
/// times (-1)^{sum_k (j-k) * vdeg(input_k)} over the canonical input
/// order. An involution together with unshift_table.
LnAlgebra shift_table(const BracketTable& t);
BracketTable unshift_table(const LnAlgebra& l);

enum class TruncateMode { Ker, Im, Naive };

/// Canonical degree truncation of a homological field. Coordinates of
/// degree < m survive unchanged; degree-m coordinates are replaced by a
/// basis of the quotient's function space; higher degrees are dropped.
struct TruncationResult {
  ChartPtr chart;
  VectorField field;
  /// Image of each original coordinate under the projection (polynomial
  /// on the truncated chart; zero for dropped directions).
  std::vector<Poly> projection;
  /// Image of each truncated coordinate inside the original chart.
  std::vector<Poly> section;
  /// Original coordinates of degree <= m where projection o Q differs
  /// from Q_truncated o projection; empty for the canonical modes on
  /// homological input.
  std::vector<std::string> morphism_violations;
};

/// Ker mode: quotient the top kept level by the kernel of the unary
/// bracket leaving it; the new top coordinates are the independent linear
/// parts of Q on degree-(m-1) coordinates, pivoted in chart order.
/// Im mode: quotient by the image of the unary bracket entering it.
/// Naive mode: drop higher degrees without quotienting.
/// Requires 2 <= m <= max chart degree and, for Ker and Im, a
/// homological field.
TruncationResult truncate(const VectorField& q, int m, TruncateMode mode);
TruncationResult truncate_ker(const VectorField& q, int m);
TruncationResult truncate_im(const VectorField& q, int m);

/// Tangent lift: the prolongation d + L_Q on the shifted tangent chart
/// together with its bracket table.
struct LiftResult {
  TangentChart tchart;
  VectorField q_prime;
  BracketTable table;
};

LiftResult tangent_lift_ln(const BracketTable& t, const std::string& prefix = "d:");

/// Bracket table JSON: {"2":[{"out":"q1","in":["q2","q3"],"coeff":"1/2"},...],...}
/// keyed by arity; inputs accepted in any order and accumulated.
BracketTable bracket_table_from_json(const Json& j, ChartPtr chart);
Json bracket_table_to_json(const BracketTable& t);

}  // namespace qstruct
