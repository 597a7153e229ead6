#pragma once

/// Symbolic section algebra over an abstract base. For every fiber
/// coordinate q_i there is a form generator A_i of the same degree, its
/// differential dA_i, and a field-strength generator F_i of degree
/// deg(q_i) + 1. Optional parameter families adjoin further external form
/// generators (with differentials) to both levels. The field strengths
/// F^i = dA_i - a*(Q^i) measure the failure of a* to intertwine the two
/// differentials; they span a differential ideal exactly when Q^2 = 0.

#include "qstruct/derivation.hpp"

namespace qstruct {

/// One external generator family: for each fiber coordinate of degree d
/// with d + shift >= 0, a generator "<label>:<name>" of degree d + shift
/// and its differential "d<label>:<name>" of degree d + shift + 1.
/// Labels must be nonempty and distinct; collisions with the built-in
/// prefixes are caught by chart validation.
struct ParamSpec {
  std::string label;
  int shift = -1;
};

/// Index layout of one adjoined family; -1 marks a fiber coordinate
/// skipped because its shifted degree would be negative.
struct ParamBlock {
  std::string label;
  int shift = 0;
  std::vector<std::ptrdiff_t> up, dup;      // generator and differential upstairs
  std::vector<std::ptrdiff_t> down, ddown;  // the same downstairs
};

/// Two-level arena for section computations. Upstairs: fiber coordinates
/// (optionally with barred tangent partners) and parameters; the base
/// differential acts on parameters only. Downstairs: A, dA, F blocks and
/// the same parameters; the base differential maps A_i to dA_i and is
/// undefined on the F block.
class SectionCtx {
 public:
  explicit SectionCtx(ChartPtr fiber, bool bars = false, std::vector<ParamSpec> specs = {});

  const ChartPtr& fiber() const { return fiber_; }
  const ChartPtr& up() const { return up_; }
  const ChartPtr& down() const { return down_; }
  bool has_bars() const { return bars_; }
  std::size_t n() const { return n_; }

  std::size_t q_up(std::size_t i) const { return i; }
  std::size_t bar_up(std::size_t i) const;
  std::size_t a_down(std::size_t i) const { return i; }
  std::size_t da_down(std::size_t i) const { return n_ + i; }
  std::size_t f_down(std::size_t i) const { return 2 * n_ + i; }

  const std::vector<ParamBlock>& params() const { return params_; }
  const ParamBlock& block(const std::string& label) const;

  /// Base differential upstairs: parameters to their differentials, fiber
  /// coordinates (and bars) annihilated. Exposed as a field so it can
  /// enter graded commutators.
  const VectorField& d_up() const { return d_up_; }
  Poly d_up_apply(const Poly& p) const { return d_up_.apply(p); }

  /// Base differential downstairs; rejects polynomials with F support,
  /// where d is only defined through the basis change.
  Poly d_down_apply(const Poly& p) const;

  /// Inclusion of a fiber (or, with bars, tangent) polynomial upstairs.
  Poly up_embed(const Poly& p) const;
  /// Inclusion of a fiber (or tangent) field upstairs, zero on parameters.
  VectorField up_field(const VectorField& x) const;

  /// Section pullback: q_i to A_i, parameters carried along; rejects
  /// barred coordinates.
  Poly a_star(const Poly& up_poly) const;
  Poly a_star_fiber(const Poly& fiber_poly) const { return a_star(up_embed(fiber_poly)); }

  /// Tangent-section pullback with barred coordinates to F generators.
  Poly f_star_f(const Poly& up_poly) const;
  /// The same with F expanded to dA_i - a*(Q^i).
  Poly f_star(const VectorField& q, const Poly& up_poly) const;

 private:
  ChartPtr fiber_;
  ChartPtr up_;
  ChartPtr down_;
  bool bars_ = false;
  std::size_t n_ = 0;
  std::vector<ParamBlock> params_;
  VectorField d_up_;
  VectorField d_down_;

  void check_no_f(const Poly& p, const char* where) const;
};

/// Field strengths of a degree +1 field: F^i = dA_i - a*(Q^i), expressed
/// in the A, dA generators. Nilpotency of q is not required.
std::vector<Poly> field_strength(const SectionCtx& ctx, const VectorField& q);

/// Extension of the field-strength map to any fiber polynomial:
/// F(p) = d(a*(p)) - a*(Q(p)). Satisfies the graded Leibniz-over-a* rule
/// F(pr) = F(p) a*(r) + (-1)^{|p|} a*(p) F(r).
Poly f_extend(const SectionCtx& ctx, const VectorField& q, const Poly& fiber_poly);

/// d F^i + F(Q^i) + a*(Q^2 q_i) per fiber coordinate: identically zero
/// for every degree +1 field, nilpotent or not.
std::vector<Poly> bianchi_defect(const SectionCtx& ctx, const VectorField& q);

/// Rewrites an {A, dA, params} polynomial through dA_i -> F_i + a*(Q^i).
Poly to_F_basis(const SectionCtx& ctx, const VectorField& q, const Poly& p);
/// Inverse rewrite F_i -> dA_i - a*(Q^i).
Poly from_F_basis(const SectionCtx& ctx, const VectorField& q, const Poly& p);
/// Monomials of an F-basis polynomial without F support.
Poly f_free_part(const SectionCtx& ctx, const Poly& p);
/// Membership in the ideal generated by the field strengths.
bool ideal_member(const SectionCtx& ctx, const VectorField& q, const Poly& p);

/// Rows {"coordinate","ideal_member","F_coefficients",...} for d F^i in
/// the F basis; F-free and F-quadratic leftovers appear as "remainder"
/// and "higher" strings when nonzero.
Json f_basis_report(const SectionCtx& ctx, const VectorField& q);

/// Invertible change of 1-form basis omega^i = sum_j omega[i][j](q) dq_j.
/// Entries are fiber polynomials, zero or homogeneous of degree
/// deg(q_i) - deg(q_j).
struct NonholonomicBasis {
  ChartPtr fiber;
  std::vector<std::vector<Poly>> omega;
};

NonholonomicBasis identity_basis(ChartPtr fiber);

/// Exact inverse nu with omega*nu = nu*omega = identity; throws when the
/// constant part is singular or the verification fails.
std::vector<std::vector<Poly>> invert_basis(const NonholonomicBasis& basis);

/// d H^i expressed through the generators A_i and H_i, where
/// H^i = f*(omega^i). Computed by prolonging the field to the tangent,
/// rewriting barred coordinates through the inverse basis, and pulling
/// back. Requires a homological field and an invertible basis.
struct HBasisBianchi {
  ChartPtr out;  // A generators then H generators
  std::vector<Poly> d_h;
};

HBasisBianchi h_basis_bianchi(const VectorField& q, const NonholonomicBasis& basis);

}  // namespace qstruct
