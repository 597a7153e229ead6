#pragma once

/// Gauge transformations on a section arena. A generator is a vertical
/// vector field eps of degree -1 whose coefficients mix fiber coordinates
/// with external parameters; it acts on sections by
///   delta A^i = a*([d + Q, eps] q^i),
/// with the tangent prolongation d + Q' and the pullback f* on barred
/// arenas. A family is a generator linear in one parameter block; its
/// slots can be filled with field-dependent forms, which is how the
/// commutator of two transformations is compared against the transformation
/// with derived-bracket parameters. The module also lifts covariant
/// ansaetze to the tangent fiber, measures curvature of connection
/// coefficients, and checks invariance under [d + Q, -]-exact shifts.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qstruct/derivation.hpp"
#include "qstruct/fieldstrength.hpp"
#include "qstruct/galgebra.hpp"

namespace qstruct {

using PolyMatrix = std::vector<std::vector<Poly>>;
using PolyTensor3 = std::vector<PolyMatrix>;
using PolyTensor4 = std::vector<PolyTensor3>;

/// Throws unless eps lives on ctx.up(), has the given degree, and moves
/// only fiber (and, with bars, barred) directions.
void check_generator(const SectionCtx& ctx, const VectorField& eps, int degree = -1);

/// The total differential d + Q on ctx.up(): the parameter differential
/// plus Q extended by zero, replaced by the prolongation d̄ + L_Q on
/// barred arenas. Squares to zero iff Q does.
VectorField total_Q(const SectionCtx& ctx, const VectorField& q);

/// delta A^i = a*([d + Q, eps] q^i) for every fiber coordinate, as
/// {A, dA, params} polynomials. On barred arenas the pullback is f* and
/// the variations delta F^i of the field strengths are appended after the
/// fiber block.
std::vector<Poly> gauge_delta(const SectionCtx& ctx, const VectorField& q,
                              const VectorField& eps);

/// The downstairs action of a variation: moves A_i by delta[i] and dA_i by
/// d(delta[i]); parameters and F generators stay inert. Rejects entries
/// with F support, so commutators stay in the {A, dA} basis.
VectorField downstairs_delta(const SectionCtx& ctx, const std::vector<Poly>& delta);

/// A generator that is linear in the parameters of one block: the block
/// slots act as free parameter entries which instantiate_delta can fill
/// with concrete, possibly field-dependent forms.
struct GaugeFamily {
  std::string label;
  VectorField generator;
};

/// Throws unless the family generator is vertical of degree -1, every
/// monomial of every coefficient contains exactly one generator of its own
/// block, and no generator of any other block.
void check_family(const SectionCtx& ctx, const GaugeFamily& fam);

/// The family whose generator moves q_b by the bare parameter of fiber
/// coordinate b (unit coefficient matrix).
GaugeFamily unit_family(const SectionCtx& ctx, const std::string& label);

/// Variation with the family's parameter slots substituted: values[b]
/// fills the slot of fiber coordinate b and its honest differential
/// d(values[b]) fills the differential slot, so the field dependence of
/// the values enters through dA. values[b] must be an {A, dA, params}
/// polynomial of degree deg(q_b) - 1; slots the block skipped must get
/// zero.
std::vector<Poly> instantiate_delta(const SectionCtx& ctx, const VectorField& q,
                                    const GaugeFamily& fam,
                                    const std::vector<Poly>& values);

struct CovarianceFailure {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  Poly difference;
};

struct CovarianceReport {
  bool covariant = true;
  std::vector<CovarianceFailure> failures;
};

/// Checks the covariance relation v^a_b = [w^c_b d/dq^c, Q]^a entrywise
/// for fiber matrices indexed as w[alpha][beta]. Default-constructed
/// entries count as zero.
CovarianceReport covariance_check(const VectorField& q, const PolyMatrix& w,
                                  const PolyMatrix& v);

/// Derived bracket [[d + Q, eps], eps'], again a degree -1 generator; its
/// coefficients may pick up parameter differentials.
VectorField derived_bracket(const SectionCtx& ctx, const VectorField& q,
                            const VectorField& eps, const VectorField& epsp);

/// Antisymmetrized derived bracket (1/2)([[d+Q,e],e'] - [[d+Q,e'],e]);
/// differs from the plain one by half of [d + Q, [eps, eps']].
VectorField derived_bracket_antisym(const SectionCtx& ctx, const VectorField& q,
                                    const VectorField& eps, const VectorField& epsp);

struct CommutatorReport {
  bool closed = false;          // defect identically zero on every fiber row
  bool f_linear = false;        // every defect monomial has exactly one F factor
  VectorField hat;              // derived-bracket generator upstairs
  std::vector<Poly> new_values; // its fiber rows pulled back, the hatted parameters
  std::vector<Poly> defect;     // per fiber row, rewritten in the F basis
  Json json;                    // {"closed", "new_parameters", "defect_terms"}
};

/// [delta, delta'] A^i - delta_hat A^i for two families over different
/// blocks, where delta_hat instantiates fam with the fiber rows of the
/// derived bracket [[d+Q,eps],eps'] as parameter values and the commutator
/// is taken downstairs. For unit-matrix families over a homological field
/// the defect is exactly linear in F.
CommutatorReport commutator_defect(const SectionCtx& ctx, const VectorField& q,
                                   const GaugeFamily& fam, const GaugeFamily& famp);

/// Tangent lift of the ansatz delta A^a = d l^b f*(wbar^a_b)
/// + l^b f*(vbar^a_b) on a barred arena, where wbar, vbar are matrices
/// over the tangent chart and l runs over the parameter block label.
/// With w, v their zero-section restrictions, the lift is
///   L_eps + (l^b (vbar - v)^a_b + dl^b (wbar - w)^a_b) d/d(dbar q^a),
/// eps = l^b w^c_b d/dq^c. Throws unless (w, v) passes covariance_check;
/// gauge_delta of the result then reproduces the ansatz exactly.
VectorField lifted_epsilon(const SectionCtx& ctx, const VectorField& q,
                           const std::string& label, const PolyMatrix& wbar,
                           const PolyMatrix& vbar);

struct FlatnessReport {
  bool flat = true;
  PolyTensor4 r;  // r[alpha][eta][beta][gamma]
};

/// Curvature of connection coefficients n[alpha][beta][gamma] on a fiber
/// chart:
///   r^a_{ebc} = d_e n^a_{bc} + (-1)^{(|a|-|c|)|b|} n^a_{ed} n^d_{bc}
///             - (-1)^{|e||b|} (e <-> b),
/// with left derivatives and coordinate degrees in the signs.
FlatnessReport flatness(ChartPtr fiber, const PolyTensor3& n);

struct ResidualReport {
  bool invariant = true;
  std::vector<std::pair<std::size_t, Poly>> differences;  // fiber row, gap
};

/// Compares gauge_delta(eps) with gauge_delta(eps + [d + Q, eta]) for a
/// vertical degree -2 shift eta. Homological fields leave every variation
/// unchanged; the differences list localizes any gap.
ResidualReport residual_shift(const SectionCtx& ctx, const VectorField& q,
                              const VectorField& eps, const VectorField& eta);

}  // namespace qstruct
