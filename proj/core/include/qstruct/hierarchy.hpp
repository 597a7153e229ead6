#pragma once

/// Exact structure-constant package for a three-level tensor gauge
/// hierarchy: five rational constant tensors subject to eight quadratic
/// closure constraints, an optional fourth level, the induced degree +1
/// charge field, a canonical reduction to a three-term bracket system,
/// curvature forms with their differential identities, the gauge algebra
/// in open and closed form, and invariance conditions for pairing
/// tensors. All checks are exact; violations are reported as data.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qstruct/fieldstrength.hpp"
#include "qstruct/galgebra.hpp"
#include "qstruct/gauge.hpp"
#include "qstruct/linfty.hpp"

namespace qstruct {

using Tensor1 = std::vector<Rat>;
using Tensor2 = std::vector<Tensor1>;
using Tensor3 = std::vector<Tensor2>;
using Tensor4 = std::vector<Tensor3>;
using Tensor5 = std::vector<Tensor4>;

Tensor2 make_tensor2(std::size_t n1, std::size_t n2);
Tensor3 make_tensor3(std::size_t n1, std::size_t n2, std::size_t n3);
Tensor4 make_tensor4(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n4);
Tensor5 make_tensor5(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n4,
                     std::size_t n5);

/// Structure constants of the hierarchy. Vector indices a,b,... and the
/// third-level indices share the range [0, n_v); second-level indices
/// I,J,... run over [0, n_t). Layouts: f[a][b][c] antisymmetric in a,b;
/// d[I][a][b] symmetric in a,b; b[I][r][s] with no declared symmetry;
/// g[I][t]; h[I][a].
struct HierarchyConstants {
  std::size_t n_v = 0;
  std::size_t n_t = 0;
  Tensor3 f;
  Tensor3 d;
  Tensor3 b;
  Tensor2 g;
  Tensor2 h;

  static HierarchyConstants zero(std::size_t n_v, std::size_t n_t);
};

/// Fourth-level extension constants. k[l][t] couples the new level into
/// the third-level rows; c_ij[l][I][J] is antisymmetric in I,J;
/// c_t[l][a][t] carries one vector and one third-level index.
struct ExtensionConstants {
  std::size_t n_4 = 0;
  Tensor2 k;
  Tensor3 c_ij;
  Tensor3 c_t;

  static ExtensionConstants zero(std::size_t n_4, const HierarchyConstants& hc);
};

/// Shape and declared-symmetry validation; throws Error on violation.
void validate(const HierarchyConstants& hc);
void validate(const HierarchyConstants& hc, const ExtensionConstants& ec);

/// JSON exchange format: {"n_v":N,"n_t":M,"f":[[a,b,c,"p/q"],...],...}
/// with 1-based indices; unlisted entries are zero; entries implied by a
/// declared symmetry are auto-completed and conflicting duplicates are
/// rejected. Extension keys are "n_4", "k", "c_IJ", "c_t".
HierarchyConstants hierarchy_from_json(const Json& j);
std::optional<ExtensionConstants> extension_from_json(const Json& j,
                                                      const HierarchyConstants& hc);
Json hierarchy_to_json(const HierarchyConstants& hc,
                       const ExtensionConstants* ec = nullptr);

/// Coefficient tensors of the degree +1 charge field, one block per row
/// level and monomial shape. Layouts: C[a][b][c], t1[I][a], Gam[I][a][K],
/// H[I][a][b][c], tg[I][t], A[s][a][t], B[I][J][t], D[a][b][I][t],
/// E[a][b][c][d][t], tl[l][t] (empty without an extension).
struct TranslatedCoefficients {
  Tensor3 C;
  Tensor2 t1;
  Tensor3 Gam;
  Tensor4 H;
  Tensor2 tg;
  Tensor3 A;
  Tensor3 B;
  Tensor4 D;
  Tensor5 E;
  Tensor2 tl;
};

TranslatedCoefficients translate(const HierarchyConstants& hc,
                                 const ExtensionConstants* ec = nullptr);

/// Generator action on the three levels: xv[a][b][c] acts on vector
/// indices, xt[a][J][I] on second-level indices, xc[a][t][s] on
/// third-level indices. The covariant differential of the module is
/// built from these blocks.
struct XTensors {
  Tensor3 xv;
  Tensor3 xt;
  Tensor3 xc;
};

XTensors x_tensors(const HierarchyConstants& hc);

/// One named check row: pass flag plus a printable first violation
/// ("" when the row passes).
struct IdentityStatus {
  std::string name;
  bool pass = true;
  std::string first_violation;
};

struct ConstraintReport {
  bool pass = true;
  std::vector<IdentityStatus> rows;
};

/// Evaluates the eight quadratic closure constraints for every free
/// index combination. Violations are data, not errors.
ConstraintReport check_constraints(const HierarchyConstants& hc);

/// Extension compatibility: the three coupling identities, the
/// orthogonality of g and k, and its contraction consequence.
ConstraintReport check_extension(const HierarchyConstants& hc,
                                 const ExtensionConstants& ec);

/// Generator closure on all three levels, triviality of the symmetric
/// part, the five invariance identities of the translated coefficient
/// blocks, and the mixed f-d contraction identity.
ConstraintReport representation_report(const HierarchyConstants& hc);

/// Fiber chart of the hierarchy: v1..v{n_v} of degree 1, w1..w{n_t} of
/// degree 2, c1..c{n_v} of degree 3, and e1..e{n_4} of degree 4 when an
/// extension is present.
ChartPtr hierarchy_chart(const HierarchyConstants& hc,
                         const ExtensionConstants* ec = nullptr);

/// Degree +1 charge field assembled from the translated coefficients;
/// the fourth-level rows are zero (the extension enters only through the
/// third-level rows).
VectorField hierarchy_q(const HierarchyConstants& hc,
                        const ExtensionConstants* ec = nullptr);

/// Minimal-model data: the auxiliary chart with a full block of degree-3
/// partners, the lifted charge field on it, the evaluation map onto the
/// fiber chart, the basis change that splits the second level into the
/// image of the degree pairing and a complement, and the reduced chart
/// and field that keep only the image block of partners.
struct QTilde {
  ChartPtr hat_chart;
  VectorField q_hat;
  /// Image of each auxiliary coordinate in the fiber chart.
  std::vector<Poly> phi;

  /// Basis change on second-level indices: column p of basis is the new
  /// basis vector; the first `rank` columns span the image block.
  RatMat basis;
  std::size_t rank = 0;
  HierarchyConstants adapted;

  ChartPtr tilde_chart;
  VectorField q_tilde;
  /// Image of each reduced coordinate in the fiber chart.
  std::vector<Poly> phi_tilde;
};

QTilde build_q_tilde(const HierarchyConstants& hc);

/// Monomial sector of a squared-field residual: output level (1, 2 or 3)
/// and ascending degree multiset of the offending monomial.
struct Sector {
  int block = 0;
  std::vector<int> signature;
  bool operator==(const Sector& o) const = default;
};

std::string sector_str(const Sector& s);

/// Two independent nilpotency verifications: the generic path squares
/// the lifted field and evaluates through the fiber map; the identity
/// path evaluates twelve explicit coefficient identities, one per
/// sector. Both verdicts and the first offending sector must agree.
struct NilpotencyReport {
  bool pass = false;
  bool generic_pass = false;
  bool identity_pass = false;
  bool agree = false;
  bool tilde_square_zero = false;
  std::optional<Sector> generic_first;
  std::optional<Sector> identity_first;
  std::vector<IdentityStatus> rows;
};

NilpotencyReport verify_nilpotent(const HierarchyConstants& hc);

/// Reduction to a three-term bracket system: extracts the brackets of
/// the reduced field, compares every entry against the nine closed-form
/// bracket families, evaluates the two displayed coefficient identities,
/// and runs the full Jacobi sweep. Requires a nilpotent reduced field.
struct Lie3Extraction {
  ChartPtr chart;
  std::optional<LnAlgebra> algebra;
  std::size_t rank = 0;
  bool pass = false;
  bool brackets_match = false;
  bool displayed_pass = false;
  bool jacobi_pass = false;
  std::vector<IdentityStatus> rows;
  std::vector<JacobiViolation> jacobi_violations;
};

Lie3Extraction extract_lie3(const HierarchyConstants& hc);

/// Curvature data over the hierarchy fiber: holonomic field strengths,
/// basis-corrected field strengths from the canonical one-form basis,
/// the explicit correction formulas relating the two, the expanded
/// closed-form displays, and the three covariant differential
/// identities (the third-level one contracted with g).
struct FieldStrengthData {
  std::shared_ptr<const SectionCtx> ctx;
  std::vector<Poly> holonomic;
  std::vector<Poly> nonholonomic;
  bool pass = false;
  bool correction_match = false;
  bool display_match = false;
  bool bianchi_pass = false;
  std::vector<IdentityStatus> rows;
};

FieldStrengthData hierarchy_field_strengths(const HierarchyConstants& hc,
                                            const ExtensionConstants* ec = nullptr);

/// Gauge algebra verification. Open path: commutators of the plain
/// parameter families close only up to explicit curvature terms, which
/// are compared row by row together with the composite parameter values.
/// Lifted and field-redefined closed paths: the one-form-corrected
/// generator families close exactly on the first two levels and on the
/// g-contracted third level, with composite parameters matching their
/// closed forms. Covariance path: the curvatures transform linearly
/// under both closed-path generator sets and are strictly invariant
/// under the higher-level parameters. Shift path: the parameter-shift
/// redundancy leaves the generated variations unchanged.
struct GaugeSuiteReport {
  bool pass = false;
  bool open_pass = false;
  bool lifted_pass = false;
  bool closed_pass = false;
  bool covariance_pass = false;
  bool shift_pass = false;
  std::vector<IdentityStatus> rows;
};

GaugeSuiteReport gauge_suite(const HierarchyConstants& hc,
                             const ExtensionConstants* ec = nullptr);

/// Invariance conditions for pairing tensors: the kernel condition on
/// M[s][t], its factorization through g and m[I][J], and the optional
/// invariance of N[a][b] and M2[I][J] under the generator action.
/// Throws Error on dimension mismatch.
ConstraintReport action_tensor_checks(const HierarchyConstants& hc, const Tensor2& M,
                                      const Tensor2& m, const Tensor2* N = nullptr,
                                      const Tensor2* M2 = nullptr);

/// Deterministic search oracle: scans all constant sets with entries in
/// {-1, 0, 1} respecting the declared symmetries, keeps those passing
/// every closure constraint with at least min_nonzero of the five
/// tensors nonzero, and returns the first max_count in enumeration
/// order. Intended for dimensions <= 2.
std::vector<HierarchyConstants> enumerate_solutions(std::size_t n_v, std::size_t n_t,
                                                    std::size_t max_count,
                                                    std::size_t min_nonzero = 2);

}  // namespace qstruct
