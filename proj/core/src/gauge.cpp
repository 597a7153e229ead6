#include "qstruct/gauge.hpp"

#include <map>

namespace qstruct {
namespace {

void check_q(const SectionCtx& ctx, const VectorField& q) {
  if (!q.chart() || !(*q.chart() == *ctx.fiber()))
    throw Error("gauge: field must live on the arena fiber");
  if (q.degree() != 1) throw Error("gauge: field must have degree +1");
}

Poly norm_entry(const Poly& p, const ChartPtr& chart) {
  if (!p.chart()) return Poly::zero(chart);
  if (!(*p.chart() == *chart)) throw Error("gauge: matrix entry on wrong chart");
  return p;
}

void check_matrix_shape(const PolyMatrix& m, std::size_t n, const char* what) {
  if (m.size() != n) throw Error(std::string("gauge: ") + what + " must be square");
  for (const auto& row : m)
    if (row.size() != n) throw Error(std::string("gauge: ") + what + " must be square");
}

/// Fiberwise de Rham on a barred arena: q_i to dbar q_i, parameters inert.
VectorField bar_de_rham(const SectionCtx& ctx) {
  VectorField d(ctx.up(), 1);
  for (std::size_t i = 0; i < ctx.n(); ++i)
    d.set_component(i, Poly::coordinate(ctx.up(), ctx.bar_up(i)));
  return d;
}

Poly pull_down(const SectionCtx& ctx, const VectorField& q, const Poly& p) {
  return ctx.has_bars() ? ctx.f_star(q, p) : ctx.a_star(p);
}

}  // namespace

void check_generator(const SectionCtx& ctx, const VectorField& eps, int degree) {
  if (!eps.chart() || !(*eps.chart() == *ctx.up()))
    throw Error("gauge: generator must live on the arena total chart");
  if (eps.degree() != degree) throw Error("gauge: generator has the wrong degree");
  const std::size_t limit = ctx.has_bars() ? 2 * ctx.n() : ctx.n();
  for (const auto& [i, comp] : eps.components())
    if (i >= limit) throw Error("gauge: generator moves a parameter direction");
}

VectorField total_Q(const SectionCtx& ctx, const VectorField& q) {
  check_q(ctx, q);
  VectorField total = ctx.d_up();
  if (ctx.has_bars()) {
    TangentChart t(ctx.fiber());
    total += ctx.up_field(tangent_prolongation(t, q));
  } else {
    total += ctx.up_field(q);
  }
  return total;
}

std::vector<Poly> gauge_delta(const SectionCtx& ctx, const VectorField& q,
                              const VectorField& eps) {
  check_generator(ctx, eps);
  const VectorField moved = vf_commutator(total_Q(ctx, q), eps);
  std::vector<Poly> out;
  const std::size_t rows = ctx.has_bars() ? 2 * ctx.n() : ctx.n();
  out.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) out.push_back(pull_down(ctx, q, moved.component(i)));
  return out;
}

VectorField downstairs_delta(const SectionCtx& ctx, const std::vector<Poly>& delta) {
  if (delta.size() != ctx.n() && delta.size() != 2 * ctx.n())
    throw Error("gauge: variation must cover the fiber block");
  VectorField move(ctx.down(), 0);
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const Poly entry = norm_entry(delta[i], ctx.down());
    for (const auto& [e, c] : entry.terms())
      for (std::size_t j = 0; j < ctx.n(); ++j)
        if (e[ctx.f_down(j)] != 0)
          throw Error("gauge: variation must stay in the {A, dA} basis");
    move.set_component(ctx.a_down(i), entry);
    move.set_component(ctx.da_down(i), ctx.d_down_apply(entry));
  }
  return move;
}

void check_family(const SectionCtx& ctx, const GaugeFamily& fam) {
  check_generator(ctx, fam.generator);
  const ParamBlock& own = ctx.block(fam.label);
  for (const auto& [row, comp] : fam.generator.components()) {
    for (const auto& [e, c] : comp.terms()) {
      std::uint64_t own_count = 0, other_count = 0;
      for (const ParamBlock& block : ctx.params()) {
        std::uint64_t count = 0;
        for (std::size_t b = 0; b < ctx.n(); ++b) {
          if (block.up[b] >= 0) count += e[static_cast<std::size_t>(block.up[b])];
          if (block.dup[b] >= 0) count += e[static_cast<std::size_t>(block.dup[b])];
        }
        (block.label == own.label ? own_count : other_count) += count;
      }
      if (own_count != 1 || other_count != 0)
        throw Error("gauge: family must be linear in its own parameter block");
    }
  }
}

GaugeFamily unit_family(const SectionCtx& ctx, const std::string& label) {
  const ParamBlock& block = ctx.block(label);
  VectorField eps(ctx.up(), -1);
  for (std::size_t b = 0; b < ctx.n(); ++b)
    if (block.up[b] >= 0)
      eps.set_component(b, Poly::coordinate(ctx.up(), static_cast<std::size_t>(block.up[b])));
  return {label, std::move(eps)};
}

std::vector<Poly> instantiate_delta(const SectionCtx& ctx, const VectorField& q,
                                    const GaugeFamily& fam,
                                    const std::vector<Poly>& values) {
  check_family(ctx, fam);
  if (values.size() != ctx.n()) throw Error("gauge: one parameter value per fiber coordinate");
  const ParamBlock& block = ctx.block(fam.label);
  std::map<std::size_t, Poly> repl;
  for (std::size_t b = 0; b < ctx.n(); ++b) {
    const Poly value = norm_entry(values[b], ctx.down());
    if (block.down[b] < 0) {
      if (!value.is_zero()) throw Error("gauge: value for a skipped parameter slot");
      continue;
    }
    repl.emplace(static_cast<std::size_t>(block.down[b]), value);
    repl.emplace(static_cast<std::size_t>(block.ddown[b]), ctx.d_down_apply(value));
  }
  std::vector<Poly> out = gauge_delta(ctx, q, fam.generator);
  for (Poly& row : out) row = substitute_partial(row, repl);
  return out;
}

CovarianceReport covariance_check(const VectorField& q, const PolyMatrix& w,
                                  const PolyMatrix& v) {
  const ChartPtr chart = q.chart();
  if (!chart) throw Error("gauge: covariance needs a charted field");
  if (q.degree() != 1) throw Error("gauge: field must have degree +1");
  const std::size_t n = chart->size();
  check_matrix_shape(w, n, "w");
  check_matrix_shape(v, n, "v");
  CovarianceReport rep;
  for (std::size_t beta = 0; beta < n; ++beta) {
    VectorField xb(chart, -chart->degree(beta));
    for (std::size_t gamma = 0; gamma < n; ++gamma) {
      const Poly entry = norm_entry(w[gamma][beta], chart);
      if (!entry.is_zero()) xb.set_component(gamma, entry);
    }
    const VectorField moved = vf_commutator(xb, q);
    for (std::size_t alpha = 0; alpha < n; ++alpha) {
      const Poly diff = norm_entry(v[alpha][beta], chart) - moved.component(alpha);
      if (!diff.is_zero()) {
        rep.covariant = false;
        rep.failures.push_back({alpha, beta, diff});
      }
    }
  }
  return rep;
}

VectorField derived_bracket(const SectionCtx& ctx, const VectorField& q,
                            const VectorField& eps, const VectorField& epsp) {
  check_generator(ctx, eps);
  check_generator(ctx, epsp);
  return vf_commutator(vf_commutator(total_Q(ctx, q), eps), epsp);
}

VectorField derived_bracket_antisym(const SectionCtx& ctx, const VectorField& q,
                                    const VectorField& eps, const VectorField& epsp) {
  VectorField out = derived_bracket(ctx, q, eps, epsp);
  out -= derived_bracket(ctx, q, epsp, eps);
  out *= Rat(1, 2);
  return out;
}

CommutatorReport commutator_defect(const SectionCtx& ctx, const VectorField& q,
                                   const GaugeFamily& fam, const GaugeFamily& famp) {
  check_family(ctx, fam);
  check_family(ctx, famp);
  if (fam.label == famp.label)
    throw Error("gauge: commutator needs families over distinct blocks");

  const VectorField first = downstairs_delta(ctx, gauge_delta(ctx, q, fam.generator));
  const VectorField second = downstairs_delta(ctx, gauge_delta(ctx, q, famp.generator));
  const VectorField comm = vf_commutator(first, second);

  CommutatorReport rep;
  rep.hat = derived_bracket(ctx, q, fam.generator, famp.generator);
  for (std::size_t b = 0; b < ctx.n(); ++b)
    rep.new_values.push_back(pull_down(ctx, q, rep.hat.component(b)));
  const std::vector<Poly> hat_delta = instantiate_delta(ctx, q, fam, rep.new_values);

  rep.closed = true;
  rep.f_linear = true;
  Json defect_terms = Json::array();
  Json new_parameters = Json::object();
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const Poly raw = comm.component(ctx.a_down(i)) - hat_delta[i];
    const Poly in_f = to_F_basis(ctx, q, raw);
    for (const auto& [e, c] : in_f.terms()) {
      std::uint64_t f_count = 0;
      for (std::size_t j = 0; j < ctx.n(); ++j) f_count += e[ctx.f_down(j)];
      if (f_count != 1) rep.f_linear = false;
    }
    if (!in_f.is_zero()) {
      rep.closed = false;
      defect_terms.push_back(
          {{"coordinate", ctx.fiber()->name(i)}, {"expression", poly_str(in_f)}});
    }
    rep.defect.push_back(in_f);
    if (!rep.new_values[i].is_zero())
      new_parameters[ctx.fiber()->name(i)] = poly_str(rep.new_values[i]);
  }
  rep.json = Json{{"closed", rep.closed},
                  {"new_parameters", new_parameters},
                  {"defect_terms", defect_terms}};
  return rep;
}

VectorField lifted_epsilon(const SectionCtx& ctx, const VectorField& q,
                           const std::string& label, const PolyMatrix& wbar,
                           const PolyMatrix& vbar) {
  if (!ctx.has_bars()) throw Error("gauge: tangent lift needs a barred arena");
  check_q(ctx, q);
  const std::size_t n = ctx.n();
  check_matrix_shape(wbar, n, "wbar");
  check_matrix_shape(vbar, n, "vbar");
  const TangentChart t(ctx.fiber());

  PolyMatrix w0(n, std::vector<Poly>(n)), v0(n, std::vector<Poly>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      w0[a][b] = t.restrict_to_base(norm_entry(wbar[a][b], t.full()));
      v0[a][b] = t.restrict_to_base(norm_entry(vbar[a][b], t.full()));
    }
  const CovarianceReport cov = covariance_check(q, w0, v0);
  if (!cov.covariant) throw Error("gauge: zero-section ansatz is not covariant");

  const ParamBlock& block = ctx.block(label);
  // iota_eps: l^b w^a_b on the barred rows; its bracket with the fiberwise
  // de Rham is the Lie-derivative prolongation of eps.
  VectorField iota(ctx.up(), -2);
  for (std::size_t a = 0; a < n; ++a) {
    Poly coeff(ctx.up());
    for (std::size_t b = 0; b < n; ++b) {
      if (w0[a][b].is_zero() || block.up[b] < 0) continue;
      coeff += Poly::coordinate(ctx.up(), static_cast<std::size_t>(block.up[b])) *
               ctx.up_embed(t.include(w0[a][b]));
    }
    if (!coeff.is_zero()) iota.set_component(ctx.bar_up(a), coeff);
  }
  VectorField lift = vf_commutator(iota, bar_de_rham(ctx));

  for (std::size_t a = 0; a < n; ++a) {
    Poly coeff(ctx.up());
    for (std::size_t b = 0; b < n; ++b) {
      const Poly dv = norm_entry(vbar[a][b], t.full()) - t.include(v0[a][b]);
      const Poly dw = norm_entry(wbar[a][b], t.full()) - t.include(w0[a][b]);
      if (!dv.is_zero() && block.up[b] >= 0)
        coeff += Poly::coordinate(ctx.up(), static_cast<std::size_t>(block.up[b])) *
                 ctx.up_embed(dv);
      if (!dw.is_zero() && block.dup[b] >= 0)
        coeff += Poly::coordinate(ctx.up(), static_cast<std::size_t>(block.dup[b])) *
                 ctx.up_embed(dw);
    }
    if (!coeff.is_zero()) {
      Poly total = lift.component(ctx.bar_up(a));
      total += coeff;
      lift.set_component(ctx.bar_up(a), total);
    }
  }
  return lift;
}

FlatnessReport flatness(ChartPtr fiber, const PolyTensor3& n) {
  if (!fiber) throw Error("gauge: flatness needs a chart");
  const std::size_t m = fiber->size();
  if (n.size() != m) throw Error("gauge: connection must be cubic in the chart size");
  for (const auto& plane : n) check_matrix_shape(plane, m, "connection");

  const auto entry = [&](std::size_t a, std::size_t b, std::size_t c) {
    return norm_entry(n[a][b][c], fiber);
  };
  const auto sign = [](int exponent) { return (exponent & 1) ? Rat(-1) : Rat(1); };

  FlatnessReport rep;
  rep.r.assign(m, PolyTensor3(m, PolyMatrix(m, std::vector<Poly>(m))));
  for (std::size_t alpha = 0; alpha < m; ++alpha)
    for (std::size_t eta = 0; eta < m; ++eta)
      for (std::size_t beta = 0; beta < m; ++beta)
        for (std::size_t gamma = 0; gamma < m; ++gamma) {
          const int da = fiber->degree(alpha), de = fiber->degree(eta);
          const int db = fiber->degree(beta), dc = fiber->degree(gamma);
          Poly half = entry(alpha, beta, gamma).left_derive(eta);
          for (std::size_t delta = 0; delta < m; ++delta)
            half += sign((da - dc) * db) * (entry(alpha, eta, delta) * entry(delta, beta, gamma));
          Poly other = entry(alpha, eta, gamma).left_derive(beta);
          for (std::size_t delta = 0; delta < m; ++delta)
            other += sign((da - dc) * de) * (entry(alpha, beta, delta) * entry(delta, eta, gamma));
          Poly value = half - sign(de * db) * other;
          if (!value.is_zero()) rep.flat = false;
          rep.r[alpha][eta][beta][gamma] = std::move(value);
        }
  return rep;
}

ResidualReport residual_shift(const SectionCtx& ctx, const VectorField& q,
                              const VectorField& eps, const VectorField& eta) {
  check_generator(ctx, eps);
  check_generator(ctx, eta, -2);
  VectorField shifted = eps;
  shifted += vf_commutator(total_Q(ctx, q), eta);
  const std::vector<Poly> base = gauge_delta(ctx, q, eps);
  const std::vector<Poly> moved = gauge_delta(ctx, q, shifted);
  ResidualReport rep;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Poly diff = moved[i] - base[i];
    if (!diff.is_zero()) {
      rep.invariant = false;
      rep.differences.emplace_back(i, diff);
    }
  }
  return rep;
}

}  // namespace qstruct
