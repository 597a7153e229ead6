#include "qstruct/fieldstrength.hpp"

namespace qstruct {

namespace {

void check_q_field(const SectionCtx& ctx, const VectorField& q) {
  if (!q.chart() || *q.chart() != *ctx.fiber())
    throw Error("section: field must live on the fiber chart");
  if (q.degree() != 1) throw Error("section: field must have degree +1");
}

using PolyMat = std::vector<std::vector<Poly>>;

PolyMat pm_mul(const PolyMat& a, const PolyMat& b, const ChartPtr& chart) {
  const std::size_t n = a.size();
  PolyMat c(n, std::vector<Poly>(n, Poly::zero(chart)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j].is_zero()) continue;
      for (std::size_t k = 0; k < n; ++k) c[i][k] += a[i][j] * b[j][k];
    }
  return c;
}

bool pm_is_identity(const PolyMat& m, const ChartPtr& chart) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      const Poly want =
          i == j ? Poly::constant(chart, Rat(1)) : Poly::zero(chart);
      if (m[i][j] != want) return false;
    }
  return true;
}

bool pm_is_zero(const PolyMat& m) {
  for (const auto& row : m)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

}  // namespace

SectionCtx::SectionCtx(ChartPtr fiber, bool bars, std::vector<ParamSpec> specs)
    : fiber_(std::move(fiber)), bars_(bars) {
  if (!fiber_) throw Error("section: null fiber chart");
  n_ = fiber_->size();
  std::vector<Coordinate> upc, dnc;
  for (std::size_t i = 0; i < n_; ++i) upc.push_back({fiber_->name(i), fiber_->degree(i)});
  if (bars_)
    for (std::size_t i = 0; i < n_; ++i)
      upc.push_back({"d:" + fiber_->name(i), fiber_->degree(i) + 1});
  for (std::size_t i = 0; i < n_; ++i)
    dnc.push_back({"A:" + fiber_->name(i), fiber_->degree(i)});
  for (std::size_t i = 0; i < n_; ++i)
    dnc.push_back({"dA:" + fiber_->name(i), fiber_->degree(i) + 1});
  for (std::size_t i = 0; i < n_; ++i)
    dnc.push_back({"F:" + fiber_->name(i), fiber_->degree(i) + 1});
  for (const auto& spec : specs) {
    if (spec.label.empty()) throw Error("section: empty parameter label");
    ParamBlock b;
    b.label = spec.label;
    b.shift = spec.shift;
    b.up.assign(n_, -1);
    b.dup.assign(n_, -1);
    b.down.assign(n_, -1);
    b.ddown.assign(n_, -1);
    for (std::size_t i = 0; i < n_; ++i) {
      const int deg = fiber_->degree(i) + spec.shift;
      if (deg < 0) continue;
      const std::string name = spec.label + ":" + fiber_->name(i);
      b.up[i] = static_cast<std::ptrdiff_t>(upc.size());
      upc.push_back({name, deg});
      b.down[i] = static_cast<std::ptrdiff_t>(dnc.size());
      dnc.push_back({name, deg});
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (b.up[i] < 0) continue;
      const std::string name = "d" + spec.label + ":" + fiber_->name(i);
      const int deg = fiber_->degree(i) + spec.shift + 1;
      b.dup[i] = static_cast<std::ptrdiff_t>(upc.size());
      upc.push_back({name, deg});
      b.ddown[i] = static_cast<std::ptrdiff_t>(dnc.size());
      dnc.push_back({name, deg});
    }
    params_.push_back(std::move(b));
  }
  up_ = make_form_chart(std::move(upc));
  down_ = make_form_chart(std::move(dnc));

  d_up_ = VectorField(up_, 1);
  d_down_ = VectorField(down_, 1);
  for (std::size_t i = 0; i < n_; ++i)
    d_down_.set_component(a_down(i), Poly::coordinate(down_, da_down(i)));
  for (const auto& b : params_)
    for (std::size_t i = 0; i < n_; ++i) {
      if (b.up[i] < 0) continue;
      d_up_.set_component(static_cast<std::size_t>(b.up[i]),
                          Poly::coordinate(up_, static_cast<std::size_t>(b.dup[i])));
      d_down_.set_component(static_cast<std::size_t>(b.down[i]),
                            Poly::coordinate(down_, static_cast<std::size_t>(b.ddown[i])));
    }
}

std::size_t SectionCtx::bar_up(std::size_t i) const {
  if (!bars_) throw Error("section: context has no barred coordinates");
  return n_ + i;
}

const ParamBlock& SectionCtx::block(const std::string& label) const {
  for (const auto& b : params_)
    if (b.label == label) return b;
  throw Error("section: unknown parameter label '" + label + "'");
}

void SectionCtx::check_no_f(const Poly& p, const char* where) const {
  if (!p.chart()) return;
  if (*p.chart() != *down_) throw Error(std::string(where) + ": expected a section polynomial");
  for (const auto& [e, c] : p.terms())
    for (std::size_t j = 0; j < n_; ++j)
      if (e[f_down(j)] != 0)
        throw Error(std::string(where) + ": F generator present");
}

Poly SectionCtx::d_down_apply(const Poly& p) const {
  check_no_f(p, "base differential");
  return d_down_.apply(p);
}

Poly SectionCtx::up_embed(const Poly& p) const {
  if (!p.chart()) return Poly::zero(up_);
  const Chart& c = *p.chart();
  std::size_t m = 0;
  if (c == *fiber_) {
    m = n_;
  } else if (bars_ && c.size() == 2 * n_) {
    for (std::size_t i = 0; i < 2 * n_; ++i)
      if (c.name(i) != up_->name(i) || c.degree(i) != up_->degree(i))
        throw Error("section: polynomial chart does not embed upstairs");
    m = 2 * n_;
  } else {
    throw Error("section: polynomial chart does not embed upstairs");
  }
  std::vector<Poly> im(m);
  for (std::size_t i = 0; i < m; ++i) im[i] = Poly::coordinate(up_, i);
  return substitute(p, up_, im);
}

VectorField SectionCtx::up_field(const VectorField& x) const {
  VectorField out(up_, x.degree());
  for (const auto& [i, p] : x.components()) out.set_component(i, up_embed(p));
  return out;
}

Poly SectionCtx::a_star(const Poly& up_poly) const {
  if (!up_poly.chart()) return Poly::zero(down_);
  if (*up_poly.chart() != *up_) throw Error("a*: expected an upstairs polynomial");
  if (bars_)
    for (const auto& [e, c] : up_poly.terms())
      for (std::size_t i = 0; i < n_; ++i)
        if (e[bar_up(i)] != 0) throw Error("a*: barred coordinate present");
  std::vector<Poly> im(up_->size(), Poly::zero(down_));
  for (std::size_t i = 0; i < n_; ++i) im[q_up(i)] = Poly::coordinate(down_, a_down(i));
  for (const auto& b : params_)
    for (std::size_t i = 0; i < n_; ++i) {
      if (b.up[i] < 0) continue;
      im[static_cast<std::size_t>(b.up[i])] =
          Poly::coordinate(down_, static_cast<std::size_t>(b.down[i]));
      im[static_cast<std::size_t>(b.dup[i])] =
          Poly::coordinate(down_, static_cast<std::size_t>(b.ddown[i]));
    }
  return substitute(up_poly, down_, im);
}

Poly SectionCtx::f_star_f(const Poly& up_poly) const {
  if (!bars_) throw Error("f*: context has no barred coordinates");
  if (!up_poly.chart()) return Poly::zero(down_);
  if (*up_poly.chart() != *up_) throw Error("f*: expected an upstairs polynomial");
  std::vector<Poly> im(up_->size(), Poly::zero(down_));
  for (std::size_t i = 0; i < n_; ++i) {
    im[q_up(i)] = Poly::coordinate(down_, a_down(i));
    im[bar_up(i)] = Poly::coordinate(down_, f_down(i));
  }
  for (const auto& b : params_)
    for (std::size_t i = 0; i < n_; ++i) {
      if (b.up[i] < 0) continue;
      im[static_cast<std::size_t>(b.up[i])] =
          Poly::coordinate(down_, static_cast<std::size_t>(b.down[i]));
      im[static_cast<std::size_t>(b.dup[i])] =
          Poly::coordinate(down_, static_cast<std::size_t>(b.ddown[i]));
    }
  return substitute(up_poly, down_, im);
}

Poly SectionCtx::f_star(const VectorField& q, const Poly& up_poly) const {
  return from_F_basis(*this, q, f_star_f(up_poly));
}

std::vector<Poly> field_strength(const SectionCtx& ctx, const VectorField& q) {
  check_q_field(ctx, q);
  std::vector<Poly> out;
  out.reserve(ctx.n());
  for (std::size_t i = 0; i < ctx.n(); ++i)
    out.push_back(Poly::coordinate(ctx.down(), ctx.da_down(i)) -
                  ctx.a_star_fiber(q.component(i)));
  return out;
}

Poly f_extend(const SectionCtx& ctx, const VectorField& q, const Poly& fiber_poly) {
  check_q_field(ctx, q);
  if (!fiber_poly.chart()) return Poly::zero(ctx.down());
  if (*fiber_poly.chart() != *ctx.fiber())
    throw Error("section: field-strength extension expects a fiber polynomial");
  return ctx.d_down_apply(ctx.a_star_fiber(fiber_poly)) -
         ctx.a_star_fiber(q.apply(fiber_poly));
}

std::vector<Poly> bianchi_defect(const SectionCtx& ctx, const VectorField& q) {
  check_q_field(ctx, q);
  const VectorField q2 = vf_square(q);
  const std::vector<Poly> f = field_strength(ctx, q);
  std::vector<Poly> out;
  out.reserve(ctx.n());
  for (std::size_t i = 0; i < ctx.n(); ++i)
    out.push_back(ctx.d_down_apply(f[i]) + f_extend(ctx, q, q.component(i)) +
                  ctx.a_star_fiber(q2.component(i)));
  return out;
}

Poly to_F_basis(const SectionCtx& ctx, const VectorField& q, const Poly& p) {
  check_q_field(ctx, q);
  if (!p.chart()) return Poly::zero(ctx.down());
  if (*p.chart() != *ctx.down()) throw Error("F basis: expected a section polynomial");
  for (const auto& [e, c] : p.terms())
    for (std::size_t j = 0; j < ctx.n(); ++j)
      if (e[ctx.f_down(j)] != 0) throw Error("F basis: input already carries F generators");
  std::map<std::size_t, Poly> im;
  for (std::size_t i = 0; i < ctx.n(); ++i)
    im[ctx.da_down(i)] =
        Poly::coordinate(ctx.down(), ctx.f_down(i)) + ctx.a_star_fiber(q.component(i));
  return substitute_partial(p, im);
}

Poly from_F_basis(const SectionCtx& ctx, const VectorField& q, const Poly& p) {
  check_q_field(ctx, q);
  if (!p.chart()) return Poly::zero(ctx.down());
  if (*p.chart() != *ctx.down()) throw Error("F basis: expected a section polynomial");
  for (const auto& [e, c] : p.terms())
    for (std::size_t j = 0; j < ctx.n(); ++j)
      if (e[ctx.da_down(j)] != 0) throw Error("F basis: input still carries dA generators");
  std::map<std::size_t, Poly> im;
  for (std::size_t i = 0; i < ctx.n(); ++i)
    im[ctx.f_down(i)] =
        Poly::coordinate(ctx.down(), ctx.da_down(i)) - ctx.a_star_fiber(q.component(i));
  return substitute_partial(p, im);
}

Poly f_free_part(const SectionCtx& ctx, const Poly& p) {
  if (!p.chart()) return Poly::zero(ctx.down());
  if (*p.chart() != *ctx.down()) throw Error("F basis: expected a section polynomial");
  Poly out(ctx.down());
  for (const auto& [e, c] : p.terms()) {
    bool free = true;
    for (std::size_t j = 0; j < ctx.n() && free; ++j)
      if (e[ctx.f_down(j)] != 0) free = false;
    if (free) out.add_term(e, c);
  }
  return out;
}

bool ideal_member(const SectionCtx& ctx, const VectorField& q, const Poly& p) {
  return f_free_part(ctx, to_F_basis(ctx, q, p)).is_zero();
}

Json f_basis_report(const SectionCtx& ctx, const VectorField& q) {
  Json rows = Json::array();
  const std::vector<Poly> f = field_strength(ctx, q);
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    const Poly r = to_F_basis(ctx, q, ctx.d_down_apply(f[i]));
    Poly remainder(ctx.down());
    Poly higher(ctx.down());
    std::map<std::size_t, Poly> linear;
    for (const auto& [e, c] : r.terms()) {
      int total = 0;
      std::size_t fj = 0;
      for (std::size_t j = 0; j < ctx.n(); ++j) {
        total += static_cast<int>(e[ctx.f_down(j)]);
        if (e[ctx.f_down(j)] != 0) fj = j;
      }
      if (total == 0) {
        remainder.add_term(e, c);
      } else if (total > 1) {
        higher.add_term(e, c);
      } else {
        // m = sign * F_j * rest, so the left coefficient of F_j is sign*c*rest.
        Expo rest = e;
        rest[ctx.f_down(fj)] = 0;
        std::vector<std::size_t> word{ctx.f_down(fj)};
        for (std::size_t k = 0; k < rest.size(); ++k)
          for (std::uint32_t rep = 0; rep < rest[k]; ++rep) word.push_back(k);
        const NormalForm nf = normalize(*ctx.down(), word);
        const auto it = linear.try_emplace(fj, Poly(ctx.down())).first;
        it->second.add_term(rest, nf.sign > 0 ? c : Rat(-c));
      }
    }
    Json coeffs = Json::object();
    for (const auto& [j, cp] : linear)
      if (!cp.is_zero()) coeffs[ctx.down()->name(ctx.f_down(j))] = poly_str(cp);
    Json row = Json::object();
    row["coordinate"] = ctx.fiber()->name(i);
    row["ideal_member"] = remainder.is_zero();
    row["F_coefficients"] = coeffs;
    if (!remainder.is_zero()) row["remainder"] = poly_str(remainder);
    if (!higher.is_zero()) row["higher"] = poly_str(higher);
    rows.push_back(std::move(row));
  }
  return rows;
}

NonholonomicBasis identity_basis(ChartPtr fiber) {
  const std::size_t n = fiber->size();
  NonholonomicBasis b{fiber, PolyMat(n, std::vector<Poly>(n, Poly::zero(fiber)))};
  for (std::size_t i = 0; i < n; ++i) b.omega[i][i] = Poly::constant(fiber, Rat(1));
  return b;
}

std::vector<std::vector<Poly>> invert_basis(const NonholonomicBasis& basis) {
  if (!basis.fiber) throw Error("basis: null chart");
  const ChartPtr& chart = basis.fiber;
  const std::size_t n = chart->size();
  if (basis.omega.size() != n) throw Error("basis: wrong row count");
  PolyMat w(n, std::vector<Poly>(n, Poly::zero(chart)));
  for (std::size_t i = 0; i < n; ++i) {
    if (basis.omega[i].size() != n) throw Error("basis: wrong column count");
    for (std::size_t j = 0; j < n; ++j) {
      const Poly& e = basis.omega[i][j];
      if (e.is_zero()) continue;
      if (!e.chart() || *e.chart() != *chart) throw Error("basis: entry chart mismatch");
      const auto deg = e.homogeneous_degree();
      if (!deg || *deg != chart->degree(i) - chart->degree(j))
        throw Error("basis: entry must be homogeneous of the degree difference");
      w[i][j] = e;
    }
  }
  // Constant part and its exact inverse.
  RatMat w0(n, 2 * n);
  const Expo empty(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w0.at(i, j) = w[i][j].coeff(empty);
    w0.at(i, n + i) = Rat(1);
  }
  const Rref red = rref(std::move(w0));
  if (red.rank < n) throw Error("basis: constant part is singular");
  PolyMat nu0(n, std::vector<Poly>(n, Poly::zero(chart)));
  PolyMat wp(n, std::vector<Poly>(n, Poly::zero(chart)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(red.mat.at(i, n + j)) != 0)
        nu0[i][j] = Poly::constant(chart, red.mat.at(i, n + j));
      wp[i][j] = w[i][j] - Poly::constant(chart, w[i][j].coeff(empty));
    }
  // Geometric series in the strictly degree-raising part.
  PolyMat step = pm_mul(nu0, wp, chart);
  for (auto& row : step)
    for (auto& e : row) e = -e;
  PolyMat nu = nu0;
  PolyMat term = nu0;
  for (int k = 0; k <= chart->max_degree() + 1; ++k) {
    term = pm_mul(step, term, chart);
    if (pm_is_zero(term)) break;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) nu[i][j] += term[i][j];
  }
  if (!pm_is_identity(pm_mul(w, nu, chart), chart) ||
      !pm_is_identity(pm_mul(nu, w, chart), chart))
    throw Error("basis: inversion failed to verify");
  return nu;
}

HBasisBianchi h_basis_bianchi(const VectorField& q, const NonholonomicBasis& basis) {
  if (!q.chart() || !basis.fiber || *q.chart() != *basis.fiber)
    throw Error("h basis: chart mismatch");
  if (q.degree() != 1) throw Error("h basis: field must have degree +1");
  if (!vf_square(q).is_zero()) throw Error("h basis: field must be homological");
  const PolyMat nu = invert_basis(basis);
  const ChartPtr fiber = q.chart();
  const std::size_t n = fiber->size();
  const TangentChart t(fiber);
  const VectorField qp = tangent_prolongation(t, q);

  // Intermediate chart: fiber coordinates plus one basis generator each.
  std::vector<Coordinate> qwc;
  for (std::size_t i = 0; i < n; ++i) qwc.push_back({fiber->name(i), fiber->degree(i)});
  for (std::size_t i = 0; i < n; ++i)
    qwc.push_back({"w:" + fiber->name(i), fiber->degree(i) + 1});
  const ChartPtr qw = make_chart(std::move(qwc));
  std::vector<Poly> fiber_to_qw(n);
  for (std::size_t i = 0; i < n; ++i) fiber_to_qw[i] = Poly::coordinate(qw, i);
  std::vector<Poly> tangent_to_qw(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    tangent_to_qw[i] = Poly::coordinate(qw, i);
    Poly bar_image(qw);
    for (std::size_t j = 0; j < n; ++j)
      bar_image += substitute(nu[i][j], qw, fiber_to_qw) * Poly::coordinate(qw, n + j);
    tangent_to_qw[t.bar_index(i)] = bar_image;
  }

  HBasisBianchi out;
  std::vector<Coordinate> outc;
  for (std::size_t i = 0; i < n; ++i) outc.push_back({"A:" + fiber->name(i), fiber->degree(i)});
  for (std::size_t i = 0; i < n; ++i)
    outc.push_back({"H:" + fiber->name(i), fiber->degree(i) + 1});
  out.out = make_chart(std::move(outc));
  std::vector<Poly> qw_to_out(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) qw_to_out[i] = Poly::coordinate(out.out, i);

  for (std::size_t i = 0; i < n; ++i) {
    Poly omega_i(t.full());
    for (std::size_t j = 0; j < n; ++j) {
      if (basis.omega[i][j].is_zero()) continue;
      omega_i += t.include(basis.omega[i][j]) * Poly::coordinate(t.full(), t.bar_index(j));
    }
    const Poly rew = substitute(qp.apply(omega_i), qw, tangent_to_qw);
    out.d_h.push_back(substitute(rew, out.out, qw_to_out));
  }
  return out;
}

}  // namespace qstruct
