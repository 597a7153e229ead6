#include "qstruct/linfty.hpp"

#include <algorithm>
#include <numeric>

namespace qstruct {

namespace {

Rat factorial(std::uint32_t n) {
  Rat f(1);
  for (std::uint32_t k = 2; k <= n; ++k) f *= Rat(static_cast<long>(k));
  return f;
}

/// Stable sorting permutation of args: new order as original positions.
std::vector<std::size_t> sort_positions(const std::vector<std::size_t>& args) {
  std::vector<std::size_t> order(args.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return args[a] < args[b]; });
  return order;
}

bool vec_is_zero(const std::vector<Rat>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& c) { return sgn(c) == 0; });
}

void check_degree_balance(const Chart& chart, const std::vector<std::size_t>& sorted,
                          std::size_t out) {
  int in_deg = 0;
  for (const std::size_t i : sorted) in_deg += chart.degree(i);
  if (in_deg != chart.degree(out) + 1)
    throw Error("bracket table: degree balance violated, inputs sum to " +
                std::to_string(in_deg) + " but output '" + chart.name(out) +
                "' needs " + std::to_string(chart.degree(out) + 1));
}

/// Ascending argument multisets of the given size, pruned by a per-index
/// repeatability predicate.
template <typename Repeatable, typename Visit>
void for_multisets(std::size_t n, std::size_t size, Repeatable repeatable, Visit visit) {
  std::vector<std::size_t> cur;
  const auto rec = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == size) {
      visit(cur);
      return;
    }
    for (std::size_t i = from; i < n; ++i) {
      if (!cur.empty() && cur.back() == i && !repeatable(i)) continue;
      cur.push_back(i);
      self(self, i);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> unshuffles(
    std::size_t m, std::size_t k) {
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
  if (k > m) return out;
  std::vector<std::size_t> sel(k);
  std::iota(sel.begin(), sel.end(), 0);
  while (true) {
    std::vector<std::size_t> rest;
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (p < k && sel[p] == i) ++p;
      else rest.push_back(i);
    }
    out.emplace_back(sel, std::move(rest));
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i-- > 0) {
      if (sel[i] + 1 <= m - k + i) {
        ++sel[i];
        for (std::size_t j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
        break;
      }
      if (i == 0) return out;
    }
    if (k == 0) return out;
  }
}

int koszul_sign(const std::vector<int>& parities, const std::vector<std::size_t>& perm) {
  long inv = 0;
  for (std::size_t a = 0; a + 1 < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b] && parities.at(perm[a]) && parities.at(perm[b])) ++inv;
  return (inv & 1) ? -1 : 1;
}

int chi_sign(const std::vector<int>& parities, const std::vector<std::size_t>& perm) {
  long inv = 0;
  for (std::size_t a = 0; a + 1 < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inv;
  const int sgn_perm = (inv & 1) ? -1 : 1;
  return sgn_perm * koszul_sign(parities, perm);
}

BracketTable::BracketTable(ChartPtr chart) : chart_(std::move(chart)) {
  max_arity_ = static_cast<std::size_t>(chart_->max_degree()) + 2;
}

void BracketTable::add(const std::vector<std::size_t>& inputs, std::size_t out, const Rat& c) {
  if (inputs.empty() || inputs.size() > max_arity_)
    throw Error("bracket table: arity " + std::to_string(inputs.size()) +
                " exceeds configured maximum " + std::to_string(max_arity_));
  if (out >= chart_->size()) throw Error("bracket table: output index out of range");
  for (const std::size_t i : inputs)
    if (i >= chart_->size()) throw Error("bracket table: input index out of range");
  const auto order = sort_positions(inputs);
  std::vector<std::size_t> key(inputs.size());
  std::vector<int> parities(inputs.size());
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    key[p] = inputs[order[p]];
    parities[p] = chart_->parity(inputs[p]);
  }
  check_degree_balance(*chart_, key, out);
  for (std::size_t p = 0; p + 1 < key.size(); ++p)
    if (key[p] == key[p + 1] && chart_->parity(key[p])) {
      if (sgn(c) != 0)
        throw Error("bracket table: entry with repeated odd input '" +
                    chart_->name(key[p]) + "' must vanish");
      return;
    }
  if (sgn(c) == 0) return;
  Rat cc = c;
  cc.canonicalize();
  const int sign = koszul_sign(parities, order);
  auto it = entries_.find(key);
  if (it == entries_.end())
    it = entries_.emplace(key, std::vector<Rat>(chart_->size())).first;
  it->second[out] += sign > 0 ? cc : Rat(-cc);
  if (vec_is_zero(it->second)) entries_.erase(it);
}

std::vector<Rat> BracketTable::bracket(const std::vector<std::size_t>& args) const {
  std::vector<Rat> out(chart_->size());
  if (args.empty() || args.size() > max_arity_) return out;
  const auto order = sort_positions(args);
  std::vector<std::size_t> key(args.size());
  std::vector<int> parities(args.size());
  for (std::size_t p = 0; p < args.size(); ++p) {
    key[p] = args[order[p]];
    parities[p] = chart_->parity(args[p]);
  }
  for (std::size_t p = 0; p + 1 < key.size(); ++p)
    if (key[p] == key[p + 1] && chart_->parity(key[p])) return out;
  const auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  const int sign = koszul_sign(parities, order);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sign > 0 ? it->second[i] : Rat(-it->second[i]);
  return out;
}

bool BracketTable::operator==(const BracketTable& o) const {
  if (chart_ != o.chart_ && *chart_ != *o.chart_) return false;
  return entries_ == o.entries_;
}

LnAlgebra::LnAlgebra(ChartPtr chart) : chart_(std::move(chart)) {
  max_arity_ = static_cast<std::size_t>(chart_->max_degree()) + 2;
}

void LnAlgebra::add(const std::vector<std::size_t>& inputs, std::size_t out, const Rat& c) {
  if (inputs.empty() || inputs.size() > max_arity_)
    throw Error("bracket system: arity " + std::to_string(inputs.size()) +
                " exceeds configured maximum " + std::to_string(max_arity_));
  if (out >= chart_->size()) throw Error("bracket system: output index out of range");
  for (const std::size_t i : inputs)
    if (i >= chart_->size()) throw Error("bracket system: input index out of range");
  const auto order = sort_positions(inputs);
  std::vector<std::size_t> key(inputs.size());
  std::vector<int> parities(inputs.size());
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    key[p] = inputs[order[p]];
    parities[p] = v_parity(inputs[p]);
  }
  check_degree_balance(*chart_, key, out);
  for (std::size_t p = 0; p + 1 < key.size(); ++p)
    if (key[p] == key[p + 1] && v_parity(key[p]) == 0) {
      if (sgn(c) != 0)
        throw Error("bracket system: entry with repeated even input '" +
                    chart_->name(key[p]) + "' must vanish");
      return;
    }
  if (sgn(c) == 0) return;
  Rat cc = c;
  cc.canonicalize();
  const int sign = chi_sign(parities, order);
  auto it = entries_.find(key);
  if (it == entries_.end())
    it = entries_.emplace(key, std::vector<Rat>(chart_->size())).first;
  it->second[out] += sign > 0 ? cc : Rat(-cc);
  if (vec_is_zero(it->second)) entries_.erase(it);
}

std::vector<Rat> LnAlgebra::bracket(const std::vector<std::size_t>& args) const {
  std::vector<Rat> out(chart_->size());
  if (args.empty() || args.size() > max_arity_) return out;
  const auto order = sort_positions(args);
  std::vector<std::size_t> key(args.size());
  std::vector<int> parities(args.size());
  for (std::size_t p = 0; p < args.size(); ++p) {
    key[p] = args[order[p]];
    parities[p] = v_parity(args[p]);
  }
  for (std::size_t p = 0; p + 1 < key.size(); ++p)
    if (key[p] == key[p + 1] && v_parity(key[p]) == 0) return out;
  const auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  const int sign = chi_sign(parities, order);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sign > 0 ? it->second[i] : Rat(-it->second[i]);
  return out;
}

bool LnAlgebra::operator==(const LnAlgebra& o) const {
  if (chart_ != o.chart_ && *chart_ != *o.chart_) return false;
  return entries_ == o.entries_;
}

BracketTable extract_brackets(const VectorField& q) {
  if (q.degree() != 1) throw Error("bracket extraction: field must have degree +1");
  BracketTable t(q.chart());
  const Chart& chart = *q.chart();
  for (const auto& [beta, comp] : q.components()) {
    for (const auto& [e, c] : comp.terms()) {
      std::vector<std::size_t> inputs;
      Rat fact(1);
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::uint32_t k = 0; k < e[i]; ++k) inputs.push_back(i);
        if (e[i] > 1) fact *= factorial(e[i]);
      }
      if (inputs.empty())
        throw Error("bracket extraction: field not pointed, constant term in '" +
                    chart.name(beta) + "'");
      t.add(inputs, beta, c * fact);
    }
  }
  return t;
}

VectorField brackets_to_q(const BracketTable& t) {
  const ChartPtr& chart = t.chart();
  VectorField q(chart, 1);
  std::vector<Poly> comps(chart->size(), Poly::zero(chart));
  for (const auto& [key, vec] : t.entries()) {
    Expo e(chart->size(), 0);
    for (const std::size_t i : key) e[i] += 1;
    Rat denom(1);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 1) denom *= factorial(e[i]);
    for (std::size_t beta = 0; beta < vec.size(); ++beta)
      if (sgn(vec[beta]) != 0) comps[beta] += Poly::monomial(chart, e, vec[beta] / denom);
  }
  for (std::size_t beta = 0; beta < comps.size(); ++beta)
    q.set_component(beta, std::move(comps[beta]));
  return q;
}

std::vector<Rat> jacobi_defect(const BracketTable& t, std::size_t m,
                               const std::vector<std::size_t>& args) {
  if (args.size() != m) throw Error("jacobi: argument count must equal the arity");
  if (m == 0 || m > t.max_arity())
    throw Error("jacobi: arity " + std::to_string(m) + " exceeds configured maximum " +
                std::to_string(t.max_arity()));
  const Chart& chart = *t.chart();
  std::vector<int> parities(m);
  for (std::size_t p = 0; p < m; ++p) parities[p] = chart.parity(args[p]);
  std::vector<Rat> defect(chart.size());
  for (std::size_t k = 1; k <= m; ++k) {
    for (const auto& [sel, rest] : unshuffles(m, k)) {
      std::vector<std::size_t> perm = sel;
      perm.insert(perm.end(), rest.begin(), rest.end());
      const int eps = koszul_sign(parities, perm);
      std::vector<std::size_t> inner_args;
      inner_args.reserve(k);
      for (const std::size_t p : sel) inner_args.push_back(args[p]);
      const std::vector<Rat> inner = t.bracket(inner_args);
      for (std::size_t beta = 0; beta < inner.size(); ++beta) {
        if (sgn(inner[beta]) == 0) continue;
        std::vector<std::size_t> outer_args{beta};
        for (const std::size_t p : rest) outer_args.push_back(args[p]);
        const std::vector<Rat> outer = t.bracket(outer_args);
        const Rat f = eps > 0 ? inner[beta] : Rat(-inner[beta]);
        for (std::size_t g = 0; g < defect.size(); ++g)
          if (sgn(outer[g]) != 0) defect[g] += f * outer[g];
      }
    }
  }
  return defect;
}

std::vector<Rat> ln_jacobi_defect(const LnAlgebra& l, std::size_t m,
                                  const std::vector<std::size_t>& args) {
  if (args.size() != m) throw Error("jacobi: argument count must equal the arity");
  if (m == 0 || m > l.max_arity())
    throw Error("jacobi: arity " + std::to_string(m) + " exceeds configured maximum " +
                std::to_string(l.max_arity()));
  std::vector<int> parities(m);
  for (std::size_t p = 0; p < m; ++p) parities[p] = l.v_parity(args[p]);
  std::vector<Rat> defect(l.chart()->size());
  for (std::size_t k = 1; k <= m; ++k) {
    const int pref = ((k * (m - k)) & 1) ? -1 : 1;
    for (const auto& [sel, rest] : unshuffles(m, k)) {
      std::vector<std::size_t> perm = sel;
      perm.insert(perm.end(), rest.begin(), rest.end());
      const int chi = pref * chi_sign(parities, perm);
      std::vector<std::size_t> inner_args;
      inner_args.reserve(k);
      for (const std::size_t p : sel) inner_args.push_back(args[p]);
      const std::vector<Rat> inner = l.bracket(inner_args);
      for (std::size_t beta = 0; beta < inner.size(); ++beta) {
        if (sgn(inner[beta]) == 0) continue;
        std::vector<std::size_t> outer_args{beta};
        for (const std::size_t p : rest) outer_args.push_back(args[p]);
        const std::vector<Rat> outer = l.bracket(outer_args);
        const Rat f = chi > 0 ? inner[beta] : Rat(-inner[beta]);
        for (std::size_t g = 0; g < defect.size(); ++g)
          if (sgn(outer[g]) != 0) defect[g] += f * outer[g];
      }
    }
  }
  return defect;
}

std::vector<JacobiViolation> jacobi_all(const BracketTable& t, std::size_t m_max) {
  std::vector<JacobiViolation> out;
  const ChartPtr& chart = t.chart();
  const std::size_t cap = std::min(m_max, t.max_arity());
  for (std::size_t m = 1; m <= cap; ++m) {
    for_multisets(
        chart->size(), m, [&](std::size_t i) { return chart->parity(i) == 0; },
        [&](const std::vector<std::size_t>& args) {
          std::vector<Rat> d = jacobi_defect(t, m, args);
          if (!vec_is_zero(d)) out.push_back({m, args, std::move(d)});
        });
  }
  return out;
}

std::vector<JacobiViolation> ln_jacobi_all(const LnAlgebra& l, std::size_t m_max) {
  std::vector<JacobiViolation> out;
  const ChartPtr& chart = l.chart();
  const std::size_t cap = std::min(m_max, l.max_arity());
  for (std::size_t m = 1; m <= cap; ++m) {
    for_multisets(
        chart->size(), m, [&](std::size_t i) { return l.v_parity(i) != 0; },
        [&](const std::vector<std::size_t>& args) {
          std::vector<Rat> d = ln_jacobi_defect(l, m, args);
          if (!vec_is_zero(d)) out.push_back({m, args, std::move(d)});
        });
  }
  return out;
}

namespace {

/// Sign relating the two conventions on a canonical argument list:
/// (-1)^{sum over positions of (arity-1-position) * unshifted degree}.
int shift_sign(const LnAlgebra& l, const std::vector<std::size_t>& key) {
  const std::size_t j = key.size();
  long s = 0;
  for (std::size_t p = 0; p < j; ++p)
    s += static_cast<long>(j - 1 - p) * l.v_parity(key[p]);
  return (s & 1) ? -1 : 1;
}

}  // namespace

LnAlgebra shift_table(const BracketTable& t) {
  LnAlgebra l(t.chart());
  for (const auto& [key, vec] : t.entries()) {
    const int sign = shift_sign(l, key);
    for (std::size_t beta = 0; beta < vec.size(); ++beta)
      if (sgn(vec[beta]) != 0) l.add(key, beta, sign > 0 ? vec[beta] : Rat(-vec[beta]));
  }
  return l;
}

BracketTable unshift_table(const LnAlgebra& l) {
  BracketTable t(l.chart());
  for (const auto& [key, vec] : l.entries()) {
    const int sign = shift_sign(l, key);
    for (std::size_t beta = 0; beta < vec.size(); ++beta)
      if (sgn(vec[beta]) != 0) t.add(key, beta, sign > 0 ? vec[beta] : Rat(-vec[beta]));
  }
  return t;
}

TruncationResult truncate(const VectorField& q, int m, TruncateMode mode) {
  const ChartPtr& chart = q.chart();
  if (!chart) throw Error("truncation: chartless field");
  if (q.degree() != 1) throw Error("truncation: field must have degree +1");
  const int n = chart->max_degree();
  if (m < 2 || m > n)
    throw Error("truncation: degree " + std::to_string(m) + " out of range [2," +
                std::to_string(n) + "]");
  if (mode != TruncateMode::Naive && !vf_square(q).is_zero())
    throw Error("truncation: field not homological");

  std::vector<std::size_t> lower, level;
  for (std::size_t i = 0; i < chart->size(); ++i) {
    if (chart->degree(i) < m) lower.push_back(i);
    else if (chart->degree(i) == m) level.push_back(i);
  }
  const std::size_t nl = level.size();

  // Rows of W are the surviving top coordinate functionals on the level
  // space; kept lists the representative standard directions.
  std::vector<std::vector<Rat>> w_rows;
  std::vector<std::size_t> kept;
  std::vector<std::string> names;
  if (mode == TruncateMode::Naive) {
    for (std::size_t ti = 0; ti < nl; ++ti) {
      std::vector<Rat> row(nl);
      row[ti] = 1;
      w_rows.push_back(std::move(row));
      kept.push_back(ti);
      names.push_back(chart->name(level[ti]));
    }
  } else if (mode == TruncateMode::Ker) {
    // Unary constants out of the level: linear parts of Q on the degree
    // m-1 coordinates span the surviving functionals.
    std::vector<std::size_t> below;
    for (std::size_t i = 0; i < chart->size(); ++i)
      if (chart->degree(i) == m - 1) below.push_back(i);
    RatMat t_mat(below.size(), nl);
    for (std::size_t r = 0; r < below.size(); ++r) {
      const Poly comp = q.component(below[r]);
      for (std::size_t ti = 0; ti < nl; ++ti) {
        Expo e(chart->size(), 0);
        e[level[ti]] = 1;
        t_mat.at(r, ti) = comp.coeff(e);
      }
    }
    const Rref rr = rref(std::move(t_mat));
    for (std::size_t i = 0; i < rr.rank; ++i) {
      std::vector<Rat> row(nl);
      for (std::size_t ti = 0; ti < nl; ++ti) row[ti] = rr.mat.at(i, ti);
      w_rows.push_back(std::move(row));
      kept.push_back(rr.pivot_cols[i]);
      names.push_back(chart->name(level[rr.pivot_cols[i]]));
    }
  } else {
    // Functionals vanishing on the image of the unary constants entering
    // the level from one degree above.
    std::vector<std::size_t> above;
    for (std::size_t i = 0; i < chart->size(); ++i)
      if (chart->degree(i) == m + 1) above.push_back(i);
    RatMat st(above.size(), nl);
    std::vector<std::vector<Rat>> img_cols;
    for (std::size_t c = 0; c < above.size(); ++c) {
      std::vector<Rat> col(nl);
      for (std::size_t ti = 0; ti < nl; ++ti) {
        const Poly comp = q.component(level[ti]);
        Expo e(chart->size(), 0);
        e[above[c]] = 1;
        col[ti] = comp.coeff(e);
        st.at(c, ti) = col[ti];
      }
      img_cols.push_back(std::move(col));
    }
    w_rows = kernel_basis(st);
    kept = quotient_by_span(img_cols, nl).kept;
    for (const auto& row : w_rows) {
      std::size_t lead = 0;
      while (lead < nl && sgn(row[lead]) == 0) ++lead;
      names.push_back(chart->name(level[lead]));
    }
  }

  const std::size_t r = w_rows.size();
  if (kept.size() != r)
    throw Error("truncation: representative count does not match functional count");

  std::vector<Coordinate> new_coords;
  for (const std::size_t i : lower) new_coords.push_back(chart->coord(i));
  for (std::size_t i = 0; i < r; ++i) new_coords.push_back({names[i], m});
  ChartPtr new_chart = make_chart(std::move(new_coords));

  // Section: images of new coordinates in the original chart.
  std::vector<Poly> to_old;
  for (const std::size_t i : lower) to_old.push_back(Poly::coordinate(chart, i));
  for (std::size_t i = 0; i < r; ++i) {
    Poly p(chart);
    for (std::size_t ti = 0; ti < nl; ++ti)
      if (sgn(w_rows[i][ti]) != 0)
        p += w_rows[i][ti] * Poly::coordinate(chart, level[ti]);
    to_old.push_back(std::move(p));
  }

  // Projection: pairing of functionals with representatives inverts the
  // identification of the quotient with its chosen complement.
  RatMat pairing(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t jj = 0; jj < r; ++jj) pairing.at(i, jj) = w_rows[i][kept[jj]];
  const RatMat pinv = r > 0 ? invert(pairing) : RatMat(0, 0);

  std::vector<Poly> from_old(chart->size(), Poly::zero(new_chart));
  for (std::size_t ni = 0; ni < lower.size(); ++ni)
    from_old[lower[ni]] = Poly::coordinate(new_chart, ni);
  for (std::size_t jj = 0; jj < r; ++jj) {
    Poly p(new_chart);
    for (std::size_t i = 0; i < r; ++i)
      if (sgn(pinv.at(jj, i)) != 0)
        p += pinv.at(jj, i) * Poly::coordinate(new_chart, lower.size() + i);
    from_old[level[kept[jj]]] = std::move(p);
  }

  TruncationResult out;
  out.chart = new_chart;
  out.field = vf_conjugate(q, new_chart, to_old, from_old);
  out.projection = from_old;
  out.section = to_old;
  for (std::size_t i = 0; i < chart->size(); ++i) {
    if (chart->degree(i) > m) continue;
    const Poly lhs = substitute(q.component(i), new_chart, from_old);
    const Poly rhs = out.field.apply(from_old[i]);
    if (!(lhs == rhs)) out.morphism_violations.push_back(chart->name(i));
  }
  return out;
}

TruncationResult truncate_ker(const VectorField& q, int m) {
  return truncate(q, m, TruncateMode::Ker);
}

TruncationResult truncate_im(const VectorField& q, int m) {
  return truncate(q, m, TruncateMode::Im);
}

LiftResult tangent_lift_ln(const BracketTable& t, const std::string& prefix) {
  TangentChart tc(t.chart(), prefix);
  VectorField qp = tangent_prolongation(tc, brackets_to_q(t));
  BracketTable lifted = extract_brackets(qp);
  return {std::move(tc), std::move(qp), std::move(lifted)};
}

BracketTable bracket_table_from_json(const Json& j, ChartPtr chart) {
  if (!j.is_object()) throw Error("bracket table json: expected an arity-keyed object");
  BracketTable t(chart);
  for (const auto& [arity_key, arr] : j.items()) {
    std::size_t arity = 0;
    try {
      arity = static_cast<std::size_t>(std::stoul(arity_key));
    } catch (const std::exception&) {
      throw Error("bracket table json: arity key '" + arity_key + "' not a number");
    }
    if (!arr.is_array()) throw Error("bracket table json: arity entries must be arrays");
    for (const auto& ej : arr) {
      if (!ej.is_object() || !ej.contains("out") || !ej.contains("in") ||
          !ej.contains("coeff") || !ej["in"].is_array())
        throw Error("bracket table json: entries need out, in, coeff");
      std::vector<std::size_t> inputs;
      for (const auto& name : ej["in"]) inputs.push_back(chart->index(name.get<std::string>()));
      if (inputs.size() != arity)
        throw Error("bracket table json: input count disagrees with arity key");
      Rat c;
      if (ej["coeff"].is_string()) c = rat_parse(ej["coeff"].get<std::string>());
      else if (ej["coeff"].is_number_integer()) c = Rat(ej["coeff"].get<long>());
      else throw Error("bracket table json: coeff must be a p/q string");
      t.add(inputs, chart->index(ej["out"].get<std::string>()), c);
    }
  }
  return t;
}

Json bracket_table_to_json(const BracketTable& t) {
  const Chart& chart = *t.chart();
  std::map<std::size_t, Json> by_arity;
  for (const auto& [key, vec] : t.entries()) {
    Json in = Json::array();
    for (const std::size_t i : key) in.push_back(chart.name(i));
    for (std::size_t beta = 0; beta < vec.size(); ++beta) {
      if (sgn(vec[beta]) == 0) continue;
      auto& arr = by_arity[key.size()];
      if (arr.is_null()) arr = Json::array();
      arr.push_back(Json{{"out", chart.name(beta)}, {"in", in}, {"coeff", rat_str(vec[beta])}});
    }
  }
  Json out = Json::object();
  for (const auto& [arity, arr] : by_arity) out[std::to_string(arity)] = arr;
  return out;
}

}  // namespace qstruct
