#include "qstruct/derivation.hpp"

namespace qstruct {

void VectorField::set_component(std::size_t i, Poly p) {
  if (!chart_) throw Error("vector field: chart not set");
  if (i >= chart_->size()) throw Error("vector field: component index out of range");
  if (p.is_zero()) {
    components_.erase(i);
    return;
  }
  if (p.chart() != chart_ && *p.chart() != *chart_)
    throw Error("vector field: component chart mismatch for '" + chart_->name(i) + "'");
  if (!p.is_homogeneous() || *p.homogeneous_degree() != degree_ + chart_->degree(i))
    throw Error("vector field: component of '" + chart_->name(i) +
                "' must be homogeneous of degree " +
                std::to_string(degree_ + chart_->degree(i)));
  components_[i] = std::move(p);
}

Poly VectorField::component(std::size_t i) const {
  const auto it = components_.find(i);
  return it == components_.end() ? Poly::zero(chart_) : it->second;
}

Poly VectorField::apply(const Poly& p) const {
  Poly out(chart_);
  if (p.is_zero()) return out;
  for (const auto& [i, comp] : components_) out += comp * p.left_derive(i);
  return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (o.is_zero()) return *this;
  if (!chart_) {
    *this = o;
    return *this;
  }
  if (o.chart() != chart_ && *o.chart() != *chart_)
    throw Error("vector field: chart mismatch in +");
  if (degree_ != o.degree_ && !is_zero())
    throw Error("vector field: degree mismatch in +");
  degree_ = o.degree_;
  for (const auto& [i, comp] : o.components_) {
    Poly c = component(i) + comp;
    set_component(i, std::move(c));
  }
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  VectorField neg = o;
  neg *= Rat(-1);
  return *this += neg;
}

VectorField& VectorField::operator*=(const Rat& c) {
  if (sgn(c) == 0) {
    components_.clear();
    return *this;
  }
  for (auto& [i, comp] : components_) comp *= c;
  return *this;
}

bool VectorField::operator==(const VectorField& o) const {
  if (components_.empty() && o.components_.empty()) return true;
  if (degree_ != o.degree_) return false;
  if (chart_ != o.chart_ && (!chart_ || !o.chart_ || *chart_ != *o.chart_)) return false;
  return components_ == o.components_;
}

VectorField operator+(VectorField a, const VectorField& b) {
  a += b;
  return a;
}

VectorField operator-(VectorField a, const VectorField& b) {
  a -= b;
  return a;
}

VectorField operator*(const Rat& c, VectorField x) {
  x *= c;
  return x;
}

VectorField vf_commutator(const VectorField& x, const VectorField& y) {
  const ChartPtr& chart = x.chart() ? x.chart() : y.chart();
  VectorField out(chart, x.degree() + y.degree());
  const int sign = (x.parity() && y.parity()) ? -1 : 1;
  for (const auto& [i, yc] : y.components()) {
    Poly c = x.apply(yc);
    if (sign < 0) c += y.apply(x.component(i));
    else c -= y.apply(x.component(i));
    out.set_component(i, std::move(c));
  }
  for (const auto& [i, xc] : x.components()) {
    if (y.components().count(i)) continue;
    Poly c = sign < 0 ? y.apply(xc) : -y.apply(xc);
    Poly total = out.component(i) + c;
    out.set_component(i, std::move(total));
  }
  return out;
}

VectorField vf_square(const VectorField& x) {
  if (!x.parity()) throw Error("vector field: square requires odd degree");
  VectorField half = vf_commutator(x, x);
  half *= Rat(1, 2);
  // Independent path: apply x twice to every coordinate.
  VectorField direct(x.chart(), 2 * x.degree());
  if (x.chart()) {
    for (std::size_t i = 0; i < x.chart()->size(); ++i)
      direct.set_component(i, x.apply(x.apply(Poly::coordinate(x.chart(), i))));
  }
  if (!(half == direct))
    throw Error("vector field: square cross-check failed, commutator path and "
                "double application disagree");
  return half;
}

VectorField vf_conjugate(const VectorField& x, ChartPtr new_chart,
                         const std::vector<Poly>& to_old,
                         const std::vector<Poly>& from_old) {
  if (!x.chart()) throw Error("vector field: conjugate of chartless field");
  if (to_old.size() != new_chart->size())
    throw Error("vector field: conjugate needs one old-chart image per new coordinate");
  if (from_old.size() != x.chart()->size())
    throw Error("vector field: conjugate needs one new-chart image per old coordinate");
  VectorField out(new_chart, x.degree());
  for (std::size_t i = 0; i < new_chart->size(); ++i)
    out.set_component(i, substitute(x.apply(to_old[i]), new_chart, from_old));
  return out;
}

TangentChart::TangentChart(ChartPtr base, std::string prefix)
    : base_(std::move(base)), prefix_(std::move(prefix)) {
  std::vector<Coordinate> coords;
  for (std::size_t i = 0; i < base_->size(); ++i) coords.push_back(base_->coord(i));
  for (std::size_t i = 0; i < base_->size(); ++i)
    coords.push_back({prefix_ + base_->name(i), base_->degree(i) + 1});
  full_ = make_chart(std::move(coords));
}

Poly TangentChart::include(const Poly& p) const {
  if (p.is_zero()) return Poly::zero(full_);
  std::vector<Poly> images;
  images.reserve(base_->size());
  for (std::size_t i = 0; i < base_->size(); ++i)
    images.push_back(Poly::coordinate(full_, i));
  return substitute(p, full_, images);
}

Poly TangentChart::restrict_to_base(const Poly& p) const {
  if (p.is_zero()) return Poly::zero(base_);
  std::vector<Poly> images;
  images.reserve(full_->size());
  for (std::size_t i = 0; i < base_->size(); ++i)
    images.push_back(Poly::coordinate(base_, i));
  for (std::size_t i = 0; i < base_->size(); ++i) images.push_back(Poly::zero(base_));
  return substitute(p, base_, images);
}

VectorField de_rham(const TangentChart& t) {
  VectorField d(t.full(), 1);
  for (std::size_t i = 0; i < t.base_size(); ++i)
    d.set_component(i, Poly::coordinate(t.full(), t.bar_index(i)));
  return d;
}

VectorField contraction(const TangentChart& t, const VectorField& x) {
  if (x.chart() != t.base() && *x.chart() != *t.base())
    throw Error("contraction: field must live on the base chart");
  VectorField iota(t.full(), x.degree() - 1);
  for (const auto& [i, comp] : x.components())
    iota.set_component(t.bar_index(i), t.include(comp));
  return iota;
}

VectorField lie_derivative(const TangentChart& t, const VectorField& x) {
  return vf_commutator(contraction(t, x), de_rham(t));
}

VectorField tangent_prolongation(const TangentChart& t, const VectorField& x) {
  if (x.degree() != 1) throw Error("tangent prolongation: field must have degree +1");
  return de_rham(t) + lie_derivative(t, x);
}

VectorField vf_from_json(const Json& j, ChartPtr chart) {
  if (!j.is_object() || !j.contains("degree") || !j["degree"].is_number_integer())
    throw Error("vector field json: expected {\"degree\":d,\"components\":{...}}");
  VectorField x(chart, j["degree"].get<int>());
  if (j.contains("components")) {
    if (!j["components"].is_object())
      throw Error("vector field json: components must be an object");
    for (const auto& [name, pj] : j["components"].items())
      x.set_component(chart->index(name), poly_from_json(pj, chart));
  }
  return x;
}

Json vf_to_json(const VectorField& x) {
  Json comps = Json::object();
  for (const auto& [i, comp] : x.components())
    comps[x.chart()->name(i)] = poly_to_json(comp);
  return Json{{"degree", x.degree()}, {"components", std::move(comps)}};
}

}  // namespace qstruct
