#include "qstruct/galgebra.hpp"

#include <algorithm>
#include <sstream>

namespace qstruct {

namespace {

/// Replaces U+2212 minus signs with ASCII '-' and strips surrounding space.
std::string clean_number(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x88 &&
        static_cast<unsigned char>(s[i + 2]) == 0x92) {
      out.push_back('-');
      i += 3;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  const auto a = out.find_first_not_of(" \t");
  const auto b = out.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return out.substr(a, b - a + 1);
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Rat rat_parse(const std::string& raw) {
  std::string s = clean_number(raw);
  if (s.empty()) throw Error("rational: empty input");
  std::string num = s, den = "1";
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  bool neg = false;
  if (!num.empty() && (num[0] == '+' || num[0] == '-')) {
    neg = num[0] == '-';
    num = num.substr(1);
  }
  if (!all_digits(num) || !all_digits(den))
    throw Error("rational: expected integer or p/q, got '" + raw + "'");
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
    throw Error("rational: unparsable '" + raw + "'");
  if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
    throw Error("rational: zero denominator in '" + raw + "'");
  r.canonicalize();
  return neg ? Rat(-r) : r;
}

std::string rat_str(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  return c.get_str();
}

Chart::Chart(std::vector<Coordinate> coords, bool allow_degree_zero)
    : coords_(std::move(coords)) {
  const int min_degree = allow_degree_zero ? 0 : 1;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const auto& c = coords_[i];
    if (c.name.empty()) throw Error("chart: empty coordinate name");
    if (c.degree < min_degree)
      throw Error("chart: coordinate '" + c.name + "' has degree below " +
                  std::to_string(min_degree));
    if (!by_name_.emplace(c.name, i).second)
      throw Error("chart: duplicate coordinate '" + c.name + "'");
    max_degree_ = std::max(max_degree_, c.degree);
  }
}

std::size_t Chart::index(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("chart: unknown coordinate '" + name + "'");
  return it->second;
}

std::optional<std::size_t> Chart::find(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

bool Chart::operator==(const Chart& o) const {
  if (coords_.size() != o.coords_.size()) return false;
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i].name != o.coords_[i].name || coords_[i].degree != o.coords_[i].degree)
      return false;
  return true;
}

ChartPtr make_chart(std::vector<Coordinate> coords) {
  return std::make_shared<const Chart>(std::move(coords));
}

ChartPtr make_form_chart(std::vector<Coordinate> coords) {
  return std::make_shared<const Chart>(std::move(coords), true);
}

int expo_degree(const Chart& chart, const Expo& e) {
  int d = 0;
  for (std::size_t i = 0; i < e.size(); ++i) d += static_cast<int>(e[i]) * chart.degree(i);
  return d;
}

int expo_parity(const Chart& chart, const Expo& e) {
  return expo_degree(chart, e) & 1;
}

NormalForm normalize(const Chart& chart, const std::vector<std::size_t>& word) {
  NormalForm nf;
  nf.expo.assign(chart.size(), 0);
  std::vector<std::size_t> odd;
  for (const std::size_t w : word) {
    if (w >= chart.size()) throw Error("normalize: coordinate index out of range");
    if (chart.parity(w)) odd.push_back(w);
    nf.expo[w] += 1;
  }
  for (std::size_t i = 0; i < chart.size(); ++i)
    if (chart.parity(i) && nf.expo[i] > 1) {
      nf.sign = 0;
      nf.expo.clear();
      return nf;
    }
  // Koszul sign: parity of the number of out-of-order odd-factor pairs.
  long inversions = 0;
  for (std::size_t i = 0; i + 1 < odd.size(); ++i)
    for (std::size_t j = i + 1; j < odd.size(); ++j)
      if (odd[i] > odd[j]) ++inversions;
  nf.sign = (inversions & 1) ? -1 : 1;
  return nf;
}

int koszul_merge_sign(const Chart& chart, const Expo& a, const Expo& b) {
  const std::size_t n = chart.size();
  // Each odd factor of b crosses every odd factor of a with larger index.
  long s = 0;
  long odd_suffix = 0;  // sum over i > j of a_i * parity_i, built backwards
  for (std::size_t jj = n; jj-- > 0;) {
    if (chart.parity(jj)) {
      if (a[jj] + b[jj] > 1) return 0;
      s += static_cast<long>(b[jj]) * odd_suffix;
      odd_suffix += a[jj];
    }
  }
  return (s & 1) ? -1 : 1;
}

Poly Poly::constant(ChartPtr chart, const Rat& c) {
  Poly p(std::move(chart));
  if (sgn(c) != 0) p.terms_.emplace(Expo(p.chart_->size(), 0), c);
  return p;
}

Poly Poly::coordinate(ChartPtr chart, std::size_t i) {
  Poly p(std::move(chart));
  if (i >= p.chart_->size()) throw Error("poly: coordinate index out of range");
  Expo e(p.chart_->size(), 0);
  e[i] = 1;
  p.terms_.emplace(std::move(e), Rat(1));
  return p;
}

Poly Poly::monomial(ChartPtr chart, Expo e, const Rat& c) {
  Poly p(std::move(chart));
  if (e.size() != p.chart_->size()) throw Error("poly: exponent size mismatch");
  for (std::size_t i = 0; i < e.size(); ++i)
    if (p.chart_->parity(i) && e[i] > 1)
      throw Error("poly: odd coordinate squared in monomial");
  p.add_term(e, c);
  return p;
}

void Poly::add_term(const Expo& e, const Rat& c) {
  if (sgn(c) == 0) return;
  if (!chart_) throw Error("poly: chartless term insertion");
  // GMP two-argument construction does not canonicalize; normalize here
  // so stored coefficients always compare by value.
  Rat cc = c;
  cc.canonicalize();
  const auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, std::move(cc));
    return;
  }
  it->second += cc;
  if (sgn(it->second) == 0) terms_.erase(it);
}

Rat Poly::coeff(const Expo& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (!chart_) {
    *this = o;
    return *this;
  }
  if (o.chart_ != chart_ && *o.chart_ != *chart_) throw Error("poly: chart mismatch in +");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (!chart_) {
    *this = o;
    *this *= Rat(-1);
    return *this;
  }
  if (o.chart_ != chart_ && *o.chart_ != *chart_) throw Error("poly: chart mismatch in -");
  for (const auto& [e, c] : o.terms_) add_term(e, Rat(-c));
  return *this;
}

Poly& Poly::operator*=(const Rat& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  Rat cc = c;
  cc.canonicalize();
  for (auto& [e, v] : terms_) v *= cc;
  return *this;
}

bool Poly::operator==(const Poly& o) const {
  if (terms_.empty() && o.terms_.empty()) return true;
  if (terms_.size() != o.terms_.size()) return false;
  if (chart_ != o.chart_ && (!chart_ || !o.chart_ || *chart_ != *o.chart_)) return false;
  return terms_ == o.terms_;
}

bool Poly::is_homogeneous() const {
  if (terms_.empty()) return true;
  std::optional<int> d;
  for (const auto& [e, c] : terms_) {
    const int de = expo_degree(*chart_, e);
    if (!d) d = de;
    else if (*d != de) return false;
  }
  return true;
}

std::optional<int> Poly::homogeneous_degree() const {
  if (terms_.empty()) return std::nullopt;
  if (!is_homogeneous()) throw Error("poly: inhomogeneous where homogeneous required");
  return expo_degree(*chart_, terms_.begin()->first);
}

Poly Poly::graded_part(int degree) const {
  Poly out(chart_);
  for (const auto& [e, c] : terms_)
    if (expo_degree(*chart_, e) == degree) out.add_term(e, c);
  return out;
}

Poly Poly::truncate_above(int cap) const {
  Poly out(chart_);
  for (const auto& [e, c] : terms_)
    if (expo_degree(*chart_, e) <= cap) out.add_term(e, c);
  return out;
}

Poly Poly::left_derive(std::size_t i) const {
  if (!chart_) return Poly();
  if (i >= chart_->size()) throw Error("poly: derivative index out of range");
  Poly out(chart_);
  const bool odd = chart_->parity(i) != 0;
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    int sign = 1;
    if (odd) {
      long s = 0;
      for (std::size_t j = 0; j < i; ++j) s += static_cast<long>(e[j]) * chart_->parity(j);
      sign = (s & 1) ? -1 : 1;
    }
    Expo d = e;
    d[i] -= 1;
    out.add_term(d, c * Rat(static_cast<long>(e[i]) * sign));
  }
  return out;
}

Poly operator+(Poly a, const Poly& b) {
  a += b;
  return a;
}

Poly operator-(Poly a, const Poly& b) {
  a -= b;
  return a;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero()) return a;
  if (b.is_zero()) return b;
  if (a.chart_ != b.chart_ && *a.chart_ != *b.chart_) throw Error("poly: chart mismatch in *");
  const Chart& chart = *a.chart_;
  Poly out(a.chart_);
  Expo key(chart.size(), 0);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      const int sign = koszul_merge_sign(chart, ea, eb);
      if (sign == 0) continue;
      for (std::size_t i = 0; i < chart.size(); ++i) key[i] = ea[i] + eb[i];
      out.add_term(key, sign > 0 ? Rat(ca * cb) : Rat(-(ca * cb)));
    }
  }
  return out;
}

Poly operator*(const Rat& c, Poly p) {
  p *= c;
  return p;
}

Poly operator-(Poly p) {
  p *= Rat(-1);
  return p;
}

Poly substitute(const Poly& p, ChartPtr target, const std::vector<Poly>& images) {
  if (p.is_zero()) return Poly::zero(std::move(target));
  const Chart& src = *p.chart();
  if (images.size() != src.size()) throw Error("substitute: image count mismatch");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Poly& im = images[i];
    if (im.is_zero()) continue;
    if (!im.chart() || (im.chart() != target && *im.chart() != *target))
      throw Error("substitute: image chart mismatch for '" + src.name(i) + "'");
    if (!im.is_homogeneous() || *im.homogeneous_degree() != src.degree(i))
      throw Error("substitute: image of '" + src.name(i) + "' not homogeneous of degree " +
                  std::to_string(src.degree(i)));
  }
  Poly out = Poly::zero(target);
  for (const auto& [e, c] : p.terms()) {
    Poly factor = Poly::constant(target, c);
    for (std::size_t i = 0; i < src.size() && !factor.is_zero(); ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) factor = factor * images[i];
    out += factor;
  }
  return out;
}

Poly substitute_partial(const Poly& p, const std::map<std::size_t, Poly>& images) {
  if (p.is_zero()) return p;
  const ChartPtr& chart = p.chart();
  std::vector<Poly> full;
  full.reserve(chart->size());
  for (std::size_t i = 0; i < chart->size(); ++i) {
    const auto it = images.find(i);
    full.push_back(it == images.end() ? Poly::coordinate(chart, i) : it->second);
  }
  return substitute(p, chart, full);
}

std::string poly_str(const Poly& p) {
  if (p.is_zero()) return "0";
  const Chart& chart = *p.chart();
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    const bool neg = sgn(c) < 0;
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    const Rat a = neg ? Rat(-c) : c;
    std::string mono;
    for (std::size_t i = 0; i < chart.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += " ";
      mono += chart.name(i);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      os << rat_str(a);
    } else {
      if (a != 1) os << rat_str(a) << " ";
      os << mono;
    }
  }
  return os.str();
}

RatMat::RatMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

RatMat RatMat::identity(std::size_t n) {
  RatMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Rat& RatMat::at(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_) throw Error("matrix: index out of range");
  return data_[r * cols_ + c];
}

const Rat& RatMat::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw Error("matrix: index out of range");
  return data_[r * cols_ + c];
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols_ != o.rows_) throw Error("matrix: shape mismatch in *");
  RatMat out(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rat& a = at(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) out.at(i, j) += a * o.at(k, j);
    }
  return out;
}

bool RatMat::operator==(const RatMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Rref rref(RatMat m) {
  Rref out;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t lead = 0;
  for (std::size_t col = 0; col < cols && lead < rows; ++col) {
    std::size_t piv = lead;
    while (piv < rows && sgn(m.at(piv, col)) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != lead)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(piv, j), m.at(lead, j));
    const Rat inv = Rat(1) / m.at(lead, col);
    for (std::size_t j = 0; j < cols; ++j) m.at(lead, j) *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == lead) continue;
      const Rat f = m.at(r, col);
      if (sgn(f) == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) m.at(r, j) -= f * m.at(lead, j);
    }
    out.pivot_cols.push_back(col);
    ++lead;
  }
  out.rank = out.pivot_cols.size();
  out.mat = std::move(m);
  return out;
}

std::vector<std::vector<Rat>> kernel_basis(const RatMat& m) {
  const Rref r = rref(m);
  const std::size_t cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (const std::size_t p : r.pivot_cols) is_pivot[p] = true;
  std::vector<std::vector<Rat>> out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> v(cols);
    v[f] = 1;
    for (std::size_t i = 0; i < r.pivot_cols.size(); ++i) v[r.pivot_cols[i]] = -r.mat.at(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::size_t> image_pivot_columns(const RatMat& m) {
  return rref(m).pivot_cols;
}

RatMat invert(const RatMat& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error("matrix: inverse of non-square matrix");
  RatMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  const Rref r = rref(std::move(aug));
  if (r.rank < n || r.pivot_cols.back() >= n)
    throw Error("matrix: singular where invertible required");
  RatMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = r.mat.at(i, n + j);
  return inv;
}

QuotientMap quotient_by_span(const std::vector<std::vector<Rat>>& span, std::size_t n) {
  RatMat m(span.size(), n);
  for (std::size_t i = 0; i < span.size(); ++i) {
    if (span[i].size() != n) throw Error("quotient: span vector size mismatch");
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = span[i][j];
  }
  const Rref r = rref(std::move(m));
  std::vector<bool> is_pivot(n, false);
  for (const std::size_t p : r.pivot_cols) is_pivot[p] = true;
  QuotientMap q;
  for (std::size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) q.kept.push_back(j);
  q.proj = RatMat(q.kept.size(), n);
  for (std::size_t i = 0; i < q.kept.size(); ++i) q.proj.at(i, q.kept[i]) = 1;
  // Pivot coordinate classes resolve against kept coordinates via the rref rows.
  for (std::size_t i = 0; i < r.pivot_cols.size(); ++i)
    for (std::size_t k = 0; k < q.kept.size(); ++k) {
      const Rat& c = r.mat.at(i, q.kept[k]);
      if (sgn(c) != 0) q.proj.at(k, r.pivot_cols[i]) = -c;
    }
  return q;
}

KernelImageQuotient kernel_image_quotient(const RatMat& m) {
  KernelImageQuotient out;
  out.kernel = kernel_basis(m);
  out.image_pivots = image_pivot_columns(m);
  std::vector<std::vector<Rat>> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<Rat> v(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m.at(i, j);
    cols.push_back(std::move(v));
  }
  out.cokernel = quotient_by_span(cols, m.rows());
  return out;
}

ChartPtr chart_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coordinates") || !j["coordinates"].is_array())
    throw Error("chart json: expected {\"coordinates\": [...]}");
  std::vector<Coordinate> coords;
  for (const auto& cj : j["coordinates"]) {
    if (!cj.is_object() || !cj.contains("name") || !cj.contains("degree") ||
        !cj["name"].is_string() || !cj["degree"].is_number_integer())
      throw Error("chart json: coordinate entries need string name and integer degree");
    coords.push_back({cj["name"].get<std::string>(), cj["degree"].get<int>()});
  }
  return make_chart(std::move(coords));
}

Json chart_to_json(const Chart& chart) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < chart.size(); ++i)
    arr.push_back(Json{{"name", chart.name(i)}, {"degree", chart.degree(i)}});
  return Json{{"coordinates", std::move(arr)}};
}

Poly poly_from_json(const Json& j, ChartPtr chart) {
  if (!j.is_array()) throw Error("polynomial json: expected an array of terms");
  Poly p(chart);
  for (const auto& tj : j) {
    if (!tj.is_object() || !tj.contains("coeff") || !tj.contains("monomial") ||
        !tj["monomial"].is_object())
      throw Error("polynomial json: terms need \"coeff\" and \"monomial\"");
    Rat c;
    if (tj["coeff"].is_string()) c = rat_parse(tj["coeff"].get<std::string>());
    else if (tj["coeff"].is_number_integer()) c = Rat(tj["coeff"].get<long>());
    else throw Error("polynomial json: coeff must be a p/q string");
    Expo e(chart->size(), 0);
    for (const auto& [name, val] : tj["monomial"].items()) {
      if (!val.is_number_integer() || val.get<long>() < 0)
        throw Error("polynomial json: exponents must be nonnegative integers");
      const std::size_t idx = chart->index(name);
      e[idx] += static_cast<std::uint32_t>(val.get<long>());
      if (chart->parity(idx) && e[idx] > 1)
        throw Error("polynomial json: odd coordinate '" + name + "' squared");
    }
    p.add_term(e, c);
  }
  return p;
}

Json poly_to_json(const Poly& p) {
  Json arr = Json::array();
  if (p.is_zero()) return arr;
  const Chart& chart = *p.chart();
  for (const auto& [e, c] : p.terms()) {
    Json mono = Json::object();
    for (std::size_t i = 0; i < chart.size(); ++i)
      if (e[i] > 0) mono[chart.name(i)] = e[i];
    arr.push_back(Json{{"coeff", rat_str(c)}, {"monomial", std::move(mono)}});
  }
  return arr;
}

}  // namespace qstruct
