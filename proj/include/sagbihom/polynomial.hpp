#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace sagbihom {

using Rat  = boost::multiprecision::mpq_rational;
using Zint = boost::multiprecision::mpz_int;
using Cx   = std::complex<double>;

class VariableContext;
using CtxPtr = std::shared_ptr<const VariableContext>;

/// Immutable list of variable names shared by all polynomials of one ring.
/// Variables flagged as parameters (e.g. a homotopy parameter t) are skipped
/// by jacobian().
class VariableContext {
 public:
  static CtxPtr make(std::vector<std::string> names);
  static CtxPtr make(std::vector<std::string> names, std::vector<bool> is_parameter);
  /// Copy of `base` with one extra parameter variable appended at the end.
  static CtxPtr extend_with_parameter(const CtxPtr& base, const std::string& name);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  bool is_parameter(std::size_t i) const { return params_[i]; }
  std::size_t num_ordinary() const { return n_ordinary_; }
  std::optional<std::size_t> index_of(const std::string& n) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool same_context(const CtxPtr& a, const CtxPtr& b);

 private:
  VariableContext(std::vector<std::string> names, std::vector<bool> params);
  std::vector<std::string> names_;
  std::vector<bool> params_;
  std::size_t n_ordinary_ = 0;
};

bool same_context(const CtxPtr& a, const CtxPtr& b);

using ExponentVec = std::vector<int>;

inline int total_degree(const ExponentVec& e) {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

/// Graded lexicographic comparison; polynomials store terms in descending
/// grlex order so the leading term comes first.
inline bool grlex_greater(const ExponentVec& a, const ExponentVec& b) {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

struct GrlexGreater {
  bool operator()(const ExponentVec& a, const ExponentVec& b) const { return grlex_greater(a, b); }
};

template <class C>
struct Term {
  C coeff;
  ExponentVec exp;
};

namespace detail {
inline bool is_zero_coeff(const Rat& c) { return c == 0; }
inline bool is_zero_coeff(const Cx& c) { return c.real() == 0.0 && c.imag() == 0.0; }
inline Cx to_cx(const Rat& c) { return Cx(c.convert_to<double>(), 0.0); }
inline Cx to_cx(const Cx& c) { return c; }

inline Cx pow_int(Cx base, int e) {
  Cx r(1.0, 0.0);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

std::string coeff_to_string(const Rat& c);
std::string coeff_to_string(const Cx& c);
bool coeff_is_one(const Rat& c);
bool coeff_is_minus_one(const Rat& c);
bool coeff_is_one(const Cx& c);
bool coeff_is_minus_one(const Cx& c);

template <class C>
C pow_coeff(const C& base, int e) {
  C r(1);
  C b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}
}  // namespace detail

/// Sparse multivariate polynomial with terms kept in descending grlex order,
/// no repeated exponents and no explicit zero terms.
template <class C>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(CtxPtr ctx) : ctx_(std::move(ctx)) {}

  static Polynomial zero(CtxPtr ctx) { return Polynomial(std::move(ctx)); }

  static Polynomial constant(CtxPtr ctx, C value) {
    Polynomial p(std::move(ctx));
    if (!detail::is_zero_coeff(value))
      p.terms_.push_back({std::move(value), ExponentVec(p.ctx_->size(), 0)});
    return p;
  }

  static Polynomial variable(CtxPtr ctx, std::size_t index) {
    if (index >= ctx->size()) throw std::out_of_range("variable index out of range");
    ExponentVec e(ctx->size(), 0);
    e[index] = 1;
    return monomial(std::move(ctx), C(1), std::move(e));
  }

  static Polynomial monomial(CtxPtr ctx, C coeff, ExponentVec exp) {
    if (exp.size() != ctx->size()) throw std::invalid_argument("exponent length mismatch");
    for (int e : exp)
      if (e < 0) throw std::invalid_argument("negative exponent");
    Polynomial p(std::move(ctx));
    if (!detail::is_zero_coeff(coeff)) p.terms_.push_back({std::move(coeff), std::move(exp)});
    return p;
  }

  static Polynomial from_terms(CtxPtr ctx, std::vector<Term<C>> terms) {
    Polynomial p(std::move(ctx));
    std::map<ExponentVec, C, GrlexGreater> acc;
    for (auto& t : terms) {
      if (t.exp.size() != p.ctx_->size()) throw std::invalid_argument("exponent length mismatch");
      acc[t.exp] += t.coeff;
    }
    for (auto& [e, c] : acc)
      if (!detail::is_zero_coeff(c)) p.terms_.push_back({c, e});
    return p;
  }

  const CtxPtr& context() const { return ctx_; }
  const std::vector<Term<C>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t nvars() const { return ctx_ ? ctx_->size() : 0; }
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.front().exp); }
  std::size_t size() const { return terms_.size(); }

  bool operator==(const Polynomial& o) const {
    if (!same_context(ctx_, o.ctx_)) return false;
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].exp != o.terms_[i].exp || !(terms_[i].coeff == o.terms_[i].coeff)) return false;
    return true;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial operator-() const {
    Polynomial r(*this);
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_ctx(a, b);
    std::vector<Term<C>> merged;
    merged.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
      const auto& ta = a.terms_[i];
      const auto& tb = b.terms_[j];
      if (ta.exp == tb.exp) {
        C c = ta.coeff + tb.coeff;
        if (!detail::is_zero_coeff(c)) merged.push_back({std::move(c), ta.exp});
        ++i, ++j;
      } else if (grlex_greater(ta.exp, tb.exp)) {
        merged.push_back(ta);
        ++i;
      } else {
        merged.push_back(tb);
        ++j;
      }
    }
    for (; i < a.terms_.size(); ++i) merged.push_back(a.terms_[i]);
    for (; j < b.terms_.size(); ++j) merged.push_back(b.terms_[j]);
    Polynomial r(a.ctx_ ? a.ctx_ : b.ctx_);
    r.terms_ = std::move(merged);
    return r;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_ctx(a, b);
    std::map<ExponentVec, C, GrlexGreater> acc;
    for (const auto& ta : a.terms_) {
      for (const auto& tb : b.terms_) {
        ExponentVec e = ta.exp;
        for (std::size_t k = 0; k < e.size(); ++k) e[k] += tb.exp[k];
        acc[std::move(e)] += ta.coeff * tb.coeff;
      }
    }
    Polynomial r(a.ctx_ ? a.ctx_ : b.ctx_);
    for (auto& [e, c] : acc)
      if (!detail::is_zero_coeff(c)) r.terms_.push_back({c, e});
    return r;
  }

  friend Polynomial operator*(const C& s, const Polynomial& p) {
    Polynomial r(p.ctx_);
    if (detail::is_zero_coeff(s)) return r;
    r.terms_ = p.terms_;
    for (auto& t : r.terms_) t.coeff = s * t.coeff;
    return r;
  }
  friend Polynomial operator*(const Polynomial& p, const C& s) { return s * p; }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative power");
    Polynomial r = constant(ctx_, C(1));
    Polynomial b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      if (e > 1) b = b * b;
      e >>= 1;
    }
    return r;
  }

  /// Term-wise evaluation in canonical term order; deterministic summation.
  Cx evaluate(std::span<const Cx> point) const {
    if (point.size() != nvars()) throw std::invalid_argument("point dimension mismatch");
    Cx acc(0.0, 0.0);
    for (const auto& t : terms_) {
      Cx v = detail::to_cx(t.coeff);
      for (std::size_t k = 0; k < point.size(); ++k)
        if (t.exp[k] != 0) v *= detail::pow_int(point[k], t.exp[k]);
      acc += v;
    }
    return acc;
  }

  Polynomial derivative(std::size_t var) const {
    if (var >= nvars()) throw std::out_of_range("variable index");
    Polynomial r(ctx_);
    for (const auto& t : terms_) {
      if (t.exp[var] == 0) continue;
      Term<C> d{t.coeff * C(t.exp[var]), t.exp};
      d.exp[var] -= 1;
      r.terms_.push_back(std::move(d));
    }
    // derivative preserves grlex within a fixed decremented variable only
    // when degrees differ; re-sort to stay canonical
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term<C>& a, const Term<C>& b) { return grlex_greater(a.exp, b.exp); });
    return r;
  }

  /// Substitute a constant for one variable.
  Polynomial substitute(std::size_t var, const C& value) const {
    if (var >= nvars()) throw std::out_of_range("variable index");
    std::vector<Term<C>> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      Term<C> nt{t.coeff, t.exp};
      if (t.exp[var] != 0) {
        nt.coeff = t.coeff * detail::pow_coeff(value, t.exp[var]);
        nt.exp[var] = 0;
      }
      out.push_back(std::move(nt));
    }
    return from_terms(ctx_, std::move(out));
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      std::string c = detail::coeff_to_string(t.coeff);
      bool neg = !c.empty() && c[0] == '-';
      if (first) {
        if (neg) os << "-", c = c.substr(1);
      } else {
        os << (neg ? " - " : " + ");
        if (neg) c = c.substr(1);
      }
      first = false;
      bool has_var = total_degree(t.exp) > 0;
      bool unit = (c == "1");
      if (!has_var || !unit) os << c;
      bool lead = !has_var || !unit;
      for (std::size_t k = 0; k < t.exp.size(); ++k) {
        if (t.exp[k] == 0) continue;
        if (lead) os << "*";
        lead = true;
        os << ctx_->name(k);
        if (t.exp[k] > 1) os << "^" << t.exp[k];
      }
    }
    return os.str();
  }

 private:
  static void check_ctx(const Polynomial& a, const Polynomial& b) {
    if (!same_context(a.ctx_, b.ctx_)) throw std::invalid_argument("mixed variable contexts");
  }

  CtxPtr ctx_;
  std::vector<Term<C>> terms_;
};

using QPoly = Polynomial<Rat>;
using CPoly = Polynomial<Cx>;

/// Lossless-to-lossy bridge from the exact layer to the tracking layer.
CPoly to_cpoly(const QPoly& p);

/// Re-interpret a polynomial in a wider context (same leading variable names,
/// extra variables appended); exponents are zero-padded.
template <class C>
Polynomial<C> lift_to_context(const Polynomial<C>& p, const CtxPtr& wider) {
  if (wider->size() < p.nvars()) throw std::invalid_argument("narrower context");
  for (std::size_t i = 0; i < p.nvars(); ++i)
    if (p.context()->name(i) != wider->name(i))
      throw std::invalid_argument("context prefix mismatch");
  std::vector<Term<C>> ts = p.terms();
  for (auto& t : ts) t.exp.resize(wider->size(), 0);
  return Polynomial<C>::from_terms(wider, std::move(ts));
}

/// Entry (i,j) holds d f_i / d x_j over the non-parameter variables.
template <class C>
std::vector<std::vector<Polynomial<C>>> jacobian(const std::vector<Polynomial<C>>& system) {
  if (system.empty()) throw std::invalid_argument("empty system");
  const CtxPtr& ctx = system.front().context();
  for (const auto& f : system)
    if (!same_context(f.context(), ctx)) throw std::invalid_argument("mixed variable contexts");
  std::vector<std::vector<Polynomial<C>>> J;
  J.reserve(system.size());
  for (const auto& f : system) {
    std::vector<Polynomial<C>> row;
    for (std::size_t j = 0; j < ctx->size(); ++j)
      if (!ctx->is_parameter(j)) row.push_back(f.derivative(j));
    J.push_back(std::move(row));
  }
  return J;
}

}  // namespace sagbihom
