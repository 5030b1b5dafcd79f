#include "sagbihom/polynomial.hpp"

#include <cctype>
#include <set>

namespace sagbihom {

namespace {
bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}
}  // namespace

VariableContext::VariableContext(std::vector<std::string> names, std::vector<bool> params)
    : names_(std::move(names)), params_(std::move(params)) {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (!params_[i]) ++n_ordinary_;
}

CtxPtr VariableContext::make(std::vector<std::string> names) {
  return make(std::move(names), {});
}

CtxPtr VariableContext::make(std::vector<std::string> names, std::vector<bool> is_parameter) {
  if (names.empty()) throw std::invalid_argument("context needs at least one variable");
  if (is_parameter.empty()) is_parameter.assign(names.size(), false);
  if (is_parameter.size() != names.size())
    throw std::invalid_argument("parameter flag count mismatch");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!valid_identifier(n)) throw std::invalid_argument("invalid variable name: " + n);
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate variable name: " + n);
  }
  return CtxPtr(new VariableContext(std::move(names), std::move(is_parameter)));
}

CtxPtr VariableContext::extend_with_parameter(const CtxPtr& base, const std::string& name) {
  std::vector<std::string> names = base->names_;
  std::vector<bool> params = base->params_;
  names.push_back(name);
  params.push_back(true);
  return make(std::move(names), std::move(params));
}

std::optional<std::size_t> VariableContext::index_of(const std::string& n) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == n) return i;
  return std::nullopt;
}

bool same_context(const CtxPtr& a, const CtxPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->names_ == b->names_ && a->params_ == b->params_;
}

namespace detail {

std::string coeff_to_string(const Rat& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

std::string coeff_to_string(const Cx& c) {
  std::ostringstream os;
  os.precision(17);
  if (c.imag() == 0.0) {
    os << c.real();
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+");
    double im = std::abs(c.imag());
    os << im << "i)";
  }
  return os.str();
}

bool coeff_is_one(const Rat& c) { return c == 1; }
bool coeff_is_minus_one(const Rat& c) { return c == -1; }
bool coeff_is_one(const Cx& c) { return c == Cx(1.0, 0.0); }
bool coeff_is_minus_one(const Cx& c) { return c == Cx(-1.0, 0.0); }

}  // namespace detail

CPoly to_cpoly(const QPoly& p) {
  std::vector<Term<Cx>> ts;
  ts.reserve(p.terms().size());
  for (const auto& t : p.terms()) ts.push_back({detail::to_cx(t.coeff), t.exp});
  return CPoly::from_terms(p.context(), std::move(ts));
}

}  // namespace sagbihom
