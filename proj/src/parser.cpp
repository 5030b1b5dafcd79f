#include "sagbihom/parser.hpp"

#include <cctype>

namespace sagbihom {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const CtxPtr& ctx) : text_(text), ctx_(ctx) {}

  QPoly run() {
    QPoly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  QPoly expr() {
    bool neg = false;
    if (accept('-'))
      neg = true;
    else
      accept('+');
    QPoly p = term();
    if (neg) p = -p;
    for (;;) {
      if (accept('+'))
        p += term();
      else if (accept('-'))
        p -= term();
      else
        break;
    }
    return p;
  }

  QPoly term() {
    QPoly p = factor();
    while (accept('*')) p *= factor();
    // an adjacent operand without '*' is rejected here
    char c = peek();
    if (c == '(' || std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      fail("implicit multiplication is not allowed; use '*'");
    return p;
  }

  QPoly factor() {
    QPoly b = base();
    if (accept('^')) {
      skip_ws();
      std::size_t at = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = at;
        fail("exponent must be a non-negative integer literal");
      }
      long e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_] - '0');
        if (e > 1000000) fail("exponent too large");
        ++pos_;
      }
      b = b.pow(static_cast<int>(e));
    }
    return b;
  }

  QPoly base() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      QPoly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return variable();
    fail("expected a number, variable or '('");
  }

  QPoly number() {
    std::size_t start = pos_;
    Zint ipart = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ipart = ipart * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    Rat value(ipart);
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = start;
        fail("malformed decimal literal");
      }
      Zint frac = 0, scale = 1;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        frac = frac * 10 + (text_[pos_] - '0');
        scale *= 10;
        ++pos_;
      }
      value += Rat(frac, scale);
    } else if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("expected denominator digits after '/'");
      Zint den = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        den = den * 10 + (text_[pos_] - '0');
        ++pos_;
      }
      if (den == 0) {
        pos_ = start;
        fail("zero denominator");
      }
      value = Rat(ipart, den);
    }
    return QPoly::constant(ctx_, value);
  }

  QPoly variable() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    auto idx = ctx_->index_of(name);
    if (!idx) {
      pos_ = start;
      fail("unknown variable name '" + name + "'");
    }
    return QPoly::variable(ctx_, *idx);
  }

  const std::string& text_;
  const CtxPtr& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

QPoly parse_polynomial(const std::string& text, const CtxPtr& ctx) {
  return Parser(text, ctx).run();
}

}  // namespace sagbihom
