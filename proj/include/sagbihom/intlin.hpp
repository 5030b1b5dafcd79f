#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sagbihom/polynomial.hpp"

namespace sagbihom {

/// Dense matrix over arbitrary-precision integers.
class ZMat {
 public:
  ZMat() = default;
  ZMat(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, Zint(0)) {}
  static ZMat identity(std::size_t n) {
    ZMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Zint& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const Zint& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  bool operator==(const ZMat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Zint> a_;
};

ZMat mul(const ZMat& a, const ZMat& b);
Zint det_bareiss(const ZMat& a);

struct SNFResult {
  ZMat U;  ///< unimodular, rows x rows
  ZMat V;  ///< unimodular, cols x cols
  ZMat D;  ///< U*A*V, diagonal with d1 | d2 | ..., all di >= 0
  std::size_t rank = 0;
  std::vector<Zint> divisors() const {
    std::vector<Zint> d;
    for (std::size_t i = 0; i < rank; ++i) d.push_back(D(i, i));
    return d;
  }
};

/// Exact Smith normal form; pivot = smallest nonzero absolute value, ties by
/// row-major position.
SNFResult smith_normal_form(const ZMat& a);

/// Exact inverse of a unimodular integer matrix.
ZMat unimodular_inverse(const ZMat& u);

/// Index [Z^n : L] of the lattice spanned by the columns; nullopt when the
/// columns do not span full rank n.
std::optional<Zint> lattice_index(const ZMat& columns);

/// Basis of the integer kernel {x : A x = 0}; the basis spans the saturated
/// kernel lattice.
std::vector<std::vector<Zint>> integer_kernel_basis(const ZMat& a);

struct LPWitness {
  bool feasible = false;
  std::vector<Zint> certificate;  ///< integer-scaled omega, set when feasible
};

/// Decides whether some rational omega satisfies row . omega > 0 for every
/// strict row and row . omega >= 0 for every nonstrict row. Exact rational
/// simplex with Bland's rule; the certificate is verified by substitution
/// before returning.
LPWitness strict_lp_feasible(const std::vector<std::vector<Rat>>& strict,
                             const std::vector<std::vector<Rat>>& nonstrict);

}  // namespace sagbihom
