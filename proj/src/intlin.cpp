#include "sagbihom/intlin.hpp"

#include <algorithm>

namespace sagbihom {

ZMat mul(const ZMat& a, const ZMat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("dimension mismatch");
  ZMat r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

Zint det_bareiss(const ZMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  ZMat m = a;
  Zint prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

namespace {

void swap_rows(ZMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(i, k), m(j, k));
}
void swap_cols(ZMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.rows(); ++k) std::swap(m(k, i), m(k, j));
}
// row_i -= q * row_k
void add_row(ZMat& m, std::size_t i, std::size_t k, const Zint& q) {
  if (q == 0) return;
  for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) -= q * m(k, c);
}
void add_col(ZMat& m, std::size_t j, std::size_t k, const Zint& q) {
  if (q == 0) return;
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, j) -= q * m(r, k);
}

}  // namespace

SNFResult smith_normal_form(const ZMat& a) {
  SNFResult res;
  res.D = a;
  res.U = ZMat::identity(a.rows());
  res.V = ZMat::identity(a.cols());
  ZMat& D = res.D;
  ZMat& U = res.U;
  ZMat& V = res.V;
  const std::size_t n = std::min(a.rows(), a.cols());

  for (std::size_t k = 0; k < n; ++k) {
    for (;;) {
      // pivot: smallest nonzero |entry| in the trailing block, ties by position
      std::size_t pi = 0, pj = 0;
      bool found = false;
      Zint best = 0;
      for (std::size_t i = k; i < a.rows(); ++i)
        for (std::size_t j = k; j < a.cols(); ++j) {
          if (D(i, j) == 0) continue;
          Zint v = abs(D(i, j));
          if (!found || v < best) {
            found = true;
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (!found) {
        res.rank = k;
        return res;
      }
      if (pi != k) {
        swap_rows(D, k, pi);
        swap_rows(U, k, pi);
      }
      if (pj != k) {
        swap_cols(D, k, pj);
        swap_cols(V, k, pj);
      }
      bool clean = true;
      for (std::size_t i = k + 1; i < a.rows(); ++i) {
        if (D(i, k) == 0) continue;
        Zint q = D(i, k) / D(k, k);
        add_row(D, i, k, q);
        add_row(U, i, k, q);
        if (D(i, k) != 0) clean = false;
      }
      for (std::size_t j = k + 1; j < a.cols(); ++j) {
        if (D(k, j) == 0) continue;
        Zint q = D(k, j) / D(k, k);
        add_col(D, j, k, q);
        add_col(V, j, k, q);
        if (D(k, j) != 0) clean = false;
      }
      if (!clean) continue;
      // enforce divisibility of the trailing block by the pivot
      bool divides_all = true;
      for (std::size_t i = k + 1; i < a.rows() && divides_all; ++i)
        for (std::size_t j = k + 1; j < a.cols(); ++j)
          if (D(i, j) % D(k, k) != 0) {
            add_row(D, k, i, Zint(-1));  // row_k += row_i
            add_row(U, k, i, Zint(-1));
            divides_all = false;
            break;
          }
      if (divides_all) break;
    }
    if (D(k, k) < 0) {
      for (std::size_t j = 0; j < a.cols(); ++j) D(k, j) = -D(k, j);
      for (std::size_t j = 0; j < a.rows(); ++j) U(k, j) = -U(k, j);
    }
  }
  res.rank = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (D(k, k) != 0) ++res.rank;
  return res;
}

ZMat unimodular_inverse(const ZMat& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("not square");
  const std::size_t n = u.rows();
  Zint d = det_bareiss(u);
  if (d != 1 && d != -1) throw std::invalid_argument("matrix is not unimodular");
  // adjugate via cofactors; n stays small here
  ZMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ZMat minor(n - 1, n - 1);
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = u(r, c);
        }
        ++rr;
      }
      Zint cof = (n == 1) ? Zint(1) : det_bareiss(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      inv(i, j) = cof * d;  // divide by det = multiply by +-1
    }
  return inv;
}

std::optional<Zint> lattice_index(const ZMat& columns) {
  SNFResult snf = smith_normal_form(columns);
  if (snf.rank < columns.rows()) return std::nullopt;
  Zint prod = 1;
  for (std::size_t i = 0; i < snf.rank; ++i) prod *= snf.D(i, i);
  return prod;
}

std::vector<std::vector<Zint>> integer_kernel_basis(const ZMat& a) {
  SNFResult snf = smith_normal_form(a);
  std::vector<std::vector<Zint>> basis;
  for (std::size_t j = snf.rank; j < a.cols(); ++j) {
    std::vector<Zint> v(a.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) v[i] = snf.V(i, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

/// Primal simplex on max c.x s.t. A x <= b, x >= 0, b >= 0, with Bland's rule.
/// Tableau form with explicit basis bookkeeping; everything exact rational.
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rat>> A, std::vector<Rat> b, std::vector<Rat> c)
      : m_(A.size()), n_(c.size()) {
    // columns: n structural + m slacks, rows: m constraints + objective row
    T_.assign(m_ + 1, std::vector<Rat>(n_ + m_ + 1, Rat(0)));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) T_[i][j] = A[i][j];
      T_[i][n_ + i] = 1;
      T_[i].back() = b[i];
      basis_[i] = n_ + i;
    }
    for (std::size_t j = 0; j < n_; ++j) T_[m_][j] = -c[j];
  }

  void run() {
    for (;;) {
      // entering: smallest index with negative reduced cost
      std::size_t e = n_ + m_;
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (T_[m_][j] < 0) {
          e = j;
          break;
        }
      if (e == n_ + m_) return;  // optimal
      // leaving: min ratio, ties by smallest basis variable index
      std::size_t l = m_;
      Rat best_ratio = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (T_[i][e] <= 0) continue;
        Rat ratio = T_[i].back() / T_[i][e];
        if (l == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[l]))
          l = i, best_ratio = ratio;
      }
      if (l == m_) throw std::runtime_error("LP unbounded");
      pivot(l, e);
    }
  }

  Rat objective() const { return T_[m_].back(); }

  std::vector<Rat> solution() const {
    std::vector<Rat> x(n_ + m_, Rat(0));
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = T_[i].back();
    x.resize(n_);
    return x;
  }

 private:
  void pivot(std::size_t l, std::size_t e) {
    Rat p = T_[l][e];
    for (auto& v : T_[l]) v /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == l || T_[i][e] == 0) continue;
      Rat f = T_[i][e];
      for (std::size_t j = 0; j < T_[i].size(); ++j) T_[i][j] -= f * T_[l][j];
    }
    basis_[l] = e;
  }

  std::size_t m_, n_;
  std::vector<std::vector<Rat>> T_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LPWitness strict_lp_feasible(const std::vector<std::vector<Rat>>& strict,
                             const std::vector<std::vector<Rat>>& nonstrict) {
  std::size_t dim = 0;
  for (const auto& r : strict) dim = std::max(dim, r.size());
  for (const auto& r : nonstrict) dim = std::max(dim, r.size());
  for (const auto& r : strict)
    if (r.size() != dim) throw std::invalid_argument("row length mismatch");
  for (const auto& r : nonstrict)
    if (r.size() != dim) throw std::invalid_argument("row length mismatch");
  if (strict.empty()) {
    LPWitness w;
    w.feasible = true;
    w.certificate.assign(dim, Zint(0));
    return w;
  }

  // max eps s.t. eps - s.(u - v) <= 0 for strict rows, -n.(u - v) <= 0 for
  // nonstrict rows, eps <= 1; variables (eps, u, v) >= 0. Feasible with the
  // all-slack basis since b >= 0; strict system solvable iff optimum > 0.
  const std::size_t nvar = 1 + 2 * dim;
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  for (const auto& r : strict) {
    std::vector<Rat> row(nvar, Rat(0));
    row[0] = 1;
    for (std::size_t j = 0; j < dim; ++j) {
      row[1 + j] = -r[j];
      row[1 + dim + j] = r[j];
    }
    A.push_back(std::move(row));
    b.push_back(Rat(0));
  }
  for (const auto& r : nonstrict) {
    std::vector<Rat> row(nvar, Rat(0));
    for (std::size_t j = 0; j < dim; ++j) {
      row[1 + j] = -r[j];
      row[1 + dim + j] = r[j];
    }
    A.push_back(std::move(row));
    b.push_back(Rat(0));
  }
  {
    std::vector<Rat> row(nvar, Rat(0));
    row[0] = 1;
    A.push_back(std::move(row));
    b.push_back(Rat(1));
  }
  std::vector<Rat> c(nvar, Rat(0));
  c[0] = 1;

  Simplex sx(std::move(A), std::move(b), std::move(c));
  sx.run();
  LPWitness w;
  if (sx.objective() <= 0) return w;

  std::vector<Rat> x = sx.solution();
  std::vector<Rat> omega(dim);
  Zint scale = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    omega[j] = x[1 + j] - x[1 + dim + j];
    scale = lcm(scale, denominator(omega[j]));
  }
  w.certificate.resize(dim);
  for (std::size_t j = 0; j < dim; ++j)
    w.certificate[j] = numerator(omega[j]) * (scale / denominator(omega[j]));
  // verify exactly before claiming feasibility
  for (const auto& r : strict) {
    Rat dot = 0;
    for (std::size_t j = 0; j < dim; ++j) dot += r[j] * Rat(w.certificate[j]);
    if (!(dot > 0)) throw std::logic_error("LP certificate fails a strict inequality");
  }
  for (const auto& r : nonstrict) {
    Rat dot = 0;
    for (std::size_t j = 0; j < dim; ++j) dot += r[j] * Rat(w.certificate[j]);
    if (dot < 0) throw std::logic_error("LP certificate fails a nonstrict inequality");
  }
  w.feasible = true;
  return w;
}

}  // namespace sagbihom
