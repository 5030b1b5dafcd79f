#include "sagbihom/polyhedral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace sagbihom {

namespace {

constexpr std::int64_t kLiftRange = 4096;
constexpr double kSlackMargin = 1e-4;

std::size_t ambient_dim(const std::vector<SupportSet>& supports) {
  if (supports.empty()) throw std::invalid_argument("no supports");
  if (supports[0].points.empty()) throw std::invalid_argument("empty support");
  return supports[0].points[0].size();
}

void validate(const std::vector<SupportSet>& supports) {
  const std::size_t n = ambient_dim(supports);
  int total = 0;
  for (const auto& s : supports) {
    if (s.multiplicity <= 0) throw std::invalid_argument("non-positive multiplicity");
    total += s.multiplicity;
    for (const auto& p : s.points)
      if (p.size() != n) throw std::invalid_argument("support point dimension mismatch");
    for (std::size_t i = 0; i < s.points.size(); ++i)
      for (std::size_t j = i + 1; j < s.points.size(); ++j)
        if (s.points[i] == s.points[j]) throw std::invalid_argument("repeated support point");
  }
  if (static_cast<std::size_t>(total) != n)
    throw std::invalid_argument("multiplicities must sum to the ambient dimension");
}

/// Exact rational solve of an integer square system; false when singular.
bool solve_exact(const ZMat& M, const std::vector<Zint>& rhs, std::vector<Rat>& out) {
  const std::size_t n = M.rows();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(M(i, j));
    a[i][n] = Rat(rhs[i]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return false;
    std::swap(a[k], a[p]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      Rat f = a[i][k] / a[k][k];
      for (std::size_t j = k; j <= n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][n] / a[i][i];
  return true;
}

class CellSearch {
 public:
  CellSearch(const std::vector<SupportSet>& supports, const Lifting& lift)
      : S_(supports), L_(lift), n_(ambient_dim(supports)) {
    basis_.reserve(n_);
    sel_.resize(S_.size());
  }

  std::vector<MixedCell> run() {
    dfs_support(0);
    std::sort(cells_.begin(), cells_.end(),
              [](const MixedCell& a, const MixedCell& b) { return a.selected < b.selected; });
    return std::move(cells_);
  }

 private:
  bool push_edge(const Eigen::VectorXd& e) {
    Eigen::VectorXd r = e;
    for (const auto& b : basis_) r -= b.dot(r) * b;
    double nrm = r.norm();
    if (nrm <= 1e-9 * (1.0 + e.norm())) return false;
    basis_.push_back(r / nrm);
    return true;
  }
  void pop_edge() { basis_.pop_back(); }

  Eigen::VectorXd edge_vec(std::size_t r, int anchor, int p) const {
    Eigen::VectorXd e(n_);
    for (std::size_t i = 0; i < n_; ++i)
      e[i] = double(S_[r].points[p][i] - S_[r].points[anchor][i]);
    return e;
  }

  void dfs_support(std::size_t r) {
    if (r == S_.size()) {
      finish_candidate();
      return;
    }
    const int need = S_[r].multiplicity + 1;
    if (static_cast<int>(S_[r].points.size()) < need) return;
    sel_[r].clear();
    choose(r, 0, need);
  }

  void choose(std::size_t r, int from, int left) {
    if (left == 0) {
      dfs_support(r + 1);
      return;
    }
    const int npts = static_cast<int>(S_[r].points.size());
    for (int p = from; p + left <= npts; ++p) {
      if (sel_[r].empty()) {
        sel_[r].push_back(p);
        choose(r, p + 1, left - 1);
        sel_[r].pop_back();
      } else {
        if (!push_edge(edge_vec(r, sel_[r][0], p))) continue;
        sel_[r].push_back(p);
        choose(r, p + 1, left - 1);
        sel_[r].pop_back();
        pop_edge();
      }
    }
  }

  // <gamma, p - anchor> = lift(anchor) - lift(p) over all cell edges
  void finish_candidate() {
    Eigen::MatrixXd M(n_, n_);
    Eigen::VectorXd rhs(n_);
    std::size_t row = 0;
    for (std::size_t r = 0; r < S_.size(); ++r) {
      int anchor = sel_[r][0];
      for (std::size_t k = 1; k < sel_[r].size(); ++k, ++row) {
        int p = sel_[r][k];
        for (std::size_t i = 0; i < n_; ++i)
          M(row, i) = double(S_[r].points[p][i] - S_[r].points[anchor][i]);
        rhs[row] = double(L_.values[r][anchor] - L_.values[r][p]);
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd gamma = lu.solve(rhs);
    if (!gamma.allFinite()) return;

    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < S_.size(); ++r) {
      int anchor = sel_[r][0];
      double level = double(L_.values[r][anchor]);
      for (std::size_t i = 0; i < n_; ++i) level += gamma[i] * S_[r].points[anchor][i];
      for (int p = 0; p < static_cast<int>(S_[r].points.size()); ++p) {
        if (std::find(sel_[r].begin(), sel_[r].end(), p) != sel_[r].end()) continue;
        double v = double(L_.values[r][p]);
        for (std::size_t i = 0; i < n_; ++i) v += gamma[i] * S_[r].points[p][i];
        min_slack = std::min(min_slack, v - level);
      }
    }
    if (min_slack < -kSlackMargin) return;
    confirm_exact();
  }

  // full rational re-check; a lower-hull tie aborts the whole enumeration
  void confirm_exact() {
    ZMat M(n_, n_);
    std::vector<Zint> rhs(n_);
    std::size_t row = 0;
    for (std::size_t r = 0; r < S_.size(); ++r) {
      int anchor = sel_[r][0];
      for (std::size_t k = 1; k < sel_[r].size(); ++k, ++row) {
        int p = sel_[r][k];
        for (std::size_t i = 0; i < n_; ++i)
          M(row, i) = S_[r].points[p][i] - S_[r].points[anchor][i];
        rhs[row] = L_.values[r][anchor] - L_.values[r][p];
      }
    }
    std::vector<Rat> gamma;
    if (!solve_exact(M, rhs, gamma)) return;

    std::vector<Rat> levels(S_.size());
    bool tie = false;
    for (std::size_t r = 0; r < S_.size(); ++r) {
      int anchor = sel_[r][0];
      Rat level = Rat(L_.values[r][anchor]);
      for (std::size_t i = 0; i < n_; ++i) level += gamma[i] * S_[r].points[anchor][i];
      levels[r] = level;
      for (int p = 0; p < static_cast<int>(S_[r].points.size()); ++p) {
        if (std::find(sel_[r].begin(), sel_[r].end(), p) != sel_[r].end()) continue;
        Rat v = Rat(L_.values[r][p]);
        for (std::size_t i = 0; i < n_; ++i) v += gamma[i] * S_[r].points[p][i];
        Rat slack = v - levels[r];
        if (slack < 0) return;
        if (slack == 0) tie = true;
      }
    }
    if (tie) throw DegenerateLifting();

    MixedCell cell;
    cell.selected = sel_;
    cell.gamma = std::move(gamma);
    cell.level = std::move(levels);
    cell.volume = abs(det_bareiss(M));
    if (cell.volume == 0) return;
    cells_.push_back(std::move(cell));
  }

  const std::vector<SupportSet>& S_;
  const Lifting& L_;
  std::size_t n_;
  std::vector<Eigen::VectorXd> basis_;
  std::vector<std::vector<int>> sel_;
  std::vector<MixedCell> cells_;
};

}  // namespace

Lifting draw_lifting(const std::vector<SupportSet>& supports, std::uint64_t seed) {
  Lifting lift;
  lift.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> d(0, kLiftRange - 1);
  for (const auto& s : supports) {
    std::vector<std::int64_t> v(s.points.size());
    for (auto& x : v) x = d(rng);
    lift.values.push_back(std::move(v));
  }
  return lift;
}

std::vector<MixedCell> mixed_cells(const std::vector<SupportSet>& supports,
                                   const Lifting& lifting) {
  validate(supports);
  if (lifting.values.size() != supports.size())
    throw std::invalid_argument("lifting shape mismatch");
  for (std::size_t r = 0; r < supports.size(); ++r)
    if (lifting.values[r].size() != supports[r].points.size())
      throw std::invalid_argument("lifting shape mismatch");
  return CellSearch(supports, lifting).run();
}

Zint mixed_volume(const std::vector<SupportSet>& supports, std::uint64_t seed) {
  validate(supports);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Lifting lift = draw_lifting(supports, seed + 0x9e3779b97f4a7c15ull * (attempt + 1));
    try {
      Zint total = 0;
      for (const auto& c : mixed_cells(supports, lift)) total += c.volume;
      return total;
    } catch (const DegenerateLifting&) {
      continue;
    }
  }
  throw std::runtime_error("mixed_volume: 10 degenerate liftings in a row");
}

std::vector<std::vector<Cx>> solve_binomial(const BinomialSystem& sys) {
  const std::size_t n = sys.exponents.rows();
  if (sys.exponents.cols() != n) throw std::invalid_argument("exponent matrix must be square");
  if (sys.constants.size() != n) throw std::invalid_argument("constant count mismatch");
  for (const auto& c : sys.constants)
    if (c == Cx(0.0, 0.0)) throw std::invalid_argument("zero constant in binomial system");
  Zint dz = det_bareiss(sys.exponents);
  if (dz == 0) throw std::invalid_argument("singular exponent matrix");

  SNFResult snf = smith_normal_form(sys.exponents);

  // exact B^{-1} column by column; keeps log |x| free of cancellation
  std::vector<std::vector<Rat>> Binv(n, std::vector<Rat>(n));
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<Zint> e(n, Zint(0));
    e[col] = 1;
    std::vector<Rat> x;
    if (!solve_exact(sys.exponents, e, x))
      throw std::invalid_argument("singular exponent matrix");
    for (std::size_t i = 0; i < n; ++i) Binv[i][col] = x[i];
  }
  // phases: distinct solutions are exp(base + 2*pi*i * V D^{-1} t), t_i < d_i
  std::vector<std::vector<Rat>> phase(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (snf.D(j, j) != 0) phase[i][j] = Rat(snf.V(i, j)) / Rat(snf.D(j, j));

  std::vector<Cx> logc(n);
  for (std::size_t i = 0; i < n; ++i) logc[i] = std::log(sys.constants[i]);
  std::vector<Cx> base(n, Cx(0, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) base[i] += Binv[i][j].convert_to<double>() * logc[j];

  std::vector<std::int64_t> digits(n);
  for (std::size_t i = 0; i < n; ++i) digits[i] = snf.D(i, i).convert_to<std::int64_t>();

  std::vector<std::vector<Cx>> sols;
  std::vector<std::int64_t> t(n, 0);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (;;) {
    std::vector<Cx> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rat ph(0);
      for (std::size_t j = 0; j < n; ++j)
        if (t[j] != 0) ph += phase[i][j] * Rat(t[j]);
      Zint rem = numerator(ph) % denominator(ph);
      double frac = Rat(rem, denominator(ph)).convert_to<double>();
      x[i] = std::exp(base[i] + Cx(0.0, two_pi * frac));
    }
    sols.push_back(std::move(x));
    std::size_t k = 0;
    while (k < n && ++t[k] == digits[k]) t[k++] = 0;
    if (k == n) break;
  }

  std::sort(sols.begin(), sols.end(), [](const std::vector<Cx>& a, const std::vector<Cx>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
      if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
  });
  return sols;
}

std::vector<CellStart> start_solutions(const std::vector<SupportSet>& supports,
                                       const std::vector<SupportRows>& rows,
                                       const std::vector<MixedCell>& cells) {
  validate(supports);
  if (rows.size() != supports.size()) throw std::invalid_argument("row block count mismatch");
  for (std::size_t r = 0; r < supports.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(supports[r].multiplicity))
      throw std::invalid_argument("equation count mismatch for a support");
    for (const auto& row : rows[r])
      if (row.size() != supports[r].points.size())
        throw std::invalid_argument("coefficient row length mismatch");
  }
  const std::size_t n = ambient_dim(supports);

  std::vector<CellStart> out;
  for (const auto& cell : cells) {
    ZMat A(n, n);
    std::vector<Cx> consts(n);
    std::size_t eq = 0;
    for (std::size_t r = 0; r < supports.size(); ++r) {
      const int mult = supports[r].multiplicity;
      const auto& sel = cell.selected[r];
      // solve M z = -m0 so each equation becomes x^(a_k - a_0) = z_k
      Eigen::MatrixXcd Mr(mult, mult);
      Eigen::VectorXcd b(mult);
      for (int e = 0; e < mult; ++e) {
        b(e) = -rows[r][e][sel[0]];
        for (int k = 0; k < mult; ++k) Mr(e, k) = rows[r][e][sel[k + 1]];
      }
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Mr);
      Eigen::VectorXcd z = lu.solve(b);
      if (!z.allFinite() || (Mr * z - b).norm() > 1e-8 * (1.0 + b.norm()))
        throw std::runtime_error("cell system is degenerate for these coefficients");
      for (int k = 0; k < mult; ++k, ++eq) {
        if (std::abs(z(k)) < 1e-13)
          throw std::runtime_error("cell system is degenerate for these coefficients");
        for (std::size_t i = 0; i < n; ++i)
          A(eq, i) = supports[r].points[sel[k + 1]][i] - supports[r].points[sel[0]][i];
        consts[eq] = z(k);
      }
    }
    out.push_back(CellStart{cell, solve_binomial(BinomialSystem{A, consts})});
  }
  return out;
}

}  // namespace sagbihom
