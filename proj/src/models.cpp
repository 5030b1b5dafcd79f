#include "sagbihom/models.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace sagbihom {

namespace {

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  if (k > n - k) k = n - k;
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

/// Determinant of a small matrix of polynomials by Laplace expansion along
/// the first row.
QPoly poly_det(const std::vector<std::vector<QPoly>>& m, const CtxPtr& ctx) {
  const std::size_t k = m.size();
  if (k == 1) return m[0][0];
  QPoly acc = QPoly::zero(ctx);
  for (std::size_t j = 0; j < k; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<QPoly>> minor;
    for (std::size_t r = 1; r < k; ++r) {
      std::vector<QPoly> row;
      for (std::size_t c = 0; c < k; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    QPoly term = m[0][j] * poly_det(minor, ctx);
    if (j % 2 == 1) term = -term;
    acc += term;
  }
  return acc;
}

}  // namespace

GrassmannianFamily grassmannianFamily_impl(int k, int m, int cap) {
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < m");
  if (binom(m, k) > cap) throw std::invalid_argument("generator cap exceeded");
  const int w = m - k;  // columns of the variable block
  std::vector<std::string> names;
  for (int r = 1; r <= k; ++r)
    for (int c = 1; c <= w; ++c) {
      std::ostringstream os;
      os << "x" << r << c;
      names.push_back(os.str());
    }
  CtxPtr ctx = VariableContext::make(names);

  // H = [I_k | X]
  std::vector<std::vector<QPoly>> H(k, std::vector<QPoly>(m, QPoly::zero(ctx)));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c)
      H[r][c] = QPoly::constant(ctx, Rat(r == c ? 1 : 0));
    for (int c = 0; c < w; ++c) H[r][k + c] = QPoly::variable(ctx, r * w + c);
  }

  // maximal minors over column subsets in lexicographic order
  std::vector<QPoly> minors;
  std::vector<int> cols(k);
  for (int i = 0; i < k; ++i) cols[i] = i;
  for (;;) {
    std::vector<std::vector<QPoly>> sub(k, std::vector<QPoly>(k, QPoly::zero(ctx)));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub[r][c] = H[r][cols[c]];
    minors.push_back(poly_det(sub, ctx));
    int i = k - 1;
    while (i >= 0 && cols[i] == m - k + i) --i;
    if (i < 0) break;
    ++cols[i];
    for (int j = i + 1; j < k; ++j) cols[j] = cols[j - 1] + 1;
  }

  GrassmannianFamily out;
  out.k = k;
  out.m = m;
  out.family = make_family(ctx, {minors});
  out.weight.w.resize(names.size());
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < w; ++c) out.weight.w[r * w + c] = std::int64_t(r) * (w - c);

  SagbiCertificate cert = sagbi_check(out.family, out.weight);
  if (!cert.verified)
    throw std::logic_error("the PBW weight failed the SAGBI criterion; generator bug");
  return out;
}

GrassmannianFamily grassmannian_family(int k, int m, int generator_cap) {
  return grassmannianFamily_impl(k, m, generator_cap);
}

ResonatorSpec ResonatorSpec::random(int N, int n, std::uint64_t seed) {
  ResonatorSpec spec;
  spec.N = N;
  spec.n = n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  spec.a.assign(N, std::vector<double>(n + 2));
  spec.b.assign(N, std::vector<double>(n + 2));
  spec.J.assign(N, std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i) {
    for (int kk = 0; kk <= n + 1; ++kk) {
      spec.a[i][kk] = g(rng);
      spec.b[i][kk] = g(rng);
    }
    spec.a[i][2] = -spec.b[i][1];
    // the harmonic-balance derivation ties both linear cross terms to the
    // detuning; without a_1 = b_2 the steady-state count inflates
    spec.b[i][2] = spec.a[i][1];
    for (int kk = 3; kk <= n + 1; ++kk) spec.a[i][kk] = spec.b[i][kk];
    for (int j = 0; j < N; ++j)
      if (j != i) spec.J[j][i] = g(rng);
  }
  return spec;
}

void ResonatorSpec::validate() const {
  if (N < 1 || n < 1) throw std::invalid_argument("need N >= 1 and n >= 1");
  if (static_cast<int>(a.size()) != N || static_cast<int>(b.size()) != N ||
      static_cast<int>(J.size()) != N)
    throw std::invalid_argument("coefficient table shape mismatch");
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(a[i].size()) != n + 2 || static_cast<int>(b[i].size()) != n + 2)
      throw std::invalid_argument("coefficient table shape mismatch");
    if (a[i][2] != -b[i][1]) throw std::invalid_argument("constraint a_2 = -b_1 violated");
    for (int kk = 3; kk <= n + 1; ++kk)
      if (a[i][kk] != b[i][kk]) throw std::invalid_argument("constraint a_k = b_k violated");
  }
}

ParameterizedSystem resonator_family(const ResonatorSpec& spec) {
  spec.validate();
  const int N = spec.N, n = spec.n;
  std::vector<std::string> names;
  for (int i = 1; i <= N; ++i) {
    names.push_back("u" + std::to_string(i));
    names.push_back("v" + std::to_string(i));
  }
  CtxPtr ctx = VariableContext::make(names);
  auto u = [&](int i) { return QPoly::variable(ctx, 2 * i); };
  auto v = [&](int i) { return QPoly::variable(ctx, 2 * i + 1); };

  ParameterizedSystem sys;
  std::vector<std::vector<QPoly>> blocks;
  for (int i = 0; i < N; ++i) {
    QPoly wAmp = u(i) * u(i) + v(i) * v(i);
    std::vector<QPoly> block;
    block.push_back(QPoly::constant(ctx, Rat(1)));
    block.push_back(u(i));
    block.push_back(v(i));
    QPoly wp = wAmp;
    for (int kk = 1; kk <= n - 1; ++kk) {
      block.push_back(u(i) * wp);
      if (kk < n - 1) wp *= wAmp;
    }
    wp = wAmp;
    for (int kk = 1; kk <= n - 1; ++kk) {
      block.push_back(v(i) * wp);
      if (kk < n - 1) wp *= wAmp;
    }
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      block.push_back(u(j));
      block.push_back(v(j));
    }
    blocks.push_back(std::move(block));
  }
  sys.family = make_family(ctx, blocks);

  // rows: p_i reads a_{0..2}, the u w^k series and J/2 on the u_j;
  //       q_i reads b_{0..2}, the v w^k series and J/2 on the v_j
  for (int i = 0; i < N; ++i) {
    const std::size_t sz = sys.family.blocks[i].size();
    std::vector<Cx> prow(sz, Cx(0, 0)), qrow(sz, Cx(0, 0));
    prow[0] = spec.a[i][0];
    prow[1] = spec.a[i][1];
    prow[2] = spec.a[i][2];
    qrow[0] = spec.b[i][0];
    qrow[1] = spec.b[i][1];
    qrow[2] = spec.b[i][2];
    for (int kk = 1; kk <= n - 1; ++kk) {
      prow[2 + kk] = spec.a[i][2 + kk];
      qrow[2 + (n - 1) + kk] = spec.b[i][2 + kk];
    }
    std::size_t off = 3 + 2 * (n - 1);
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      prow[off] = spec.J[j][i] / 2.0;
      qrow[off + 1] = spec.J[j][i] / 2.0;
      off += 2;
    }
    sys.coefficients.push_back({prow, qrow});
  }
  sys.validate();
  return sys;
}

ParameterizedSystem random_slice(const SagbiFamily& family,
                                 const std::vector<int>& rows_per_block, CoeffKind kind,
                                 std::uint64_t seed) {
  if (rows_per_block.size() != family.blocks.size())
    throw std::invalid_argument("one row count per block required");
  int total = 0;
  for (int r : rows_per_block) total += r;
  if (static_cast<std::size_t>(total) != family.ctx->size())
    throw std::invalid_argument("row counts must sum to the variable count");
  ParameterizedSystem sys;
  sys.family = family;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-100, 100);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t r = 0; r < family.blocks.size(); ++r) {
    std::vector<std::vector<Cx>> mat(rows_per_block[r],
                                     std::vector<Cx>(family.blocks[r].size()));
    for (auto& row : mat)
      for (auto& v : row) {
        if (kind == CoeffKind::int_range) {
          v = Cx(double(d(rng)), 0.0);
        } else {
          double re = g(rng), im = g(rng);
          v = Cx(re, im);
        }
      }
    sys.coefficients.push_back(std::move(mat));
  }
  sys.validate();
  return sys;
}

std::vector<std::vector<std::vector<Cx>>> gr36_special_coefficients() {
  static const int rows[9][20] = {
      {4, 1, 3, 0, 8, -5, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {-3, 5, 5, 0, -8, 9, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {8, 6, -8, -10, -4, 10, 9, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, -10, -2, 4, 7, 7, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 8, -7, 6, 10, 2, 10, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, -1, 3, -9, 8, 2, 2, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5, 8, 5, -9, -10, 8, 6},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -7, 5, 0, 4, 9, -2, -4},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4, -2, -2, 1, -2, -9, 1}};
  std::vector<std::vector<Cx>> mat(9, std::vector<Cx>(20));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 20; ++j) mat[i][j] = Cx(double(rows[i][j]), 0.0);
  return {mat};
}

}  // namespace sagbihom
