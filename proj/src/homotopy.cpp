#include "sagbihom/homotopy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace sagbihom {

namespace {

struct SeedStream {
  std::uint64_t base;
  std::uint64_t sub(std::uint64_t k) const {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

Cx unimodular(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(1.0, 2.0 * std::acos(-1.0) * u(rng));
}

Cx gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double re = g(rng), im = g(rng);
  return Cx(re, im);
}

double t_now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

CtxPtr ext_of(const CtxPtr& ctx, std::size_t& t_index) {
  std::string name = "t";
  while (ctx->index_of(name)) name = "_" + name;
  t_index = ctx->size();
  return VariableContext::extend_with_parameter(ctx, name);
}

CPoly support_poly(const CtxPtr& ctx, const SupportSet& s, const std::vector<Cx>& row) {
  std::vector<Term<Cx>> terms;
  for (std::size_t p = 0; p < s.points.size(); ++p)
    if (row[p] != Cx(0, 0)) terms.push_back({row[p], s.points[p]});
  return CPoly::from_terms(ctx, std::move(terms));
}

/// Folds blocks of polynomials and their combination rows into semimixed
/// support data: support r holds block r's distinct monomials, row e's entry
/// at a point accumulates c_ej times that generator's coefficient there.
void fold_blocks(const std::vector<std::vector<CPoly>>& blocks,
                 const std::vector<std::vector<std::vector<Cx>>>& coeffs,
                 std::vector<SupportSet>& supports, std::vector<SupportRows>& rows) {
  supports.clear();
  rows.clear();
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    std::map<ExponentVec, std::size_t, GrlexGreater> index;
    for (const auto& g : blocks[r])
      for (const auto& t : g.terms()) index.emplace(t.exp, 0);
    SupportSet s;
    s.multiplicity = static_cast<int>(coeffs[r].size());
    for (auto& [e, idx] : index) {
      idx = s.points.size();
      s.points.push_back(e);
    }
    SupportRows block_rows;
    for (const auto& crow : coeffs[r]) {
      std::vector<Cx> row(s.points.size(), Cx(0, 0));
      for (std::size_t j = 0; j < blocks[r].size(); ++j)
        for (const auto& t : blocks[r][j].terms()) row[index[t.exp]] += crow[j] * t.coeff;
      block_rows.push_back(std::move(row));
    }
    supports.push_back(std::move(s));
    rows.push_back(std::move(block_rows));
  }
}

SolutionSet merge_sets(std::vector<SolutionSet> parts, double dedup_tol) {
  SolutionSet out;
  auto close = [&](const VectorXcd& a, const VectorXcd& b) {
    return (a - b).lpNorm<Eigen::Infinity>() <= dedup_tol;
  };
  for (auto& p : parts) {
    out.paths_tracked += p.paths_tracked;
    out.successes += p.successes;
    out.diverged += p.diverged;
    out.singular += p.singular;
    out.step_failures += p.step_failures;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      bool merged = false;
      for (std::size_t k = 0; k < out.points.size(); ++k)
        if (close(out.points[k], p.points[i])) {
          if (p.residuals[i] < out.residuals[k]) {
            out.points[k] = p.points[i];
            out.residuals[k] = p.residuals[i];
          }
          merged = true;
          break;
        }
      if (!merged) {
        out.points.push_back(p.points[i]);
        out.residuals.push_back(p.residuals[i]);
      }
    }
    for (auto& sp : p.singular_points) {
      bool merged = false;
      for (const auto& q : out.singular_points)
        if (close(q, sp)) {
          merged = true;
          break;
        }
      if (!merged) out.singular_points.push_back(sp);
    }
  }
  auto lex = [](const VectorXcd& a, const VectorXcd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
      if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
  };
  std::vector<std::size_t> order(out.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return lex(out.points[i], out.points[j]); });
  std::vector<VectorXcd> pts;
  std::vector<double> res;
  for (std::size_t i : order) {
    pts.push_back(out.points[i]);
    res.push_back(out.residuals[i]);
  }
  out.points = std::move(pts);
  out.residuals = std::move(res);
  std::sort(out.singular_points.begin(), out.singular_points.end(), lex);
  out.real_count = 0;
  for (const auto& p : out.points)
    if (is_real_point(p)) ++out.real_count;
  out.singular_real_count = 0;
  for (const auto& p : out.singular_points)
    if (is_real_point(p)) ++out.singular_real_count;
  return out;
}

SparseHomotopy cell_homotopy(const std::vector<SupportSet>& supports,
                             const std::vector<SupportRows>& rows, const MixedCell& cell,
                             const Lifting& lifting) {
  std::vector<std::vector<Rat>> expo(supports.size());
  Rat min_pos(0);
  bool have_pos = false;
  for (std::size_t r = 0; r < supports.size(); ++r) {
    expo[r].resize(supports[r].points.size());
    for (std::size_t p = 0; p < supports[r].points.size(); ++p) {
      Rat e = Rat(lifting.values[r][p]) - cell.level[r];
      for (std::size_t i = 0; i < cell.gamma.size(); ++i)
        e += cell.gamma[i] * supports[r].points[p][i];
      expo[r][p] = e;
      if (e > 0 && (!have_pos || e < min_pos)) {
        min_pos = e;
        have_pos = true;
      }
    }
  }
  std::vector<std::vector<SparseHomotopy::TermData>> eqs;
  for (std::size_t r = 0; r < supports.size(); ++r) {
    for (const auto& row : rows[r]) {
      std::vector<SparseHomotopy::TermData> eq;
      for (std::size_t p = 0; p < supports[r].points.size(); ++p) {
        if (row[p] == Cx(0, 0)) continue;
        Rat e = expo[r][p];
        double se = 0.0;
        if (e > 0) se = (e / min_pos).convert_to<double>();  // positive exponents >= 1
        eq.push_back({row[p], supports[r].points[p], se});
      }
      eqs.push_back(std::move(eq));
    }
  }
  return SparseHomotopy(std::move(eqs));
}

std::pair<Cx, double> eval_scaled(const CPoly& p, const std::vector<Cx>& pt) {
  Cx acc(0, 0);
  double scale = 0.0;
  for (const auto& t : p.terms()) {
    Cx v = t.coeff;
    for (std::size_t k = 0; k < pt.size(); ++k)
      if (t.exp[k] != 0) v *= detail::pow_int(pt[k], t.exp[k]);
    acc += v;
    scale += std::abs(v);
  }
  return {acc, scale};
}

bool vanishes(const CPoly& p, const std::vector<Cx>& pt, double tol) {
  auto [v, scale] = eval_scaled(p, pt);
  return std::abs(v) <= tol * (1.0 + scale);
}

std::vector<Cx> to_point(const VectorXcd& x) {
  std::vector<Cx> pt(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) pt[i] = x(i);
  return pt;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParameterizedSystem
// ---------------------------------------------------------------------------

std::size_t ParameterizedSystem::num_equations() const {
  std::size_t n = 0;
  for (const auto& c : coefficients) n += c.size();
  return n;
}

std::vector<int> ParameterizedSystem::equations_per_block() const {
  std::vector<int> v;
  for (const auto& c : coefficients) v.push_back(static_cast<int>(c.size()));
  return v;
}

void ParameterizedSystem::validate() const {
  family.validate();
  if (coefficients.size() != family.blocks.size())
    throw std::invalid_argument("one coefficient matrix per block required");
  for (std::size_t r = 0; r < coefficients.size(); ++r)
    for (const auto& row : coefficients[r])
      if (row.size() != family.blocks[r].size())
        throw std::invalid_argument("coefficient row length must match the block size");
  if (num_equations() != family.ctx->size())
    throw std::invalid_argument("system must be square (equations = variables)");
}

std::vector<CPoly> target_equations(const ParameterizedSystem& sys) {
  std::vector<CPoly> eqs;
  for (std::size_t r = 0; r < sys.family.blocks.size(); ++r) {
    std::vector<CPoly> gens;
    for (const auto& g : sys.family.blocks[r]) gens.push_back(to_cpoly(g));
    for (const auto& row : sys.coefficients[r]) {
      CPoly f = CPoly::zero(sys.family.ctx);
      for (std::size_t j = 0; j < gens.size(); ++j) f += row[j] * gens[j];
      eqs.push_back(std::move(f));
    }
  }
  return eqs;
}

// ---------------------------------------------------------------------------
// Homotopy system builders
// ---------------------------------------------------------------------------

SagbiHomotopySystem build_sagbi_homotopy(const ParameterizedSystem& sys,
                                         const WeightVector& w) {
  sys.validate();
  SagbiHomotopySystem H;
  H.weight = w;
  H.provenance = "two-step";
  H.ext = ext_of(sys.family.ctx, H.t_index);
  for (const auto& block : sys.family.blocks) {
    std::vector<QPoly> hb;
    for (const auto& g : block) hb.push_back(homogenize(g, w, H.ext, H.t_index));
    H.homogenized_blocks.push_back(std::move(hb));
  }
  for (std::size_t r = 0; r < sys.coefficients.size(); ++r) {
    for (const auto& row : sys.coefficients[r]) {
      CPoly f = CPoly::zero(H.ext);
      for (std::size_t j = 0; j < H.homogenized_blocks[r].size(); ++j)
        f += row[j] * to_cpoly(H.homogenized_blocks[r][j]);
      H.equations.push_back(std::move(f));
    }
  }
  return H;
}

LeaderFold fold_leaders(const SagbiFamily& family, const WeightVector& w,
                        const std::vector<int>& multiplicities) {
  if (multiplicities.size() != family.blocks.size())
    throw std::invalid_argument("one multiplicity per block required");
  LeaderFold fold;
  for (std::size_t r = 0; r < family.blocks.size(); ++r) {
    std::map<ExponentVec, std::size_t, GrlexGreater> index;
    std::vector<Term<Rat>> leads;
    for (const auto& g : family.blocks[r]) {
      Term<Rat> t = initial_term(g, w);
      index.emplace(t.exp, 0);
      leads.push_back(std::move(t));
    }
    SupportSet s;
    s.multiplicity = multiplicities[r];
    for (auto& [e, idx] : index) {
      idx = s.points.size();
      s.points.push_back(e);
    }
    std::vector<std::size_t> pog;
    std::vector<Rat> lc;
    for (const auto& t : leads) {
      pog.push_back(index[t.exp]);
      lc.push_back(t.coeff);
    }
    fold.supports.push_back(std::move(s));
    fold.point_of_gen.push_back(std::move(pog));
    fold.lead_coeff.push_back(std::move(lc));
  }
  return fold;
}

SagbiHomotopySystem build_one_step_homotopy(const ParameterizedSystem& sys,
                                            const WeightVector& w, const LeaderFold& fold,
                                            const MixedCell& cell, const Lifting& lifting) {
  sys.validate();
  SagbiHomotopySystem H;
  H.weight = w;
  H.provenance = "one-step";
  H.ext = ext_of(sys.family.ctx, H.t_index);

  // lifted cell exponent of each generator's leading point, cleared to
  // integers by the cell's common denominator
  std::vector<std::vector<Rat>> gen_exp(sys.family.blocks.size());
  Zint denom = 1;
  for (std::size_t r = 0; r < sys.family.blocks.size(); ++r) {
    for (std::size_t j = 0; j < sys.family.blocks[r].size(); ++j) {
      std::size_t p = fold.point_of_gen[r][j];
      Rat e = Rat(lifting.values[r][p]) - cell.level[r];
      for (std::size_t i = 0; i < cell.gamma.size(); ++i)
        e += cell.gamma[i] * fold.supports[r].points[p][i];
      if (e < 0) throw std::logic_error("negative cell exponent");
      gen_exp[r].push_back(e);
      denom = lcm(denom, denominator(e));
    }
  }

  for (const auto& block : sys.family.blocks) {
    std::vector<QPoly> hb;
    for (const auto& g : block) hb.push_back(homogenize(g, w, H.ext, H.t_index));
    H.homogenized_blocks.push_back(std::move(hb));
  }
  for (std::size_t r = 0; r < sys.coefficients.size(); ++r) {
    for (const auto& row : sys.coefficients[r]) {
      CPoly f = CPoly::zero(H.ext);
      for (std::size_t j = 0; j < H.homogenized_blocks[r].size(); ++j) {
        Zint e = numerator(gen_exp[r][j]) * (denom / denominator(gen_exp[r][j]));
        ExponentVec texp(H.ext->size(), 0);
        texp[H.t_index] = e.convert_to<int>();
        CPoly tpow = CPoly::monomial(H.ext, Cx(1, 0), texp);
        f += row[j] * (tpow * to_cpoly(H.homogenized_blocks[r][j]));
      }
      H.equations.push_back(std::move(f));
    }
  }
  return H;
}

// ---------------------------------------------------------------------------
// sparse_solve
// ---------------------------------------------------------------------------

SparseSolveResult sparse_solve(const std::vector<SupportSet>& supports,
                               const std::vector<SupportRows>& rows, bool rows_are_generic,
                               const CtxPtr& xctx, std::uint64_t seed, int threads) {
  SeedStream ss{seed};
  SparseSolveResult out;

  std::vector<MixedCell> cells;
  Lifting lifting;
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    lifting = draw_lifting(supports, ss.sub(100 + attempt));
    try {
      cells = mixed_cells(supports, lifting);
      ok = true;
    } catch (const DegenerateLifting&) {
    }
  }
  if (!ok) throw std::runtime_error("could not find a generic lifting in 10 attempts");
  out.lifting_seed = lifting.seed;
  out.cells = static_cast<int>(cells.size());
  out.volume = 0;
  for (const auto& c : cells) out.volume += c.volume;
  if (cells.empty()) return out;

  std::vector<SupportRows> gen_rows;
  if (rows_are_generic) {
    gen_rows = rows;
  } else {
    std::mt19937_64 rng(ss.sub(7));
    gen_rows.resize(supports.size());
    for (std::size_t r = 0; r < supports.size(); ++r) {
      gen_rows[r].assign(supports[r].multiplicity,
                         std::vector<Cx>(supports[r].points.size()));
      for (auto& row : gen_rows[r])
        for (auto& v : row) v = gaussian(rng);
    }
  }

  auto starts = start_solutions(supports, gen_rows, cells);

  std::vector<CPoly> gen_eqs;
  for (std::size_t r = 0; r < supports.size(); ++r)
    for (const auto& row : gen_rows[r]) gen_eqs.push_back(support_poly(xctx, supports[r], row));
  CSystem gen_sys(gen_eqs);

  TrackerConfig cfg;
  cfg.threads = threads;

  std::vector<SolutionSet> parts;
  for (const auto& cs : starts) {
    SparseHomotopy H = cell_homotopy(supports, gen_rows, cs.cell, lifting);
    std::vector<VectorXcd> st;
    for (const auto& s : cs.solutions) {
      VectorXcd v(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) v(i) = s[i];
      st.push_back(std::move(v));
    }
    parts.push_back(track_all(H, st, gen_sys, cfg));
  }
  SolutionSet generic_set = merge_sets(std::move(parts), cfg.dedup_tol);

  if (rows_are_generic) {
    out.set = std::move(generic_set);
    return out;
  }

  // coefficient-parameter homotopy from the generic rows to zeta * rows
  std::mt19937_64 rng(ss.sub(8));
  Cx zeta = unimodular(rng);
  std::size_t t_index = 0;
  CtxPtr ext = ext_of(xctx, t_index);
  ExponentVec texp(ext->size(), 0);
  texp[t_index] = 1;
  CPoly tvar = CPoly::monomial(ext, Cx(1, 0), texp);

  std::vector<CPoly> path_eqs, target_eqs;
  for (std::size_t r = 0; r < supports.size(); ++r) {
    for (std::size_t e = 0; e < rows[r].size(); ++e) {
      std::vector<Cx> delta(rows[r][e].size());
      for (std::size_t p = 0; p < delta.size(); ++p)
        delta[p] = zeta * rows[r][e][p] - gen_rows[r][e][p];
      CPoly base = lift_to_context(support_poly(xctx, supports[r], gen_rows[r][e]), ext);
      CPoly step = lift_to_context(support_poly(xctx, supports[r], delta), ext);
      path_eqs.push_back(base + tvar * step);
      target_eqs.push_back(support_poly(xctx, supports[r], rows[r][e]));
    }
  }
  PolyHomotopy H2(path_eqs, t_index, PolyHomotopy::Path::identity, Cx(1, 0));
  CSystem target(target_eqs);
  out.set = track_all(H2, generic_set.points, target, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// degree computations and base locus
// ---------------------------------------------------------------------------

std::optional<Zint> compute_degree_monomial_map(const SagbiFamily& family,
                                                const WeightVector& w) {
  const std::size_t n = family.ctx->size();
  std::vector<ExponentVec> cols;
  for (const auto& block : family.blocks) {
    ExponentVec base = initial_term(block[0], w).exp;
    for (std::size_t j = 1; j < block.size(); ++j) {
      ExponentVec d = initial_term(block[j], w).exp;
      for (std::size_t i = 0; i < n; ++i) d[i] -= base[i];
      cols.push_back(std::move(d));
    }
  }
  if (cols.empty()) return std::nullopt;
  ZMat m(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
  return lattice_index(m);
}

namespace {

struct CoreOutput {
  SolutionSet set;
  Zint volume;
};

/// Two-step solve with the given coefficient rows: sparse start solve at
/// t = 0, then the deformation homotopy to t = 1.
CoreOutput two_step_core(const ParameterizedSystem& sys, const WeightVector& w,
                         std::uint64_t seed, int threads, bool rows_generic) {
  SeedStream ss{seed};
  LeaderFold fold = fold_leaders(sys.family, w, sys.equations_per_block());

  std::vector<SupportRows> rows(fold.supports.size());
  for (std::size_t r = 0; r < fold.supports.size(); ++r) {
    rows[r].assign(fold.supports[r].multiplicity,
                   std::vector<Cx>(fold.supports[r].points.size(), Cx(0, 0)));
    for (std::size_t e = 0; e < sys.coefficients[r].size(); ++e)
      for (std::size_t j = 0; j < sys.coefficients[r][e].size(); ++j)
        rows[r][e][fold.point_of_gen[r][j]] +=
            sys.coefficients[r][e][j] * fold.lead_coeff[r][j].convert_to<double>();
  }

  SparseSolveResult start =
      sparse_solve(fold.supports, rows, rows_generic, sys.family.ctx, ss.sub(11), threads);

  CoreOutput out;
  out.volume = start.volume;

  SagbiHomotopySystem H = build_sagbi_homotopy(sys, w);
  std::mt19937_64 rng(ss.sub(12));
  PolyHomotopy path(H.equations, H.t_index, PolyHomotopy::Path::gamma_arc, unimodular(rng));
  CSystem target(target_equations(sys));
  TrackerConfig cfg;
  cfg.threads = threads;
  out.set = track_all(path, start.set.points, target, cfg);
  return out;
}

}  // namespace

DegreeMapResult compute_degree_map(const SagbiFamily& family,
                                   const std::vector<int>& multiplicities, std::uint64_t seed,
                                   int threads) {
  SeedStream ss{seed};
  const std::size_t n = family.ctx->size();
  std::mt19937_64 rng(ss.sub(1));

  std::vector<std::vector<CPoly>> cgens(family.blocks.size());
  for (std::size_t r = 0; r < family.blocks.size(); ++r)
    for (const auto& g : family.blocks[r]) cgens[r].push_back(to_cpoly(g));

  // one generic solve on the full supports, reused by every fiber trial;
  // the full polyhedral route sees all isolated torus solutions even when
  // the monomial-map degree drops
  std::vector<std::vector<std::vector<Cx>>> generic(family.blocks.size());
  for (std::size_t r = 0; r < family.blocks.size(); ++r) {
    generic[r].assign(multiplicities[r], std::vector<Cx>(family.blocks[r].size()));
    for (auto& row : generic[r])
      for (auto& v : row) v = gaussian(rng);
  }
  std::vector<SupportSet> supports;
  std::vector<SupportRows> grows;
  fold_blocks(cgens, generic, supports, grows);
  SparseSolveResult gen = sparse_solve(supports, grows, false, family.ctx, ss.sub(2), threads);

  std::size_t t_index = 0;
  CtxPtr ext = ext_of(family.ctx, t_index);
  ExponentVec texp(ext->size(), 0);
  texp[t_index] = 1;
  CPoly tvar = CPoly::monomial(ext, Cx(1, 0), texp);
  TrackerConfig cfg;
  cfg.threads = threads;

  DegreeMapResult res;
  for (int trial = 0; trial < 3; ++trial) {
    std::mt19937_64 trng(ss.sub(10 + trial));
    std::vector<Cx> xstar(n);
    for (auto& v : xstar) v = gaussian(trng);
    // fiber equations lambda . { b_j(x) b_0(x*) - b_0(x) b_j(x*) } per block
    std::vector<std::vector<std::vector<Cx>>> fiber(family.blocks.size());
    std::vector<std::vector<Cx>> values(family.blocks.size());
    for (std::size_t r = 0; r < family.blocks.size(); ++r) {
      for (const auto& g : cgens[r]) values[r].push_back(g.evaluate(xstar));
      fiber[r].assign(multiplicities[r], std::vector<Cx>(family.blocks[r].size(), Cx(0, 0)));
      for (auto& row : fiber[r]) {
        for (std::size_t j = 1; j < family.blocks[r].size(); ++j) {
          Cx lambda = gaussian(trng);
          row[j] += lambda * values[r][0];
          row[0] -= lambda * values[r][j];
        }
      }
    }
    Cx zeta = unimodular(trng);
    std::vector<CPoly> path_eqs, target_eqs;
    for (std::size_t r = 0; r < family.blocks.size(); ++r) {
      for (int e = 0; e < multiplicities[r]; ++e) {
        CPoly base = CPoly::zero(family.ctx), tgt = CPoly::zero(family.ctx);
        for (std::size_t j = 0; j < cgens[r].size(); ++j) {
          base += generic[r][e][j] * cgens[r][j];
          tgt += fiber[r][e][j] * cgens[r][j];
        }
        CPoly delta = zeta * tgt - base;
        path_eqs.push_back(lift_to_context(base, ext) + tvar * lift_to_context(delta, ext));
        target_eqs.push_back(tgt);
      }
    }
    PolyHomotopy H(path_eqs, t_index, PolyHomotopy::Path::identity, Cx(1, 0));
    CSystem target(target_eqs);
    SolutionSet set = track_all(H, gen.set.points, target, cfg);

    int count = 0;
    for (const auto& p : set.points) {
      std::vector<Cx> pt = to_point(p);
      bool on_fiber = true;
      for (std::size_t r = 0; r < family.blocks.size() && on_fiber; ++r) {
        // the map must be defined at the point: some generator nonzero
        double mx = 0, scale = 0;
        std::vector<Cx> vals;
        for (const auto& g : cgens[r]) {
          auto [v, s] = eval_scaled(g, pt);
          vals.push_back(v);
          mx = std::max(mx, std::abs(v));
          scale = std::max(scale, s);
        }
        if (mx <= 1e-6 * (1.0 + scale)) {
          on_fiber = false;
          break;
        }
        // rank-1 against the base point values
        for (std::size_t j = 0; j < vals.size() && on_fiber; ++j)
          for (std::size_t l = j + 1; l < vals.size(); ++l) {
            Cx minor = vals[j] * values[r][l] - vals[l] * values[r][j];
            double ms = std::abs(vals[j] * values[r][l]) + std::abs(vals[l] * values[r][j]);
            if (std::abs(minor) > 1e-6 * (1.0 + ms)) {
              on_fiber = false;
              break;
            }
          }
      }
      if (on_fiber) ++count;
    }
    res.trial_counts.push_back(count);
  }

  for (int c : res.trial_counts) {
    int votes = 0;
    for (int d : res.trial_counts)
      if (c == d) ++votes;
    if (votes >= 2) {
      res.degree = c;
      break;
    }
  }
  return res;
}

BaseLocusResult compute_base_locus(const SagbiFamily& family, std::uint64_t seed,
                                   int threads) {
  SeedStream ss{seed};
  const std::size_t n = family.ctx->size();
  BaseLocusResult out;
  auto close = [](const VectorXcd& a, const VectorXcd& b) {
    return (a - b).lpNorm<Eigen::Infinity>() <= 1e-6;
  };

  for (std::size_t r = 0; r < family.blocks.size(); ++r) {
    std::vector<CPoly> cgens;
    for (const auto& g : family.blocks[r]) cgens.push_back(to_cpoly(g));

    std::vector<std::vector<VectorXcd>> draws;
    for (int d = 0; d < 2; ++d) {
      std::mt19937_64 rng(ss.sub(50 + 2 * r + d));
      std::vector<std::vector<Cx>> lambda(n, std::vector<Cx>(cgens.size()));
      for (auto& row : lambda)
        for (auto& v : row) v = gaussian(rng);
      std::vector<SupportSet> supports;
      std::vector<SupportRows> rows;
      fold_blocks({cgens}, {lambda}, supports, rows);
      std::vector<VectorXcd> pts;
      if (supports[0].points.size() >= n + 1) {
        try {
          SparseSolveResult res =
              sparse_solve(supports, rows, false, family.ctx, ss.sub(70 + 2 * r + d), threads);
          for (const auto& p : res.set.points) {
            std::vector<Cx> pt = to_point(p);
            bool all_zero = true;
            for (const auto& g : cgens)
              if (!vanishes(g, pt, 1e-6)) {
                all_zero = false;
                break;
              }
            if (all_zero) pts.push_back(p);
          }
        } catch (const std::exception&) {
          // deficient block; contributes no isolated torus points
        }
      }
      draws.push_back(std::move(pts));
    }
    if (draws[0].size() != draws[1].size()) out.positive_dimensional_warning = true;
    for (const auto& p : draws[0]) {
      bool stable = false;
      for (const auto& q : draws[1])
        if (close(p, q)) {
          stable = true;
          break;
        }
      if (!stable) continue;
      bool dup = false;
      for (const auto& q : out.points)
        if (close(p, q)) {
          dup = true;
          break;
        }
      if (!dup) out.points.push_back(p);
    }
  }
  return out;
}

int count_solutions_at_t(const ParameterizedSystem& sys, const WeightVector& w, Cx t_star,
                         std::uint64_t seed, int threads) {
  SagbiHomotopySystem H = build_sagbi_homotopy(sys, w);
  std::vector<std::vector<CPoly>> blocks(sys.family.blocks.size());
  for (std::size_t r = 0; r < H.homogenized_blocks.size(); ++r) {
    for (const auto& hq : H.homogenized_blocks[r]) {
      CPoly hc = to_cpoly(hq).substitute(H.t_index, t_star);
      std::vector<Term<Cx>> terms;
      for (const auto& t : hc.terms()) {
        ExponentVec e(t.exp.begin(), t.exp.end() - 1);
        terms.push_back({t.coeff, std::move(e)});
      }
      blocks[r].push_back(CPoly::from_terms(sys.family.ctx, std::move(terms)));
    }
  }
  std::vector<SupportSet> supports;
  std::vector<SupportRows> rows;
  fold_blocks(blocks, sys.coefficients, supports, rows);
  SparseSolveResult res = sparse_solve(supports, rows, false, sys.family.ctx, seed, threads);
  return static_cast<int>(res.set.points.size());
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

SolveResult solve(const ParameterizedSystem& sys, const SolveOptions& opts) {
  sys.validate();
  SeedStream ss{opts.seed};
  SolveResult out;
  out.seed = opts.seed;
  out.method = opts.one_step ? "one-step" : "two-step";

  double t0 = t_now();
  WeightVector w;
  if (opts.weight) {
    w = *opts.weight;
    if (w.w.size() != sys.family.ctx->size())
      throw std::invalid_argument("weight length must match the variable count");
    out.certificate = sagbi_check(sys.family, w);
    if (!out.certificate.verified) {
      if (!opts.force)
        throw std::runtime_error("the supplied weight fails the SAGBI criterion (" +
                                 out.certificate.failing_relation +
                                 "); use --force to proceed anyway");
      out.warnings.push_back(
          "proceeding with an unverified weight; solution counts are not guaranteed");
    }
  } else {
    DetectResult d = detect_weight(sys.family, opts.detect);
    if (!d.weight)
      throw std::runtime_error(d.budget_exhausted
                                   ? "weight detection budget exhausted"
                                   : "no weight realizes a SAGBI basis for this family");
    w = *d.weight;
    out.certificate = d.certificate;
  }
  out.time_detection = t_now() - t0;

  if (opts.degree_check) {
    out.degree_report.deg_phi0 = compute_degree_monomial_map(sys.family, w);
    DegreeMapResult dm =
        compute_degree_map(sys.family, sys.equations_per_block(), ss.sub(3), opts.threads);
    out.degree_report.deg_phi = dm.degree;
    if (!dm.degree)
      out.warnings.push_back("parameterization degree undetermined (unstable fiber counts)");
    if (out.degree_report.deg_phi0 && out.degree_report.deg_phi &&
        Zint(*out.degree_report.deg_phi) > *out.degree_report.deg_phi0) {
      out.degree_report.degree_drop = true;
      std::ostringstream os;
      os << "degree of monomial parameterization drops from " << *out.degree_report.deg_phi
         << " to " << *out.degree_report.deg_phi0
         << "; SAGBI homotopy will not find all the solutions";
      out.degree_report.warning = os.str();
      out.warnings.push_back(os.str());
    }
  }

  CSystem target(target_equations(sys));
  TrackerConfig cfg;
  cfg.threads = opts.threads;

  double t1 = t_now();
  if (opts.vary_linear_part) {
    // solve a generic copy of the linear part, then deform the coefficients
    // along zeta t C + (1 - t) C_hat
    std::mt19937_64 rng(ss.sub(21));
    ParameterizedSystem generic;
    generic.family = sys.family;
    generic.coefficients.resize(sys.coefficients.size());
    for (std::size_t r = 0; r < sys.coefficients.size(); ++r) {
      generic.coefficients[r].assign(sys.coefficients[r].size(),
                                     std::vector<Cx>(sys.family.blocks[r].size()));
      for (auto& row : generic.coefficients[r])
        for (auto& v : row) v = gaussian(rng);
    }
    CoreOutput gen = two_step_core(generic, w, ss.sub(22), opts.threads, true);
    out.start_mixed_volume = gen.volume;
    out.time_start = t_now() - t1;

    double t2 = t_now();
    Cx zeta = unimodular(rng);
    std::size_t t_index = 0;
    CtxPtr ext = ext_of(sys.family.ctx, t_index);
    ExponentVec texp(ext->size(), 0);
    texp[t_index] = 1;
    CPoly tvar = CPoly::monomial(ext, Cx(1, 0), texp);
    std::vector<CPoly> path_eqs;
    for (std::size_t r = 0; r < sys.coefficients.size(); ++r) {
      for (std::size_t e = 0; e < sys.coefficients[r].size(); ++e) {
        CPoly base = CPoly::zero(sys.family.ctx), tgt = CPoly::zero(sys.family.ctx);
        for (std::size_t j = 0; j < sys.family.blocks[r].size(); ++j) {
          CPoly g = to_cpoly(sys.family.blocks[r][j]);
          base += generic.coefficients[r][e][j] * g;
          tgt += sys.coefficients[r][e][j] * g;
        }
        CPoly delta = zeta * tgt - base;
        path_eqs.push_back(lift_to_context(base, ext) + tvar * lift_to_context(delta, ext));
      }
    }
    PolyHomotopy H(path_eqs, t_index, PolyHomotopy::Path::identity, Cx(1, 0));
    out.solutions = track_all(H, gen.set.points, target, cfg);
    out.time_tracking = t_now() - t2;
  } else if (opts.one_step) {
    LeaderFold fold = fold_leaders(sys.family, w, sys.equations_per_block());
    std::vector<SupportRows> rows(fold.supports.size());
    for (std::size_t r = 0; r < fold.supports.size(); ++r) {
      rows[r].assign(fold.supports[r].multiplicity,
                     std::vector<Cx>(fold.supports[r].points.size(), Cx(0, 0)));
      for (std::size_t e = 0; e < sys.coefficients[r].size(); ++e)
        for (std::size_t j = 0; j < sys.coefficients[r][e].size(); ++j)
          rows[r][e][fold.point_of_gen[r][j]] +=
              sys.coefficients[r][e][j] * fold.lead_coeff[r][j].convert_to<double>();
    }
    std::vector<MixedCell> cells;
    Lifting lifting;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      lifting = draw_lifting(fold.supports, ss.sub(200 + attempt));
      try {
        cells = mixed_cells(fold.supports, lifting);
        ok = true;
      } catch (const DegenerateLifting&) {
      }
    }
    if (!ok) throw std::runtime_error("could not find a generic lifting in 10 attempts");
    auto starts = start_solutions(fold.supports, rows, cells);
    out.start_mixed_volume = 0;
    for (const auto& c : cells) out.start_mixed_volume += c.volume;
    out.time_start = t_now() - t1;

    double t2 = t_now();
    std::mt19937_64 rng(ss.sub(23));
    Cx gamma = unimodular(rng);
    std::vector<SolutionSet> parts;
    for (const auto& cs : starts) {
      SagbiHomotopySystem H = build_one_step_homotopy(sys, w, fold, cs.cell, lifting);
      PolyHomotopy path(H.equations, H.t_index, PolyHomotopy::Path::gamma_arc, gamma);
      std::vector<VectorXcd> st;
      for (const auto& s : cs.solutions) {
        VectorXcd v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v(i) = s[i];
        st.push_back(std::move(v));
      }
      parts.push_back(track_all(path, st, target, cfg));
    }
    out.solutions = merge_sets(std::move(parts), cfg.dedup_tol);
    out.time_tracking = t_now() - t2;
  } else {
    CoreOutput core = two_step_core(sys, w, ss.sub(24), opts.threads, false);
    out.start_mixed_volume = core.volume;
    out.solutions = core.set;
    out.time_tracking = t_now() - t1;
  }

  if (opts.get_base_locus) {
    BaseLocusResult bl = compute_base_locus(sys.family, ss.sub(31), opts.threads);
    if (bl.positive_dimensional_warning)
      out.warnings.push_back(
          "base locus appears positive-dimensional; only stable isolated points were kept");
    std::vector<CPoly> teqs = target_equations(sys);
    std::vector<SolutionSet> merged{out.solutions};
    SolutionSet extra;
    for (const auto& p : bl.points) {
      std::vector<Cx> pt = to_point(p);
      bool solves = true;
      for (const auto& f : teqs)
        if (!vanishes(f, pt, 1e-6)) {
          solves = false;
          break;
        }
      if (!solves) continue;
      NewtonResult polished = newton_polish(target, p, cfg.newton_tol, 15);
      extra.points.push_back(polished.converged ? polished.point : p);
      extra.residuals.push_back(polished.residual);
      ++extra.successes;
    }
    merged.push_back(extra);
    int paths = out.solutions.paths_tracked;
    out.solutions = merge_sets(std::move(merged), cfg.dedup_tol);
    out.solutions.paths_tracked = paths;
  }

  // expected count from deg(phi) deg(X) = deg(phi0) deg(X0); the start
  // volume counts deg(phi0) deg(X0)
  if (out.degree_report.deg_phi0 && out.degree_report.deg_phi &&
      *out.degree_report.deg_phi0 > 0 && out.start_mixed_volume > 0) {
    Zint num = Zint(*out.degree_report.deg_phi) * out.start_mixed_volume;
    if (num % *out.degree_report.deg_phi0 == 0)
      out.degree_report.expected_count = num / *out.degree_report.deg_phi0;
  }
  return out;
}

}  // namespace sagbihom
