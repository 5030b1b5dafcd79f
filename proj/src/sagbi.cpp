#include "sagbihom/sagbi.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace sagbihom {

const QPoly& SagbiFamily::generator(std::size_t flat) const {
  for (const auto& b : blocks) {
    if (flat < b.size()) return b[flat];
    flat -= b.size();
  }
  throw std::out_of_range("generator index");
}

std::size_t SagbiFamily::block_of(std::size_t flat) const {
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    if (flat < blocks[r].size()) return r;
    flat -= blocks[r].size();
  }
  throw std::out_of_range("generator index");
}

void SagbiFamily::validate() const {
  if (!ctx) throw std::invalid_argument("family without context");
  if (blocks.empty()) throw std::invalid_argument("family needs at least one block");
  for (const auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("empty generator block");
    for (const auto& p : b) {
      if (p.is_zero()) throw std::invalid_argument("zero generator");
      if (!same_context(p.context(), ctx)) throw std::invalid_argument("mixed variable contexts");
    }
  }
}

std::string SagbiFamily::signature() const {
  std::ostringstream os;
  for (const auto& n : ctx->names()) os << n << ",";
  for (const auto& b : blocks) {
    os << "|";
    for (const auto& p : b) os << p.to_string() << ";";
  }
  return os.str();
}

SagbiFamily make_family(CtxPtr ctx, std::vector<std::vector<QPoly>> blocks) {
  SagbiFamily f{std::move(ctx), std::move(blocks)};
  f.validate();
  return f;
}

std::int64_t weight_dot(const WeightVector& w, const ExponentVec& e) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < e.size(); ++i) s += w.w[i] * e[i];
  return s;
}

Term<Rat> initial_term(const QPoly& p, const WeightVector& w) {
  if (p.is_zero()) throw std::invalid_argument("initial term of zero polynomial");
  if (w.w.size() != p.nvars()) throw std::invalid_argument("weight dimension mismatch");
  const auto& ts = p.terms();
  std::size_t best = 0;
  std::int64_t bv = weight_dot(w, ts[0].exp);
  bool tie = false;
  ExponentVec tied;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    std::int64_t v = weight_dot(w, ts[i].exp);
    if (v > bv) {
      bv = v;
      best = i;
      tie = false;
    } else if (v == bv) {
      tie = true;
      tied = ts[i].exp;
    }
  }
  if (tie) throw TieError(ts[best].exp, tied);
  return ts[best];
}

Term<Rat> refined_initial_term(const QPoly& p, const WeightVector& w) {
  if (p.is_zero()) throw std::invalid_argument("initial term of zero polynomial");
  const auto& ts = p.terms();
  std::size_t best = 0;
  std::int64_t bv = weight_dot(w, ts[0].exp);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    std::int64_t v = weight_dot(w, ts[i].exp);
    // terms are stored grlex-descending, so the first maximizer wins ties
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  return ts[best];
}

QPoly homogenize(const QPoly& p, const WeightVector& w, const CtxPtr& ext, std::size_t t_index) {
  Term<Rat> lead = initial_term(p, w);
  const std::int64_t top = weight_dot(w, lead.exp);
  std::vector<Term<Rat>> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    std::int64_t gap = top - weight_dot(w, t.exp);
    Term<Rat> nt{t.coeff, t.exp};
    nt.exp.resize(ext->size(), 0);
    nt.exp[t_index] = static_cast<int>(gap);
    out.push_back(std::move(nt));
  }
  return QPoly::from_terms(ext, std::move(out));
}

// ---------------------------------------------------------------------------
// Binomial Buchberger machinery for lattice/toric ideals.
// Monomials are exponent vectors over the generator index set; every element
// stays a pure difference z^a - z^b throughout.
// ---------------------------------------------------------------------------
namespace {

using Expo = std::vector<int>;

int deg(const Expo& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Graded reverse lexicographic order with a designated cheapest variable.
struct GrevlexOrder {
  std::size_t cheapest;
  // returns true if a > b
  bool greater(const Expo& a, const Expo& b) const {
    int da = deg(a), db = deg(b);
    if (da != db) return da > db;
    // scan from cheapest upwards; larger exponent on a cheaper variable
    // makes the monomial smaller
    const std::size_t k = a.size();
    for (std::size_t step = 0; step < k; ++step) {
      std::size_t i = (cheapest + k - step) % k;
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

struct Bino {
  Expo lead, tail;
};

bool divides(const Expo& d, const Expo& m) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > m[i]) return false;
  return true;
}

bool coprime(const Expo& a, const Expo& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0 && b[i] > 0) return false;
  return true;
}

std::optional<Bino> normalize(Expo a, Expo b, const GrevlexOrder& ord) {
  if (a == b) return std::nullopt;
  if (ord.greater(a, b)) return Bino{std::move(a), std::move(b)};
  return Bino{std::move(b), std::move(a)};
}

/// Full normal form of a binomial; rewrites the leading monomial until
/// irreducible, then the trailing one. Result stays a binomial or vanishes.
std::optional<Bino> normal_form(Bino f, const std::vector<Bino>& G, const GrevlexOrder& ord) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& g : G) {
      if (divides(g.lead, f.lead)) {
        Expo nl = f.lead;
        for (std::size_t i = 0; i < nl.size(); ++i) nl[i] += g.tail[i] - g.lead[i];
        auto nf = normalize(std::move(nl), f.tail, ord);
        if (!nf) return std::nullopt;
        f = std::move(*nf);
        changed = true;
        break;
      }
    }
  }
  // reduce the tail; each rewrite strictly decreases it in the order
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& g : G) {
      if (divides(g.lead, f.tail)) {
        Expo nt = f.tail;
        for (std::size_t i = 0; i < nt.size(); ++i) nt[i] += g.tail[i] - g.lead[i];
        auto nf = normalize(f.lead, std::move(nt), ord);
        if (!nf) return std::nullopt;
        if (!(nf->lead == f.lead)) {
          // tail climbed above the lead; restart lead reduction
          return normal_form(std::move(*nf), G, ord);
        }
        f = std::move(*nf);
        changed = true;
        break;
      }
    }
  }
  return f;
}

/// Buchberger with degree-first pair selection and the Gebauer-Moller
/// criteria; the ideal is homogeneous, so processing pairs by lcm degree
/// keeps the intermediate basis small.
std::vector<Bino> buchberger(std::vector<Bino> gens, const GrevlexOrder& ord) {
  constexpr std::size_t kPairBudget = 500000;
  std::vector<Bino> G;
  struct PairInfo {
    std::size_t i, j;
    Expo lcm;
  };
  std::multimap<int, PairInfo> pending;  // keyed by deg(lcm)

  auto lcm_of = [](const Expo& a, const Expo& b) {
    Expo m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = std::max(a[k], b[k]);
    return m;
  };

  std::function<void(Bino)> add = [&](Bino h) {
    auto r = normal_form(std::move(h), G, ord);
    if (!r) return;
    const std::size_t s = G.size();
    struct Cand {
      std::size_t i;
      Expo lcm;
      bool keep = true;
    };
    std::vector<Cand> cands;
    cands.reserve(s);
    for (std::size_t i = 0; i < s; ++i) cands.push_back({i, lcm_of(G[i].lead, r->lead)});
    // drop candidates whose lcm is strictly divisible by another's
    for (auto& c : cands)
      for (const auto& d : cands) {
        if (&c == &d || !d.keep) continue;
        if (divides(d.lcm, c.lcm) && d.lcm != c.lcm) {
          c.keep = false;
          break;
        }
      }
    // among equal lcms keep a single representative
    for (std::size_t a = 0; a < cands.size(); ++a) {
      if (!cands[a].keep) continue;
      for (std::size_t b = a + 1; b < cands.size(); ++b)
        if (cands[b].keep && cands[b].lcm == cands[a].lcm) cands[b].keep = false;
    }
    // prune old pairs subsumed by the new lead
    for (auto it = pending.begin(); it != pending.end();) {
      const PairInfo& p = it->second;
      if (divides(r->lead, p.lcm) && lcm_of(G[p.i].lead, r->lead) != p.lcm &&
          lcm_of(G[p.j].lead, r->lead) != p.lcm)
        it = pending.erase(it);
      else
        ++it;
    }
    for (auto& c : cands) {
      if (!c.keep || coprime(G[c.i].lead, r->lead)) continue;
      pending.emplace(deg(c.lcm), PairInfo{c.i, s, c.lcm});
    }
    G.push_back(std::move(*r));
  };

  for (auto& g : gens) add(std::move(g));

  std::size_t processed = 0;
  while (!pending.empty()) {
    if (++processed > kPairBudget)
      throw std::runtime_error("binomial Buchberger pair budget exhausted");
    auto it = pending.begin();
    PairInfo p = it->second;
    pending.erase(it);
    Expo sa = p.lcm, sb = p.lcm;
    for (std::size_t k = 0; k < sa.size(); ++k) {
      sa[k] += G[p.i].tail[k] - G[p.i].lead[k];
      sb[k] += G[p.j].tail[k] - G[p.j].lead[k];
    }
    auto s = normalize(std::move(sa), std::move(sb), ord);
    if (!s) continue;
    add(std::move(*s));
  }
  return G;
}

std::vector<Bino> minimalize(std::vector<Bino> G, const GrevlexOrder& ord) {
  std::vector<Bino> kept;
  // drop elements whose normal form against the rest vanishes
  for (std::size_t i = 0; i < G.size(); ++i) {
    std::vector<Bino> rest;
    rest.reserve(G.size() - 1 + kept.size());
    for (std::size_t j = 0; j < G.size(); ++j)
      if (j != i) rest.push_back(G[j]);
    auto r = normal_form(G[i], rest, ord);
    if (!r) {
      G.erase(G.begin() + i);
      --i;
    }
  }
  return G;
}

struct LeaderData {
  std::vector<ExponentVec> exps;   // flat generator leading exponents
  std::vector<Rat> lcs;            // leading coefficients
  std::vector<std::size_t> block;  // flat -> block index
  std::size_t m = 0, n = 0;
};

LeaderData leaders_of(const SagbiFamily& fam, const WeightVector& w) {
  LeaderData L;
  L.m = fam.blocks.size();
  L.n = fam.ctx->size();
  for (std::size_t r = 0; r < fam.blocks.size(); ++r) {
    for (const auto& p : fam.blocks[r]) {
      Term<Rat> t = initial_term(p, w);
      L.exps.push_back(t.exp);
      L.lcs.push_back(t.coeff);
      L.block.push_back(r);
    }
  }
  return L;
}

std::string leaders_key(const LeaderData& L) {
  std::ostringstream os;
  for (std::size_t g = 0; g < L.exps.size(); ++g) {
    os << L.block[g] << ":";
    for (int e : L.exps[g]) os << e << ",";
    os << ";";
  }
  return os.str();
}

std::vector<BinomialRelation> relations_for(const LeaderData& L) {
  const std::size_t K = L.exps.size();
  ZMat A(L.m + L.n, K);
  for (std::size_t g = 0; g < K; ++g) {
    A(L.block[g], g) = 1;
    for (std::size_t i = 0; i < L.n; ++i) A(L.m + i, g) = L.exps[g][i];
  }
  auto kernel = integer_kernel_basis(A);
  std::vector<Bino> G;
  for (const auto& v : kernel) {
    Expo a(K, 0), b(K, 0);
    for (std::size_t g = 0; g < K; ++g) {
      if (v[g] > 0) a[g] = static_cast<int>(v[g]);
      if (v[g] < 0) b[g] = static_cast<int>(-v[g]);
    }
    GrevlexOrder ord{K - 1};
    auto nb = normalize(std::move(a), std::move(b), ord);
    if (nb) G.push_back(std::move(*nb));
  }
  if (G.empty()) return {};
  // saturate by every variable in turn; the lattice basis ideal is
  // standard-graded homogeneous, so dividing a grevlex basis with the
  // variable cheapest computes the saturation
  for (std::size_t i = 0; i < K; ++i) {
    GrevlexOrder ord{i};
    for (auto& g : G) {
      auto ng = normalize(g.lead, g.tail, ord);
      g = *ng;  // nonzero by invariant
    }
    G = buchberger(std::move(G), ord);
    for (auto& g : G) {
      int c = std::min(g.lead[i], g.tail[i]);
      if (c > 0) {
        g.lead[i] -= c;
        g.tail[i] -= c;
      }
    }
    G = minimalize(std::move(G), ord);
  }
  std::vector<BinomialRelation> rels;
  rels.reserve(G.size());
  for (auto& g : G) rels.push_back(BinomialRelation{g.lead, g.tail});
  return rels;
}

std::mutex cache_mutex;
std::map<std::string, std::vector<BinomialRelation>>& relations_cache() {
  static std::map<std::string, std::vector<BinomialRelation>> c;
  return c;
}
std::map<std::string, SagbiCertificate>& check_cache() {
  static std::map<std::string, SagbiCertificate> c;
  return c;
}

std::string check_key(const SagbiFamily& fam, const WeightVector& w) {
  std::ostringstream os;
  os << fam.signature() << "#";
  for (auto v : w.w) os << v << ",";
  return os.str();
}

/// DFS for non-negative counts per generator with fixed per-block totals whose
/// leading exponents sum to the target.
bool factor_search(const LeaderData& L, const std::vector<std::vector<std::size_t>>& by_block,
                   const ExponentVec& target, const std::vector<int>& sdeg,
                   std::vector<int>& counts) {
  struct Frame {
    std::size_t r, pos;
    int left;
  };
  ExponentVec rem = target;
  std::vector<int> work(L.exps.size(), 0);
  std::function<bool(std::size_t, std::size_t, int)> go = [&](std::size_t r, std::size_t pos,
                                                              int left) -> bool {
    if (r == by_block.size()) {
      for (int e : rem)
        if (e != 0) return false;
      counts = work;
      return true;
    }
    if (left == 0) return go(r + 1, 0, r + 1 < by_block.size() ? sdeg[r + 1] : 0);
    if (pos >= by_block[r].size()) return false;
    std::size_t g = by_block[r][pos];
    // max multiplicity of generator g bounded by remaining exponent
    int cap = left;
    for (std::size_t i = 0; i < rem.size(); ++i) {
      if (L.exps[g][i] > 0) cap = std::min(cap, rem[i] / L.exps[g][i]);
      if (cap == 0) break;
    }
    for (int c = cap; c >= 0; --c) {
      for (std::size_t i = 0; i < rem.size(); ++i) rem[i] -= c * L.exps[g][i];
      work[g] = c;
      if (go(r, pos + 1, left - c)) return true;
      work[g] = 0;
      for (std::size_t i = 0; i < rem.size(); ++i) rem[i] += c * L.exps[g][i];
    }
    return false;
  };
  return go(0, 0, sdeg.empty() ? 0 : sdeg[0]);
}

}  // namespace

std::vector<BinomialRelation> toric_relations(const SagbiFamily& family, const WeightVector& w) {
  family.validate();
  LeaderData L = leaders_of(family, w);
  std::string key = leaders_key(L);
  {
    std::lock_guard<std::mutex> lk(cache_mutex);
    auto it = relations_cache().find(key);
    if (it != relations_cache().end()) return it->second;
  }
  auto rels = relations_for(L);
  std::lock_guard<std::mutex> lk(cache_mutex);
  relations_cache()[key] = rels;
  return rels;
}

QPoly subduct(const QPoly& p, const SagbiFamily& family, const WeightVector& w,
              const std::vector<int>& sdegree) {
  family.validate();
  if (sdegree.size() != family.blocks.size())
    throw std::invalid_argument("s-degree length must match block count");
  LeaderData L = leaders_of(family, w);
  std::vector<std::vector<std::size_t>> by_block(family.blocks.size());
  for (std::size_t g = 0; g < L.exps.size(); ++g) by_block[L.block[g]].push_back(g);

  QPoly q = p;
  while (!q.is_zero()) {
    Term<Rat> lead = refined_initial_term(q, w);
    std::vector<int> counts;
    if (!factor_search(L, by_block, lead.exp, sdegree, counts)) return q;
    Rat scale = lead.coeff;
    QPoly prod = QPoly::constant(family.ctx, Rat(1));
    for (std::size_t g = 0; g < counts.size(); ++g) {
      if (counts[g] == 0) continue;
      scale /= detail::pow_coeff(L.lcs[g], counts[g]);
      prod *= family.generator(g).pow(counts[g]);
    }
    q -= scale * prod;
  }
  return q;
}

SagbiCertificate sagbi_check(const SagbiFamily& family, const WeightVector& w) {
  std::string key = check_key(family, w);
  {
    std::lock_guard<std::mutex> lk(cache_mutex);
    auto it = check_cache().find(key);
    if (it != check_cache().end()) return it->second;
  }
  SagbiCertificate cert;
  cert.weight = w;
  LeaderData L = leaders_of(family, w);
  for (std::size_t g = 0; g < L.exps.size(); ++g)
    cert.leading_terms.push_back(
        QPoly::monomial(family.ctx, L.lcs[g], L.exps[g]).to_string());

  auto rels = toric_relations(family, w);
  cert.verified = true;
  for (const auto& rel : rels) {
    std::vector<int> sdeg(family.blocks.size(), 0);
    Rat cu(1), cv(1);
    QPoly pu = QPoly::constant(family.ctx, Rat(1));
    QPoly pv = QPoly::constant(family.ctx, Rat(1));
    for (std::size_t g = 0; g < rel.u.size(); ++g) {
      if (rel.u[g] > 0) {
        sdeg[L.block[g]] += rel.u[g];
        cu *= detail::pow_coeff(L.lcs[g], rel.u[g]);
        pu *= family.generator(g).pow(rel.u[g]);
      }
      if (rel.v[g] > 0) {
        cv *= detail::pow_coeff(L.lcs[g], rel.v[g]);
        pv *= family.generator(g).pow(rel.v[g]);
      }
    }
    QPoly p = (Rat(1) / cu) * pu - (Rat(1) / cv) * pv;
    QPoly rem = subduct(p, family, w, sdeg);
    if (!rem.is_zero()) {
      cert.verified = false;
      std::ostringstream os;
      os << "relation u=(";
      for (std::size_t g = 0; g < rel.u.size(); ++g) os << (g ? "," : "") << rel.u[g];
      os << ") v=(";
      for (std::size_t g = 0; g < rel.v.size(); ++g) os << (g ? "," : "") << rel.v[g];
      os << ") leaves remainder with initial term "
         << QPoly::monomial(family.ctx, refined_initial_term(rem, w).coeff,
                            refined_initial_term(rem, w).exp)
                .to_string();
      cert.failing_relation = os.str();
      break;
    }
  }
  std::lock_guard<std::mutex> lk(cache_mutex);
  check_cache()[key] = cert;
  return cert;
}

DetectResult detect_weight(const SagbiFamily& family, const DetectOptions& opts) {
  family.validate();
  DetectResult res;
  const std::size_t n = family.ctx->size();

  struct Gen {
    const QPoly* p;
    std::vector<std::size_t> candidates;  // term indices, degree-descending
  };
  std::vector<Gen> gens;
  for (const auto& b : family.blocks)
    for (const auto& p : b) {
      Gen g{&p, {}};
      g.candidates.resize(p.terms().size());
      std::iota(g.candidates.begin(), g.candidates.end(), 0);
      // canonical storage is already grlex-descending, which sorts by total
      // degree descending with a deterministic tie order
      gens.push_back(std::move(g));
    }

  std::vector<std::vector<Rat>> rows;  // accumulated strict rows
  std::vector<std::size_t> row_marks;  // rows added per assigned generator
  std::vector<Zint> last_cert;

  std::function<bool(std::size_t)> dfs = [&](std::size_t gi) -> bool {
    if (res.selections_tried >= opts.max_selections) {
      res.budget_exhausted = true;
      return false;
    }
    if (gi == gens.size()) {
      WeightVector w;
      w.w.reserve(n);
      for (const auto& z : last_cert) w.w.push_back(z.convert_to<std::int64_t>());
      w.w.resize(n, 0);  // all-monomial selections constrain nothing
      SagbiCertificate cert = sagbi_check(family, w);
      if (cert.verified) {
        res.weight = w;
        res.certificate = cert;
        return true;
      }
      return false;
    }
    const auto& terms = gens[gi].p->terms();
    for (std::size_t cand : gens[gi].candidates) {
      ++res.selections_tried;
      if (res.selections_tried > opts.max_selections) {
        res.budget_exhausted = true;
        return false;
      }
      std::size_t added = 0;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        if (t == cand) continue;
        std::vector<Rat> row(n);
        for (std::size_t i = 0; i < n; ++i)
          row[i] = Rat(terms[cand].exp[i] - terms[t].exp[i]);
        rows.push_back(std::move(row));
        ++added;
      }
      LPWitness lp = strict_lp_feasible(rows, {});
      if (lp.feasible) {
        last_cert = lp.certificate;
        if (dfs(gi + 1)) return true;
        if (res.budget_exhausted) {
          for (std::size_t k = 0; k < added; ++k) rows.pop_back();
          return false;
        }
      }
      for (std::size_t k = 0; k < added; ++k) rows.pop_back();
    }
    return false;
  };

  dfs(0);
  return res;
}

}  // namespace sagbihom
