#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagbihom/intlin.hpp"
#include "sagbihom/polynomial.hpp"

namespace sagbihom {

struct WeightVector {
  std::vector<std::int64_t> w;
  bool operator==(const WeightVector& o) const { return w == o.w; }
};

/// Weight of a weight vector's unique maximal term could be attained twice;
/// that means the weight does not represent a term order on this input.
struct TieError : std::runtime_error {
  TieError(ExponentVec a, ExponentVec b)
      : std::runtime_error("weighted initial term is tied"), first(std::move(a)), second(std::move(b)) {}
  ExponentVec first, second;
};

/// Blocks B_1..B_m of generator polynomials over a shared x-context. Each
/// generator implicitly carries its block's auxiliary s_r variable of weight
/// -1; the s-grading is tracked as per-block factor counts rather than as
/// ring variables.
struct SagbiFamily {
  CtxPtr ctx;
  std::vector<std::vector<QPoly>> blocks;

  std::size_t num_generators() const {
    std::size_t k = 0;
    for (const auto& b : blocks) k += b.size();
    return k;
  }
  const QPoly& generator(std::size_t flat) const;
  std::size_t block_of(std::size_t flat) const;
  void validate() const;
  std::string signature() const;  ///< canonical text form, for caching
};

SagbiFamily make_family(CtxPtr ctx, std::vector<std::vector<QPoly>> blocks);

std::int64_t weight_dot(const WeightVector& w, const ExponentVec& e);

/// Unique term maximizing w . alpha; throws TieError when the maximum is
/// attained twice.
Term<Rat> initial_term(const QPoly& p, const WeightVector& w);

/// Leading term under w with grlex tie-break; total order, never fails.
Term<Rat> refined_initial_term(const QPoly& p, const WeightVector& w);

/// t-homogenization: each term c x^beta becomes c t^{w(alpha*) - w(beta)}
/// x^beta, so the initial term carries t^0, t=1 recovers p and t=0 leaves
/// the initial term. The result lives in `ext`, which must extend p's
/// context by the parameter variable at index t_index.
QPoly homogenize(const QPoly& p, const WeightVector& w, const CtxPtr& ext, std::size_t t_index);

/// Exponent pair (u, v) over the flat generator index set with A u = A v,
/// where A maps generators to leading exponents with s-degree rows prepended.
struct BinomialRelation {
  std::vector<int> u, v;
};

/// Generating set of the toric ideal of leading monomials: kernel lattice
/// basis via Smith form, then saturation by the product of variables with a
/// binomial Buchberger procedure.
std::vector<BinomialRelation> toric_relations(const SagbiFamily& family, const WeightVector& w);

/// Subduction remainder of p against the family, constrained to factor counts
/// sigma_r per block (the s-degree of p). Returns 0 when p subduces fully.
QPoly subduct(const QPoly& p, const SagbiFamily& family, const WeightVector& w,
              const std::vector<int>& sdegree);

struct SagbiCertificate {
  WeightVector weight;
  bool verified = false;
  std::vector<std::string> leading_terms;
  std::string failing_relation;  ///< set when verified == false
};

/// For every toric relation (u, v), forms prod b^u - prod b^v (leading
/// coefficients cancelled) and subduces; verified iff all remainders vanish.
SagbiCertificate sagbi_check(const SagbiFamily& family, const WeightVector& w);

struct DetectOptions {
  std::int64_t max_selections = 100000;
};

struct DetectResult {
  std::optional<WeightVector> weight;
  SagbiCertificate certificate;
  bool budget_exhausted = false;
  std::int64_t selections_tried = 0;
};

/// Depth-first search over leading-term selections with exact-LP pruning;
/// candidates per generator ordered by total degree descending. Returns the
/// first selection whose LP certificate passes sagbi_check.
DetectResult detect_weight(const SagbiFamily& family, const DetectOptions& opts = {});

}  // namespace sagbihom
