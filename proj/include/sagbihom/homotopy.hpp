#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagbihom/polyhedral.hpp"
#include "sagbihom/sagbi.hpp"
#include "sagbihom/tracker.hpp"

namespace sagbihom {

/// Square horizontally parameterized system: equation i is a linear
/// combination of the generators of exactly one block.
struct ParameterizedSystem {
  SagbiFamily family;
  /// coefficients[r] has one row per equation drawing on block r and one
  /// column per generator of that block; equations are numbered block by
  /// block in row order.
  std::vector<std::vector<std::vector<Cx>>> coefficients;

  std::size_t num_equations() const;
  std::vector<int> equations_per_block() const;
  void validate() const;
};

struct SagbiHomotopySystem {
  CtxPtr ext;
  std::size_t t_index = 0;
  std::vector<CPoly> equations;
  std::vector<std::vector<QPoly>> homogenized_blocks;  // in ext
  WeightVector weight;
  std::string provenance;  // "two-step" or "one-step"
};

/// Substitutes the t-homogenized generators into the linear combinations.
/// t = 1 reproduces the target coefficient-wise; t = 0 is supported exactly
/// on the leading monomials.
SagbiHomotopySystem build_sagbi_homotopy(const ParameterizedSystem& sys, const WeightVector& w);

struct LeaderFold {
  std::vector<SupportSet> supports;                    // per block, distinct leaders
  std::vector<std::vector<std::size_t>> point_of_gen;  // per block
  std::vector<std::vector<Rat>> lead_coeff;            // per block
};
LeaderFold fold_leaders(const SagbiFamily& family, const WeightVector& w,
                        const std::vector<int>& multiplicities);

/// Combines the SAGBI deformation with one mixed cell's lifting exponents so
/// t = 0 specializes to the cell's binomial restriction and t = 1 to the
/// target (Algorithm with a single homotopy). Rational cell exponents are
/// cleared to integers by a per-cell denominator.
SagbiHomotopySystem build_one_step_homotopy(const ParameterizedSystem& sys,
                                            const WeightVector& w, const LeaderFold& fold,
                                            const MixedCell& cell, const Lifting& lifting);

/// Lattice index of the within-block leading-exponent differences; nullopt
/// when the differences do not span full rank (infinite degree).
std::optional<Zint> compute_degree_monomial_map(const SagbiFamily& family,
                                                const WeightVector& w);

struct DegreeMapResult {
  std::optional<int> degree;    // nullopt when the trials disagree
  std::vector<int> trial_counts;
};

/// Generic fiber cardinality of the parameterization by fiber counting over
/// three random base points, majority voted.
DegreeMapResult compute_degree_map(const SagbiFamily& family,
                                   const std::vector<int>& multiplicities, std::uint64_t seed,
                                   int threads = 0);

struct BaseLocusResult {
  std::vector<VectorXcd> points;  // isolated torus points, all generators vanish
  bool positive_dimensional_warning = false;
};

/// Torus points where some block's generators all vanish, found by squaring
/// each block with generic combinations; only points stable across two
/// squarings are reported.
BaseLocusResult compute_base_locus(const SagbiFamily& family, std::uint64_t seed,
                                   int threads = 0);

struct DegreeReport {
  std::optional<Zint> deg_phi0;
  std::optional<int> deg_phi;
  std::optional<Zint> expected_count;
  bool degree_drop = false;
  std::string warning;
};

struct SolveOptions {
  std::optional<WeightVector> weight;
  bool degree_check = true;
  bool get_base_locus = false;
  bool vary_linear_part = false;
  bool one_step = false;
  bool force = false;
  std::uint64_t seed = 0;
  int threads = 0;
  DetectOptions detect;
};

struct SolveResult {
  SolutionSet solutions;
  DegreeReport degree_report;
  SagbiCertificate certificate;
  std::string method;
  std::uint64_t seed = 0;
  Zint start_mixed_volume;
  std::vector<std::string> warnings;
  double time_detection = 0.0;
  double time_start = 0.0;
  double time_tracking = 0.0;
};

/// Full pipeline: weight detection/verification, degree checks, sparse start
/// solve, homotopy tracking, optional base-locus recovery and coefficient
/// continuation for special linear parts.
SolveResult solve(const ParameterizedSystem& sys, const SolveOptions& opts);

// --- building blocks shared with tests and the CLI ------------------------

struct SparseSolveResult {
  SolutionSet set;
  Zint volume;  // total mixed volume of the supports
  std::uint64_t lifting_seed = 0;
  int cells = 0;
};

/// Solves a semimixed sparse system given by supports and coefficient rows:
/// generic start coefficients via mixed cells and binomial systems, per-cell
/// homotopies to the generic system, then a coefficient-parameter homotopy to
/// the requested rows. With rows_are_generic the final stage is skipped.
SparseSolveResult sparse_solve(const std::vector<SupportSet>& supports,
                               const std::vector<SupportRows>& rows, bool rows_are_generic,
                               const CtxPtr& xctx, std::uint64_t seed, int threads = 0);

/// Torus-solution count of the homotopy system specialized at t = t_star,
/// solved as a sparse semimixed system.
int count_solutions_at_t(const ParameterizedSystem& sys, const WeightVector& w, Cx t_star,
                         std::uint64_t seed, int threads = 0);

std::vector<CPoly> target_equations(const ParameterizedSystem& sys);

}  // namespace sagbihom
