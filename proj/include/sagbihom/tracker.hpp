#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "sagbihom/polynomial.hpp"

namespace sagbihom {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct TrackerConfig {
  double newton_tol = 1e-12;
  int max_newton_iters = 5;
  double initial_step = 1e-2;
  double min_step = 1e-14;
  double max_step = 0.1;
  double step_expand = 2.0;
  double step_shrink = 0.5;
  Cx path_gamma = Cx(0.8, 0.6);  // callers draw a random unimodular value
  double divergence_norm = 1e10;
  double dedup_tol = 1e-8;
  double singular_cond = 1e12;
  int threads = 0;  // 0 = library default
};

/// Square homotopy H(x, s) with s in [0, 1].
class Homotopy {
 public:
  virtual ~Homotopy() = default;
  virtual std::size_t dim() const = 0;
  virtual void eval(const VectorXcd& x, double s, VectorXcd& out) const = 0;
  virtual void jac_x(const VectorXcd& x, double s, MatrixXcd& out) const = 0;
  virtual void dds(const VectorXcd& x, double s, VectorXcd& out) const = 0;
};

/// Polynomial homotopy in x and a parameter variable t; the path parameter s
/// maps to t either directly or through the gamma arc
/// h(s) = gamma s / (gamma s + (1 - s)).
class PolyHomotopy : public Homotopy {
 public:
  enum class Path { identity, gamma_arc };
  PolyHomotopy(std::vector<CPoly> equations, std::size_t t_index, Path path, Cx gamma);

  std::size_t dim() const override { return eqs_.size(); }
  void eval(const VectorXcd& x, double s, VectorXcd& out) const override;
  void jac_x(const VectorXcd& x, double s, MatrixXcd& out) const override;
  void dds(const VectorXcd& x, double s, VectorXcd& out) const override;

  const std::vector<CPoly>& equations() const { return eqs_; }
  Cx t_of_s(double s) const;

 private:
  Cx dt_ds(double s) const;
  void point(const VectorXcd& x, double s, std::vector<Cx>& buf) const;

  std::vector<CPoly> eqs_;
  std::vector<std::vector<CPoly>> jac_;
  std::vector<CPoly> dt_;
  std::size_t t_index_;
  Path path_;
  Cx gamma_;
};

/// Sparse homotopy sum_a c_a x^a s^{e_a} with non-negative real exponents
/// e_a (rescaled so positive exponents are >= 1); tracked on real s in [0,1].
class SparseHomotopy : public Homotopy {
 public:
  struct TermData {
    Cx coeff;
    ExponentVec exp;
    double s_exp;
  };
  explicit SparseHomotopy(std::vector<std::vector<TermData>> equations);

  std::size_t dim() const override { return eqs_.size(); }
  void eval(const VectorXcd& x, double s, VectorXcd& out) const override;
  void jac_x(const VectorXcd& x, double s, MatrixXcd& out) const override;
  void dds(const VectorXcd& x, double s, VectorXcd& out) const override;

 private:
  std::vector<std::vector<TermData>> eqs_;
};

/// Square polynomial system used for polishing and residual checks.
class CSystem {
 public:
  explicit CSystem(std::vector<CPoly> equations);
  std::size_t dim() const { return eqs_.size(); }
  void eval(const VectorXcd& x, VectorXcd& out) const;
  void jac(const VectorXcd& x, MatrixXcd& out) const;
  double residual(const VectorXcd& x) const;  // infinity norm
  const std::vector<CPoly>& equations() const { return eqs_; }

 private:
  std::vector<CPoly> eqs_;
  std::vector<std::vector<CPoly>> jac_;
  std::vector<std::size_t> vars_;  // non-parameter variable indices
  std::size_t nx_;
};

enum class PathStatus { success, diverged, singular_endpoint, step_failure };

struct PathResult {
  PathStatus status = PathStatus::step_failure;
  VectorXcd endpoint;
  double residual = 0.0;
  int steps_taken = 0;
  double condition = 0.0;
};

struct NewtonResult {
  VectorXcd point;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  double condition = 0.0;
};

NewtonResult newton_polish(const CSystem& system, const VectorXcd& start, double tol,
                           int max_iters);

/// RK4 predictor / Newton corrector path tracking from s = 0 to s = 1 with
/// adaptive step control; the endpoint is polished against H(., 1).
PathResult track(const Homotopy& h, const VectorXcd& start, const CSystem& target,
                 const TrackerConfig& cfg);

struct SolutionSet {
  std::vector<VectorXcd> points;            // distinct non-singular solutions
  std::vector<double> residuals;            // against the target system
  std::vector<VectorXcd> singular_points;   // distinct singular endpoints
  int paths_tracked = 0;
  int successes = 0;
  int diverged = 0;
  int singular = 0;
  int step_failures = 0;
  int real_count = 0;
  int singular_real_count = 0;
};

bool is_real_point(const VectorXcd& x, double tol = 1e-8);

/// Tracks every start, polishes at the endpoint, deduplicates and classifies.
/// Results are deterministic for a fixed seed and thread count independent.
SolutionSet track_all(const Homotopy& h, const std::vector<VectorXcd>& starts,
                      const CSystem& target, const TrackerConfig& cfg);

int default_thread_count();

}  // namespace sagbihom
