#include "sagbihom/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace sagbihom {

namespace {

Cx eval_poly(const CPoly& p, const std::vector<Cx>& point) {
  Cx acc(0, 0);
  for (const auto& t : p.terms()) {
    Cx v = t.coeff;
    for (std::size_t k = 0; k < point.size(); ++k)
      if (t.exp[k] != 0) v *= detail::pow_int(point[k], t.exp[k]);
    acc += v;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolyHomotopy
// ---------------------------------------------------------------------------

PolyHomotopy::PolyHomotopy(std::vector<CPoly> equations, std::size_t t_index, Path path,
                           Cx gamma)
    : eqs_(std::move(equations)), t_index_(t_index), path_(path), gamma_(gamma) {
  if (eqs_.empty()) throw std::invalid_argument("empty homotopy");
  jac_ = jacobian(eqs_);
  if (jac_[0].size() != eqs_.size())
    throw std::invalid_argument("homotopy must be square in the non-parameter variables");
  dt_.reserve(eqs_.size());
  for (const auto& f : eqs_) dt_.push_back(f.derivative(t_index_));
}

Cx PolyHomotopy::t_of_s(double s) const {
  if (path_ == Path::identity) return Cx(s, 0);
  Cx num = gamma_ * s;
  Cx den = gamma_ * s + Cx(1.0 - s, 0);
  return num / den;
}

Cx PolyHomotopy::dt_ds(double s) const {
  if (path_ == Path::identity) return Cx(1, 0);
  Cx den = gamma_ * s + Cx(1.0 - s, 0);
  return gamma_ / (den * den);
}

void PolyHomotopy::point(const VectorXcd& x, double s, std::vector<Cx>& buf) const {
  const CtxPtr& ctx = eqs_[0].context();
  buf.assign(ctx->size(), Cx(0, 0));
  std::size_t xi = 0;
  for (std::size_t i = 0; i < ctx->size(); ++i) {
    if (i == t_index_) continue;
    buf[i] = x(xi++);
  }
  buf[t_index_] = t_of_s(s);
}

void PolyHomotopy::eval(const VectorXcd& x, double s, VectorXcd& out) const {
  std::vector<Cx> pt;
  point(x, s, pt);
  out.resize(eqs_.size());
  for (std::size_t i = 0; i < eqs_.size(); ++i) out(i) = eval_poly(eqs_[i], pt);
}

void PolyHomotopy::jac_x(const VectorXcd& x, double s, MatrixXcd& out) const {
  std::vector<Cx> pt;
  point(x, s, pt);
  const std::size_t n = eqs_.size();
  out.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = eval_poly(jac_[i][j], pt);
}

void PolyHomotopy::dds(const VectorXcd& x, double s, VectorXcd& out) const {
  std::vector<Cx> pt;
  point(x, s, pt);
  Cx chain = dt_ds(s);
  out.resize(eqs_.size());
  for (std::size_t i = 0; i < eqs_.size(); ++i) out(i) = eval_poly(dt_[i], pt) * chain;
}

// ---------------------------------------------------------------------------
// SparseHomotopy
// ---------------------------------------------------------------------------

SparseHomotopy::SparseHomotopy(std::vector<std::vector<TermData>> equations)
    : eqs_(std::move(equations)) {
  if (eqs_.empty()) throw std::invalid_argument("empty homotopy");
  for (const auto& eq : eqs_)
    for (const auto& t : eq) {
      if (t.exp.size() != eqs_.size())
        throw std::invalid_argument("sparse homotopy must be square");
      if (t.s_exp < 0) throw std::invalid_argument("negative path exponent");
    }
}

void SparseHomotopy::eval(const VectorXcd& x, double s, VectorXcd& out) const {
  const std::size_t n = eqs_.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Cx acc(0, 0);
    for (const auto& t : eqs_[i]) {
      double sw = t.s_exp == 0.0 ? 1.0 : std::pow(s, t.s_exp);
      if (sw == 0.0) continue;
      Cx v = t.coeff * sw;
      for (std::size_t k = 0; k < n; ++k)
        if (t.exp[k] != 0) v *= detail::pow_int(x(k), t.exp[k]);
      acc += v;
    }
    out(i) = acc;
  }
}

void SparseHomotopy::jac_x(const VectorXcd& x, double s, MatrixXcd& out) const {
  const std::size_t n = eqs_.size();
  out.setZero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : eqs_[i]) {
      double sw = t.s_exp == 0.0 ? 1.0 : std::pow(s, t.s_exp);
      if (sw == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (t.exp[j] == 0) continue;
        Cx v = t.coeff * sw * double(t.exp[j]);
        for (std::size_t k = 0; k < n; ++k) {
          int e = t.exp[k] - (k == j ? 1 : 0);
          if (e != 0) v *= detail::pow_int(x(k), e);
        }
        out(i, j) += v;
      }
    }
  }
}

void SparseHomotopy::dds(const VectorXcd& x, double s, VectorXcd& out) const {
  const std::size_t n = eqs_.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Cx acc(0, 0);
    for (const auto& t : eqs_[i]) {
      if (t.s_exp == 0.0) continue;
      double sw = t.s_exp == 1.0 ? 1.0 : std::pow(s, t.s_exp - 1.0);
      if (sw == 0.0) continue;
      Cx v = t.coeff * (t.s_exp * sw);
      for (std::size_t k = 0; k < n; ++k)
        if (t.exp[k] != 0) v *= detail::pow_int(x(k), t.exp[k]);
      acc += v;
    }
    out(i) = acc;
  }
}

// ---------------------------------------------------------------------------
// CSystem and Newton
// ---------------------------------------------------------------------------

CSystem::CSystem(std::vector<CPoly> equations) : eqs_(std::move(equations)) {
  if (eqs_.empty()) throw std::invalid_argument("empty system");
  jac_ = jacobian(eqs_);
  const CtxPtr& ctx = eqs_[0].context();
  for (std::size_t i = 0; i < ctx->size(); ++i)
    if (!ctx->is_parameter(i)) vars_.push_back(i);
  nx_ = vars_.size();
  if (nx_ != eqs_.size()) throw std::invalid_argument("system is not square");
}

void CSystem::eval(const VectorXcd& x, VectorXcd& out) const {
  const CtxPtr& ctx = eqs_[0].context();
  std::vector<Cx> pt(ctx->size(), Cx(1, 0));  // parameters evaluate at t = 1
  for (std::size_t k = 0; k < nx_; ++k) pt[vars_[k]] = x(k);
  out.resize(eqs_.size());
  for (std::size_t i = 0; i < eqs_.size(); ++i) out(i) = eval_poly(eqs_[i], pt);
}

void CSystem::jac(const VectorXcd& x, MatrixXcd& out) const {
  const CtxPtr& ctx = eqs_[0].context();
  std::vector<Cx> pt(ctx->size(), Cx(1, 0));
  for (std::size_t k = 0; k < nx_; ++k) pt[vars_[k]] = x(k);
  out.resize(eqs_.size(), nx_);
  for (std::size_t i = 0; i < eqs_.size(); ++i)
    for (std::size_t j = 0; j < nx_; ++j) out(i, j) = eval_poly(jac_[i][j], pt);
}

double CSystem::residual(const VectorXcd& x) const {
  VectorXcd f;
  eval(x, f);
  return f.lpNorm<Eigen::Infinity>();
}

NewtonResult newton_polish(const CSystem& system, const VectorXcd& start, double tol,
                           int max_iters) {
  NewtonResult res;
  res.point = start;
  VectorXcd f;
  MatrixXcd J;
  for (int it = 0; it < max_iters; ++it) {
    system.eval(res.point, f);
    system.jac(res.point, J);
    Eigen::PartialPivLU<MatrixXcd> lu(J);
    VectorXcd dx = lu.solve(f);
    if (!dx.allFinite()) {
      res.converged = false;
      break;
    }
    res.point -= dx;
    ++res.iterations;
    if (dx.lpNorm<Eigen::Infinity>() <=
        tol * std::max(1.0, res.point.lpNorm<Eigen::Infinity>())) {
      res.converged = true;
      break;
    }
  }
  res.residual = system.residual(res.point);
  MatrixXcd J2;
  system.jac(res.point, J2);
  Eigen::JacobiSVD<MatrixXcd> svd(J2);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  res.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!std::isfinite(res.residual)) res.converged = false;
  return res;
}

// ---------------------------------------------------------------------------
// Path tracking
// ---------------------------------------------------------------------------

namespace {

bool newton_correct(const Homotopy& h, VectorXcd& x, double s, const TrackerConfig& cfg) {
  VectorXcd f;
  MatrixXcd J;
  for (int it = 0; it < cfg.max_newton_iters; ++it) {
    h.eval(x, s, f);
    h.jac_x(x, s, J);
    Eigen::PartialPivLU<MatrixXcd> lu(J);
    VectorXcd dx = lu.solve(f);
    if (!dx.allFinite()) return false;
    x -= dx;
    if (!x.allFinite()) return false;
    if (dx.lpNorm<Eigen::Infinity>() <= cfg.newton_tol * std::max(1.0, x.lpNorm<Eigen::Infinity>()))
      return true;
  }
  return false;
}

bool tangent(const Homotopy& h, const VectorXcd& x, double s, VectorXcd& out) {
  MatrixXcd J;
  VectorXcd hs;
  h.jac_x(x, s, J);
  h.dds(x, s, hs);
  Eigen::PartialPivLU<MatrixXcd> lu(J);
  out = lu.solve(-hs);
  return out.allFinite();
}

}  // namespace

PathResult track(const Homotopy& h, const VectorXcd& start, const CSystem& target,
                 const TrackerConfig& cfg) {
  PathResult res;
  VectorXcd x = start;
  const double s_end = 1.0 - 1e-8;
  double s = 0.0;
  double step = cfg.initial_step;
  int streak = 0;

  {
    VectorXcd f0;
    h.eval(x, 0.0, f0);
    if (f0.lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      res.status = PathStatus::step_failure;
      res.endpoint = x;
      return res;
    }
  }

  while (s < s_end) {
    double hstep = std::min({step, cfg.max_step, s_end - s});
    // RK4 predictor on x'(s) = -J^{-1} dH/ds
    VectorXcd k1, k2, k3, k4;
    bool ok = tangent(h, x, s, k1);
    ok = ok && tangent(h, x + 0.5 * hstep * k1, s + 0.5 * hstep, k2);
    ok = ok && tangent(h, x + 0.5 * hstep * k2, s + 0.5 * hstep, k3);
    ok = ok && tangent(h, x + hstep * k3, s + hstep, k4);
    VectorXcd xp;
    if (ok) {
      xp = x + (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      xp = x;
    }
    bool accepted = ok && xp.allFinite() && newton_correct(h, xp, s + hstep, cfg);
    if (accepted) {
      x = xp;
      s += hstep;
      ++res.steps_taken;
      if (++streak >= 3) {
        step = std::min(step * cfg.step_expand, cfg.max_step);
        streak = 0;
      }
      if (x.lpNorm<Eigen::Infinity>() > cfg.divergence_norm) {
        res.status = PathStatus::diverged;
        res.endpoint = x;
        return res;
      }
    } else {
      step *= cfg.step_shrink;
      streak = 0;
      if (step < cfg.min_step) {
        res.status = PathStatus::step_failure;
        res.endpoint = x;
        return res;
      }
    }
  }

  NewtonResult polish = newton_polish(target, x, cfg.newton_tol, 3 * cfg.max_newton_iters);
  res.endpoint = polish.point;
  res.residual = polish.residual;
  res.condition = polish.condition;
  // a polish that moves far from the tracked point means the path was lost,
  // typically an endpoint escaping to infinity; never report it as a root
  double jump = (polish.point - x).lpNorm<Eigen::Infinity>();
  bool jumped = jump > 1e-2 * (1.0 + x.lpNorm<Eigen::Infinity>());
  if (polish.point.lpNorm<Eigen::Infinity>() > cfg.divergence_norm ||
      (jumped && x.lpNorm<Eigen::Infinity>() > 1e6)) {
    res.status = PathStatus::diverged;
  } else if (jumped) {
    res.status = PathStatus::step_failure;
  } else if (polish.converged && polish.residual <= 100.0 * cfg.newton_tol &&
             polish.condition <= cfg.singular_cond) {
    res.status = PathStatus::success;
  } else if (polish.residual <= 1e-6) {
    res.status = PathStatus::singular_endpoint;
  } else {
    res.status = PathStatus::step_failure;
  }
  return res;
}

bool is_real_point(const VectorXcd& x, double tol) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i).imag()) >= tol) return false;
  return true;
}

int default_thread_count() {
  if (const char* env = std::getenv("SAGBIHOM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

SolutionSet track_all(const Homotopy& h, const std::vector<VectorXcd>& starts,
                      const CSystem& target, const TrackerConfig& cfg) {
  SolutionSet set;
  set.paths_tracked = static_cast<int>(starts.size());
  std::vector<PathResult> results(starts.size());

  int nthreads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(starts.size())));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) results[i] = track(h, starts[i], target, cfg);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= starts.size()) break;
        results[i] = track(h, starts[i], target, cfg);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // deduplicate in path order; representative = smallest residual
  auto close = [&](const VectorXcd& a, const VectorXcd& b) {
    return (a - b).lpNorm<Eigen::Infinity>() <= cfg.dedup_tol;
  };
  for (const auto& r : results) {
    switch (r.status) {
      case PathStatus::success: {
        ++set.successes;
        bool merged = false;
        for (std::size_t k = 0; k < set.points.size(); ++k) {
          if (close(set.points[k], r.endpoint)) {
            if (r.residual < set.residuals[k]) {
              set.points[k] = r.endpoint;
              set.residuals[k] = r.residual;
            }
            merged = true;
            break;
          }
        }
        if (!merged) {
          set.points.push_back(r.endpoint);
          set.residuals.push_back(r.residual);
        }
        break;
      }
      case PathStatus::diverged:
        ++set.diverged;
        break;
      case PathStatus::singular_endpoint: {
        ++set.singular;
        bool merged = false;
        for (const auto& p : set.singular_points)
          if (close(p, r.endpoint)) {
            merged = true;
            break;
          }
        if (!merged) set.singular_points.push_back(r.endpoint);
        break;
      }
      case PathStatus::step_failure:
        ++set.step_failures;
        break;
    }
  }

  // canonical ordering: lexicographic by real/imaginary parts
  std::vector<std::size_t> order(set.points.size());
  std::iota(order.begin(), order.end(), 0);
  auto lex = [&](const VectorXcd& a, const VectorXcd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
      if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return lex(set.points[i], set.points[j]); });
  std::vector<VectorXcd> pts;
  std::vector<double> res;
  for (std::size_t i : order) {
    pts.push_back(set.points[i]);
    res.push_back(set.residuals[i]);
  }
  set.points = std::move(pts);
  set.residuals = std::move(res);
  std::sort(set.singular_points.begin(), set.singular_points.end(), lex);

  for (const auto& p : set.points)
    if (is_real_point(p, cfg.dedup_tol)) ++set.real_count;
  for (const auto& p : set.singular_points)
    if (is_real_point(p, cfg.dedup_tol)) ++set.singular_real_count;
  return set;
}

}  // namespace sagbihom
