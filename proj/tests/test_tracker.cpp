#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sagbihom/parser.hpp"
#include "sagbihom/tracker.hpp"

using namespace sagbihom;

namespace {

CPoly cparse(const std::string& s, const CtxPtr& ctx) {
  return to_cpoly(parse_polynomial(s, ctx));
}

}  // namespace

TEST_CASE("linear homotopy tracks to the target root") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  // (1-t)(x-1) + t(x-2) = x - 1 - t
  CPoly h = cparse("x - 1 - t", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::identity, Cx(1, 0));
  CSystem target({cparse("x - 2", ctx)});
  VectorXcd start(1);
  start(0) = Cx(1, 0);
  TrackerConfig cfg;
  PathResult r = track(H, start, target, cfg);
  CHECK(r.status == PathStatus::success);
  CHECK(std::abs(r.endpoint(0) - Cx(2, 0)) < 1e-10);
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("square-root path x^2 = 1 + t") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  CPoly h = cparse("x^2 - 1 - t", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::identity, Cx(1, 0));
  CSystem target({cparse("x^2 - 2", ctx)});
  VectorXcd start(1);
  start(0) = Cx(1, 0);
  PathResult r = track(H, start, target, TrackerConfig{});
  CHECK(r.status == PathStatus::success);
  CHECK(std::abs(r.endpoint(0) - std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("gamma arc endpoints match the identity path") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  CPoly h = cparse("x^2 - 1 - 3*t", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::gamma_arc, Cx(0.6, 0.8));
  CHECK(std::abs(H.t_of_s(0.0)) < 1e-15);
  CHECK(std::abs(H.t_of_s(1.0) - Cx(1, 0)) < 1e-15);
  CSystem target({cparse("x^2 - 4", ctx)});
  VectorXcd start(1);
  start(0) = Cx(1, 0);
  PathResult r = track(H, start, target, TrackerConfig{});
  CHECK(r.status == PathStatus::success);
  CHECK(std::abs(r.endpoint(0) - Cx(2, 0)) < 1e-9);
}

TEST_CASE("newton polish") {
  auto ctx = VariableContext::make({"x"});
  CSystem sys({cparse("x^2 - 4", ctx)});
  VectorXcd x0(1);
  x0(0) = Cx(2.1, 0);
  NewtonResult r = newton_polish(sys, x0, 1e-12, 10);
  CHECK(r.converged);
  CHECK(r.iterations <= 4);
  CHECK(std::abs(r.point(0) - Cx(2, 0)) < 1e-12);

  // an exact root stays fixed
  VectorXcd exact(1);
  exact(0) = Cx(2, 0);
  NewtonResult r2 = newton_polish(sys, exact, 1e-12, 10);
  CHECK(r2.converged);
  CHECK(r2.residual == 0.0);
  CHECK(r2.point(0) == Cx(2, 0));
}

TEST_CASE("newton quadratic convergence on x^2 - 4") {
  auto ctx = VariableContext::make({"x"});
  CSystem sys({cparse("x^2 - 4", ctx)});
  for (double s0 = 1.5; s0 <= 3.0; s0 += 0.25) {
    double e0 = std::abs(s0 - 2.0);
    if (e0 < 1e-3) continue;
    VectorXcd x(1);
    x(0) = Cx(s0, 0);
    NewtonResult one = newton_polish(sys, x, 1e-300, 1);
    double e1 = std::abs(one.point(0) - Cx(2, 0));
    // e1 <= C e0^2 with C = 1/(2 |f'(2)|) * sup|f''| = 1/4 plus slack
    CHECK(e1 <= 0.5 * e0 * e0 + 1e-14);
  }
}

TEST_CASE("divergent path is classified as diverged") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  // root x = 1/(1-t) escapes to infinity as t -> 1
  CPoly h = cparse("x - t*x - 1", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::identity, Cx(1, 0));
  CSystem target({cparse("x - x - 1 + x - x", ctx) + CPoly::constant(ctx, Cx(0, 0))});
  VectorXcd start(1);
  start(0) = Cx(1, 0);
  TrackerConfig cfg;
  PathResult r = track(H, start, target, cfg);
  CHECK((r.status == PathStatus::diverged || r.status == PathStatus::step_failure));
}

TEST_CASE("track_all deduplicates duplicate starts") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  CPoly h = cparse("x^2 - 1 - t", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::identity, Cx(1, 0));
  CSystem target({cparse("x^2 - 2", ctx)});
  VectorXcd a(1), b(1), c(1);
  a(0) = Cx(1, 0);
  b(0) = Cx(1, 0);
  c(0) = Cx(-1, 0);
  SolutionSet set = track_all(H, {a, b, c}, target, TrackerConfig{});
  CHECK(set.paths_tracked == 3);
  CHECK(set.successes == 3);
  CHECK(set.points.size() == 2);
  CHECK(set.real_count == 2);
  // canonical order: -sqrt(2) first
  CHECK(set.points[0](0).real() < 0);
}

TEST_CASE("track_all is thread-count invariant") {
  auto ctx = VariableContext::make({"x", "t"}, {false, true});
  CPoly h = cparse("x^3 - 1 - 6*t", ctx);
  PolyHomotopy H({h}, 1, PolyHomotopy::Path::gamma_arc, Cx(0.28, 0.96));
  CSystem target({cparse("x^3 - 7", ctx)});
  std::vector<VectorXcd> starts;
  for (int k = 0; k < 3; ++k) {
    VectorXcd s(1);
    double ang = 2.0 * std::acos(-1.0) * k / 3.0;
    s(0) = std::polar(1.0, ang);
    starts.push_back(s);
  }
  TrackerConfig c1;
  c1.threads = 1;
  TrackerConfig c4;
  c4.threads = 4;
  SolutionSet s1 = track_all(H, starts, target, c1);
  SolutionSet s4 = track_all(H, starts, target, c4);
  REQUIRE(s1.points.size() == s4.points.size());
  CHECK(s1.points.size() == 3);
  for (std::size_t i = 0; i < s1.points.size(); ++i)
    CHECK((s1.points[i] - s4.points[i]).norm() == 0.0);
}

TEST_CASE("sparse homotopy tracks a binomial deformation") {
  // H(x, s) = x^2 - 1 + s * x: roots move from +-1 to the roots of
  // x^2 + x - 1
  SparseHomotopy::TermData t1{Cx(1, 0), {2}, 0.0};
  SparseHomotopy::TermData t2{Cx(-1, 0), {0}, 0.0};
  SparseHomotopy::TermData t3{Cx(1, 0), {1}, 1.0};
  SparseHomotopy H({{t1, t2, t3}});
  auto ctx = VariableContext::make({"x"});
  CSystem target({cparse("x^2 + x - 1", ctx)});
  VectorXcd a(1), b(1);
  a(0) = Cx(1, 0);
  b(0) = Cx(-1, 0);
  SolutionSet set = track_all(H, {a, b}, target, TrackerConfig{});
  CHECK(set.points.size() == 2);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(std::abs(set.points[1](0) - Cx(golden, 0)) < 1e-9);
  CHECK(std::abs(set.points[0](0) - Cx(-golden - 1.0, 0)) < 1e-9);
}
