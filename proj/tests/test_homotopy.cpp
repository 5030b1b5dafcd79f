#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sagbihom/homotopy.hpp"
#include "sagbihom/parser.hpp"

using namespace sagbihom;

namespace {

SagbiFamily quadric_p3_family() {
  auto ctx = VariableContext::make({"x", "y", "z"});
  std::vector<QPoly> b;
  for (const auto* s : {"x^2 + 1", "y^2 + 1", "x*y + z^2", "1"})
    b.push_back(parse_polynomial(s, ctx));
  return make_family(ctx, {b});
}

SagbiFamily two_block_family() {
  auto ctx = VariableContext::make({"x", "y", "z"});
  std::vector<QPoly> b1, b2;
  for (const auto* s : {"x", "y", "x^2 + y^2", "1"}) b1.push_back(parse_polynomial(s, ctx));
  for (const auto* s : {"y", "z", "x^2 + y^2", "x^3 + z^3"})
    b2.push_back(parse_polynomial(s, ctx));
  return make_family(ctx, {b1, b2});
}

SagbiFamily base_locus_family() {
  auto ctx = VariableContext::make({"x", "y"});
  std::vector<QPoly> b;
  for (const auto* s :
       {"x*(x^2 + y^2 - 2*x)", "x*(5 - 4*y)", "y*(x^2 + y^2 - 2*x)", "y*(5 - 4*y)"})
    b.push_back(parse_polynomial(s, ctx));
  return make_family(ctx, {b});
}

ParameterizedSystem int_slice(const SagbiFamily& fam, const std::vector<int>& rows,
                              std::uint64_t seed) {
  ParameterizedSystem sys;
  sys.family = fam;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-100, 100);
  for (std::size_t r = 0; r < fam.blocks.size(); ++r) {
    std::vector<std::vector<Cx>> m(rows[r], std::vector<Cx>(fam.blocks[r].size()));
    for (auto& row : m)
      for (auto& v : row) v = Cx(double(d(rng)), 0.0);
    sys.coefficients.push_back(std::move(m));
  }
  return sys;
}

ParameterizedSystem gaussian_slice(const SagbiFamily& fam, const std::vector<int>& rows,
                                   std::uint64_t seed) {
  ParameterizedSystem sys;
  sys.family = fam;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t r = 0; r < fam.blocks.size(); ++r) {
    std::vector<std::vector<Cx>> m(rows[r], std::vector<Cx>(fam.blocks[r].size()));
    for (auto& row : m)
      for (auto& v : row) {
        double re = g(rng), im = g(rng);
        v = Cx(re, im);
      }
    sys.coefficients.push_back(std::move(m));
  }
  return sys;
}

double target_residual(const ParameterizedSystem& sys, const VectorXcd& x) {
  std::vector<CPoly> eqs = target_equations(sys);
  std::vector<Cx> pt(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) pt[i] = x(i);
  double r = 0;
  for (const auto& f : eqs) r = std::max(r, std::abs(f.evaluate(pt)));
  return r;
}

}  // namespace

TEST_CASE("sagbi homotopy equation structure for the two-block family") {
  // waived verification: the printed weight homogenizes the generators as in
  // the source family even though it does not pass the criterion
  SagbiFamily fam = two_block_family();
  ParameterizedSystem sys = int_slice(fam, {2, 1}, 5);
  WeightVector w{{-1, -2, -3}};
  SagbiHomotopySystem H = build_sagbi_homotopy(sys, w);
  REQUIRE(H.equations.size() == 3);
  // f_3 = c0 y + c1 z + c2 (x^2 + t^2 y^2) + c3 (x^3 + t^6 z^3)
  const auto& c = sys.coefficients[1][0];
  CPoly expect = CPoly::zero(H.ext);
  expect += c[0] * to_cpoly(parse_polynomial("y", H.ext));
  expect += c[1] * to_cpoly(parse_polynomial("z", H.ext));
  expect += c[2] * to_cpoly(parse_polynomial("x^2 + t^2*y^2", H.ext));
  expect += c[3] * to_cpoly(parse_polynomial("x^3 + t^6*z^3", H.ext));
  CHECK(H.equations[2] == expect);
}

TEST_CASE("specialization identities of the sagbi homotopy") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = int_slice(fam, {3}, 11);
  DetectResult d = detect_weight(fam);
  REQUIRE(d.weight.has_value());
  SagbiHomotopySystem H = build_sagbi_homotopy(sys, *d.weight);
  std::vector<CPoly> target = target_equations(sys);
  LeaderFold fold = fold_leaders(fam, *d.weight, {3});
  for (std::size_t i = 0; i < H.equations.size(); ++i) {
    CPoly at1 = H.equations[i].substitute(H.t_index, Cx(1, 0));
    CHECK(at1 == lift_to_context(target[i], H.ext));
    // t = 0 is supported exactly on the leading monomials
    CPoly at0 = H.equations[i].substitute(H.t_index, Cx(0, 0));
    for (const auto& t : at0.terms()) {
      ExponentVec e(t.exp.begin(), t.exp.end() - 1);
      bool found = false;
      for (const auto& p : fold.supports[0].points)
        if (p == e) found = true;
      CHECK(found);
    }
  }
  // an all-monomial family is t-free
  auto ctx = VariableContext::make({"x", "y"});
  std::vector<QPoly> mono{parse_polynomial("x^2", ctx), parse_polynomial("x*y", ctx),
                          parse_polynomial("y^2", ctx)};
  ParameterizedSystem msys;
  msys.family = make_family(ctx, {mono});
  msys.coefficients = {{{Cx(1, 0), Cx(2, 0), Cx(3, 0)}, {Cx(-1, 0), Cx(1, 0), Cx(4, 0)}}};
  SagbiHomotopySystem MH = build_sagbi_homotopy(msys, WeightVector{{2, 1}});
  for (const auto& f : MH.equations)
    for (const auto& t : f.terms()) CHECK(t.exp[MH.t_index] == 0);
}

TEST_CASE("degree of the monomial map") {
  SagbiFamily quad = quadric_p3_family();
  DetectResult d1 = detect_weight(quad);
  REQUIRE(d1.weight.has_value());
  CHECK(compute_degree_monomial_map(quad, *d1.weight).value() == 8);

  SagbiFamily two = two_block_family();
  DetectResult d2 = detect_weight(two);
  REQUIRE(d2.weight.has_value());
  CHECK(compute_degree_monomial_map(two, *d2.weight).value() == 1);

  SagbiFamily bl = base_locus_family();
  DetectResult d3 = detect_weight(bl);
  REQUIRE(d3.weight.has_value());
  CHECK(compute_degree_monomial_map(bl, *d3.weight).value() == 1);
}

TEST_CASE("degree of the parameterization map") {
  SagbiFamily quad = quadric_p3_family();
  DetectResult d1 = detect_weight(quad);
  DegreeMapResult m1 = compute_degree_map(quad, {3}, 42);
  CHECK(m1.degree.value() == 8);

  SagbiFamily two = two_block_family();
  DetectResult d2 = detect_weight(two);
  DegreeMapResult m2 = compute_degree_map(two, {2, 1}, 42);
  CHECK(m2.degree.value() == 1);

  SagbiFamily bl = base_locus_family();
  DetectResult d3 = detect_weight(bl);
  DegreeMapResult m3 = compute_degree_map(bl, {2}, 42);
  CHECK(m3.degree.value() == 2);
}

TEST_CASE("base locus of the plane family") {
  SagbiFamily bl = base_locus_family();
  BaseLocusResult r = compute_base_locus(bl, 9);
  REQUIRE(r.points.size() == 2);
  // (1 -+ 3i/4, 5/4), the origin is excluded as a non-torus point
  for (const auto& p : r.points) {
    CHECK(std::abs(p(0).real() - 1.0) < 1e-6);
    CHECK(std::abs(std::abs(p(0).imag()) - 0.75) < 1e-6);
    CHECK(std::abs(p(1) - Cx(1.25, 0)) < 1e-6);
  }
  CHECK(std::abs(r.points[0](0).imag() + r.points[1](0).imag()) < 1e-9);

  // a block containing the constant 1 has empty base locus
  SagbiFamily quad = quadric_p3_family();
  CHECK(compute_base_locus(quad, 4).points.empty());

  // {x, y} vanishes only at the origin, which is not a torus point
  auto ctx = VariableContext::make({"x", "y"});
  SagbiFamily xy = make_family(
      ctx, {{parse_polynomial("x", ctx), parse_polynomial("y", ctx)}});
  CHECK(compute_base_locus(xy, 4).points.empty());
}

TEST_CASE("solve the quadric family: 8 solutions over 8 paths") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = int_slice(fam, {3}, 101);
  SolveOptions opts;
  opts.seed = 17;
  SolveResult res = solve(sys, opts);
  CHECK(res.solutions.paths_tracked == 8);
  CHECK(res.solutions.points.size() == 8);
  CHECK(res.degree_report.deg_phi.value() == 8);
  CHECK(res.degree_report.deg_phi0.value() == 8);
  CHECK(!res.degree_report.degree_drop);
  CHECK(res.degree_report.expected_count.value() == 8);
  for (const auto& p : res.solutions.points) CHECK(target_residual(sys, p) <= 1e-8);
}

TEST_CASE("solve the semimixed two-block system: 6 solutions") {
  SagbiFamily fam = two_block_family();
  ParameterizedSystem sys = int_slice(fam, {2, 1}, 202);
  SolveOptions opts;
  opts.seed = 3;
  SolveResult res = solve(sys, opts);
  CHECK(res.solutions.points.size() == 6);
  CHECK(res.degree_report.deg_phi.value() == 1);
  CHECK(res.degree_report.deg_phi0.value() == 1);
  for (const auto& p : res.solutions.points) CHECK(target_residual(sys, p) <= 1e-8);
}

TEST_CASE("solve the base-locus family with and without recovery") {
  SagbiFamily fam = base_locus_family();
  ParameterizedSystem sys = gaussian_slice(fam, {2}, 303);
  SolveOptions opts;
  opts.seed = 5;
  SolveResult plain = solve(sys, opts);
  CHECK(plain.degree_report.degree_drop);
  CHECK(plain.degree_report.deg_phi.value() == 2);
  CHECK(plain.degree_report.deg_phi0.value() == 1);
  CHECK(plain.degree_report.warning.find("will not find all the solutions") !=
        std::string::npos);
  CHECK(plain.solutions.points.size() == 2);

  opts.get_base_locus = true;
  SolveResult with = solve(sys, opts);
  CHECK(with.solutions.points.size() == 4);
  for (const auto& p : with.solutions.points) CHECK(target_residual(sys, p) <= 1e-6);
}

TEST_CASE("one-step and two-step endpoints agree on the quadric family") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = int_slice(fam, {3}, 404);
  SolveOptions two;
  two.seed = 7;
  two.degree_check = false;
  SolveOptions one = two;
  one.one_step = true;
  SolveResult a = solve(sys, two);
  SolveResult b = solve(sys, one);
  CHECK(b.method == "one-step");
  REQUIRE(a.solutions.points.size() == 8);
  REQUIRE(b.solutions.points.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    double best = 1e9;
    for (std::size_t j = 0; j < 8; ++j)
      best = std::min(best,
                      (a.solutions.points[i] - b.solutions.points[j]).lpNorm<Eigen::Infinity>());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("flat solution counts across the deformation parameter") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = int_slice(fam, {3}, 505);
  DetectResult d = detect_weight(fam);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mag(0.3, 1.0), ang(0.0, 6.28);
  for (int k = 0; k < 3; ++k) {
    Cx t_star = std::polar(mag(rng), ang(rng));
    CHECK(count_solutions_at_t(sys, *d.weight, t_star, 600 + k) == 8);
  }
}

TEST_CASE("vary-linear-part reproduces the direct solve on a generic system") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = gaussian_slice(fam, {3}, 606);
  SolveOptions direct;
  direct.seed = 8;
  direct.degree_check = false;
  SolveOptions varied = direct;
  varied.vary_linear_part = true;
  SolveResult a = solve(sys, direct);
  SolveResult b = solve(sys, varied);
  REQUIRE(a.solutions.points.size() == 8);
  REQUIRE(b.solutions.points.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    double best = 1e9;
    for (std::size_t j = 0; j < 8; ++j)
      best = std::min(best,
                      (a.solutions.points[i] - b.solutions.points[j]).lpNorm<Eigen::Infinity>());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("gamma independence of the solution count") {
  SagbiFamily fam = quadric_p3_family();
  ParameterizedSystem sys = int_slice(fam, {3}, 707);
  SolveOptions opts;
  opts.degree_check = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    opts.seed = seed;
    SolveResult res = solve(sys, opts);
    CHECK(res.solutions.points.size() == 8);
  }
}

TEST_CASE("unverified weight aborts unless forced") {
  SagbiFamily fam = two_block_family();
  ParameterizedSystem sys = int_slice(fam, {2, 1}, 808);
  SolveOptions opts;
  opts.weight = WeightVector{{-1, -2, -3}};  // fails the criterion
  CHECK_THROWS_AS(solve(sys, opts), std::runtime_error);
  opts.force = true;
  opts.degree_check = false;
  SolveResult res = solve(sys, opts);  // proceeds with a warning
  CHECK(!res.warnings.empty());
}
