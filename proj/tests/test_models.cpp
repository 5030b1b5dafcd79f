#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sagbihom/models.hpp"

using namespace sagbihom;

TEST_CASE("grassmannian generator counts and degrees") {
  GrassmannianFamily g24 = grassmannian_family(2, 4);
  CHECK(g24.family.blocks[0].size() == 6);
  CHECK(g24.family.ctx->size() == 4);
  for (const auto& p : g24.family.blocks[0]) CHECK(p.degree() <= 2);

  GrassmannianFamily g25 = grassmannian_family(2, 5);
  CHECK(g25.family.blocks[0].size() == 10);
  CHECK(g25.family.ctx->size() == 6);

  // the (1, m) chart is a projective space: generators are 1 and the
  // coordinates
  GrassmannianFamily g14 = grassmannian_family(1, 4);
  CHECK(g14.family.blocks[0].size() == 4);
  DetectResult d = detect_weight(g14.family);
  REQUIRE(d.weight.has_value());
  CHECK(compute_degree_monomial_map(g14.family, g14.weight).value() == 1);
}

TEST_CASE("PBW weight passes the criterion and the leader volume matches") {
  GrassmannianFamily g24 = grassmannian_family(2, 4);
  // validated inside the generator; re-check and inspect the degeneration
  SagbiCertificate cert = sagbi_check(g24.family, g24.weight);
  CHECK(cert.verified);
  LeaderFold fold = fold_leaders(g24.family, g24.weight, {4});
  CHECK(mixed_volume(fold.supports, 5) == 2);
  CHECK(compute_degree_monomial_map(g24.family, g24.weight).value() == 1);

  GrassmannianFamily g25 = grassmannian_family(2, 5);
  LeaderFold fold25 = fold_leaders(g25.family, g25.weight, {6});
  CHECK(mixed_volume(fold25.supports, 5) == 5);
}

TEST_CASE("generic slice of Gr(2,4) has 2 solutions") {
  GrassmannianFamily g = grassmannian_family(2, 4);
  ParameterizedSystem sys = random_slice(g.family, {4}, CoeffKind::complex_gaussian, 77);
  SolveOptions opts;
  opts.weight = g.weight;
  opts.degree_check = false;
  opts.seed = 1;
  SolveResult res = solve(sys, opts);
  CHECK(res.solutions.paths_tracked == 2);
  CHECK(res.solutions.points.size() == 2);
}

TEST_CASE("resonator construction honors the coefficient constraints") {
  ResonatorSpec spec = ResonatorSpec::random(2, 3, 9);
  spec.validate();
  CHECK(spec.a[0][2] == -spec.b[0][1]);
  CHECK(spec.a[1][3] == spec.b[1][3]);
  ParameterizedSystem sys = resonator_family(spec);
  CHECK(sys.family.blocks.size() == 2);
  CHECK(sys.family.blocks[0].size() == 3 + 2 * 2 + 2);
  CHECK(sys.num_equations() == 4);

  // the degree-(2n-1) terms are present in the target equations
  std::vector<CPoly> eqs = target_equations(sys);
  CHECK(eqs[0].degree() == 5);

  ResonatorSpec bad = spec;
  bad.a[0][2] += 1.0;
  CHECK_THROWS_AS(resonator_family(bad), std::invalid_argument);
}

TEST_CASE("single resonator solves to 5 steady states") {
  ResonatorSpec spec = ResonatorSpec::random(1, 3, 12);
  ParameterizedSystem sys = resonator_family(spec);
  SolveOptions opts;
  opts.seed = 2;
  opts.degree_check = false;
  SolveResult res = solve(sys, opts);
  CHECK(res.solutions.points.size() == 5);
}

TEST_CASE("degenerate linear resonator") {
  // all nonlinear coefficients zero gives a linear system with one solution
  ResonatorSpec spec = ResonatorSpec::random(1, 3, 31);
  for (int kk = 3; kk <= 4; ++kk) {
    spec.a[0][kk] = 0;
    spec.b[0][kk] = 0;
  }
  ParameterizedSystem sys = resonator_family(spec);
  SolveOptions opts;
  opts.seed = 3;
  opts.degree_check = false;
  SolveResult res = solve(sys, opts);
  CHECK(res.solutions.points.size() == 1);
}

TEST_CASE("random_slice determinism and patterns") {
  GrassmannianFamily g = grassmannian_family(2, 4);
  ParameterizedSystem a = random_slice(g.family, {4}, CoeffKind::int_range, 42);
  ParameterizedSystem b = random_slice(g.family, {4}, CoeffKind::int_range, 42);
  CHECK(a.coefficients == b.coefficients);
  for (const auto& row : a.coefficients[0])
    for (const auto& v : row) {
      CHECK(v.imag() == 0.0);
      CHECK(std::abs(v.real()) <= 100.0);
      CHECK(v.real() == std::floor(v.real()));
    }
  ParameterizedSystem c = random_slice(g.family, {4}, CoeffKind::complex_gaussian, 42);
  bool any_imag = false;
  for (const auto& row : c.coefficients[0])
    for (const auto& v : row)
      if (v.imag() != 0.0) any_imag = true;
  CHECK(any_imag);
  CHECK_THROWS_AS(random_slice(g.family, {3}, CoeffKind::int_range, 1),
                  std::invalid_argument);
}

TEST_CASE("the special Gr(3,6) coefficient matrix has the right shape") {
  auto coeffs = gr36_special_coefficients();
  REQUIRE(coeffs.size() == 1);
  REQUIRE(coeffs[0].size() == 9);
  for (const auto& row : coeffs[0]) CHECK(row.size() == 20);
  CHECK(coeffs[0][0][0] == Cx(4, 0));
  CHECK(coeffs[0][8][19] == Cx(1, 0));
}
