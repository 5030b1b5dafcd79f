#pragma once

#include <cstdint>
#include <vector>

#include "sagbihom/homotopy.hpp"

namespace sagbihom {

/// Maximal minors of [I_k | X] in the k(m-k) entries of X, together with the
/// PBW weight (row r of the weight matrix is r*(m-k, ..., 1)); the returned
/// weight is validated by sagbi_check before returning.
struct GrassmannianFamily {
  SagbiFamily family;
  WeightVector weight;
  int k = 0, m = 0;
};
GrassmannianFamily grassmannian_family(int k, int m, int generator_cap = 256);

/// Coupled-resonator steady-state equations: N resonator pairs with a
/// restoring-force nonlinearity of degree 2n-1, 2N equations in (u_i, v_i).
struct ResonatorSpec {
  int N = 1;
  int n = 3;
  // a[i][k] for k = 0..n+1, b[i][k] for k = 0..n+1, couplings J[j][i]
  std::vector<std::vector<double>> a, b;
  std::vector<std::vector<double>> J;

  /// Random real coefficients honoring a_{2,i} = -b_{1,i} and
  /// a_{k,i} = b_{k,i} for k = 3..n+1.
  static ResonatorSpec random(int N, int n, std::uint64_t seed);
  void validate() const;
};
ParameterizedSystem resonator_family(const ResonatorSpec& spec);

enum class CoeffKind { int_range, complex_gaussian };

/// Random square slice of a family: integer coefficients uniform in
/// [-100, 100] or complex standard Gaussians, deterministic in the seed.
ParameterizedSystem random_slice(const SagbiFamily& family,
                                 const std::vector<int>& rows_per_block, CoeffKind kind,
                                 std::uint64_t seed);

/// The sparse 9x20 block-diagonal integer matrix of the special linear
/// system on the Gr(3,6) minors used by the bench suite.
std::vector<std::vector<std::vector<Cx>>> gr36_special_coefficients();

}  // namespace sagbihom
