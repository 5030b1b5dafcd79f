#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sagbihom/intlin.hpp"
#include "sagbihom/polynomial.hpp"

namespace sagbihom {

/// Distinct lattice points of one block's leading exponents together with the
/// number of equations drawing on that block.
struct SupportSet {
  std::vector<ExponentVec> points;
  int multiplicity = 0;
};

struct Lifting {
  std::vector<std::vector<std::int64_t>> values;  // one value per point per support
  std::uint64_t seed = 0;
};

Lifting draw_lifting(const std::vector<SupportSet>& supports, std::uint64_t seed);

/// A lower-hull tie; callers re-draw the lifting with a new seed.
struct DegenerateLifting : std::runtime_error {
  DegenerateLifting() : std::runtime_error("degenerate lifting (lower-hull tie)") {}
};

/// Fine mixed cell: multiplicity_r + 1 affinely independent points from
/// support r; gamma is the lower-hull facet normal (minimization convention),
/// volume the absolute determinant of the stacked edge matrix.
struct MixedCell {
  std::vector<std::vector<int>> selected;  // per support, point indices, first = anchor
  std::vector<Rat> gamma;
  std::vector<Rat> level;  // per support, min lifted value on the cell
  Zint volume;
};

/// Enumerates all fine mixed cells of the lifted lower hull. Exhaustive tuple
/// search with affine-rank pruning; every reported cell and every near-tie is
/// confirmed in exact rational arithmetic.
std::vector<MixedCell> mixed_cells(const std::vector<SupportSet>& supports,
                                   const Lifting& lifting);

/// Sum of cell volumes under a generic lifting; re-draws on degeneracy (at
/// most 10 attempts).
Zint mixed_volume(const std::vector<SupportSet>& supports, std::uint64_t seed = 1);

/// x^A = c with nonsingular integer A and nonzero complex constants.
struct BinomialSystem {
  ZMat exponents;  // row i holds the exponents of equation i
  std::vector<Cx> constants;
};

/// All |det A| torus solutions via the Smith normal form of the exponent
/// matrix; output sorted canonically.
std::vector<std::vector<Cx>> solve_binomial(const BinomialSystem& sys);

/// Complex coefficients of the equations drawing on one support: row e gives
/// the coefficient of every support point in equation e.
using SupportRows = std::vector<std::vector<Cx>>;

struct CellStart {
  MixedCell cell;
  std::vector<std::vector<Cx>> solutions;
};

/// For every cell, restricts the equations to the cell's points, row-reduces
/// to a square binomial system and solves it; the union over cells carries
/// mixed_volume many start solutions.
std::vector<CellStart> start_solutions(const std::vector<SupportSet>& supports,
                                       const std::vector<SupportRows>& rows,
                                       const std::vector<MixedCell>& cells);

}  // namespace sagbihom
