#pragma once

// JSON interchange for cone complexes and point configurations. All numbers
// travel as exact "p/q" strings; output is deterministic byte-for-byte, so
// re-exporting an imported file reproduces it.

#include <string>

#include "tropfm/complex.hpp"

namespace tropfm {

// Configuration of n points in r coordinates, one row per point.
struct PointConfig {
    int n = 0;
    int r = 0;
    QMat coords;
};

// Schema: {"ambient_rank", "lattice_basis", "cones": [{"id", "generators",
// "lattice_basis", "label"}], "faces": [[face, cell]]}. Generators are written
// primitive with respect to the complex's ambient lattice.
std::string fan_to_json(const ConeComplex& c);

// Throws ParseError on malformed input or data this representation cannot
// hold (non-permutation ids, cone lattice bases that disagree with the
// ambient lattice).
ConeComplex fan_from_json(const std::string& text);

// Schema: {"n", "r", "coords": [["p/q", ...], ...]}.
std::string points_to_json(const PointConfig& p);
PointConfig points_from_json(const std::string& text);

}  // namespace tropfm
