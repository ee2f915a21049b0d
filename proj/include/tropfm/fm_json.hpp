#pragma once

// JSON interchange for planted forest types. Deterministic output: exporting
// an imported file reproduces it byte for byte.

#include <string>
#include <vector>

#include "tropfm/fm.hpp"

namespace tropfm {

// Schema: {"schema": "fm-types", "n", "rays", "types": [{"base": grid label,
// "classes": [[members], ...], "trees": [{"parent": [-1, ...], "legs":
// [[labels], ...]}, ...]}]}.  Every type must be well-formed over n points and
// `rays` rays.
std::string fm_types_to_json(int n, int rays, const std::vector<PlantedForestType>& types);

// Throws ParseError on malformed input, and validates every type.
std::vector<PlantedForestType> fm_types_from_json(const std::string& text);

}  // namespace tropfm
