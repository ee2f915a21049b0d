#pragma once

#include <stdexcept>
#include <string>

namespace tropfm {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& w) : Error("dimension mismatch: " + w) {}
};

struct NotACell : Error {
    explicit NotACell(const std::string& w) : Error("not a cell of the complex: " + w) {}
};

struct MapUndefined : Error {
    explicit MapUndefined(const std::string& w) : Error("map undefined: " + w) {}
};

struct NotInSupport : Error {
    int point_index;
    explicit NotInSupport(int i)
        : Error("point " + std::to_string(i) + " lies outside the fan support"), point_index(i) {}
};

// Enumeration exceeded the configured candidate budget.
struct SizeLimit : Error {
    explicit SizeLimit(const std::string& w) : Error("enumeration budget exceeded: " + w) {}
};

struct HeightMismatch : Error {
    explicit HeightMismatch(const std::string& w) : Error("height mismatch: " + w) {}
};

struct NotRigid : Error {
    explicit NotRigid(const std::string& w) : Error("type is not rigid: " + w) {}
};

struct NotAFace : Error {
    explicit NotAFace(const std::string& w) : Error("not a face: " + w) {}
};

struct SliceTooSmall : Error {
    explicit SliceTooSmall(const std::string& w)
        : Error("slice height too small, raise T: " + w) {}
};

struct UnsupportedDim : Error {
    explicit UnsupportedDim(const std::string& w) : Error("unsupported dimension: " + w) {}
};

struct Unstable : Error {
    explicit Unstable(const std::string& w) : Error("unstable forest: " + w) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error("parse error: " + w) {}
};

} // namespace tropfm
