#pragma once

#include <optional>
#include <vector>

#include "tropfm/numbers.hpp"
#include "tropfm/polyhedron.hpp"

namespace tropfm {

// Pointed rational polyhedral cone, canonically stored as the sorted list of
// primitive extreme rays. The zero cone has no rays.
class Cone {
  public:
    Cone() = default;
    static Cone zero(int ambient);
    static Cone from_rays(int ambient, const QMat& gens);
    static Cone from_extreme_rays(int ambient, const QMat& rays);
    static Cone orthant(int ambient);

    int ambient() const { return ambient_; }
    const QMat& rays() const { return rays_; }
    int nrays() const { return (int)rays_.size(); }
    int dim() const;
    const HRep& hrep() const;
    bool contains(const QVec& x) const;
    bool contains_cone(const Cone& other) const;
    QVec relint_point() const;
    Cone face_at(const QVec& normal) const;
    std::vector<std::vector<int>> face_ray_sets() const;
    Cone subcone(const std::vector<int>& ray_idx) const;

    bool operator==(const Cone& o) const { return ambient_ == o.ambient_ && rays_ == o.rays_; }
    bool operator!=(const Cone& o) const { return !(*this == o); }
    bool operator<(const Cone& o) const {
        if (ambient_ != o.ambient_) return ambient_ < o.ambient_;
        return rays_ < o.rays_;
    }

  private:
    int ambient_ = 0;
    QMat rays_;
    mutable std::optional<HRep> hrep_;
    mutable int dim_ = -1;
};

Cone intersect(const Cone& a, const Cone& b);
Cone cone_product(const Cone& a, const Cone& b);
Cone image_cone(const QMat& M, const Cone& c);
bool is_face_of(const Cone& f, const Cone& c);

} // namespace tropfm
