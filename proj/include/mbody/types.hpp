#pragma once

#include <Eigen/Core>

namespace mbody {

using Vec2 = Eigen::Vector2d;
// Scene points. 2D scenes keep z = 0; 1D scenes use only x.
using Vec3 = Eigen::Vector3d;

inline Vec3 lift(const Vec2& p) { return {p.x(), p.y(), 0.0}; }
inline Vec2 drop(const Vec3& p) { return {p.x(), p.y()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace mbody
