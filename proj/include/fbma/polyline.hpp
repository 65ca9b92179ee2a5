#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fbma {

using Vec2 = Eigen::Vector2d;

/// Sign of the determinant |b - a, c - a|: +1 left turn, -1 right turn, 0 collinear.
/// Exact: a floating-point filter with a rational fallback near zero.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Closed segments [p, q] and [r, s] share at least one point.
bool segments_intersect(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s);

struct SimplicityReport {
    bool simple = true;
    /// First offending pair of segment indices (segment k joins vertex k and k + 1).
    std::optional<std::pair<int, int>> witness;
};

/// Sweep-line (Shamos-Hoey) test: no two non-adjacent segments meet, and
/// adjacent segments meet only in their shared vertex.
SimplicityReport polyline_simple(std::span<const Vec2> vertices, bool closed);

/// Quadratic reference implementation of the same test.
SimplicityReport polyline_simple_brute(std::span<const Vec2> vertices, bool closed);

}  // namespace fbma
