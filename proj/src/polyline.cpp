#include "fbma/polyline.hpp"

#include "fbma/error.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <set>

namespace fbma {

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const double l = (b.x() - a.x()) * (c.y() - a.y());
    const double r = (b.y() - a.y()) * (c.x() - a.x());
    const double det = l - r;
    constexpr double eps = std::numeric_limits<double>::epsilon() / 2;
    const double bound = (3.0 + 16.0 * eps) * eps * (std::abs(l) + std::abs(r));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    if (l == 0.0 && r == 0.0) return 0;

    using boost::multiprecision::cpp_rational;
    const cpp_rational ax(a.x()), ay(a.y());
    const cpp_rational d = (cpp_rational(b.x()) - ax) * (cpp_rational(c.y()) - ay) -
                           (cpp_rational(b.y()) - ay) * (cpp_rational(c.x()) - ax);
    return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

namespace {

// c collinear with [a, b]: inside the bounding box.
bool on_segment(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= c.y() &&
           c.y() <= std::max(a.y(), b.y());
}

struct Polyline {
    std::span<const Vec2> v;
    bool closed;
    int segments() const { return static_cast<int>(v.size()) - (closed ? 0 : 1); }
    const Vec2& p(int s) const { return v[s]; }
    const Vec2& q(int s) const { return v[(s + 1) % v.size()]; }

    bool adjacent(int s, int t) const
    {
        const int n = segments();
        if (std::abs(s - t) == 1) return true;
        return closed && n > 2 && std::abs(s - t) == n - 1;
    }

    // Offending pair: non-adjacent segments that meet, or adjacent ones that
    // overlap beyond the shared vertex.
    bool conflict(int s, int t) const
    {
        if (s == t) return false;
        if (!adjacent(s, t)) return segments_intersect(p(s), q(s), p(t), q(t));
        // Shared vertex w; the far ends must not fold back onto the other segment.
        const bool s_first = q(s) == p(t) && ((s + 1) % static_cast<int>(v.size())) == t;
        const Vec2& w = s_first ? q(s) : p(s);
        const Vec2& fs = s_first ? p(s) : q(s);
        const Vec2& ft = s_first ? q(t) : p(t);
        if (orient2d(w, fs, ft) != 0) return false;
        return (fs - w).dot(ft - w) > 0.0;
    }
};

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

}  // namespace

bool segments_intersect(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s)
{
    const int o1 = orient2d(p, q, r);
    const int o2 = orient2d(p, q, s);
    const int o3 = orient2d(r, s, p);
    const int o4 = orient2d(r, s, q);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p, q, r)) return true;
    if (o2 == 0 && on_segment(p, q, s)) return true;
    if (o3 == 0 && on_segment(r, s, p)) return true;
    if (o4 == 0 && on_segment(r, s, q)) return true;
    return false;
}

namespace {

void check_input(std::span<const Vec2> v, bool closed)
{
    if (v.size() < (closed ? 3u : 2u)) throw InputError("polyline: too few vertices");
    for (const auto& x : v) {
        if (!x.allFinite()) throw InputError("polyline: non-finite vertex");
    }
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (v[k] == v[k + 1]) throw InputError("polyline: repeated consecutive vertex");
    }
    if (closed && v.front() == v.back()) throw InputError("polyline: closed polylines must not repeat the first vertex");
}

}  // namespace

SimplicityReport polyline_simple_brute(std::span<const Vec2> v, bool closed)
{
    check_input(v, closed);
    const Polyline pl{v, closed};
    const int n = pl.segments();
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            if (pl.conflict(s, t)) return {false, std::pair{s, t}};
        }
    }
    return {};
}

SimplicityReport polyline_simple(std::span<const Vec2> v, bool closed)
{
    check_input(v, closed);
    const Polyline pl{v, closed};
    const int n = pl.segments();

    // Left and right endpoints in lexicographic order.
    std::vector<Vec2> left(n), right(n);
    for (int s = 0; s < n; ++s) {
        const bool fwd = lex_less(pl.p(s), pl.q(s));
        left[s] = fwd ? pl.p(s) : pl.q(s);
        right[s] = fwd ? pl.q(s) : pl.p(s);
    }

    // s below t for non-crossing segments with overlapping x-ranges: the later
    // starting segment is located against the line of the earlier one.
    auto side = [&](int base, int other) {
        const int o = orient2d(left[base], right[base], left[other]);
        return o != 0 ? o : orient2d(left[base], right[base], right[other]);
    };
    auto less = [&](int s, int t) {
        if (s == t) return false;
        const bool s_first = lex_less(left[s], left[t]) || (left[s] == left[t] && s < t);
        const int o = s_first ? side(s, t) : -side(t, s);
        return o != 0 ? o > 0 : s < t;
    };

    struct Event {
        Vec2 at;
        bool insert;
        int seg;
    };
    std::vector<Event> events;
    events.reserve(2 * n);
    for (int s = 0; s < n; ++s) {
        events.push_back({left[s], true, s});
        events.push_back({right[s], false, s});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.at != b.at) return lex_less(a.at, b.at);
        if (a.insert != b.insert) return a.insert;  // insertions first: touching segments are compared
        return a.seg < b.seg;
    });

    auto cmp = [&](int s, int t) { return less(s, t); };
    std::set<int, decltype(cmp)> active(cmp);
    SimplicityReport fail{false, std::nullopt};
    auto test = [&](int s, int t) {
        if (pl.conflict(s, t)) {
            fail.witness = std::pair{std::min(s, t), std::max(s, t)};
            return true;
        }
        return false;
    };

    for (const Event& e : events) {
        if (e.insert) {
            auto [it, ok] = active.insert(e.seg);
            if (!ok) {
                // Indistinguishable from an active segment: collinear overlap.
                if (test(*it, e.seg)) return fail;
                continue;
            }
            if (it != active.begin() && test(*std::prev(it), e.seg)) return fail;
            if (std::next(it) != active.end() && test(*std::next(it), e.seg)) return fail;
        } else {
            auto it = active.find(e.seg);
            if (it == active.end()) continue;
            if (it != active.begin() && std::next(it) != active.end() && test(*std::prev(it), *std::next(it))) return fail;
            active.erase(it);
        }
    }
    return {};
}

}  // namespace fbma
