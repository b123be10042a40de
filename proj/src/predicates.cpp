// SPDX-License-Identifier: Apache-2.0
#include "gs2d/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

namespace gs2d {

namespace {

using exact = boost::multiprecision::cpp_rational;

// u = 2^-53; filter constants follow the standard floating-point error
// analysis for these determinants.
constexpr double kU = 1.1102230246251565e-16;
constexpr double kOrientBound = (3.0 + 16.0 * kU) * kU;
constexpr double kIncircleBound = (10.0 + 96.0 * kU) * kU;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

template <typename T>
int sign_of_exact(const T& v) {
    if (v > 0)
        return 1;
    if (v < 0)
        return -1;
    return 0;
}

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
    exact ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    exact det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    return sign_of_exact(det);
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    exact adx = exact(a.x) - exact(d.x);
    exact ady = exact(a.y) - exact(d.y);
    exact bdx = exact(b.x) - exact(d.x);
    exact bdy = exact(b.y) - exact(d.y);
    exact cdx = exact(c.x) - exact(d.x);
    exact cdy = exact(c.y) - exact(d.y);

    exact alift = adx * adx + ady * ady;
    exact blift = bdx * bdx + bdy * bdy;
    exact clift = cdx * cdx + cdy * cdy;

    exact det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                clift * (adx * bdy - bdx * ady);
    return sign_of_exact(det);
}

} // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    double detleft = (a.x - c.x) * (b.y - c.y);
    double detright = (a.y - c.y) * (b.x - c.x);
    double det = detleft - detright;

    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0)
            return sign_of(det);
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0)
            return sign_of(det);
        detsum = -detleft - detright;
    } else {
        return sign_of(det);
    }

    double errbound = kOrientBound * detsum;
    if (det >= errbound || -det >= errbound)
        return sign_of(det);
    return orient2d_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double alift = adx * adx + ady * ady;
    double blift = bdx * bdx + bdy * bdy;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                 clift * (adxbdy - bdxady);
    double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                       (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                       (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    double errbound = kIncircleBound * permanent;
    if (det > errbound || -det > errbound)
        return sign_of(det);
    return incircle_exact(a, b, c, d);
}

} // namespace gs2d
