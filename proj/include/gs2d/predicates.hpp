// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/types.hpp"

namespace gs2d {

/// Sign of twice the signed area of (a,b,c): +1 for counter-clockwise,
/// -1 for clockwise, 0 for exactly collinear. Filtered double evaluation
/// with an exact rational fallback near the decision boundary.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// For a counter-clockwise triangle (a,b,c): +1 when d lies strictly inside
/// the circumcircle, -1 strictly outside, 0 exactly on it. Same filtered /
/// exact scheme as orient2d.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

} // namespace gs2d
