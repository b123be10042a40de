// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace gs2d {

/// Worker count: GS2D_THREADS if set (>=1), otherwise hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n). Work items must write disjoint state; the
/// partitioning carries no ordering guarantee, so caller-visible results
/// must not depend on which thread runs which index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gs2d
