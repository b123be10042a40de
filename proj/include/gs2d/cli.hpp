// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace gs2d {

/// Full command-line surface (fit / render / ppm / eval / bench).
/// Exit codes: 0 success, 1 bad arguments or dimension mismatch,
/// 2 I/O failure, 3 numerical failure.
int cli_main(int argc, char** argv);

} // namespace gs2d
