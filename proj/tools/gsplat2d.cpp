// SPDX-License-Identifier: Apache-2.0
#include "gs2d/cli.hpp"

int main(int argc, char** argv) { return gs2d::cli_main(argc, argv); }
