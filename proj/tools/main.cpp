// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/cli.hpp"

int main(int argc, char** argv) { return mwr::cli_main(argc, argv); }
