//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/commands.hpp"

int main(int argc, char **argv) { return chemscreen::cli::run(argc, argv); }
