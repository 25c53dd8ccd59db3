//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_COMMANDS_HPP_
#define CHEMSCREEN_COMMANDS_HPP_

namespace chemscreen::cli {

// Full command-line surface: curate, split, featurize, train-rf,
// train-random, predict, evaluate, tune, synth-bench, verify.
int run(int argc, const char *const *argv);

}  // namespace chemscreen::cli

#endif  // CHEMSCREEN_COMMANDS_HPP_
