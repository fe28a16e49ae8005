#pragma once

// Command-line entry point. Subcommands: synth-data, train, generate,
// verify-bounds, gradcheck, eval, ablate. Exit codes: 0 success, 1 runtime or
// validation failure, 2 usage error. All outputs are deterministic functions
// of the seed.

#include <cstdint>
#include <iosfwd>

namespace dckgen {

// Finite-difference sweep over conv2d, tconv2d, the activations,
// instance_norm, linear and the window -> feature -> kernel -> dynamic-conv
// chain. Prints one line per check; returns true when every check passes.
bool run_gradcheck_suite(uint64_t seed, std::ostream& out);

int cli_main(int argc, const char* const* argv);

}  // namespace dckgen
