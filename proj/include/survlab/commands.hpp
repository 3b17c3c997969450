#pragma once

#include <iosfwd>

namespace survlab {

// Command-line entry point. Subcommands: eigen, survival, simulate, verify,
// sandwich, roots. Returns 0 when every gated check passes, 1 when a gated
// check fails and 2 on usage or configuration errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace survlab
