#pragma once

#include <iosfwd>

namespace metrosim {

// Entry point behind the metrosim binary. Exit 0 on success, 1 on domain
// errors (machine-readable error JSON on `err`), 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace metrosim
