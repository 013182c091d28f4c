#pragma once

#include <iostream>

namespace attnsim {

/// Entry point behind the command-line tool; streams are injectable for
/// testing. Returns 0 on success, 2 on usage/config errors, 1 otherwise.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace attnsim
