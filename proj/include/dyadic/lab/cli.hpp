#pragma once

#include <iosfwd>

namespace dyadic::lab {

/// Entry point of the dyadic-lab executable. Returns 0 when every verdict of
/// the scenario passes, 1 when one fails, and 2 on usage or config errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dyadic::lab
