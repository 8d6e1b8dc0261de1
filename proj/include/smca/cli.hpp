#pragma once

#include <iosfwd>

namespace smca {

/// Full command-line surface. Writes the JSON report to `out`, a short
/// human-readable summary and all diagnostics to `err`.
/// Returns 0 on a completed run, 1 on input/validation errors, 2 when a
/// sampled path exhausted its step budget without resolving.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace smca
