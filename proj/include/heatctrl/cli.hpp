#pragma once

namespace heatctrl::cli {

/// CLI entry point, factored out of main() so tests can drive it.
/// Exit codes: 0 success, 1 numeric/criterion failure, 2 configuration error.
int run(int argc, const char* const* argv);

} // namespace heatctrl::cli
