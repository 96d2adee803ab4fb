#pragma once

#include <string>
#include <vector>

namespace pfedeg {

/// Entry point behind the pfedeg binary; also callable in-process by tests.
/// Commands: synth, train, eval, inspect-weights. Returns 0 on success,
/// 2 on configuration errors, 3 on load errors, 1 otherwise, printing a
/// single-line diagnostic to stderr.
int cli_main(const std::vector<std::string>& args);

}  // namespace pfedeg
