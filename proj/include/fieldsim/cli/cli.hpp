#pragma once

#include <iosfwd>

namespace fieldsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInsufficientData = 3;
inline constexpr int kExitInterrupted = 130;

// Entry point of the fieldsim tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Set by the SIGINT handler; long commands poll it and flush what they have.
void request_interrupt();
void reset_interrupt();

}  // namespace fieldsim::cli
