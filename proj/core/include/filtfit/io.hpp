#pragma once

#include <string>

#include "filtfit/signal.hpp"

namespace filtfit {

/// Shortest round-trip decimal representation ("%.17g" trimmed); "inf"/"nan"
/// spelled literally so emitted files are locale- and platform-stable.
std::string format_double(double v);

/// Writes a signal as CSV with header tau,re,im (one row per support index).
void write_signal_csv(const std::string& path, const ComplexSignal& s);

/// Reads a tau,re,im CSV; the tau column must cover a contiguous range.
ComplexSignal read_signal_csv(const std::string& path);

}  // namespace filtfit
