#pragma once

#include <string>

#include "amlab/chain.hpp"
#include "amlab/recursion_lab.hpp"

namespace amlab {

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Trace CSV: one comment line carrying provenance, one header row, then the
// recorded states. Columns: n, accepted, used_fixed, x_1..x_d, m_1..m_d,
// s_11..s_dd (row-major upper triangle), lambda_min, log2_scale.
void write_trace_csv(const ChainTrace& trace, const std::string& path);

// Expectation series CSV: columns n, log_b, ratio.
void write_expectation_csv(const RecursionSeries& series,
                           const std::string& path,
                           const std::string& config_digest,
                           std::int64_t thin = 1);

}  // namespace amlab
