#include "amlab/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace amlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_trace_csv(const ChainTrace& trace, const std::string& path) {
  auto out = open_or_throw(path);
  const std::size_t d = trace.dim;
  out << "# config_digest=" << trace.config_digest << " seed=" << trace.seed
      << "\n";
  out << "n,accepted,used_fixed";
  for (std::size_t i = 1; i <= d; ++i) out << ",x_" << i;
  for (std::size_t i = 1; i <= d; ++i) out << ",m_" << i;
  for (std::size_t i = 1; i <= d; ++i)
    for (std::size_t j = i; j <= d; ++j) out << ",s_" << i << j;
  out << ",lambda_min,log2_scale\n";
  const std::size_t tri = d * (d + 1) / 2;
  for (std::size_t r = 0; r < trace.record_count(); ++r) {
    out << trace.rec_n[r] << ',' << int(trace.rec_accepted[r]) << ','
        << int(trace.rec_used_fixed[r]);
    for (std::size_t i = 0; i < d; ++i)
      out << ',' << format_double(trace.rec_x[r * d + i]);
    for (std::size_t i = 0; i < d; ++i)
      out << ',' << format_double(trace.rec_m[r * d + i]);
    for (std::size_t i = 0; i < tri; ++i)
      out << ',' << format_double(trace.rec_s_upper[r * tri + i]);
    out << ',' << format_double(trace.rec_lambda_min[r]) << ','
        << trace.rec_log2_scale[r] << "\n";
  }
}

void write_expectation_csv(const RecursionSeries& series,
                           const std::string& path,
                           const std::string& config_digest, std::int64_t thin) {
  if (thin < 1) throw std::invalid_argument("write_expectation_csv: thin >= 1");
  auto out = open_or_throw(path);
  out << "# config_digest=" << config_digest << "\n";
  out << "n,log_b,ratio\n";
  const auto n_max = static_cast<std::int64_t>(series.log_b.size());
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (n % thin != 0 && n != 1 && n != n_max) continue;
    out << n << ',' << format_double(series.log_b[static_cast<std::size_t>(n - 1)])
        << ',' << format_double(series.ratio[static_cast<std::size_t>(n - 1)])
        << "\n";
  }
}

}  // namespace amlab
