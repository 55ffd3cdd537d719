#ifndef RANDSMOOTH_TRACE_HPP
#define RANDSMOOTH_TRACE_HPP

#include "randsmooth/core.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace randsmooth {

/// One evaluated iterate. Row t describes x_t: `u` is the smoothing radius
/// of the step that produced it, `L` and `eta` the scalars of its z-update.
struct TraceRow {
  std::int64_t t = 0;
  double u = 0.0;
  double L = 0.0;
  double eta = 0.0;
  double gap = 0.0;
  std::uint64_t oracle_calls = 0;
  std::int64_t wall_ns = 0;  // optimizer time only; gap evaluation excluded
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::map<std::string, std::string> metadata;
  Vector x_final;  // the output point (x_T, or the running average for dual averaging)
  Vector z_final;
  double initial_gap = NAN;  // gap at x_0

  /// First iterate index whose gap is <= eps, or -1.
  std::int64_t first_hit(double eps) const;
  double final_gap() const { return rows.empty() ? NAN : rows.back().gap; }

  /// Header plus one line per row. `with_time` false drops wall_ns, which is
  /// the only non-reproducible column.
  void write_csv(std::ostream& os, bool with_time = true) const;
};

}  // namespace randsmooth

#endif
