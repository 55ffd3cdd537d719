#include "randsmooth/trace.hpp"

#include <iomanip>

namespace randsmooth {

std::int64_t RunTrace::first_hit(double eps) const {
  for (const auto& r : rows)
    if (r.gap <= eps) return r.t;
  return -1;
}

void RunTrace::write_csv(std::ostream& os, bool with_time) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << "t,u,L,eta,gap,oracle_calls" << (with_time ? ",wall_ns" : "") << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.u << ',' << r.L << ',' << r.eta << ',' << r.gap << ',' << r.oracle_calls;
    if (with_time) os << ',' << r.wall_ns;
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace randsmooth
