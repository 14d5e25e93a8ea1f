#pragma once

#include "pwlnet/pwl.hpp"

#include <string>
#include <string_view>

namespace pwlnet {

/// Exact breakpoint table: header x_num,x_den,y_num,y_den, one row per
/// breakpoint in increasing abscissa order.
std::string breakpoints_csv_exact(const Pwl& f);

/// Double-precision companion table (header x,y) for plotting.
std::string breakpoints_csv_float(const Pwl& f);

/// Self-contained JSON form of a Pwl (breakpoints, boundary slopes, domain,
/// and a value anchor so affine functions round-trip).
std::string pwl_to_json(const Pwl& f);
Pwl pwl_from_json(std::string_view text);

} // namespace pwlnet
