#pragma once

#include <string>

namespace newton_chaos {

/// 113-bit binary floating point used by the symbolic engine. Chains of
/// pullbacks through M multiply conditioning by the multipliers of repelling
/// orbits near band edges (hundreds to thousands per step), which exhausts a
/// double within two or three stages.
using Real = __float128;

inline double to_double(Real x) noexcept { return static_cast<double>(x); }
inline Real abs(Real x) noexcept { return x < 0 ? -x : x; }
inline bool is_finite(Real x) noexcept { return x == x && (x - x) == 0; }

/// Decimal rendering with `digits` significant digits.
std::string format_real(Real x, int digits = 36);

/// Low-order part: to_double(x - to_double(x)). Together with to_double(x)
/// this carries about 106 bits of x through plain-double channels.
inline double low_part(Real x) noexcept { return static_cast<double>(x - static_cast<Real>(static_cast<double>(x))); }

}  // namespace newton_chaos
