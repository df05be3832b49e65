#ifndef ZIGZAG_DOMAIN_HPP
#define ZIGZAG_DOMAIN_HPP

#include <cmath>

namespace zigzag {

// State space of the position coordinate: the unit torus [0,1) or the real line.
enum class DomainKind { torus, line };

// Reduce a torus coordinate to [0,1).
inline double wrap_torus(double x) {
  double y = x - std::floor(x);
  return (y >= 1.0) ? y - 1.0 : y;
}

inline double wrap(double x, DomainKind domain) {
  return domain == DomainKind::torus ? wrap_torus(x) : x;
}

}  // namespace zigzag

#endif
