#pragma once

// Test-only oracle: area and perimeter of a star-shaped domain from a dense
// boundary polygon (shoelace). Independent of the production quadrature path.

#include "magbound/geometry.hpp"

namespace oracle {

struct PolygonMeasure {
  double area = 0;
  double perimeter = 0;
};

inline PolygonMeasure polygon_measure(const magbound::DomainSpec& spec, long panels) {
  using magbound::Vec2;
  long double A = 0, P = 0;
  Vec2 first = spec.boundary_point(0.0), prev = first;
  for (long i = 1; i < panels; i++) {
    Vec2 p = spec.boundary_point(2.0 * magbound::pi * i / panels);
    A += (long double)prev.x * p.y - (long double)prev.y * p.x;
    P += magbound::norm(p - prev);
    prev = p;
  }
  A += (long double)prev.x * first.y - (long double)prev.y * first.x;
  P += magbound::norm(first - prev);
  return {(double)(A * 0.5L), (double)P};
}

}  // namespace oracle
