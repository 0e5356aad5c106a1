#pragma once

// Quadrature rules on the reference triangle (barycentric points, weights
// summing to 1) and on segments, plus the quadratic (6-node) element basis.

#include <array>
#include <cstddef>

namespace magbound {

struct TriQuadPoint {
  double l0, l1, l2;  // barycentric coordinates
  double w;           // weight, sum over rule = 1
};

// degree-2 rule (3 points, edge midpoints)
inline constexpr std::array<TriQuadPoint, 3> tri_rule_deg2{{
    {0.5, 0.5, 0.0, 1.0 / 3.0},
    {0.0, 0.5, 0.5, 1.0 / 3.0},
    {0.5, 0.0, 0.5, 1.0 / 3.0},
}};

// degree-4 rule (6 points, Dunavant)
inline constexpr std::array<TriQuadPoint, 6> tri_rule_deg4{{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
}};

// degree-5 rule (7 points)
inline constexpr std::array<TriQuadPoint, 7> tri_rule_deg5{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
}};

// Gauss-Legendre on [0,1]
inline constexpr std::array<std::array<double, 2>, 2> seg_rule_2{{
    {0.21132486540518712, 0.5},
    {0.78867513459481288, 0.5},
}};

inline constexpr std::array<std::array<double, 2>, 3> seg_rule_3{{
    {0.11270166537925831, 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.88729833462074169, 5.0 / 18.0},
}};

// Quadratic Lagrange basis on the reference triangle. Local node order:
// 0,1,2 vertices; 3 on edge (0,1), 4 on edge (1,2), 5 on edge (2,0).
struct P2Basis {
  static std::array<double, 6> shape(double l0, double l1, double l2) {
    return {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
            4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
  }

  // d(shape)/d(lambda_i), rows: node, cols: lambda index
  static std::array<std::array<double, 3>, 6> shape_dlambda(double l0, double l1, double l2) {
    return {{
        {4 * l0 - 1, 0, 0},
        {0, 4 * l1 - 1, 0},
        {0, 0, 4 * l2 - 1},
        {4 * l1, 4 * l0, 0},
        {0, 4 * l2, 4 * l1},
        {4 * l2, 0, 4 * l0},
    }};
  }
};

}  // namespace magbound
