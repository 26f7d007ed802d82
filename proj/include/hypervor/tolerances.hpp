#pragma once

namespace hypervor::tol {

// Algebraic invariants: <x,x> = -1, m^T J m = J, <u,u> = 1.
inline constexpr double kNorm = 1e-10;
// Metric comparisons (distances, coincidence of points).
inline constexpr double kGeom = 1e-8;
// Relative singular-value threshold for rank decisions.
inline constexpr double kRank = 1e-7;
// Thick-part interior margin used by the good-set test.
inline constexpr double kMargin = 1e-6;

// Plane/vertex incidence in Klein coordinates. Residuals at or below kSnap
// count as incidences; residuals strictly between kSnap and kAmbiguous are
// treated as an unresolvable near-degeneracy.
inline constexpr double kSnap = 1e-9;
inline constexpr double kAmbiguous = 1e-7;

}  // namespace hypervor::tol
