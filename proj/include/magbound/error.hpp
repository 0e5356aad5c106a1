#pragma once

#include <stdexcept>
#include <string>

namespace magbound {

// Error categories, one per failure surface. The CLI maps each to a distinct
// machine-readable record; library code throws and never aborts.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// invalid domain parameters (non-positive lengths, non-convex samples, ...)
struct ParameterError : Error { using Error::Error; };

// triangulation cannot meet its contract (target_h too coarse, refinement stuck)
struct MeshError : Error { using Error::Error; };

// linear or eigen solver failure (singular system, no convergence)
struct SolverError : Error { using Error::Error; };

// contour extraction produced an open or inconsistent level curve
struct LevelSetError : Error { using Error::Error; };

// mismatched or missing arguments between modules (wrong mesh, absent field)
struct ArgumentError : Error { using Error::Error; };

// disk mode scan left the supported window
struct ModeScanError : Error { using Error::Error; };

// broken internal invariant (non-Hermitian assembly and similar)
struct InternalError : Error { using Error::Error; };

}  // namespace magbound
