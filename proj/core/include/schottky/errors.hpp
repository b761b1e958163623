#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schottky {

// Base class for every domain/numeric failure the library raises on purpose.
// Precondition violations (wrong sizes, bad ranks, ...) use std::invalid_argument.
struct SchottkyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Both determinant products of a cross-ratio vanished: the quadruple does not
// determine a point of the sphere.  When raised from a series, `word` carries
// the group element whose term degenerated (signed generator indices).
struct DegenerateCrossRatio : SchottkyError {
  std::vector<std::int32_t> word;
  explicit DegenerateCrossRatio(const std::string& msg,
                                std::vector<std::int32_t> w = {})
      : SchottkyError(msg), word(std::move(w)) {}
};

// trace^2 lies on the real segment [0,4] within tolerance: the map is
// elliptic/parabolic/identity and has no attracting-repelling pair.
struct NotLoxodromic : SchottkyError {
  using SchottkyError::SchottkyError;
};

// The pole of the map lies on the circle being mapped, so the image is a line.
struct ImageIsLine : SchottkyError {
  using SchottkyError::SchottkyError;
};

// A word enumeration would exceed the configured word budget.
struct CapacityExceeded : SchottkyError {
  std::uint64_t requested = 0;
  std::uint64_t budget = 0;
  CapacityExceeded(const std::string& msg, std::uint64_t req, std::uint64_t bud)
      : SchottkyError(msg), requested(req), budget(bud) {}
};

// Fundamental-domain reduction did not terminate (point on/near the limit set).
struct NoTermination : SchottkyError {
  using SchottkyError::SchottkyError;
};

// An orbit point collided with a divisor point inside a product/derivative.
struct PoleHit : SchottkyError {
  std::vector<std::int32_t> word;
  explicit PoleHit(const std::string& msg, std::vector<std::int32_t> w = {})
      : SchottkyError(msg), word(std::move(w)) {}
};

// A period-coefficient denominator sum is numerically zero.
struct SingularDenominator : SchottkyError {
  using SchottkyError::SchottkyError;
};

// Doubling the quadrature node count moved a contour integral too much.
struct QuadratureUnstable : SchottkyError {
  using SchottkyError::SchottkyError;
};

// Divisors fed to the height pairing share a support point.
struct OverlappingSupports : SchottkyError {
  using SchottkyError::SchottkyError;
};

// Rejection sampling of the fundamental domain accepts too rarely.
struct RejectionStarvation : SchottkyError {
  using SchottkyError::SchottkyError;
};

// A requested tolerance cannot be certified (multiplier too close to 1, or a
// tail self-check failed).
struct ToleranceUnreachable : SchottkyError {
  using SchottkyError::SchottkyError;
};

// A deformation-path descriptor is unusable (invalid base, wrong disk kinds,
// non-inversive generators for a disk-moving path, ...).
struct BadSpec : SchottkyError {
  using SchottkyError::SchottkyError;
};

}  // namespace schottky
