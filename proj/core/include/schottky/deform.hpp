#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schottky/complex_geom.hpp"
#include "schottky/errors.hpp"
#include "schottky/group.hpp"
#include "schottky/series.hpp"

namespace schottky {

// ---------------------------------------------------------------------------
// Parametric families of Schottky groups driven toward the boundary of the
// space of valid disk systems, with per-step diagnostics.
// ---------------------------------------------------------------------------

enum class PathKind {
  // Every radius moves as r * (1 + t * (r_crit / r - 1)), where r_crit is
  // half the smallest pairwise center distance; the first tangency lands
  // exactly at t = 1.  Requires bounded disks.
  RadiusPinch,
  // Every generator's multiplier moves as q^(1-t) (principal power) with
  // fixed points held; at t = 1 all generators are parabolic.  Each D_k
  // stays put and D_k' follows as the image of the complement of D_k.
  MultiplierPinch,
  // One disk center translates linearly toward another, touching it exactly
  // at t = collision_time.  Requires bounded disks.
  CircleCollision,
};

struct PathSpec {
  PathKind kind = PathKind::RadiusPinch;
  double t_max = 1.0;
  // CircleCollision only: 1-based indices into the disk storage
  // [D1, D1', D2, D2', ...]; `mover_disk` translates toward `target_disk`.
  int mover_disk = 1;
  int target_disk = 3;
  double collision_time = 1.0;
};

// A deterministic total map t -> SchottkyGroup on [0, t_max].  Generators of
// rebuilt pairs come from pairing_map with the rotational twist extracted
// from the base group, so the base is reproduced verbatim at t = 0.
class DeformPath {
 public:
  PathKind kind() const { return spec_.kind; }
  double t_max() const { return spec_.t_max; }
  const SchottkyGroup& base() const { return base_; }

  // Throws std::invalid_argument outside [0, t_max].  t = 0 returns the base
  // group bit for bit; other parameters may produce invalid disk systems
  // (that is the point), which validate_schottky then reports.
  SchottkyGroup group_at(double t) const;

 private:
  friend DeformPath make_path(const SchottkyGroup& base, const PathSpec& spec);
  DeformPath(SchottkyGroup base, const PathSpec& spec) : base_(std::move(base)), spec_(spec) {}

  SchottkyGroup base_;
  PathSpec spec_;
  std::vector<double> twists_;      // per generator, from the base pairing
  double r_crit_ = 0.0;             // RadiusPinch
  std::vector<FixedPoints> fixed_;  // MultiplierPinch, per generator
  cplx collision_dir_{};            // CircleCollision: unit center-to-center
  double collision_gap_ = 0.0;      // CircleCollision: base boundary gap
};

// Validates the base group (BadSpec if invalid) and precomputes the
// kind-specific data.  BadSpec when: RadiusPinch/CircleCollision see an
// unbounded disk or coincident centers; a twist fails to reproduce the base
// generator within 1e-9; CircleCollision indices are out of range or equal,
// or collision_time <= 0; t_max < 0.
DeformPath make_path(const SchottkyGroup& base, const PathSpec& spec);

// ---------------------------------------------------------------------------
// Indicator split of the series: every term is routed to exactly one of two
// compensated accumulators according to proximity to the limit-point cloud.
// ---------------------------------------------------------------------------

enum class SplitMode {
  // Classify the term's cross-ratio value, seen as a point on the sphere:
  // Lambda-near iff its spherical distance to the cloud point set is <= eps.
  Value,
  // Classify the orbit points instead: Lambda-near iff BOTH h(x) and h(p)
  // are within eps of the cloud.
  Orbit,
};

struct SplitResult {
  double omega_part = 0.0;
  double lambda_part = 0.0;
  // omega_part + lambda_part, a single addition, so the partition identity
  // total == omega_part + lambda_part holds bit for bit by definition.
  double total = 0.0;
  // The same terms in the same order through one accumulator family; matches
  // green_series on the same points bit for bit.
  SeriesEstimate estimate;
  // One flag per word in canonical order across shells 0..max_len; 1 = Lambda.
  std::vector<std::uint8_t> lambda_flags;
};

// The cloud must come from the same group.  eps must be >= 0.  Series errors
// (degenerate terms, capacity) propagate.
SplitResult split_sums(const SchottkyGroup& group, const LimitSetCloud& cloud, double eps,
                       const ProjectivePoint& y, const ProjectivePoint& q,
                       const ProjectivePoint& x, const ProjectivePoint& p, int max_len,
                       SplitMode mode = SplitMode::Value, int threads = 1,
                       std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// Uniform-grid scan along a path.
// ---------------------------------------------------------------------------

struct ScanParams {
  int n_steps = 8;      // >= 2; grid t_j = t_max * j / (n_steps - 1)
  ProjectivePoint y, q, x, p;  // series points
  ProjectivePoint z0;          // exponent-estimator base point
  int max_len = 6;             // >= 6 (the exponent estimator needs six shells)
  int cloud_depth = 4;
  double eps = 1e-3;
  SplitMode mode = SplitMode::Value;
  int threads = 1;
  std::uint64_t capacity = kDefaultWordCapacity;
};

struct DeformStep {
  double t = 0.0;
  bool valid = false;
  double min_gap = 0.0;
  double delta_hat = 0.0;
  Verdict series_verdict = Verdict::Inconclusive;
  double shell_slope = 0.0;
  double omega_part = 0.0;
  double lambda_part = 0.0;
  double split_total = 0.0;  // omega_part + lambda_part
  double green_total = 0.0;  // the one-accumulator twin of the same terms
  std::string error;         // empty when every diagnostic completed
};

struct DeformReport {
  PathKind kind = PathKind::RadiusPinch;
  std::vector<DeformStep> steps;
};

// Per step: validate; if valid, run the exponent estimator, the series, and
// the indicator split.  Any per-step exception is captured in `error` and the
// scan continues — it never aborts.  Invalid steps carry min_gap only.
// Output is bit-identical across runs and thread counts.
DeformReport scan_path(const DeformPath& path, const ScanParams& params);

}  // namespace schottky
