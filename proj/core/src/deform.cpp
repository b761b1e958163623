#include "schottky/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "schottky/detail/shell_reduce.hpp"
#include "schottky/summation.hpp"

namespace schottky {

namespace {

// Entrywise distance between two maps, insensitive to the overall sign left
// free by determinant normalization.
double map_deviation(const MoebiusMap& m, const MoebiusMap& n) {
  auto diff = [](const MoebiusMap& p, const MoebiusMap& q) {
    return std::max(std::max(std::abs(p.a - q.a), std::abs(p.b - q.b)),
                    std::max(std::abs(p.c - q.c), std::abs(p.d - q.d)));
  };
  const MoebiusMap neg{-n.a, -n.b, -n.c, -n.d};
  return std::min(diff(m, n), diff(m, neg));
}

// Rotational twist of generator k against its disk pair, i.e. the angle th
// with g_k(c_k + r_k) = c_k' + r_k' e^{i th}.  BadSpec when g_k is not the
// disk pairing with that twist (the rebuilt map must reproduce it to 1e-9).
double extract_twist(const SchottkyGroup& base, int k) {
  const OrientedDisk& src = base.disks()[2 * static_cast<std::size_t>(k - 1)];
  const OrientedDisk& dst = base.disks()[2 * static_cast<std::size_t>(k - 1) + 1];
  const ProjectivePoint edge = ProjectivePoint::from_complex(src.center + src.radius);
  const ProjectivePoint image = base.generator(k)(edge);
  if (image.is_infinite())
    throw BadSpec("generator sends a boundary point of its source disk to infinity");
  const cplx w = (image.to_complex() - dst.center) / dst.radius;
  if (!(std::abs(w) > 0.0))
    throw BadSpec("generator sends a boundary point onto the paired disk center");
  const double twist = std::arg(w);
  const MoebiusMap rebuilt = pairing_map(src, dst, twist);
  if (map_deviation(base.generator(k).normalized(), rebuilt) > 1e-9) {
    std::ostringstream os;
    os << "generator " << k << " is not a twisted disk pairing; cannot deform it";
    throw BadSpec(os.str());
  }
  return twist;
}

void require_bounded_disks(const SchottkyGroup& base, const char* what) {
  for (const OrientedDisk& d : base.disks())
    if (d.unbounded_side)
      throw BadSpec(std::string(what) + " requires every disk to be bounded");
}

}  // namespace

DeformPath make_path(const SchottkyGroup& base, const PathSpec& spec) {
  if (!(spec.t_max >= 0.0)) throw BadSpec("t_max must be nonnegative");
  if (!validate_schottky(base).valid)
    throw BadSpec("deformation base group failed validation");

  DeformPath path(base, spec);
  const auto& disks = path.base_.disks();
  const int g = path.base_.rank();

  switch (spec.kind) {
    case PathKind::RadiusPinch: {
      require_bounded_disks(path.base_, "radius deformation");
      double min_center_dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < disks.size(); ++i)
        for (std::size_t j = i + 1; j < disks.size(); ++j)
          min_center_dist = std::min(min_center_dist, std::abs(disks[i].center - disks[j].center));
      if (!(min_center_dist > 0.0)) throw BadSpec("two disks share a center");
      path.r_crit_ = 0.5 * min_center_dist;
      for (int k = 1; k <= g; ++k) path.twists_.push_back(extract_twist(path.base_, k));
      break;
    }
    case PathKind::MultiplierPinch: {
      for (int k = 1; k <= g; ++k)
        path.fixed_.push_back(fixed_points_and_multiplier(path.base_.generator(k)));
      break;
    }
    case PathKind::CircleCollision: {
      require_bounded_disks(path.base_, "center deformation");
      const int n = static_cast<int>(disks.size());
      if (spec.mover_disk < 1 || spec.mover_disk > n || spec.target_disk < 1 ||
          spec.target_disk > n)
        throw BadSpec("disk index out of range");
      if (spec.mover_disk == spec.target_disk)
        throw BadSpec("a disk cannot collide with itself");
      if (!(spec.collision_time > 0.0)) throw BadSpec("collision_time must be positive");
      const OrientedDisk& mv = disks[spec.mover_disk - 1];
      const OrientedDisk& tg = disks[spec.target_disk - 1];
      const cplx delta = tg.center - mv.center;
      if (!(std::abs(delta) > 0.0)) throw BadSpec("two disks share a center");
      path.collision_dir_ = delta / std::abs(delta);
      path.collision_gap_ = std::abs(delta) - mv.radius - tg.radius;
      if (!(path.collision_gap_ > 0.0))
        throw BadSpec("mover and target disks already touch");
      const int pair = (spec.mover_disk - 1) / 2 + 1;
      path.twists_.push_back(extract_twist(path.base_, pair));
      break;
    }
  }
  return path;
}

SchottkyGroup DeformPath::group_at(double t) const {
  if (!(t >= 0.0) || t > spec_.t_max)
    throw std::invalid_argument("path parameter outside [0, t_max]");
  if (t == 0.0) return base_;

  const int g = base_.rank();
  switch (spec_.kind) {
    case PathKind::RadiusPinch: {
      std::vector<OrientedDisk> disks = base_.disks();
      for (OrientedDisk& d : disks)
        d.radius = d.radius * (1.0 + t * (r_crit_ / d.radius - 1.0));
      std::vector<MoebiusMap> gens;
      gens.reserve(g);
      for (int k = 1; k <= g; ++k)
        gens.push_back(pairing_map(disks[2 * static_cast<std::size_t>(k - 1)],
                                   disks[2 * static_cast<std::size_t>(k - 1) + 1],
                                   twists_[k - 1]));
      return SchottkyGroup(std::move(gens), std::move(disks));
    }
    case PathKind::MultiplierPinch: {
      std::vector<MoebiusMap> gens;
      std::vector<OrientedDisk> disks;
      gens.reserve(g);
      disks.reserve(2 * static_cast<std::size_t>(g));
      for (int k = 1; k <= g; ++k) {
        const FixedPoints& f = fixed_[k - 1];
        const cplx m_t = std::pow(f.multiplier, 1.0 - t);
        const cplx s = std::sqrt(m_t);
        // Eigenbasis [attracting | repelling] with eigenvalues m_t^{-1/2},
        // m_t^{+1/2}: the derivative at the attracting point is m_t.
        const MoebiusMap basis{f.attracting.u, f.repelling.u, f.attracting.v, f.repelling.v};
        const MoebiusMap scale{cplx(1.0) / s, cplx(0.0), cplx(0.0), s};
        const MoebiusMap gk = ((basis * scale) * basis.inverse()).normalized();
        const OrientedDisk& dk = base_.disks()[2 * static_cast<std::size_t>(k - 1)];
        gens.push_back(gk);
        disks.push_back(dk);
        disks.push_back(map_disk(gk, dk.flipped()));
      }
      return SchottkyGroup(std::move(gens), std::move(disks));
    }
    case PathKind::CircleCollision: {
      std::vector<OrientedDisk> disks = base_.disks();
      OrientedDisk& mv = disks[spec_.mover_disk - 1];
      mv.center += collision_dir_ * (collision_gap_ * (t / spec_.collision_time));
      std::vector<MoebiusMap> gens;
      gens.reserve(g);
      for (int k = 1; k <= g; ++k) gens.push_back(base_.generator(k));
      const int pair = (spec_.mover_disk - 1) / 2 + 1;
      gens[pair - 1] = pairing_map(disks[2 * static_cast<std::size_t>(pair - 1)],
                                   disks[2 * static_cast<std::size_t>(pair - 1) + 1],
                                   twists_[0]);
      return SchottkyGroup(std::move(gens), std::move(disks));
    }
  }
  throw std::logic_error("unreachable path kind");
}

SplitResult split_sums(const SchottkyGroup& group, const LimitSetCloud& cloud, double eps,
                       const ProjectivePoint& y, const ProjectivePoint& q,
                       const ProjectivePoint& x, const ProjectivePoint& p, int max_len,
                       SplitMode mode, int threads, std::uint64_t capacity) {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  require_word_capacity(group.rank(), max_len, capacity);
  const ProjectivePoint yn = y.normalized(), qn = q.normalized();
  const ProjectivePoint xn = x.normalized(), pn = p.normalized();
  if (approx_equal(yn, qn) || approx_equal(xn, pn))
    throw std::invalid_argument("series needs y distinct from q and x distinct from p");

  const auto near_cloud = [&](const ProjectivePoint& pt) {
    for (const ProjectivePoint& c : cloud.points)
      if (chordal(pt, c) <= eps) return true;
    return false;
  };

  struct ShellSplit {
    double omega = 0.0, lambda = 0.0, green = 0.0;
    std::vector<std::uint8_t> flags;
  };

  auto shells = detail::shell_map<ShellSplit>(max_len + 1, threads, [&](int shell) {
    ShellSplit out;
    NeumaierSum omega_acc, lambda_acc, green_acc;
    for_each_word_of_length(
        group, shell, [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
          const detail::GreenTerm term = detail::green_term(yn, qn, m, xn, pn, letters);
          const bool is_lambda = mode == SplitMode::Value
                                     ? near_cloud(ProjectivePoint{term.num, term.den})
                                     : near_cloud(term.hx) && near_cloud(term.hp);
          (is_lambda ? lambda_acc : omega_acc).add(term.log_abs);
          green_acc.add(term.log_abs);
          out.flags.push_back(is_lambda ? 1 : 0);
        });
    out.omega = omega_acc.value();
    out.lambda = lambda_acc.value();
    out.green = green_acc.value();
    return out;
  });

  SplitResult result;
  NeumaierSum omega_total, lambda_total;
  std::vector<ShellSum> green_shells(shells.size());
  for (std::size_t i = 0; i < shells.size(); ++i) {
    omega_total.add(shells[i].omega);
    lambda_total.add(shells[i].lambda);
    green_shells[i] = {static_cast<int>(i), shells[i].green};
    result.lambda_flags.insert(result.lambda_flags.end(), shells[i].flags.begin(),
                               shells[i].flags.end());
  }
  result.omega_part = omega_total.value();
  result.lambda_part = lambda_total.value();
  result.total = result.omega_part + result.lambda_part;
  result.estimate = finalize_estimate(std::move(green_shells));
  return result;
}

DeformReport scan_path(const DeformPath& path, const ScanParams& params) {
  if (params.n_steps < 2) throw std::invalid_argument("scan needs at least two steps");
  if (params.max_len < 6)
    throw std::invalid_argument("scan needs max_len >= 6 for the exponent estimator");
  if (params.cloud_depth < 1) throw std::invalid_argument("cloud_depth must be positive");
  if (!(params.eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");

  DeformReport report;
  report.kind = path.kind();
  report.steps.reserve(params.n_steps);
  for (int j = 0; j < params.n_steps; ++j) {
    DeformStep step;
    step.t = path.t_max() * (static_cast<double>(j) / (params.n_steps - 1));
    try {
      const SchottkyGroup g = path.group_at(step.t);
      const ValidationReport v = validate_schottky(g);
      step.min_gap = v.min_gap;
      step.valid = v.valid;
      if (v.valid) {
        step.delta_hat =
            estimate_delta(g, params.z0, params.max_len, params.threads, params.capacity)
                .delta_hat;
        const LimitSetCloud cloud = limit_set_cloud(g, params.cloud_depth, params.capacity);
        const SplitResult split =
            split_sums(g, cloud, params.eps, params.y, params.q, params.x, params.p,
                       params.max_len, params.mode, params.threads, params.capacity);
        step.omega_part = split.omega_part;
        step.lambda_part = split.lambda_part;
        step.split_total = split.total;
        step.green_total = split.estimate.total;
        step.series_verdict = split.estimate.verdict;
        step.shell_slope = split.estimate.tail_slope;
      }
    } catch (const std::exception& e) {
      step.error = e.what();
    }
    report.steps.push_back(std::move(step));
  }
  return report;
}

}  // namespace schottky
