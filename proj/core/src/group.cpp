#include "schottky/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace schottky {

Word Word::reduced(std::vector<std::int32_t> raw) {
  Word w;
  w.letters.reserve(raw.size());
  for (const std::int32_t s : raw) {
    if (s == 0) throw std::invalid_argument("word letters must be nonzero");
    if (!w.letters.empty() && w.letters.back() == -s)
      w.letters.pop_back();  // cancel adjacent s, -s
    else
      w.letters.push_back(s);
  }
  return w;
}

Word Word::inverse() const {
  Word w;
  w.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(-*it);
  return w;
}

SchottkyGroup::SchottkyGroup(std::vector<MoebiusMap> generators,
                             std::vector<OrientedDisk> disks)
    : disks_(std::move(disks)) {
  if (generators.empty()) throw std::invalid_argument("group needs at least one generator");
  if (disks_.size() != 2 * generators.size())
    throw std::invalid_argument("group needs exactly two disks per generator");
  for (const OrientedDisk& d : disks_)
    if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !std::isfinite(std::abs(d.center)))
      throw std::invalid_argument("disks need finite centers and positive radii");
  gens_.reserve(generators.size());
  inv_gens_.reserve(generators.size());
  for (const MoebiusMap& m : generators) {
    gens_.push_back(m.normalized());
    inv_gens_.push_back(gens_.back().inverse());
  }
}

const MoebiusMap& SchottkyGroup::generator(int k) const {
  if (k < 1 || k > rank()) throw std::invalid_argument("generator index out of range");
  return gens_[k - 1];
}

const MoebiusMap& SchottkyGroup::generator_inverse(int k) const {
  if (k < 1 || k > rank()) throw std::invalid_argument("generator index out of range");
  return inv_gens_[k - 1];
}

const MoebiusMap& SchottkyGroup::letter_map(std::int32_t letter) const {
  const int k = letter > 0 ? letter : -letter;
  if (letter == 0 || k > rank()) throw std::invalid_argument("letter out of range");
  return letter > 0 ? gens_[k - 1] : inv_gens_[k - 1];
}

const OrientedDisk& SchottkyGroup::target_disk(std::int32_t letter) const {
  const int k = letter > 0 ? letter : -letter;
  if (letter == 0 || k > rank()) throw std::invalid_argument("letter out of range");
  return letter > 0 ? disks_[2 * (k - 1) + 1] : disks_[2 * (k - 1)];
}

const OrientedDisk& SchottkyGroup::source_disk(std::int32_t letter) const {
  return target_disk(-letter);
}

MoebiusMap SchottkyGroup::word_matrix(const Word& w) const {
  MoebiusMap m = MoebiusMap::identity();
  for (const std::int32_t s : w.letters) m = m * letter_map(s);
  return m;
}

namespace {

std::string disk_name(std::size_t index) {
  std::string name = "D" + std::to_string(index / 2 + 1);
  if (index % 2 == 1) name += "'";
  return name;
}

}  // namespace

ValidationReport validate_schottky(const SchottkyGroup& group) {
  ValidationReport report;
  report.min_gap = std::numeric_limits<double>::infinity();
  const int g = group.rank();
  const auto& disks = group.disks();

  for (int k = 1; k <= g; ++k) {
    ValidationCheck check;
    check.name = "generator " + std::to_string(k) + " loxodromic";
    try {
      const FixedPoints fp = fixed_points_and_multiplier(group.generator(k));
      check.passed = true;
      check.measure = std::abs(fp.multiplier);
      check.detail = "multiplier magnitude " + std::to_string(check.measure);
    } catch (const SchottkyError& e) {
      check.passed = false;
      check.detail = e.what();
    }
    report.checks.push_back(std::move(check));
  }

  for (std::size_t i = 0; i < disks.size(); ++i) {
    for (std::size_t j = i + 1; j < disks.size(); ++j) {
      ValidationCheck check;
      check.name = "disks " + disk_name(i) + "," + disk_name(j) + " disjoint";
      const double gap = disk_gap(disks[i], disks[j]);
      report.min_gap = std::min(report.min_gap, gap);
      check.measure = gap;
      // Tangent or overlapping closed disks fail; a tolerance floor keeps
      // numerically-touching configurations out of the analytic pipeline.
      check.passed = gap > 1e-12;
      std::ostringstream os;
      os << "spherical gap " << gap;
      check.detail = os.str();
      report.checks.push_back(std::move(check));
    }
  }

  for (int k = 1; k <= g; ++k) {
    ValidationCheck check;
    check.name = "pairing g" + std::to_string(k) + "(complement of D" + std::to_string(k) +
                 ") = interior of D" + std::to_string(k) + "'";
    const OrientedDisk& src = disks[2 * (k - 1)];
    const OrientedDisk& dst = disks[2 * (k - 1) + 1];
    try {
      const OrientedDisk image = map_disk(group.generator(k), src.flipped());
      const double dev =
          std::max(std::abs(image.center - dst.center), std::abs(image.radius - dst.radius));
      check.measure = dev;
      if (image.unbounded_side != dst.unbounded_side) {
        check.passed = false;
        check.detail = "image lies on the wrong side of the circle";
      } else {
        check.passed = dev <= 1e-9;
        std::ostringstream os;
        os << "center/radius deviation " << dev;
        check.detail = os.str();
      }
    } catch (const SchottkyError& e) {
      check.passed = false;
      check.detail = e.what();
    }
    report.checks.push_back(std::move(check));
  }

  report.valid = std::all_of(report.checks.begin(), report.checks.end(),
                             [](const ValidationCheck& c) { return c.passed; });
  return report;
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > std::numeric_limits<std::uint64_t>::max() / b
             ? std::numeric_limits<std::uint64_t>::max()
             : a * b;
}

}  // namespace

std::uint64_t reduced_word_count(int rank, int max_len) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (max_len < 0) throw std::invalid_argument("word length must be nonnegative");
  const std::uint64_t g2 = 2 * static_cast<std::uint64_t>(rank);
  std::uint64_t total = 1;         // identity
  std::uint64_t shell = g2;        // 2g(2g-1)^{n-1} at n = 1
  for (int n = 1; n <= max_len; ++n) {
    total = sat_add(total, shell);
    shell = sat_mul(shell, g2 - 1);
  }
  return total;
}

void require_word_capacity(int rank, int max_len, std::uint64_t capacity) {
  const std::uint64_t count = reduced_word_count(rank, max_len);
  if (count > capacity)
    throw CapacityExceeded("enumeration of " + std::to_string(count) +
                               " words exceeds the budget of " + std::to_string(capacity),
                           count, capacity);
}

std::vector<WordEntry> enumerate_words(const SchottkyGroup& group, int max_len,
                                       std::uint64_t capacity) {
  require_word_capacity(group.rank(), max_len, capacity);
  std::vector<WordEntry> out;
  out.reserve(static_cast<std::size_t>(reduced_word_count(group.rank(), max_len)));
  for_each_word(group, max_len,
                [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
                  out.push_back({Word{letters}, m});
                });
  return out;
}

std::vector<ConjugacyRep> conjugacy_class_reps(const SchottkyGroup& group, int k, int depth,
                                               std::uint64_t capacity) {
  if (k < 1 || k > group.rank()) throw std::invalid_argument("generator index out of range");
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  require_word_capacity(group.rank(), depth, capacity);

  std::set<std::vector<std::int32_t>> seen;
  std::vector<ConjugacyRep> out;
  for_each_word(group, depth,
                [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
                  std::vector<std::int32_t> raw = letters;
                  raw.push_back(k);
                  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
                    raw.push_back(-*it);
                  Word conj = Word::reduced(std::move(raw));
                  if (!seen.insert(conj.letters).second) return;
                  const MoebiusMap mat = m * group.generator(k) * m.inverse();
                  out.push_back({std::move(conj), Word{letters}, mat, m});
                });
  return out;
}

std::vector<WordEntry> double_coset_reps(const SchottkyGroup& group, int k, int l, int depth,
                                         std::uint64_t capacity) {
  if (k < 1 || k > group.rank() || l < 1 || l > group.rank())
    throw std::invalid_argument("generator index out of range");
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  require_word_capacity(group.rank(), depth, capacity);

  std::vector<WordEntry> out;
  if (k != l) out.push_back({Word{}, MoebiusMap::identity()});
  for (int n = 1; n <= depth; ++n) {
    for_each_word_of_length(
        group, n, [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
          // Keep exactly the stripped canonical forms: nothing to strip on
          // either end means one word per double coset.
          if (std::abs(letters.front()) == k || std::abs(letters.back()) == l) return;
          out.push_back({Word{letters}, m});
        });
  }
  return out;
}

LimitSetCloud limit_set_cloud(const SchottkyGroup& group, int depth, std::uint64_t capacity) {
  if (depth < 1) throw std::invalid_argument("cloud depth must be at least 1");
  require_word_capacity(group.rank(), depth, capacity);

  LimitSetCloud cloud;
  cloud.depth = depth;
  const std::size_t count =
      static_cast<std::size_t>(reduced_word_count(group.rank(), depth) - 1);
  cloud.disks.reserve(count);
  cloud.word_lengths.reserve(count);
  cloud.points.reserve(count);
  cloud.chordal_radii.reserve(count);

  const int g = group.rank();
  // Walk the word tree once; the disk of w = prefix.s is prefix(T(s)).
  auto walk = [&](auto&& self, const MoebiusMap& prefix, std::int32_t last, int len) -> void {
    for (int j = 1; j <= g; ++j) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        const std::int32_t s = sgn == 0 ? j : -j;
        if (last != 0 && last == -s) continue;
        const OrientedDisk disk = map_disk(prefix, group.target_disk(s));
        cloud.disks.push_back(disk);
        cloud.word_lengths.push_back(len + 1);
        cloud.points.push_back(disk.unbounded_side
                                   ? ProjectivePoint::infinity()
                                   : ProjectivePoint::from_complex(disk.center));
        cloud.chordal_radii.push_back(disk.chordal_radius());
        if (len + 1 < depth) self(self, prefix * group.letter_map(s), s, len + 1);
      }
    }
  };
  walk(walk, MoebiusMap::identity(), 0, 0);
  return cloud;
}

std::pair<ProjectivePoint, Word> reduce_to_fundamental_domain(const SchottkyGroup& group,
                                                              const ProjectivePoint& p,
                                                              int max_steps) {
  if (max_steps < 0) throw std::invalid_argument("max_steps must be nonnegative");
  ProjectivePoint cur = p.normalized();
  std::vector<std::int32_t> applied;
  const auto& disks = group.disks();
  for (int step = 0; step < max_steps; ++step) {
    std::int32_t letter = 0;
    for (std::size_t i = 0; i < disks.size(); ++i) {
      if (disks[i].contains_open(cur)) {
        const int k = static_cast<int>(i) / 2 + 1;
        letter = (i % 2 == 0) ? k : -k;  // inside D_k apply g_k, inside D_k' apply g_k^{-1}
        break;
      }
    }
    if (letter == 0) {
      std::reverse(applied.begin(), applied.end());  // last applied map is leftmost
      return {cur, Word{std::move(applied)}};
    }
    cur = group.letter_map(letter)(cur);
    applied.push_back(letter);
  }
  // One final membership pass: the loop may have exited the disks on its last move.
  bool inside = false;
  for (const OrientedDisk& d : disks) inside = inside || d.contains_open(cur);
  if (!inside) {
    std::reverse(applied.begin(), applied.end());
    return {cur, Word{std::move(applied)}};
  }
  throw NoTermination("point did not reach the fundamental domain (near the limit set)");
}

}  // namespace schottky
