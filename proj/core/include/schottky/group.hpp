#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "schottky/complex_geom.hpp"
#include "schottky/errors.hpp"

namespace schottky {

// Default budget for word enumeration (see reduced_word_count).
inline constexpr std::uint64_t kDefaultWordCapacity = 5'000'000;

// A freely reduced word in the free group on g generators. Letters are signed
// indices: +k stands for g_k, -k for g_k^{-1}, k in 1..g.
struct Word {
  std::vector<std::int32_t> letters;

  // Builds a word from raw letters, cancelling adjacent (s, -s) pairs.
  static Word reduced(std::vector<std::int32_t> raw);

  Word inverse() const;
  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  bool operator==(const Word&) const = default;
};

// A rank-g Schottky group: generators g_1..g_g plus 2g oriented disks stored
// as [D_1, D_1', D_2, D_2', ...]. The intended geometry (checked by
// validate_schottky, not the constructor) is that g_k maps the complement of
// D_k onto the interior of D_k'.
class SchottkyGroup {
 public:
  SchottkyGroup(std::vector<MoebiusMap> generators, std::vector<OrientedDisk> disks);

  int rank() const { return static_cast<int>(gens_.size()); }
  const std::vector<OrientedDisk>& disks() const { return disks_; }

  // 1-based generator access.
  const MoebiusMap& generator(int k) const;
  const MoebiusMap& generator_inverse(int k) const;

  // Matrix of a single letter: +k -> g_k, -k -> g_k^{-1}.
  const MoebiusMap& letter_map(std::int32_t letter) const;

  // Disk the letter's map pushes points into: +k -> D_k', -k -> D_k.
  const OrientedDisk& target_disk(std::int32_t letter) const;
  // Disk whose complement the letter's map is applied to: +k -> D_k, -k -> D_k'.
  const OrientedDisk& source_disk(std::int32_t letter) const;

  // Product of letter matrices in word order.
  MoebiusMap word_matrix(const Word& w) const;

 private:
  std::vector<MoebiusMap> gens_;
  std::vector<MoebiusMap> inv_gens_;
  std::vector<OrientedDisk> disks_;
};

// One validation check: a named pass/fail with a numeric measure
// (gap, deviation, |multiplier|, ...) and a human-readable detail line.
struct ValidationCheck {
  std::string name;
  bool passed = false;
  double measure = 0.0;
  std::string detail;
};

struct ValidationReport {
  bool valid = false;
  double min_gap = 0.0;  // smallest signed spherical gap over all disk pairs
  std::vector<ValidationCheck> checks;
};

// Checks loxodromy of every generator, pairwise disjointness of the 2g closed
// disks (signed spherical gaps), and the pairing g_k(complement of D_k) =
// interior of D_k' via disk images (1e-9 on center/radius/side). Never
// throws: failures are recorded in the report.
ValidationReport validate_schottky(const SchottkyGroup& group);

// Number of freely reduced words of length <= max_len on `rank` generators:
// 1 + sum_{n=1..N} 2g(2g-1)^{n-1}, saturating at UINT64_MAX.
std::uint64_t reduced_word_count(int rank, int max_len);

// Throws CapacityExceeded when the word count for max_len exceeds capacity.
void require_word_capacity(int rank, int max_len, std::uint64_t capacity);

// A reduced word with its matrix (product of generator matrices in word order).
struct WordEntry {
  Word word;
  MoebiusMap matrix;
};

// All reduced words of length <= max_len in canonical order: by length, then
// lexicographic in the alphabet (+1, -1, +2, -2, ...); identity first.
std::vector<WordEntry> enumerate_words(const SchottkyGroup& group, int max_len,
                                       std::uint64_t capacity = kDefaultWordCapacity);

// One conjugate h g_k h^{-1} with the conjugator that produced it.  The
// conjugator matrix is kept because the conjugate's fixed points are the
// conjugator images of the generator's fixed points — extracting them from
// the multiplied-out conjugate would cancel catastrophically at depth.
struct ConjugacyRep {
  Word word;                    // freely reduced conjugate
  Word conjugator;              // h, first occurrence in canonical order
  MoebiusMap matrix;            // M_h * g_k * M_h^{-1}
  MoebiusMap conjugator_matrix; // M_h
};

// Distinct conjugates h g_k h^{-1} over all conjugators h of length <= depth,
// deduplicated by the freely reduced word of the conjugate (first occurrence
// in canonical conjugator order wins). Contains g_k itself (h = identity).
std::vector<ConjugacyRep> conjugacy_class_reps(const SchottkyGroup& group, int k, int depth,
                                               std::uint64_t capacity = kDefaultWordCapacity);

// One representative per double coset <g_k>\Gamma/<g_l> meeting the radius-
// `depth` ball: exactly the words of length <= depth whose first letter is
// not +-k and whose last letter is not +-l (each such word is its own
// stripped canonical form). The identity represents the coset <g_k><g_l> and
// is included only when k != l; for k = l that coset is the singular diagonal
// term, substituted downstream by log|multiplier(g_k)|.
std::vector<WordEntry> double_coset_reps(const SchottkyGroup& group, int k, int l, int depth,
                                         std::uint64_t capacity = kDefaultWordCapacity);

// Nested-disk approximation of the limit set: for every reduced word
// w = l_1..l_n with n <= depth, the disk M(l_1..l_{n-1})(T(l_n)) where T(s)
// is the letter's target disk. Arrays are parallel; points are disk centers
// (infinity for disks containing it).
struct LimitSetCloud {
  int depth = 0;
  std::vector<OrientedDisk> disks;
  std::vector<int> word_lengths;
  std::vector<ProjectivePoint> points;
  std::vector<double> chordal_radii;  // spherical size of each circle's cap
};

LimitSetCloud limit_set_cloud(const SchottkyGroup& group, int depth,
                              std::uint64_t capacity = kDefaultWordCapacity);

// Moves p into the fundamental domain (the common complement of all 2g open
// disks) by applying g_k while p is in D_k and g_k^{-1} while p is in D_k'.
// Returns the reduced point and the word w with point = M_w(p); the word
// comes out freely reduced. Throws NoTermination after max_steps moves
// (p is at or near the limit set).
std::pair<ProjectivePoint, Word> reduce_to_fundamental_domain(const SchottkyGroup& group,
                                                              const ProjectivePoint& p,
                                                              int max_steps = 256);

namespace detail {

// Depth-first walk over all reduced words of exactly `target_len` letters.
// Children extend on the right in alphabet order (+1, -1, +2, -2, ...), so
// words are visited in lexicographic order and the matrix passed to fn is the
// product of letter matrices in word order. fn(letters, matrix).
template <class Fn>
void word_dfs(const SchottkyGroup& group, int target_len, Fn&& fn) {
  if (target_len < 0) throw std::invalid_argument("word length must be nonnegative");
  std::vector<std::int32_t> letters;
  std::vector<MoebiusMap> mats;
  letters.reserve(target_len);
  mats.reserve(target_len + 1);
  mats.push_back(MoebiusMap::identity());
  const int g = group.rank();
  auto walk = [&](auto&& self) -> void {
    const int depth = static_cast<int>(letters.size());
    if (depth == target_len) {
      fn(const_cast<const std::vector<std::int32_t>&>(letters), mats.back());
      return;
    }
    for (int k = 1; k <= g; ++k) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        const std::int32_t s = sgn == 0 ? k : -k;
        if (!letters.empty() && letters.back() == -s) continue;  // stay reduced
        letters.push_back(s);
        mats.push_back(mats[depth] * group.letter_map(s));
        self(self);
        letters.pop_back();
        mats.pop_back();
      }
    }
  };
  walk(walk);
}

}  // namespace detail

// Visits all reduced words of exactly length n in canonical in-shell order.
template <class Fn>
void for_each_word_of_length(const SchottkyGroup& group, int n, Fn&& fn) {
  detail::word_dfs(group, n, std::forward<Fn>(fn));
}

// Visits all reduced words of length <= max_len in canonical order
// (shell-major: all words of length n before any of length n+1).
template <class Fn>
void for_each_word(const SchottkyGroup& group, int max_len, Fn&& fn) {
  for (int n = 0; n <= max_len; ++n) detail::word_dfs(group, n, fn);
}

}  // namespace schottky
