// Command-line front end: JSON config in, JSON report out.
//
// Report schema (stable keys):
//   { "command", "config", "result": {...}, "shells": [{"n","sum"},...],
//     "verdict", "errors": [...], "version" }
// Complex numbers are [re, im]; points are homogeneous [[re_u,im_u],[re_v,im_v]].
// Flags override config values and the resolved union is echoed back, so a
// report's "config" block reruns bit-identically.
//
// Exit codes: 0 success, 1 config error, 2 group validation failure,
// 3 numeric error (the error text lands in "errors" either way).

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "schottky/arakelov.hpp"
#include "schottky/deform.hpp"
#include "schottky/errors.hpp"
#include "schottky/group.hpp"
#include "schottky/series.hpp"
#include "schottky/version.hpp"

using json = nlohmann::ordered_json;
using namespace schottky;

namespace {

// Config-shaped problems: unparsable files, missing or ill-typed fields.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The parsed disk system failed validate_schottky.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::optional<int> max_len;
  std::optional<int> conj_depth;
  std::optional<int> coset_depth;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<int> threads;
};

struct Ctx {
  json raw = json::object();   // parsed config file
  json echo = json::object();  // resolved union, rebuilt per command
  const Flags* flags = nullptr;
};

json cplx_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

json point_json(const ProjectivePoint& p) {
  return json::array({cplx_json(p.u), cplx_json(p.v)});
}

cplx cplx_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config: '" + where + "' must be a [re, im] pair");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

// Accepts affine [re, im] or homogeneous [[re_u, im_u], [re_v, im_v]].
ProjectivePoint point_from(const json& j, const std::string& where) {
  if (j.is_array() && j.size() == 2 && j[0].is_array() && j[1].is_array()) {
    ProjectivePoint p;
    p.u = cplx_from(j[0], where + "[0]");
    p.v = cplx_from(j[1], where + "[1]");
    if (p.u == cplx(0.0) && p.v == cplx(0.0))
      throw ConfigError("config: '" + where + "' must not be [0,0]:[0,0]");
    return p;
  }
  return ProjectivePoint::from_complex(cplx_from(j, where));
}

const json* maybe_field(const json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

int resolve_int(Ctx& ctx, const std::string& key, int fallback,
                const std::optional<int>& flag = std::nullopt) {
  int value = fallback;
  if (const json* j = maybe_field(ctx.raw, key)) {
    if (!j->is_number_integer())
      throw ConfigError("config: '" + key + "' must be an integer");
    value = j->get<int>();
  }
  if (flag) value = *flag;
  ctx.echo[key] = value;
  return value;
}

double resolve_double(Ctx& ctx, const std::string& key, double fallback,
                      const std::optional<double>& flag = std::nullopt) {
  double value = fallback;
  if (const json* j = maybe_field(ctx.raw, key)) {
    if (!j->is_number()) throw ConfigError("config: '" + key + "' must be a number");
    value = j->get<double>();
  }
  if (flag) value = *flag;
  ctx.echo[key] = value;
  return value;
}

std::uint64_t resolve_seed(Ctx& ctx) {
  std::uint64_t value = 1;
  if (const json* j = maybe_field(ctx.raw, "seed")) {
    if (!j->is_number_integer() || j->get<std::int64_t>() < 0)
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    value = j->get<std::uint64_t>();
  }
  if (ctx.flags->seed) value = *ctx.flags->seed;
  ctx.echo["seed"] = value;
  return value;
}

// Word budget: config "capacity", overridden by the SCHOTTKY_CAPACITY env var.
std::uint64_t resolve_capacity(Ctx& ctx) {
  std::uint64_t value = kDefaultWordCapacity;
  if (const json* j = maybe_field(ctx.raw, "capacity")) {
    if (!j->is_number_integer() || j->get<std::int64_t>() <= 0)
      throw ConfigError("config: 'capacity' must be a positive integer");
    value = j->get<std::uint64_t>();
  }
  if (const char* env = std::getenv("SCHOTTKY_CAPACITY")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || parsed == 0)
      throw ConfigError("SCHOTTKY_CAPACITY must be a positive integer");
    value = parsed;
  }
  ctx.echo["capacity"] = value;
  return value;
}

int resolve_threads(Ctx& ctx) {
  const int value = resolve_int(ctx, "threads", 1, ctx.flags->threads);
  if (value < 1) throw ConfigError("config: 'threads' must be >= 1");
  return value;
}

ProjectivePoint resolve_point(Ctx& ctx, const std::string& key) {
  const json* pts = maybe_field(ctx.raw, "points");
  const json* j = pts ? maybe_field(*pts, key) : nullptr;
  if (!j) throw ConfigError("config: missing point 'points." + key + "'");
  const ProjectivePoint p = point_from(*j, "points." + key);
  ctx.echo["points"][key] = point_json(p);
  return p;
}

bool has_point(const Ctx& ctx, const std::string& key) {
  const json* pts = maybe_field(ctx.raw, "points");
  return pts && maybe_field(*pts, key);
}

Divisor divisor_from(const json& j, const std::string& where, json& echo_slot) {
  if (!j.is_array() || j.empty())
    throw ConfigError("config: '" + where + "' must be a nonempty array");
  Divisor d;
  echo_slot = json::array();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const json* pj = maybe_field(j[i], "point");
    const json* wj = maybe_field(j[i], "weight");
    if (!pj || !wj || !wj->is_number_integer())
      throw ConfigError("config: '" + at + "' needs 'point' and integer 'weight'");
    const ProjectivePoint p = point_from(*pj, at + ".point");
    d.terms.push_back({p, wj->get<int>()});
    echo_slot.push_back(json{{"point", point_json(p)}, {"weight", wj->get<int>()}});
  }
  return d;
}

OrientedDisk disk_from(const json& j, const std::string& where) {
  const json* cj = maybe_field(j, "center");
  const json* rj = maybe_field(j, "radius");
  if (!cj || !rj || !rj->is_number())
    throw ConfigError("config: '" + where + "' needs 'center' [re,im] and numeric 'radius'");
  OrientedDisk d;
  d.center = cplx_from(*cj, where + ".center");
  d.radius = rj->get<double>();
  if (!(d.radius > 0.0)) throw ConfigError("config: '" + where + ".radius' must be positive");
  if (const json* uj = maybe_field(j, "unbounded")) {
    if (!uj->is_boolean())
      throw ConfigError("config: '" + where + ".unbounded' must be a boolean");
    d.unbounded_side = uj->get<bool>();
  }
  return d;
}

MoebiusMap matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 8)
    throw ConfigError("config: '" + where + "' must be 8 reals [a_re,a_im,...,d_re,d_im]");
  double v[8];
  for (std::size_t i = 0; i < 8; ++i) {
    if (!j[i].is_number()) throw ConfigError("config: '" + where + "' must hold numbers");
    v[i] = j[i].get<double>();
  }
  return MoebiusMap{cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5]), cplx(v[6], v[7])};
}

json matrix_json(const MoebiusMap& m) {
  return json::array({m.a.real(), m.a.imag(), m.b.real(), m.b.imag(), m.c.real(), m.c.imag(),
                      m.d.real(), m.d.imag()});
}

// Parses the "group" object.  Generators may be given explicitly (8 reals
// each) or rebuilt as zero/listed-twist pairings of consecutive disk pairs;
// either way the echo carries the explicit matrices, so a re-read reproduces
// the group bit for bit.
SchottkyGroup resolve_group(Ctx& ctx) {
  const json* gj = maybe_field(ctx.raw, "group");
  if (!gj) throw ConfigError("config: missing 'group' object");
  const json* dj = maybe_field(*gj, "disks");
  if (!dj || !dj->is_array() || dj->size() < 2 || dj->size() % 2 != 0)
    throw ConfigError("config: 'group.disks' must list an even number (>= 2) of disks");

  std::vector<OrientedDisk> disks;
  for (std::size_t i = 0; i < dj->size(); ++i)
    disks.push_back(disk_from((*dj)[i], "group.disks[" + std::to_string(i) + "]"));

  std::vector<MoebiusMap> gens;
  if (const json* mj = maybe_field(*gj, "generators")) {
    if (!mj->is_array() || mj->size() != disks.size() / 2)
      throw ConfigError("config: 'group.generators' must hold one matrix per disk pair");
    for (std::size_t i = 0; i < mj->size(); ++i)
      gens.push_back(matrix_from((*mj)[i], "group.generators[" + std::to_string(i) + "]"));
  } else {
    std::vector<double> twists(disks.size() / 2, 0.0);
    if (const json* tj = maybe_field(*gj, "twists")) {
      if (!tj->is_array() || tj->size() != twists.size())
        throw ConfigError("config: 'group.twists' must hold one angle per disk pair");
      for (std::size_t i = 0; i < twists.size(); ++i) {
        if (!(*tj)[i].is_number())
          throw ConfigError("config: 'group.twists' must hold numbers");
        twists[i] = (*tj)[i].get<double>();
      }
    }
    for (std::size_t k = 0; k < disks.size() / 2; ++k)
      gens.push_back(pairing_map(disks[2 * k], disks[2 * k + 1], twists[k]));
  }

  SchottkyGroup group = [&] {
    try {
      return SchottkyGroup(std::move(gens), std::move(disks));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: 'group' rejected: ") + e.what());
    }
  }();

  json disks_echo = json::array();
  for (const auto& d : group.disks())
    disks_echo.push_back(json{{"center", cplx_json(d.center)},
                              {"radius", d.radius},
                              {"unbounded", d.unbounded_side}});
  json gens_echo = json::array();
  for (int k = 1; k <= group.rank(); ++k) gens_echo.push_back(matrix_json(group.generator(k)));
  ctx.echo["group"] = json{{"disks", disks_echo}, {"generators", gens_echo}};
  return group;
}

ValidationReport require_valid(const SchottkyGroup& group) {
  ValidationReport rep = validate_schottky(group);
  if (!rep.valid) {
    std::ostringstream os;
    os << "group validation failed (min_gap = " << rep.min_gap << ")";
    for (const auto& c : rep.checks)
      if (!c.passed) os << "; " << c.name << ": " << c.detail;
    throw ValidationFailure(os.str());
  }
  return rep;
}

// Default z0/z1 when the config omits them: draw 128 fundamental-domain
// samples; z1 is the centroid of the finite ones, z0 the finite sample
// farthest (chordally) from z1.  Both land in the echo like explicit points.
struct BasePoints {
  ProjectivePoint z0, z1;
};

BasePoints resolve_base_points(Ctx& ctx, const SchottkyGroup& group, std::uint64_t seed,
                               bool need_z1) {
  BasePoints out;
  const bool have_z0 = has_point(ctx, "z0");
  const bool have_z1 = has_point(ctx, "z1");
  if (have_z0) out.z0 = resolve_point(ctx, "z0");
  if (have_z1 && need_z1) out.z1 = resolve_point(ctx, "z1");
  if (have_z0 && (have_z1 || !need_z1)) return out;

  const auto samples = sample_fundamental_domain(group, 128, seed);
  cplx sum = 0.0;
  std::size_t finite = 0;
  for (const auto& s : samples)
    if (!s.is_infinite()) {
      sum += s.to_complex();
      ++finite;
    }
  if (finite == 0) throw ConfigError("config: cannot derive z0/z1 (no finite samples)");
  const ProjectivePoint centroid = ProjectivePoint::from_complex(sum / double(finite));
  ProjectivePoint far = centroid;
  double best = -1.0;
  for (const auto& s : samples) {
    if (s.is_infinite()) continue;
    const double dist = chordal(s, centroid);
    if (dist > best) {
      best = dist;
      far = s;
    }
  }
  if (!have_z0) {
    out.z0 = far;
    ctx.echo["points"]["z0"] = point_json(out.z0);
  }
  if (need_z1 && !have_z1) {
    out.z1 = centroid;
    ctx.echo["points"]["z1"] = point_json(out.z1);
  }
  return out;
}

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Converging: return "converging";
    case Verdict::Diverging: return "diverging";
    default: return "inconclusive";
  }
}

json shells_json(const SeriesEstimate& est) {
  json arr = json::array();
  for (const auto& s : est.shell_sums) arr.push_back(json{{"n", s.word_length}, {"sum", s.partial}});
  return arr;
}

struct Report {
  std::string command;
  json result = json::object();
  json shells = json::array();
  std::string verdict;
  std::vector<std::string> errors;
};

// ---------------------------------------------------------------------------
// Commands.  Each returns the process exit code.
// ---------------------------------------------------------------------------

int cmd_validate(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  const auto vr = validate_schottky(group);
  json checks = json::array();
  for (const auto& c : vr.checks)
    checks.push_back(json{{"name", c.name},
                          {"passed", c.passed},
                          {"measure", c.measure},
                          {"detail", c.detail}});
  rep.result = json{{"valid", vr.valid}, {"min_gap", vr.min_gap}, {"checks", checks}};
  rep.verdict = vr.valid ? "valid" : "invalid";
  return vr.valid ? 0 : 2;
}

int cmd_words(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const std::uint64_t count = reduced_word_count(group.rank(), max_len);
  bool within = true;
  try {
    require_word_capacity(group.rank(), max_len, capacity);
  } catch (const CapacityExceeded&) {
    within = false;
  }
  rep.result = json{{"rank", group.rank()},
                    {"max_len", max_len},
                    {"count", count},
                    {"saturated", count == UINT64_MAX},
                    {"within_capacity", within}};
  return 0;
}

int cmd_green(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto y = resolve_point(ctx, "y"), q = resolve_point(ctx, "q");
  const auto x = resolve_point(ctx, "x"), p = resolve_point(ctx, "p");
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto est = green_series(group, y, q, x, p, max_len, threads, capacity);
  rep.result = json{{"total", est.total}, {"tail_slope", est.tail_slope}};
  rep.shells = shells_json(est);
  rep.verdict = verdict_str(est.verdict);
  return 0;
}

int cmd_wprod(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const json* dj = maybe_field(ctx.raw, "divisor");
  if (!dj) throw ConfigError("config: missing 'divisor'");
  const Divisor d = divisor_from(*dj, "divisor", ctx.echo["divisor"]);
  const auto base = resolve_point(ctx, "base"), r = resolve_point(ctx, "r");
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto wp = w_product(group, d, base, r, max_len, threads, capacity);
  rep.result = json{{"value", cplx_json(wp.value)},
                    {"log_abs_total", wp.estimate.total},
                    {"tail_slope", wp.estimate.tail_slope}};
  rep.shells = shells_json(wp.estimate);
  rep.verdict = verdict_str(wp.estimate.verdict);
  return 0;
}

int cmd_xmatrix(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto a = resolve_point(ctx, "a"), b = resolve_point(ctx, "b");
  const int conj_depth = resolve_int(ctx, "conj_depth", 4, ctx.flags->conj_depth);
  const int coset_depth = resolve_int(ctx, "coset_depth", 4, ctx.flags->coset_depth);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto xm = x_matrix(group, a, b, conj_depth, coset_depth, capacity);
  json entries = json::array();
  for (const auto& e : xm.entries) entries.push_back(cplx_json(e));
  rep.result = json{{"rank", xm.rank}, {"entries", entries}};
  return 0;
}

int cmd_omega(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto x = resolve_point(ctx, "x"), y = resolve_point(ctx, "y");
  const auto z = resolve_point(ctx, "z");
  const std::uint64_t seed = resolve_seed(ctx);
  const auto base = resolve_base_points(ctx, group, seed, true);
  AssembleParams params;
  params.max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  params.conj_depth = resolve_int(ctx, "conj_depth", 4, ctx.flags->conj_depth);
  params.coset_depth = resolve_int(ctx, "coset_depth", 4, ctx.flags->coset_depth);
  params.z0 = base.z0;
  params.z1 = base.z1;
  params.capacity = resolve_capacity(ctx);
  const auto form = make_assembled_form(group, x, y, params);
  json coeffs = json::array();
  for (const auto& c : form.coefficients()) coeffs.push_back(cplx_json(c));
  rep.result = json{{"value", cplx_json(form(z))}, {"coefficients", coeffs}};
  return 0;
}

int cmd_periods(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto x = resolve_point(ctx, "x"), y = resolve_point(ctx, "y");
  const std::uint64_t seed = resolve_seed(ctx);
  const auto base = resolve_base_points(ctx, group, seed, true);
  AssembleParams params;
  params.max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  params.conj_depth = resolve_int(ctx, "conj_depth", 4, ctx.flags->conj_depth);
  params.coset_depth = resolve_int(ctx, "coset_depth", 4, ctx.flags->coset_depth);
  params.z0 = base.z0;
  params.z1 = base.z1;
  params.capacity = resolve_capacity(ctx);
  const int n_quad = resolve_int(ctx, "n_quad", 512);
  const double tol = resolve_double(ctx, "tol", 1e-3, ctx.flags->tol);
  const auto form = make_assembled_form(group, x, y, params);
  json periods = json::array();
  double max_re = 0.0;
  for (int k = 1; k <= group.rank(); ++k) {
    const cplx period = period_integral(
        group, [&](const cplx& z) { return form(z); }, k, n_quad);
    periods.push_back(cplx_json(period));
    max_re = std::max(max_re, std::abs(period.real()));
  }
  rep.result = json{{"periods", periods}, {"max_abs_re", max_re}, {"within_tol", max_re <= tol}};
  rep.verdict = max_re <= tol ? "imaginary" : "mixed";
  return 0;
}

int cmd_delta(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const std::uint64_t seed = resolve_seed(ctx);
  const auto base = resolve_base_points(ctx, group, seed, false);
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto de = estimate_delta(group, base.z0, max_len, threads, capacity);
  rep.result = json{{"delta_hat", de.delta_hat},
                    {"below_range", de.below_range},
                    {"above_range", de.above_range}};
  return 0;
}

int cmd_limits(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const int depth = resolve_int(ctx, "depth", 4);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto cloud = limit_set_cloud(group, depth, capacity);

  std::size_t excluded = 0, written = 0;
  std::ofstream csv;
  if (!ctx.flags->csv_path.empty()) {
    csv.open(ctx.flags->csv_path);
    if (!csv) throw ConfigError("cannot open csv output '" + ctx.flags->csv_path + "'");
    csv.precision(17);
    csv << "re,im,radius,word_length\n";
  }
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (cloud.points[i].is_infinite() || cloud.disks[i].unbounded_side) {
      ++excluded;
      continue;
    }
    if (csv.is_open()) {
      const cplx z = cloud.points[i].to_complex();
      csv << z.real() << ',' << z.imag() << ',' << cloud.disks[i].radius << ','
          << cloud.word_lengths[i] << '\n';
    }
    ++written;
  }
  rep.result = json{{"depth", cloud.depth},
                    {"count", cloud.points.size()},
                    {"rows_written", ctx.flags->csv_path.empty() ? 0 : written},
                    {"infinite_excluded", excluded}};
  if (!ctx.flags->csv_path.empty()) rep.result["csv"] = ctx.flags->csv_path;
  return 0;
}

int cmd_pairing(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const json* dj = maybe_field(ctx.raw, "divisors");
  const json* aj = dj ? maybe_field(*dj, "a") : nullptr;
  const json* bj = dj ? maybe_field(*dj, "b") : nullptr;
  if (!aj || !bj) throw ConfigError("config: missing 'divisors.a' / 'divisors.b'");
  const Divisor a = divisor_from(*aj, "divisors.a", ctx.echo["divisors"]["a"]);
  const Divisor b = divisor_from(*bj, "divisors.b", ctx.echo["divisors"]["b"]);
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto pr = height_pairing(group, a, b, max_len, threads, capacity);
  json terms = json::array();
  for (const auto& t : pr.terms)
    terms.push_back(json{{"weight", t.weight},
                         {"total", t.estimate.total},
                         {"verdict", verdict_str(t.estimate.verdict)},
                         {"shells", shells_json(t.estimate)}});
  rep.result = json{{"value", pr.value}, {"terms", terms}};
  if (pr.terms.size() == 1) {
    rep.shells = shells_json(pr.terms[0].estimate);
    rep.verdict = verdict_str(pr.terms[0].estimate.verdict);
  }
  return 0;
}

int cmd_double_integral(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto x = resolve_point(ctx, "x"), y = resolve_point(ctx, "y");
  const int samples = resolve_int(ctx, "samples", 1024, ctx.flags->samples);
  const std::uint64_t seed = resolve_seed(ctx);
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto mc = green_double_integral(group, x, y, samples, seed, max_len, threads, capacity);
  rep.result = json{{"mean", mc.mean},
                    {"std_error", mc.std_error},
                    {"n_samples", mc.n_samples},
                    {"seed", mc.seed}};
  return 0;
}

SplitMode resolve_mode(Ctx& ctx) {
  std::string mode = "value";
  if (const json* j = maybe_field(ctx.raw, "mode")) {
    if (!j->is_string()) throw ConfigError("config: 'mode' must be \"value\" or \"orbit\"");
    mode = j->get<std::string>();
  }
  ctx.echo["mode"] = mode;
  if (mode == "value") return SplitMode::Value;
  if (mode == "orbit") return SplitMode::Orbit;
  throw ConfigError("config: 'mode' must be \"value\" or \"orbit\"");
}

int cmd_split(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);
  const auto y = resolve_point(ctx, "y"), q = resolve_point(ctx, "q");
  const auto x = resolve_point(ctx, "x"), p = resolve_point(ctx, "p");
  const int cloud_depth = resolve_int(ctx, "cloud_depth", 4);
  const double eps = resolve_double(ctx, "eps", 1e-3);
  const SplitMode mode = resolve_mode(ctx);
  const int max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  const int threads = resolve_threads(ctx);
  const std::uint64_t capacity = resolve_capacity(ctx);
  const auto cloud = limit_set_cloud(group, cloud_depth, capacity);
  const auto sp = split_sums(group, cloud, eps, y, q, x, p, max_len, mode, threads, capacity);
  std::size_t lambda_words = 0;
  for (const auto f : sp.lambda_flags) lambda_words += f;
  rep.result = json{{"omega_part", sp.omega_part},
                    {"lambda_part", sp.lambda_part},
                    {"total", sp.total},
                    {"lambda_words", lambda_words},
                    {"words", sp.lambda_flags.size()}};
  rep.shells = shells_json(sp.estimate);
  rep.verdict = verdict_str(sp.estimate.verdict);
  return 0;
}

PathKind resolve_path_kind(const std::string& s) {
  if (s == "radius-pinch") return PathKind::RadiusPinch;
  if (s == "multiplier-pinch") return PathKind::MultiplierPinch;
  if (s == "circle-collision") return PathKind::CircleCollision;
  throw ConfigError(
      "config: 'path.kind' must be radius-pinch, multiplier-pinch, or circle-collision");
}

const char* path_kind_str(PathKind k) {
  switch (k) {
    case PathKind::RadiusPinch: return "radius-pinch";
    case PathKind::MultiplierPinch: return "multiplier-pinch";
    default: return "circle-collision";
  }
}

int cmd_deform(Ctx& ctx, Report& rep) {
  const auto group = resolve_group(ctx);
  require_valid(group);

  const json* pj = maybe_field(ctx.raw, "path");
  if (!pj) throw ConfigError("config: missing 'path' object");
  PathSpec spec;
  const json* kj = maybe_field(*pj, "kind");
  if (!kj || !kj->is_string()) throw ConfigError("config: 'path.kind' must be a string");
  spec.kind = resolve_path_kind(kj->get<std::string>());
  if (const json* tj = maybe_field(*pj, "t_max")) spec.t_max = tj->get<double>();
  if (const json* mj = maybe_field(*pj, "mover_disk")) spec.mover_disk = mj->get<int>();
  if (const json* tj = maybe_field(*pj, "target_disk")) spec.target_disk = tj->get<int>();
  if (const json* cj = maybe_field(*pj, "collision_time"))
    spec.collision_time = cj->get<double>();
  ctx.echo["path"] = json{{"kind", path_kind_str(spec.kind)},
                          {"t_max", spec.t_max},
                          {"mover_disk", spec.mover_disk},
                          {"target_disk", spec.target_disk},
                          {"collision_time", spec.collision_time}};

  ScanParams params;
  params.y = resolve_point(ctx, "y");
  params.q = resolve_point(ctx, "q");
  params.x = resolve_point(ctx, "x");
  params.p = resolve_point(ctx, "p");
  const std::uint64_t seed = resolve_seed(ctx);
  params.z0 = resolve_base_points(ctx, group, seed, false).z0;
  params.n_steps = resolve_int(ctx, "n_steps", 8);
  params.max_len = resolve_int(ctx, "max_len", 6, ctx.flags->max_len);
  params.cloud_depth = resolve_int(ctx, "cloud_depth", 4);
  params.eps = resolve_double(ctx, "eps", 1e-3);
  params.mode = resolve_mode(ctx);
  params.threads = resolve_threads(ctx);
  params.capacity = resolve_capacity(ctx);

  const auto path = make_path(group, spec);
  const auto report = scan_path(path, params);
  json steps = json::array();
  for (const auto& s : report.steps)
    steps.push_back(json{{"t", s.t},
                         {"valid", s.valid},
                         {"min_gap", s.min_gap},
                         {"delta_hat", s.delta_hat},
                         {"series_verdict", verdict_str(s.series_verdict)},
                         {"shell_slope", s.shell_slope},
                         {"omega_part", s.omega_part},
                         {"lambda_part", s.lambda_part},
                         {"split_total", s.split_total},
                         {"green_total", s.green_total},
                         {"error", s.error}});
  rep.result = json{{"kind", path_kind_str(report.kind)}, {"steps", steps}};
  return 0;
}

int dispatch(const std::string& cmd, Ctx& ctx, Report& rep) {
  if (!ctx.flags->csv_path.empty() && cmd != "limits")
    throw ConfigError("--csv is only produced by the 'limits' command");
  if (cmd == "validate") return cmd_validate(ctx, rep);
  if (cmd == "words") return cmd_words(ctx, rep);
  if (cmd == "green") return cmd_green(ctx, rep);
  if (cmd == "wprod") return cmd_wprod(ctx, rep);
  if (cmd == "xmatrix") return cmd_xmatrix(ctx, rep);
  if (cmd == "omega") return cmd_omega(ctx, rep);
  if (cmd == "periods") return cmd_periods(ctx, rep);
  if (cmd == "delta") return cmd_delta(ctx, rep);
  if (cmd == "limits") return cmd_limits(ctx, rep);
  if (cmd == "pairing") return cmd_pairing(ctx, rep);
  if (cmd == "double-integral") return cmd_double_integral(ctx, rep);
  if (cmd == "deform") return cmd_deform(ctx, rep);
  if (cmd == "split") return cmd_split(ctx, rep);
  throw ConfigError("unknown command '" + cmd + "'");
}

void emit(const Report& rep, const Ctx& ctx, const Flags& flags) {
  json doc;
  doc["command"] = rep.command;
  doc["config"] = ctx.echo;
  doc["result"] = rep.result;
  doc["shells"] = rep.shells;
  doc["verdict"] = rep.verdict;
  doc["errors"] = rep.errors;
  doc["version"] = version_string();
  const std::string text = doc.dump(2) + "\n";
  if (flags.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out_path);
  if (!out) {
    std::cerr << "cannot open output '" << flags.out_path << "'\n";
    return;
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schottky-group series toolkit: JSON config in, JSON report out"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the disk system and generator pairing"},
      {"words", "count reduced words up to a length cutoff"},
      {"green", "cross-ratio log series over the group"},
      {"wprod", "group-averaged divisor product"},
      {"xmatrix", "period-coefficient matrix"},
      {"omega", "evaluate the period-corrected form"},
      {"periods", "boundary-circle periods of the corrected form"},
      {"delta", "critical-exponent estimate"},
      {"limits", "limit-point cloud (optional CSV)"},
      {"pairing", "height pairing of two divisors"},
      {"double-integral", "Monte Carlo double integral over the fundamental domain"},
      {"deform", "scan a degeneration path"},
      {"split", "near-limit / bulk partition of the series"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", flags.config_path, "JSON config file")->required();
    sub->add_option("--max-len", flags.max_len, "series truncation length");
    sub->add_option("--conj-depth", flags.conj_depth, "conjugacy representative depth");
    sub->add_option("--coset-depth", flags.coset_depth, "double-coset representative depth");
    sub->add_option("--tol", flags.tol, "tolerance (periods verdict)");
    sub->add_option("--seed", flags.seed, "sampling seed");
    sub->add_option("--samples", flags.samples, "Monte Carlo sample count");
    sub->add_option("--threads", flags.threads, "worker budget for shell-parallel sections");
    sub->add_option("--out", flags.out_path, "write the JSON report here instead of stdout");
    sub->add_option("--csv", flags.csv_path, "write a CSV point cloud (limits only)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad flags are config errors
  }

  Report rep;
  rep.command = app.get_subcommands().front()->get_name();
  Ctx ctx;
  ctx.flags = &flags;
  int code = 0;
  try {
    std::ifstream in(flags.config_path);
    if (!in) throw ConfigError("cannot open config '" + flags.config_path + "'");
    try {
      ctx.raw = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!ctx.raw.is_object()) throw ConfigError("config root must be a JSON object");
    code = dispatch(rep.command, ctx, rep);
  } catch (const ConfigError& e) {
    rep.errors.push_back(e.what());
    code = 1;
  } catch (const ValidationFailure& e) {
    rep.errors.push_back(e.what());
    code = 2;
  } catch (const BadSpec& e) {
    rep.errors.push_back(e.what());
    code = 1;
  } catch (const std::invalid_argument& e) {
    rep.errors.push_back(e.what());
    code = 1;
  } catch (const SchottkyError& e) {
    rep.errors.push_back(e.what());
    code = 3;
  } catch (const std::exception& e) {
    rep.errors.push_back(e.what());
    code = 3;
  }
  emit(rep, ctx, flags);
  return code;
}
