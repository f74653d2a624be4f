#pragma once

// The N-generation set Lambda: genealogy, planar placement, property
// verification, anisotropic scaling (j,k) -> (pj,qk) and generation sums.
//
// Genealogy model: an element of any generation is a bit string sigma of
// length N-1 (stored as an integer). At transition i -> i+1 (i = 1..N-1)
// the spouse of sigma is sigma with bit i-1 flipped, and the pair
// {sigma, spouse} in generation i has children {sigma, spouse} in
// generation i+1. Sibling (bit i-1) and next spouse (bit i) never coincide.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "cascade/diophantine.hpp"
#include "cascade/error.hpp"
#include "cascade/exact.hpp"
#include "cascade/lattice.hpp"
#include "cascade/random.hpp"

namespace cascade {

struct Genealogy {
  int N = 2;

  std::uint32_t size() const { return 1u << (N - 1); }
  std::uint32_t bit(int transition) const { return 1u << (transition - 1); }
  std::uint32_t spouse(std::uint32_t s, int transition) const { return s ^ bit(transition); }
  // as a child of transition i the sibling flips the same bit as the parents' spouse map
  std::uint32_t sibling(std::uint32_t s, int transition) const { return s ^ bit(transition); }

  // parents at transition i of child s (in generation i+1): {s, s ^ bit}
  std::array<std::uint32_t, 2> parents(std::uint32_t s, int transition) const {
    const std::uint32_t a = s & ~bit(transition);
    return {a, a | bit(transition)};
  }
  std::array<std::uint32_t, 2> children(std::uint32_t s, int transition) const { return parents(s, transition); }

  std::string label(std::uint32_t s) const {
    std::string out(static_cast<std::size_t>(N - 1), '0');
    for (int b = 0; b < N - 1; ++b)
      if (s & (1u << b)) out[static_cast<std::size_t>(b)] = '1';
    return out;
  }
};

inline Genealogy build_genealogy(int N) {
  require(N >= 2 && N <= 12, ErrorKind::InvalidInput, "genealogy needs 2 <= N <= 12");
  return Genealogy{N};
}

/// Family at transition i: parents (gen i) strings a < b = a ^ bit, children
/// (gen i+1) with the same strings. Vertex order n1 = parent a, n2 = child a,
/// n3 = parent b, n4 = child b; the right angle sits at n2.
struct FamilyIndex {
  int transition = 1;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

inline std::vector<FamilyIndex> families(const Genealogy& g, int transition) {
  std::vector<FamilyIndex> out;
  for (std::uint32_t s = 0; s < g.size(); ++s)
    if (!(s & g.bit(transition))) out.push_back({transition, s, s | g.bit(transition)});
  return out;
}

inline std::vector<FamilyIndex> all_families(const Genealogy& g) {
  std::vector<FamilyIndex> out;
  for (int i = 1; i < g.N; ++i) {
    auto f = families(g, i);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

using Quad = std::array<Mode, 4>;

struct PlacedSet {
  Genealogy genealogy;
  std::vector<std::vector<Mode>> generations;  // generations[i-1][sigma]
  std::vector<Mode> extra;                     // points outside the genealogy (injected)
  std::int64_t p = 1;
  std::int64_t q = 1;
  double R_empirical = 0.0;

  int N() const { return genealogy.N; }
  const Mode& at(int gen, std::uint32_t s) const { return generations[static_cast<std::size_t>(gen - 1)][s]; }

  std::vector<Mode> all_modes() const {
    std::vector<Mode> out;
    for (const auto& g : generations) out.insert(out.end(), g.begin(), g.end());
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  }

  Quad family_modes(const FamilyIndex& f) const {
    return {at(f.transition, f.a), at(f.transition + 1, f.a), at(f.transition, f.b), at(f.transition + 1, f.b)};
  }

  std::vector<Quad> family_quads() const {
    std::vector<Quad> out;
    for (const auto& f : all_families(genealogy)) out.push_back(family_modes(f));
    return out;
  }

  std::vector<Mode> generation(int i) const { return generations[static_cast<std::size_t>(i - 1)]; }
};

/// Children of parents a, b: ((a+b) +- Rot90(a-b)) / 2 with Rot90(x,y) = (-y,x).
/// The two children and the parents form a square.
inline std::array<Mode, 2> rectangle_children(const Mode& a, const Mode& b) {
  const Mode s = a + b;
  const Mode d = a - b;
  const Mode r{-d.k, d.j};
  const Mode cp = s + r;
  const Mode cm = s - r;
  require(cp.j % 2 == 0 && cp.k % 2 == 0 && cm.j % 2 == 0 && cm.k % 2 == 0, ErrorKind::PlacementFailed,
          "rectangle completion is not integral");
  return {Mode{cp.j / 2, cp.k / 2}, Mode{cm.j / 2, cm.k / 2}};
}

/// Rational rotation cos = c/h, sin = s/h with c^2 + s^2 = h^2.
struct Rotation {
  std::int64_t c = 0;
  std::int64_t s = 1;
  std::int64_t h = 1;
};

/// All rotations with hypotenuse h except the degenerate angles 0 and pi.
inline std::vector<Rotation> rotations(std::int64_t h) {
  std::vector<Rotation> out;
  for (std::int64_t c = -h; c <= h; ++c)
    for (std::int64_t s = -h; s <= h; ++s)
      if (c * c + s * s == h * h && s != 0) out.push_back({c, s, h});
  return out;
}

/// General rectangle with diagonal a-b: children (a+b)/2 +- rot(a-b)/2. The
/// square case is the rotation (0, 1, 1). Requires a - b divisible by 2h.
inline std::array<Mode, 2> rectangle_children(const Mode& a, const Mode& b, const Rotation& rot) {
  const Mode d = a - b;
  require(d.j % (2 * rot.h) == 0 && d.k % (2 * rot.h) == 0 && (a.j + b.j) % 2 == 0 && (a.k + b.k) % 2 == 0,
          ErrorKind::PlacementFailed, "rectangle completion is not integral");
  const Mode m{(a.j + b.j) / 2, (a.k + b.k) / 2};
  const Mode e{d.j / (2 * rot.h), d.k / (2 * rot.h)};
  const Mode r{rot.c * e.j - rot.s * e.k, rot.s * e.j + rot.c * e.k};
  return {m + r, m - r};
}

// ---------------------------------------------------------------------------
// verification

struct Violation {
  std::string property;
  std::vector<Mode> witness;
  std::string detail;
};

struct PropertyReport {
  std::size_t points = 0;
  std::size_t triples_scanned = 0;
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  bool has(const std::string& prop) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.property == prop; });
  }
};

namespace detail {

struct ModeHash {
  std::size_t operator()(const Mode& m) const {
    return static_cast<std::size_t>(splitmix64(hash_combine(static_cast<std::uint64_t>(m.j), static_cast<std::uint64_t>(m.k))));
  }
};

// <B^-2 (n1-n2), n2-n3> scaled by p^2 q^2, exact
inline i128 respq_form(const Mode& n1, const Mode& n2, const Mode& n3, std::int64_t p, std::int64_t q) {
  const Mode a = n1 - n2;
  const Mode b = n2 - n3;
  const i128 qq = checked_mul(q, q);
  const i128 pp = checked_mul(p, p);
  return checked_add(checked_mul(qq, checked_mul(a.j, b.j)), checked_mul(pp, checked_mul(a.k, b.k)));
}

inline std::array<Mode, 2> sorted_pair(const Mode& x, const Mode& y) { return x < y ? std::array{x, y} : std::array{y, x}; }

}  // namespace detail

/// True when (n1,n2,n3,n4) closes momentum, is a non-degenerate parallelogram
/// and satisfies <B^-2(n1-n2), n2-n3> = 0.
inline bool is_pq_family_shape(const Quad& n, std::int64_t p, std::int64_t q) {
  if (n[0] - n[1] + n[2] - n[3] != Mode{}) return false;
  const Mode a = n[0] - n[1];
  const Mode b = n[1] - n[2];
  if (a == Mode{} || b == Mode{}) return false;
  const i128 cross = checked_sub(checked_mul(a.j, b.k), checked_mul(a.k, b.j));
  if (cross == 0) return false;
  return detail::respq_form(n[0], n[1], n[2], p, q) == 0;
}

namespace detail {

using FamilyKeys = std::map<std::array<Mode, 4>, int>;

inline void add_family_key(FamilyKeys& keys, const Quad& n, int transition) {
  const auto par = sorted_pair(n[0], n[2]);
  const auto ch = sorted_pair(n[1], n[3]);
  keys[{par[0], par[1], ch[0], ch[1]}] = transition;
}

// P1', P5', P6' over all ordered triples with the forced fourth vertex
inline void scan_relations(const std::vector<Mode>& modes, const FamilyKeys& keys, std::int64_t p, std::int64_t q,
                           PropertyReport& rep) {
  std::unordered_map<Mode, std::size_t, ModeHash> index;
  for (std::size_t i = 0; i < modes.size(); ++i) index.emplace(modes[i], i);
  auto is_family = [&](const Mode& n1, const Mode& n2, const Mode& n3, const Mode& n4) {
    const auto par = sorted_pair(n1, n3);
    const auto ch = sorted_pair(n2, n4);
    return keys.count({par[0], par[1], ch[0], ch[1]}) || keys.count({ch[0], ch[1], par[0], par[1]});
  };
  const std::size_t M = modes.size();
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) {
      for (std::size_t c = 0; c < M; ++c) {
        ++rep.triples_scanned;
        const Mode& n1 = modes[a];
        const Mode& n2 = modes[b];
        const Mode& n3 = modes[c];
        const Mode n4 = n1 - n2 + n3;
        if (index.count(n4)) {
          const bool trivial = (n1 == n2 && n3 == n4) || (n1 == n4 && n3 == n2);
          if (!trivial && !is_family(n1, n2, n3, n4)) {
            const bool shape = is_pq_family_shape({n1, n2, n3, n4}, p, q);
            rep.violations.push_back({shape ? "P5'" : "P6'", {n1, n2, n3, n4},
                                      shape ? "(p,q)-parallelogram that is not a nuclear family"
                                            : "non-trivial momentum relation that is not a family"});
          }
        } else if (is_pq_family_shape({n1, n2, n3, n4}, p, q)) {
          rep.violations.push_back({"P1'", {n1, n2, n3, n4}, "fourth vertex of a (p,q)-parallelogram lies outside the set"});
        }
      }
    }
  }
}

}  // namespace detail

/// Relation-only check (P1', P5', P6') of an arbitrary point set against a
/// list of declared families.
inline PropertyReport verify_relations(const std::vector<Mode>& modes, const std::vector<Quad>& fams, std::int64_t p = 1,
                                       std::int64_t q = 1) {
  PropertyReport rep;
  rep.points = modes.size();
  detail::FamilyKeys keys;
  for (const auto& f : fams) detail::add_family_key(keys, f, 0);
  detail::scan_relations(modes, keys, p, q, rep);
  return rep;
}

/// Exhaustive check of P1', P2, P3, P4, P5', P6' and distinctness.
inline PropertyReport verify_properties(const PlacedSet& ps) {
  PropertyReport rep;
  const Genealogy& g = ps.genealogy;
  const auto modes = ps.all_modes();
  rep.points = modes.size();

  std::map<Mode, int> seen;
  for (const auto& m : modes)
    if (seen[m]++ == 1) rep.violations.push_back({"distinct", {m}, "repeated position"});

  // P2/P3: generation sizes and each family a non-degenerate (p,q) rectangle
  bool sizes_ok = static_cast<int>(ps.generations.size()) == g.N;
  for (const auto& gen : ps.generations) sizes_ok = sizes_ok && gen.size() == g.size();
  if (!sizes_ok) rep.violations.push_back({"P2", {}, "generation sizes differ from 2^(N-1)"});
  for (const auto& m : ps.extra)
    rep.violations.push_back({"P2", {m}, "point belongs to no nuclear family (no spouse/children or parents)"});

  detail::FamilyKeys keys;
  if (sizes_ok) {
    for (const auto& f : all_families(g)) {
      const Quad n = ps.family_modes(f);
      if (!is_pq_family_shape(n, ps.p, ps.q)) {
        rep.violations.push_back({f.transition == 1 ? "P2" : "P3", {n.begin(), n.end()},
                                  "family at transition " + std::to_string(f.transition) +
                                      " is not a non-degenerate (p,q)-rectangle"});
      }
      detail::add_family_key(keys, n, f.transition);
    }
    // P4: sibling at transition i differs from spouse at transition i+1
    for (int i = 1; i + 1 < g.N; ++i)
      for (std::uint32_t s = 0; s < g.size(); ++s)
        if (g.sibling(s, i) == g.spouse(s, i + 1)) rep.violations.push_back({"P4", {ps.at(i + 1, s)}, "sibling equals spouse"});
  }
  detail::scan_relations(modes, keys, ps.p, ps.q, rep);
  return rep;
}

// ---------------------------------------------------------------------------
// placement

struct PlaceOptions {
  std::int64_t box = 50;
  int retries = 64;
  // Each family picks a seeded rotation with this hypotenuse; 1 gives squares
  // only. Squares alone produce non-family momentum relations from N = 3 on.
  std::int64_t hypotenuse = 5;
  Mode center{0, 0};          // translation applied after construction (keeps every property)
  double max_spread = 0.0;    // if > 0, reject sets with max|n| / min|n| above this
};

/// Empirical R for C^{-1} q R <= |n| <= C w q 3^N R: the geometric-mean
/// choice sqrt(min|n| max|n| / (w q^2 3^N)).
inline double empirical_R(const PlacedSet& ps, double omega) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& m : ps.all_modes()) {
    lo = std::min(lo, m.norm());
    hi = std::max(hi, m.norm());
  }
  const double qd = static_cast<double>(ps.q);
  return std::sqrt(lo * hi / (omega * qd * qd * std::pow(3.0, ps.N())));
}

/// Smallest C making the two-sided bound hold with R = empirical_R.
inline double empirical_C(const PlacedSet& ps, double omega) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& m : ps.all_modes()) {
    lo = std::min(lo, m.norm());
    hi = std::max(hi, m.norm());
  }
  if (lo == 0.0) return INFINITY;
  return std::sqrt(hi / (lo * omega * std::pow(3.0, ps.N())));
}

namespace detail {

inline std::optional<PlacedSet> try_place(const Genealogy& g, std::uint64_t seed, const PlaceOptions& opt) {
  SplitMix64 rng(seed);
  PlacedSet ps;
  ps.genealogy = g;
  const auto rots = rotations(opt.hypotenuse);
  std::int64_t scale = 1;
  for (int i = 1; i < g.N; ++i) scale = static_cast<std::int64_t>(checked_mul(scale, 2 * opt.hypotenuse));
  std::vector<Mode> first(g.size());
  for (auto& m : first) m = {scale * rng.uniform_int(-opt.box, opt.box), scale * rng.uniform_int(-opt.box, opt.box)};
  ps.generations.push_back(first);
  for (int i = 1; i < g.N; ++i) {
    const auto& prev = ps.generations.back();
    std::vector<Mode> next(g.size());
    for (const auto& f : families(g, i)) {
      if (prev[f.a] == prev[f.b]) return std::nullopt;  // zero-area rectangle
      const Rotation& rot = rots[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(rots.size()) - 1))];
      const auto ch = rectangle_children(prev[f.a], prev[f.b], rot);
      next[f.a] = ch[0];
      next[f.b] = ch[1];
    }
    ps.generations.push_back(std::move(next));
  }
  for (auto& gen : ps.generations)
    for (auto& m : gen) m = m + opt.center;
  if (opt.max_spread > 0.0) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& m : ps.all_modes()) {
      lo = std::min(lo, m.norm());
      hi = std::max(hi, m.norm());
    }
    if (lo == 0.0 || hi / lo > opt.max_spread) return std::nullopt;
  }
  if (!verify_properties(ps).passed()) return std::nullopt;
  ps.R_empirical = empirical_R(ps, 1.0);
  return ps;
}

}  // namespace detail

/// Seeded placement with rejection; attempt k uses seed hash(seed, k). The
/// lowest passing attempt wins, so the result is deterministic.
inline PlacedSet place(const Genealogy& g, std::uint64_t seed, const PlaceOptions& opt = {}) {
  require(g.N <= 6, ErrorKind::InvalidInput, "planar placement is limited to N <= 6");
  require(opt.box >= 1, ErrorKind::InvalidInput, "placement box must be >= 1");
  require(opt.hypotenuse >= 1, ErrorKind::InvalidInput, "rotation hypotenuse must be >= 1");
  require(!rotations(opt.hypotenuse).empty(), ErrorKind::InvalidInput, "no rotations with this hypotenuse");
  for (int k = 0; k <= opt.retries; ++k) {
    const std::uint64_t s = k == 0 ? seed : hash_combine(seed, static_cast<std::uint64_t>(k));
    if (auto ps = detail::try_place(g, s, opt)) return *ps;
  }
  fail(ErrorKind::PlacementFailed, "no valid placement after " + std::to_string(opt.retries) + " retries");
}

inline PlacedSet place(const Genealogy& g, std::uint64_t seed, std::int64_t box, int retries) {
  PlaceOptions opt;
  opt.box = box;
  opt.retries = retries;
  return place(g, seed, opt);
}

/// (j,k) -> (pj, qk)
inline PlacedSet scale(const PlacedSet& ps, const Convergent& c) {
  require(ps.p == 1 && ps.q == 1, ErrorKind::InvalidInput, "scale expects an unscaled set");
  require(c.p >= 1 && c.q >= 1, ErrorKind::InvalidInput, "scale needs positive p, q");
  require(c.p < (i128{1} << 40) && c.q < (i128{1} << 40), ErrorKind::CapacityExceeded, "scaling convergent too large");
  PlacedSet out = ps;
  out.p = static_cast<std::int64_t>(c.p);
  out.q = static_cast<std::int64_t>(c.q);
  auto map = [&](const Mode& m) {
    return Mode{static_cast<std::int64_t>(checked_mul(out.p, m.j)), static_cast<std::int64_t>(checked_mul(out.q, m.k))};
  };
  for (auto& gen : out.generations)
    for (auto& m : gen) m = map(m);
  for (auto& m : out.extra) m = map(m);
  out.R_empirical = empirical_R(out, static_cast<double>(out.p) / static_cast<double>(out.q));
  return out;
}

// ---------------------------------------------------------------------------
// generation statistics

struct GenerationStats {
  double s = 1.0;
  std::vector<double> S;                   // S_i = sum |n|^{2s}
  std::vector<double> S_bracket;           // same with <n> = max(1,|n|)
  std::vector<std::pair<double, double>> modulus_range;
  double R_empirical = 0.0;
  double C_empirical = 0.0;

  double ratio(int j, int i) const { return S[static_cast<std::size_t>(j - 1)] / S[static_cast<std::size_t>(i - 1)]; }
};

inline GenerationStats stats(const PlacedSet& ps, double s, double omega = 0.0) {
  GenerationStats st;
  st.s = s;
  if (omega <= 0.0) omega = static_cast<double>(ps.p) / static_cast<double>(ps.q);
  for (const auto& gen : ps.generations) {
    double S = 0.0, Sb = 0.0, lo = INFINITY, hi = 0.0;
    for (const auto& m : gen) {
      const double r = m.norm();
      S += (r == 0.0 && s == 0.0) ? 1.0 : std::pow(r, 2.0 * s);
      Sb += std::pow(bracket(m), 2.0 * s);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    st.S.push_back(S);
    st.S_bracket.push_back(Sb);
    st.modulus_range.emplace_back(lo, hi);
  }
  st.R_empirical = empirical_R(ps, omega);
  st.C_empirical = empirical_C(ps, omega);
  return st;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const PlacedSet& ps) {
  nlohmann::ordered_json j;
  j["N"] = ps.N();
  j["p"] = ps.p;
  j["q"] = ps.q;
  j["R_empirical"] = ps.R_empirical;
  auto gens = nlohmann::ordered_json::array();
  for (const auto& gen : ps.generations) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : gen) arr.push_back({m.j, m.k});
    gens.push_back(arr);
  }
  j["generations"] = gens;
  auto fams = nlohmann::ordered_json::array();
  for (const auto& f : all_families(ps.genealogy)) {
    nlohmann::ordered_json e;
    e["transition"] = f.transition;
    e["parents"] = {ps.genealogy.label(f.a), ps.genealogy.label(f.b)};
    e["children"] = {ps.genealogy.label(f.a), ps.genealogy.label(f.b)};
    fams.push_back(e);
  }
  j["families"] = fams;
  if (!ps.extra.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : ps.extra) arr.push_back({m.j, m.k});
    j["extra"] = arr;
  }
  return nlohmann::json(j);
}

inline PlacedSet placed_set_from_json(const nlohmann::json& j) {
  try {
    PlacedSet ps;
    ps.genealogy = build_genealogy(j.at("N").get<int>());
    ps.p = j.value("p", std::int64_t{1});
    ps.q = j.value("q", std::int64_t{1});
    for (const auto& gen : j.at("generations")) {
      std::vector<Mode> g;
      for (const auto& m : gen) g.push_back(mode_from_json(m));
      ps.generations.push_back(std::move(g));
    }
    if (j.contains("extra"))
      for (const auto& m : j.at("extra")) ps.extra.push_back(mode_from_json(m));
    ps.R_empirical = j.value("R_empirical", 0.0);
    return ps;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed lambda file: ") + e.what());
  }
}

}  // namespace cascade
