// Instance and allocation data model: exact parsing/validation,
// normalization, utilities and indivisibility ratios.
#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mixedfair/rational.hpp"

namespace mixedfair {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PieceSet: a finite union of disjoint half-open subintervals of [0,1).
// Canonical form: sorted, pairwise disjoint, adjacent intervals merged.
// ---------------------------------------------------------------------------

struct Interval {
  Rat lo, hi;  // [lo, hi), lo < hi
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

class PieceSet {
 public:
  PieceSet() = default;

  // Canonicalizes: sorts and merges adjacent intervals. Throws on overlap,
  // on empty/inverted intervals and on endpoints outside [0,1].
  static PieceSet make(std::vector<Interval> ivs, const std::string& path = "piece") {
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const auto& iv = ivs[k];
      if (iv.lo < 0 || iv.hi > 1)
        throw parse_error(path + "[" + std::to_string(k) + "]", "endpoint outside [0,1]");
      if (!(iv.lo < iv.hi))
        throw parse_error(path + "[" + std::to_string(k) + "]", "empty or inverted interval");
    }
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (auto& iv : ivs) {
      if (!out.empty() && iv.lo < out.back().hi)
        throw parse_error(path, "overlapping intervals at " + to_string(iv.lo));
      if (!out.empty() && iv.lo == out.back().hi)
        out.back().hi = iv.hi;  // merge adjacent
      else
        out.push_back(iv);
    }
    PieceSet p;
    p.ivs_ = std::move(out);
    return p;
  }

  static PieceSet interval(const Rat& lo, const Rat& hi) {
    if (lo == hi) return {};
    return make({{lo, hi}});
  }

  static PieceSet full() { return interval(rat(0), rat(1)); }

  const std::vector<Interval>& intervals() const { return ivs_; }
  bool empty() const { return ivs_.empty(); }

  Rat measure() const {
    Rat m = 0;
    for (const auto& iv : ivs_) m += iv.hi - iv.lo;
    return m;
  }

  bool operator==(const PieceSet& o) const { return ivs_ == o.ivs_; }

 private:
  std::vector<Interval> ivs_;
};

// Union of disjoint piece sets; throws if the arguments overlap.
inline PieceSet piece_union(const PieceSet& a, const PieceSet& b) {
  std::vector<Interval> all = a.intervals();
  all.insert(all.end(), b.intervals().begin(), b.intervals().end());
  try {
    return PieceSet::make(std::move(all));
  } catch (const parse_error&) {
    throw error("piece_union: overlapping arguments");
  }
}

inline PieceSet piece_intersect(const PieceSet& a, const PieceSet& b) {
  std::vector<Interval> out;
  auto ai = a.intervals().begin(), bi = b.intervals().begin();
  while (ai != a.intervals().end() && bi != b.intervals().end()) {
    Rat lo = rat_max(ai->lo, bi->lo), hi = rat_min(ai->hi, bi->hi);
    if (lo < hi) out.push_back({lo, hi});
    if (ai->hi < bi->hi)
      ++ai;
    else
      ++bi;
  }
  return PieceSet::make(std::move(out));
}

inline PieceSet piece_subtract(const PieceSet& a, const PieceSet& b) {
  std::vector<Interval> out;
  for (const auto& iv : a.intervals()) {
    Rat cur = iv.lo;
    for (const auto& cut : b.intervals()) {
      if (cut.hi <= cur) continue;
      if (cut.lo >= iv.hi) break;
      if (cut.lo > cur) out.push_back({cur, cut.lo});
      cur = rat_max(cur, cut.hi);
      if (cur >= iv.hi) break;
    }
    if (cur < iv.hi) out.push_back({cur, iv.hi});
  }
  return PieceSet::make(std::move(out));
}

inline PieceSet piece_complement(const PieceSet& a) {
  return piece_subtract(PieceSet::full(), a);
}

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

struct Instance {
  int n = 0;  // agents
  int m = 0;  // indivisible goods
  std::vector<std::vector<Rat>> goods;       // n x m, u_i(o_j) >= 0
  std::vector<Rat> breakpoints;              // s+1 entries (empty when no cake)
  std::vector<std::vector<Rat>> densities;   // n x s
  bool degenerate = false;                   // zero-total agents allowed

  int segments() const { return breakpoints.empty() ? 0 : static_cast<int>(breakpoints.size()) - 1; }
  bool has_cake() const { return segments() > 0; }

  Rat segment_value(int agent, int seg) const {
    return densities[agent][seg] * (breakpoints[seg + 1] - breakpoints[seg]);
  }

  Rat cake_value(int agent) const {
    Rat v = 0;
    for (int s = 0; s < segments(); ++s) v += segment_value(agent, s);
    return v;
  }

  Rat goods_value(int agent) const {
    Rat v = 0;
    for (const auto& g : goods[agent]) v += g;
    return v;
  }

  Rat total_value(int agent) const { return goods_value(agent) + cake_value(agent); }

  bool identical_agents() const {
    for (int i = 1; i < n; ++i)
      if (goods[i] != goods[0] || densities[i] != densities[0]) return false;
    return true;
  }
};

// alpha_i = u_i(M) / (u_i(M) + u_i(C))
inline Rat indivisibility_ratio(const Instance& inst, int agent) {
  Rat total = inst.total_value(agent);
  if (total == 0) throw error("indivisibility ratio undefined for zero-total-utility agent " +
                              std::to_string(agent));
  return inst.goods_value(agent) / total;
}

inline Instance normalize(const Instance& inst) {
  Instance out = inst;
  for (int i = 0; i < inst.n; ++i) {
    Rat total = inst.total_value(i);
    if (total == 0)
      throw error("normalize: agent " + std::to_string(i) + " has zero total utility");
    for (auto& g : out.goods[i]) g /= total;
    for (auto& d : out.densities[i]) d /= total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Allocation
// ---------------------------------------------------------------------------

struct Bundle {
  std::vector<int> goods;  // sorted good indices
  PieceSet piece;
};

struct Allocation {
  std::vector<Bundle> bundles;  // one per agent

  bool holds_good(int agent, int good) const {
    const auto& g = bundles[agent].goods;
    return std::binary_search(g.begin(), g.end(), good);
  }
};

inline Bundle make_bundle(std::vector<int> goods, PieceSet piece = {}) {
  std::sort(goods.begin(), goods.end());
  return Bundle{std::move(goods), std::move(piece)};
}

// ---------------------------------------------------------------------------
// utility: additive over goods, integral over the cake
// ---------------------------------------------------------------------------

inline Rat piece_value_direct(const Instance& inst, int agent, const PieceSet& piece) {
  Rat v = 0;
  for (const auto& iv : piece.intervals()) {
    for (int s = 0; s < inst.segments(); ++s) {
      Rat lo = rat_max(iv.lo, inst.breakpoints[s]);
      Rat hi = rat_min(iv.hi, inst.breakpoints[s + 1]);
      if (lo < hi) v += inst.densities[agent][s] * (hi - lo);
    }
  }
  return v;
}

inline Rat utility(const Instance& inst, int agent, const std::vector<int>& goods,
                   const PieceSet& piece) {
  Rat v = 0;
  for (int g : goods) {
    if (g < 0 || g >= inst.m) throw error("good index out of range: " + std::to_string(g));
    v += inst.goods[agent][g];
  }
  return v + piece_value_direct(inst, agent, piece);
}

inline Rat bundle_value(const Instance& inst, int agent, const Bundle& b) {
  return utility(inst, agent, b.goods, b.piece);
}

// ---------------------------------------------------------------------------
// validate_allocation: partition invariants, violations as values
// ---------------------------------------------------------------------------

struct Violation {
  std::string what;
};

inline std::vector<Violation> validate_allocation(const Instance& inst, const Allocation& alloc) {
  std::vector<Violation> out;
  if (static_cast<int>(alloc.bundles.size()) != inst.n) {
    out.push_back({"expected " + std::to_string(inst.n) + " bundles, got " +
                   std::to_string(alloc.bundles.size())});
    return out;
  }
  std::vector<int> owner(inst.m, -1);
  for (int i = 0; i < inst.n; ++i) {
    for (int g : alloc.bundles[i].goods) {
      if (g < 0 || g >= inst.m) {
        out.push_back({"bundle " + std::to_string(i) + ": good index " + std::to_string(g) +
                       " out of range"});
        continue;
      }
      if (owner[g] >= 0)
        out.push_back({"good " + std::to_string(g) + " assigned to both agents " +
                       std::to_string(owner[g]) + " and " + std::to_string(i)});
      owner[g] = i;
    }
  }
  for (int g = 0; g < inst.m; ++g)
    if (owner[g] < 0) out.push_back({"good " + std::to_string(g) + " unassigned"});

  // Piece overlaps, pairwise, with exact endpoints.
  for (int i = 0; i < inst.n; ++i)
    for (int j = i + 1; j < inst.n; ++j) {
      PieceSet inter = piece_intersect(alloc.bundles[i].piece, alloc.bundles[j].piece);
      for (const auto& iv : inter.intervals())
        out.push_back({"bundles " + std::to_string(i) + " and " + std::to_string(j) +
                       " overlap on [" + to_string(iv.lo) + ", " + to_string(iv.hi) + ")"});
    }

  if (inst.has_cake()) {
    PieceSet covered;
    bool overlap_free = true;
    for (const auto& b : alloc.bundles) {
      try {
        covered = piece_union(covered, b.piece);
      } catch (const error&) {
        overlap_free = false;  // already reported above
        break;
      }
    }
    if (overlap_free) {
      PieceSet gaps = piece_subtract(PieceSet::full(), covered);
      for (const auto& iv : gaps.intervals())
        out.push_back({"cake gap on [" + to_string(iv.lo) + ", " + to_string(iv.hi) + ")"});
    }
  } else {
    for (int i = 0; i < inst.n; ++i)
      if (!alloc.bundles[i].piece.empty())
        out.push_back({"bundle " + std::to_string(i) + " holds cake but the instance has none"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion
// ---------------------------------------------------------------------------

enum class CriterionKind { EF, PROP, EF1, PROP1, EFfA, PROPfA, EFM, MMS, PROPmM };

struct Criterion {
  CriterionKind kind = CriterionKind::EF;
  Rat c = 1;     // EFfA/PROPfA coefficient: f(alpha) = c * alpha
  Rat beta = 1;  // MMS approximation factor, in (0,1]

  static Criterion ef() { return {CriterionKind::EF, 1, 1}; }
  static Criterion prop() { return {CriterionKind::PROP, 1, 1}; }
  static Criterion ef1() { return {CriterionKind::EF1, 1, 1}; }
  static Criterion prop1() { return {CriterionKind::PROP1, 1, 1}; }
  static Criterion effa(const Rat& c) {
    if (c < 0) throw error("EFfA coefficient must be >= 0");
    return {CriterionKind::EFfA, c, 1};
  }
  static Criterion propfa(const Rat& c) {
    if (c < 0) throw error("PROPfA coefficient must be >= 0");
    return {CriterionKind::PROPfA, c, 1};
  }
  static Criterion efalpha() { return effa(1); }
  static Criterion propalpha() { return propfa(1); }
  static Criterion efm() { return {CriterionKind::EFM, 1, 1}; }
  static Criterion mms(const Rat& beta) {
    if (beta <= 0 || beta > 1) throw error("MMS beta must be in (0,1]");
    return {CriterionKind::MMS, 1, beta};
  }
  static Criterion propmm() { return {CriterionKind::PROPmM, 1, 1}; }

  std::string token() const {
    switch (kind) {
      case CriterionKind::EF: return "ef";
      case CriterionKind::PROP: return "prop";
      case CriterionKind::EF1: return "ef1";
      case CriterionKind::PROP1: return "prop1";
      case CriterionKind::EFfA: return c == 1 ? "efalpha" : "effa:" + to_string(c);
      case CriterionKind::PROPfA: return c == 1 ? "propalpha" : "propfa:" + to_string(c);
      case CriterionKind::EFM: return "efm";
      case CriterionKind::MMS: return "mms:" + to_string(beta);
      case CriterionKind::PROPmM: return "propmm";
    }
    return "?";
  }

  static Criterion from_token(const std::string& token) {
    auto coeff = [&](const std::string& prefix) {
      return parse_rat(token.substr(prefix.size()), "criterion '" + token + "'");
    };
    if (token == "ef") return ef();
    if (token == "prop") return prop();
    if (token == "ef1") return ef1();
    if (token == "prop1") return prop1();
    if (token == "efalpha") return efalpha();
    if (token == "propalpha") return propalpha();
    if (token.rfind("effa:", 0) == 0) return effa(coeff("effa:"));
    if (token.rfind("propfa:", 0) == 0) return propfa(coeff("propfa:"));
    if (token == "efm") return efm();
    if (token.rfind("mms:", 0) == 0) return mms(coeff("mms:"));
    if (token == "propmm") return propmm();
    throw parse_error("criterion", "unknown criterion token '" + token + "'");
  }
};

// ---------------------------------------------------------------------------
// FairnessReport
// ---------------------------------------------------------------------------

// One witnessed inequality. Pairwise criteria fill `against`; PROP-style
// criteria leave it empty. `good` is the witness good o (best candidate for
// violations). The verdict for the entry is lhs >= rhs.
struct Witness {
  int agent = 0;
  std::optional<int> against;
  bool satisfied = true;
  std::optional<int> good;
  Rat lhs, rhs;
};

struct FairnessReport {
  Criterion criterion;
  bool satisfied = true;
  std::vector<Witness> witnesses;  // ordered by (agent, against)

  const Witness* first_violation() const {
    for (const auto& w : witnesses)
      if (!w.satisfied) return &w;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// JSON serialization (instances, allocations, reports)
// ---------------------------------------------------------------------------

namespace detail {

inline Rat rat_from_json(const json& j, const std::string& path) {
  if (j.is_string()) return parse_rat(j.get<std::string>(), path);
  if (j.is_number_integer()) return rat(j.get<long>());
  throw parse_error(path, "expected rational as \"p/q\" string or integer");
}

inline json require(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw parse_error(path.empty() ? key : path + "." + key, "missing field");
  return j.at(key);
}

}  // namespace detail

inline Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw parse_error("instance", "expected a JSON object");
  Instance inst;
  json agents = detail::require(j, "agents", "");
  if (!agents.is_number_integer() || agents.get<int>() < 1)
    throw parse_error("agents", "expected integer >= 1");
  inst.n = agents.get<int>();

  json goods = detail::require(j, "goods", "");
  if (!goods.is_array() || static_cast<int>(goods.size()) != inst.n)
    throw parse_error("goods", "expected " + std::to_string(inst.n) + " rows");
  inst.m = goods.empty() ? 0 : static_cast<int>(goods[0].size());
  for (int i = 0; i < inst.n; ++i) {
    const json& row = goods[i];
    std::string rp = "goods[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != inst.m)
      throw parse_error(rp, "expected " + std::to_string(inst.m) + " entries");
    std::vector<Rat> vals;
    for (int g = 0; g < inst.m; ++g) {
      Rat v = detail::rat_from_json(row[g], rp + "[" + std::to_string(g) + "]");
      if (v < 0) throw parse_error(rp + "[" + std::to_string(g) + "]", "negative utility");
      vals.push_back(v);
    }
    inst.goods.push_back(std::move(vals));
  }

  if (j.contains("cake") && !j.at("cake").is_null()) {
    const json& cake = j.at("cake");
    json bps = detail::require(cake, "breakpoints", "cake");
    if (!bps.is_array()) throw parse_error("cake.breakpoints", "expected an array");
    for (std::size_t k = 0; k < bps.size(); ++k)
      inst.breakpoints.push_back(
          detail::rat_from_json(bps[k], "cake.breakpoints[" + std::to_string(k) + "]"));
    if (inst.breakpoints.size() == 1)
      throw parse_error("cake.breakpoints", "a single breakpoint makes no segment");
    if (!inst.breakpoints.empty()) {
      if (inst.breakpoints.front() != 0)
        throw parse_error("cake.breakpoints[0]", "breakpoints must start at 0");
      if (inst.breakpoints.back() != 1)
        throw parse_error("cake.breakpoints", "breakpoints must end at 1");
      for (std::size_t k = 1; k < inst.breakpoints.size(); ++k)
        if (!(inst.breakpoints[k - 1] < inst.breakpoints[k]))
          throw parse_error("cake.breakpoints[" + std::to_string(k) + "]",
                            "non-monotone breakpoints");
    }
    int s = inst.segments();
    json dens = detail::require(cake, "densities", "cake");
    if (!dens.is_array() || static_cast<int>(dens.size()) != inst.n)
      throw parse_error("cake.densities", "expected " + std::to_string(inst.n) + " rows");
    for (int i = 0; i < inst.n; ++i) {
      std::string rp = "cake.densities[" + std::to_string(i) + "]";
      const json& row = dens[i];
      if (!row.is_array() || static_cast<int>(row.size()) != s)
        throw parse_error(rp, "expected " + std::to_string(s) + " entries");
      std::vector<Rat> vals;
      for (int k = 0; k < s; ++k) {
        Rat v = detail::rat_from_json(row[k], rp + "[" + std::to_string(k) + "]");
        if (v < 0) throw parse_error(rp + "[" + std::to_string(k) + "]", "negative density");
        vals.push_back(v);
      }
      inst.densities.push_back(std::move(vals));
    }
  } else {
    inst.densities.assign(inst.n, {});
  }

  if (j.contains("degenerate")) inst.degenerate = j.at("degenerate").get<bool>();
  if (!inst.degenerate)
    for (int i = 0; i < inst.n; ++i)
      if (inst.total_value(i) == 0)
        throw parse_error("goods[" + std::to_string(i) + "]",
                          "agent has zero total utility (set \"degenerate\": true to allow)");
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error("instance", std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline json instance_to_json(const Instance& inst) {
  json j;
  j["agents"] = inst.n;
  json goods = json::array();
  for (int i = 0; i < inst.n; ++i) {
    json row = json::array();
    for (const auto& v : inst.goods[i]) row.push_back(to_string(v));
    goods.push_back(row);
  }
  j["goods"] = goods;
  if (inst.has_cake()) {
    json bps = json::array();
    for (const auto& b : inst.breakpoints) bps.push_back(to_string(b));
    json dens = json::array();
    for (int i = 0; i < inst.n; ++i) {
      json row = json::array();
      for (const auto& d : inst.densities[i]) row.push_back(to_string(d));
      dens.push_back(row);
    }
    j["cake"] = {{"breakpoints", bps}, {"densities", dens}};
  }
  if (inst.degenerate) j["degenerate"] = true;
  return j;
}

inline std::string serialize_instance(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline Allocation allocation_from_json(const json& j, const Instance& inst) {
  if (!j.is_object()) throw parse_error("allocation", "expected a JSON object");
  json bundles = detail::require(j, "bundles", "");
  if (!bundles.is_array() || static_cast<int>(bundles.size()) != inst.n)
    throw parse_error("bundles", "expected " + std::to_string(inst.n) + " bundles");
  Allocation alloc;
  for (int i = 0; i < inst.n; ++i) {
    std::string bp = "bundles[" + std::to_string(i) + "]";
    const json& b = bundles[i];
    Bundle bundle;
    if (b.contains("goods")) {
      for (const auto& g : b.at("goods")) {
        if (!g.is_number_integer()) throw parse_error(bp + ".goods", "expected integer indices");
        bundle.goods.push_back(g.get<int>());
      }
      std::sort(bundle.goods.begin(), bundle.goods.end());
      for (std::size_t k = 1; k < bundle.goods.size(); ++k)
        if (bundle.goods[k] == bundle.goods[k - 1])
          throw parse_error(bp + ".goods", "duplicate good " + std::to_string(bundle.goods[k]));
    }
    if (b.contains("piece")) {
      std::vector<Interval> ivs;
      const json& piece = b.at("piece");
      if (!piece.is_array()) throw parse_error(bp + ".piece", "expected an array of [l, r] pairs");
      for (std::size_t k = 0; k < piece.size(); ++k) {
        const json& iv = piece[k];
        std::string ip = bp + ".piece[" + std::to_string(k) + "]";
        if (!iv.is_array() || iv.size() != 2) throw parse_error(ip, "expected [l, r]");
        ivs.push_back({detail::rat_from_json(iv[0], ip + "[0]"),
                       detail::rat_from_json(iv[1], ip + "[1]")});
      }
      bundle.piece = PieceSet::make(std::move(ivs), bp + ".piece");
    }
    alloc.bundles.push_back(std::move(bundle));
  }
  return alloc;
}

inline Allocation parse_allocation(const std::string& text, const Instance& inst) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error("allocation", std::string("invalid JSON: ") + e.what());
  }
  return allocation_from_json(j, inst);
}

inline json allocation_to_json(const Allocation& alloc) {
  json bundles = json::array();
  for (const auto& b : alloc.bundles) {
    json piece = json::array();
    for (const auto& iv : b.piece.intervals())
      piece.push_back(json::array({to_string(iv.lo), to_string(iv.hi)}));
    bundles.push_back({{"goods", b.goods}, {"piece", piece}});
  }
  return json{{"bundles", bundles}};
}

inline std::string serialize_allocation(const Allocation& alloc) {
  return allocation_to_json(alloc).dump(2) + "\n";
}

inline json report_to_json(const FairnessReport& report) {
  json ws = json::array();
  for (const auto& w : report.witnesses) {
    json e;
    e["agent"] = w.agent;
    if (w.against) e["against"] = *w.against;
    e["satisfied"] = w.satisfied;
    if (w.good)
      e["good"] = *w.good;
    else
      e["good"] = nullptr;
    e["lhs"] = to_string(w.lhs);
    e["rhs"] = to_string(w.rhs);
    ws.push_back(e);
  }
  return json{{"criterion", report.criterion.token()},
              {"verdict", report.satisfied ? "satisfied" : "violated"},
              {"witnesses", ws}};
}

}  // namespace mixedfair
