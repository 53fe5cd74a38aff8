// Constructive procedures: the PROP-alpha bag-and-knife algorithm, the
// two-agent EF-alpha and EF-alpha + PO procedures, and the identical-agents
// greedy with water-filling.
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mixedfair/cake.hpp"
#include "mixedfair/fairness.hpp"
#include "mixedfair/model.hpp"
#include "mixedfair/waterfill.hpp"

namespace mixedfair {

// ---------------------------------------------------------------------------
// alg1_propalpha
// ---------------------------------------------------------------------------

struct RoundRecord {
  std::vector<int> bag;                     // B when the round's decision is made
  std::optional<int> trigger_good;          // o
  std::optional<int> trigger_agent;         // j that made o trigger
  bool cake_case = false;                   // false: goods only, true: with cake
  int assigned_agent = -1;
  Rat cake_from = 0;                        // left end of the remaining cake
  std::vector<std::pair<int, Rat>> cuts;    // (agent, x_i) computed in the cake case
  std::vector<int> remaining_goods;         // pool snapshot after the round
};

struct AlgTrace {
  std::vector<RoundRecord> rounds;

  json to_json() const {
    json rounds_json = json::array();
    for (const auto& r : rounds) {
      json e;
      e["bag"] = r.bag;
      e["trigger_good"] = r.trigger_good ? json(*r.trigger_good) : json(nullptr);
      e["trigger_agent"] = r.trigger_agent ? json(*r.trigger_agent) : json(nullptr);
      e["case"] = r.cake_case ? "cake" : "indivisible";
      e["assigned_agent"] = r.assigned_agent;
      e["cake_from"] = to_string(r.cake_from);
      json cuts = json::array();
      for (const auto& [agent, x] : r.cuts)
        cuts.push_back({{"agent", agent}, {"x", to_string(x)}});
      e["cuts"] = cuts;
      e["remaining_goods"] = r.remaining_goods;
      rounds_json.push_back(e);
    }
    return json{{"rounds", rounds_json}};
  }
};

// Runs n-1 rounds; each round fills a bag with indivisible goods in index
// order until some agent would be satisfied, then assigns either bag + the
// triggering good (when the remaining cake helps nobody) or bag + the
// smallest satisfying cake prefix. The output satisfies PROP-alpha for every
// agent; RW queries go through `log` when given.
inline std::pair<Allocation, AlgTrace> alg1_propalpha(const Instance& inst,
                                                      QueryLog* log = nullptr) {
  const int n = inst.n;
  std::vector<Rat> total(n), alpha(n), share(n);
  for (int i = 0; i < n; ++i) {
    Rat cake = inst.has_cake() ? eval_query(inst, i, rat(0), rat(1), log) : Rat(0);
    total[i] = inst.goods_value(i) + cake;
    if (total[i] == 0) throw error("alg1_propalpha: agent " + std::to_string(i) +
                                   " has zero total utility");
    alpha[i] = inst.goods_value(i) / total[i];
    share[i] = total[i] / n;
  }

  std::vector<bool> in_pool(inst.m, true);
  std::vector<bool> active(n, true);
  Rat cursor = 0;  // remaining cake is [cursor, 1)
  Allocation alloc;
  alloc.bundles.resize(n);
  AlgTrace trace;

  // Best good for agent i outside an exclusion set, over all instance goods
  // (already-assigned goods remain legal PROP-alpha witnesses).
  auto best_outside = [&](int i, const std::vector<bool>& excluded) {
    Rat best = 0;
    for (int g = 0; g < inst.m; ++g)
      if (!excluded[g]) best = rat_max(best, inst.goods[i][g]);
    return best;
  };

  auto actives = [&]() {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (active[i]) out.push_back(i);
    return out;
  };

  for (int round = 1; round < n; ++round) {
    std::vector<int> agents = actives();

    // Round-entry invariant: the remaining goods are enough for everyone
    // still unserved.
    for (int i : agents) {
      Rat remaining = 0;
      for (int g = 0; g < inst.m; ++g)
        if (in_pool[g]) remaining += inst.goods[i][g];
      if (inst.has_cake()) remaining += eval_query(inst, i, cursor, rat(1));
      Rat need = share[i] - alpha[i] * best_outside(i, std::vector<bool>(inst.m, false));
      if (remaining < (n - round + 1) * rat_max(rat(0), need))
        throw error("alg1_propalpha: remaining-goods invariant violated at round " +
                    std::to_string(round) + " (implementation bug)");
    }

    std::vector<bool> in_bag(inst.m, false);
    std::vector<Rat> bag_value(n, Rat(0));  // u_i(B) per agent
    std::vector<int> bag;
    std::optional<int> trigger_good, trigger_agent;

    for (int o = 0; o < inst.m && !trigger_good; ++o) {
      if (!in_pool[o]) continue;
      // Would adding o satisfy some agent, with the witness good drawn from
      // the instance goods outside B and o?
      std::vector<bool> excl = in_bag;
      excl[o] = true;
      bool any_candidate = false;
      for (int g = 0; g < inst.m; ++g)
        if (!excl[g]) any_candidate = true;
      if (!any_candidate) {
        trigger_good = o;  // last remaining good; o is observed, not added
        break;
      }
      for (int j : agents) {
        if (bag_value[j] + inst.goods[j][o] >= share[j] - alpha[j] * best_outside(j, excl)) {
          trigger_good = o;
          trigger_agent = j;
          break;
        }
      }
      if (!trigger_good) {
        in_bag[o] = true;
        bag.push_back(o);
        for (int i : agents) bag_value[i] += inst.goods[i][o];
      }
    }

    // Thresholds for the branch test use goods outside B (o included).
    std::vector<Rat> threshold(n);
    for (int i : agents) threshold[i] = share[i] - alpha[i] * best_outside(i, in_bag);

    bool cake_helps_someone = false;
    for (int i : agents) {
      Rat with_cake = bag_value[i];
      if (inst.has_cake()) with_cake += eval_query(inst, i, cursor, rat(1), log);
      if (with_cake >= threshold[i]) cake_helps_someone = true;
    }

    RoundRecord rec;
    rec.bag = bag;
    rec.trigger_good = trigger_good;
    rec.trigger_agent = trigger_agent;
    rec.cake_from = cursor;

    if (!cake_helps_someone) {
      // Case 1: bag plus the triggering good, no cake.
      if (!trigger_agent)
        throw error("alg1_propalpha: no agent satisfiable at round " + std::to_string(round) +
                    " (implementation bug)");
      int j = *trigger_agent;
      std::vector<int> goods = bag;
      goods.push_back(*trigger_good);
      alloc.bundles[j] = make_bundle(goods);
      for (int g : goods) in_pool[g] = false;
      active[j] = false;
      rec.cake_case = false;
      rec.assigned_agent = j;
    } else {
      // Case 2: bag plus the leftmost satisfying cake prefix.
      int winner = -1;
      Rat winner_x = 0;
      bool winner_satisfied = false;
      for (int i : agents) {
        Rat x;
        bool satisfied;
        if (!inst.has_cake()) {
          x = 1;
          satisfied = bag_value[i] >= threshold[i];
        } else {
          Rat needed = rat_max(rat(0), threshold[i] - bag_value[i]);
          auto cut = cut_query(inst, i, cursor, needed, log);
          satisfied = cut.has_value();
          x = cut.value_or(rat(1));
        }
        rec.cuts.emplace_back(i, x);
        if (winner < 0 || x < winner_x || (x == winner_x && satisfied && !winner_satisfied)) {
          winner = i;
          winner_x = x;
          winner_satisfied = satisfied;
        }
      }
      PieceSet piece = inst.has_cake() ? PieceSet::interval(cursor, winner_x) : PieceSet{};
      alloc.bundles[winner] = Bundle{bag, piece};
      std::sort(alloc.bundles[winner].goods.begin(), alloc.bundles[winner].goods.end());
      for (int g : bag) in_pool[g] = false;
      cursor = inst.has_cake() ? winner_x : cursor;
      active[winner] = false;
      rec.cake_case = true;
      rec.assigned_agent = winner;
    }

    for (int g = 0; g < inst.m; ++g)
      if (in_pool[g]) rec.remaining_goods.push_back(g);
    trace.rounds.push_back(std::move(rec));
  }

  // Last agent sweeps the pool and the remaining cake.
  int last = actives().front();
  std::vector<int> rest;
  for (int g = 0; g < inst.m; ++g)
    if (in_pool[g]) rest.push_back(g);
  PieceSet tail = inst.has_cake() && cursor < 1 ? PieceSet::interval(cursor, rat(1)) : PieceSet{};
  alloc.bundles[last] = Bundle{std::move(rest), std::move(tail)};

  FairnessReport verdict = check(inst, alloc, Criterion::propalpha());
  if (!verdict.satisfied)
    throw error("alg1_propalpha: output is not PROP-alpha (implementation bug)");
  return {alloc, trace};
}

// Rebuilds the allocation a trace describes; used to validate traces.
inline Allocation replay_trace(const Instance& inst, const AlgTrace& trace) {
  Allocation alloc;
  alloc.bundles.resize(inst.n);
  std::vector<bool> in_pool(inst.m, true);
  Rat cursor = 0;
  std::vector<bool> assigned(inst.n, false);
  for (const auto& r : trace.rounds) {
    std::vector<int> goods = r.bag;
    PieceSet piece;
    if (!r.cake_case) {
      if (!r.trigger_good) throw error("replay_trace: indivisible case without trigger good");
      goods.push_back(*r.trigger_good);
    } else {
      Rat x = 1;
      for (const auto& [agent, cut] : r.cuts)
        if (agent == r.assigned_agent) x = cut;
      if (inst.has_cake() && r.cake_from < x) piece = PieceSet::interval(r.cake_from, x);
      cursor = inst.has_cake() ? x : cursor;
    }
    alloc.bundles[r.assigned_agent] = make_bundle(goods, piece);
    for (int g : alloc.bundles[r.assigned_agent].goods) in_pool[g] = false;
    assigned[r.assigned_agent] = true;
  }
  for (int i = 0; i < inst.n; ++i) {
    if (assigned[i]) continue;
    std::vector<int> rest;
    for (int g = 0; g < inst.m; ++g)
      if (in_pool[g]) rest.push_back(g);
    PieceSet tail =
        inst.has_cake() && cursor < 1 ? PieceSet::interval(cursor, rat(1)) : PieceSet{};
    alloc.bundles[i] = Bundle{std::move(rest), std::move(tail)};
  }
  return alloc;
}

// ---------------------------------------------------------------------------
// two_agent_efalpha (cut-and-choose over an EF1 seed split)
// ---------------------------------------------------------------------------

inline Allocation two_agent_efalpha(const Instance& inst, QueryLog* log = nullptr) {
  if (inst.n != 2) throw error("two_agent_efalpha: needs exactly 2 agents");

  // EF1 split of the goods under agent 0's utilities: descending greedy into
  // the currently lighter side.
  std::vector<int> order(inst.m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.goods[0][a] != inst.goods[0][b]) return inst.goods[0][a] > inst.goods[0][b];
    return a < b;
  });
  std::vector<int> side_goods[2];
  Rat side_val[2] = {Rat(0), Rat(0)};
  for (int g : order) {
    int s = side_val[0] <= side_val[1] ? 0 : 1;
    side_goods[s].push_back(g);
    side_val[s] += inst.goods[0][g];
  }
  int heavy = side_val[0] >= side_val[1] ? 0 : 1;
  int light = 1 - heavy;

  Rat cake = inst.has_cake() ? eval_query(inst, 0, rat(0), rat(1), log) : Rat(0);
  Rat gap = side_val[heavy] - side_val[light];
  PieceSet heavy_piece, light_piece;
  if (inst.has_cake()) {
    if (cake < gap) {
      light_piece = PieceSet::full();  // all cake still leaves the light side behind
    } else {
      // Equalize under u_0: the light side gets the prefix worth (cake+gap)/2.
      Rat t = cut_query(inst, 0, rat(0), (cake + gap) / 2, log).value();
      light_piece = PieceSet::interval(rat(0), t);
      heavy_piece = PieceSet::interval(t, rat(1));
    }
  }

  Bundle first = make_bundle(side_goods[heavy], heavy_piece);
  Bundle second = make_bundle(side_goods[light], light_piece);
  // Agent 1 picks her preferred bundle, ties toward the first.
  bool takes_first = bundle_value(inst, 1, first) >= bundle_value(inst, 1, second);
  Allocation alloc;
  alloc.bundles = takes_first ? std::vector<Bundle>{second, first}
                              : std::vector<Bundle>{first, second};

  if (!check(inst, alloc, Criterion::efalpha()).satisfied)
    throw error("two_agent_efalpha: output is not EF-alpha (implementation bug)");
  return alloc;
}

// ---------------------------------------------------------------------------
// two_agent_efalpha_po
// ---------------------------------------------------------------------------

// Cut-and-choose with a Pareto lift. Agent 0 partitions the goods over all
// 2^m splits with the cake division that makes the two bundles as equal as
// possible under her utilities (all cake to the light side when equality is
// unreachable); among equalizing divisions the tie-break maximizes agent 1's
// value for her eventual bundle via a ratio-greedy cake ordering. Agent 1
// picks her preferred bundle. The resulting allocation is EF-alpha; the
// proof's Pareto-improvement step is then realized exactly by maximizing the
// utility sum over allocations dominating it, which keeps EF-alpha (any
// dominating allocation here is proportional for both agents) and makes the
// output Pareto optimal.
inline Allocation two_agent_efalpha_po(const Instance& inst) {
  if (inst.n != 2) throw error("two_agent_efalpha_po: needs exactly 2 agents");
  if (inst.m > 16) throw error("two_agent_efalpha_po: m <= 16 required");
  const int s = inst.segments();
  std::vector<Rat> v0(s), v1(s);
  Rat cake0 = 0;
  for (int seg = 0; seg < s; ++seg) {
    v0[seg] = inst.segment_value(0, seg);
    v1[seg] = inst.segment_value(1, seg);
    cake0 += v0[seg];
  }

  struct Candidate {
    unsigned split = 0;      // goods with bit set go to side 0
    int orientation = 0;     // which side the greedy maximizes u_1 for
    Rat diff, key;
    std::vector<Rat> frac;   // side 0's fraction per segment
    Rat u1_side0, u1_side1;
  };
  std::optional<Candidate> best;

  for (unsigned split = 0; split < (1u << inst.m); ++split) {
    // Both sides measured under agent 0's utility: she makes the partition.
    Rat g0 = 0, g1 = 0;
    for (int g = 0; g < inst.m; ++g)
      ((split & (1u << g)) ? g0 : g1) += inst.goods[0][g];
    int light = g0 <= g1 ? 0 : 1;
    Rat d = light == 0 ? g1 - g0 : g0 - g1;
    bool equalizable = cake0 >= d;

    for (int orientation = 0; orientation < (equalizable && s > 0 ? 2 : 1); ++orientation) {
      Candidate cand;
      cand.split = split;
      cand.orientation = orientation;
      cand.frac.assign(s, Rat(0));
      if (!equalizable) {
        // All cake to the light side.
        for (int seg = 0; seg < s; ++seg) cand.frac[seg] = light == 0 ? 1 : 0;
        cand.diff = d - cake0;
      } else {
        cand.diff = 0;
        if (s > 0) {
          // u_0 budgets that equalize; the oriented side takes the cake with
          // the best u_1 per u_0 first (zero-u_0 cake is free).
          Rat budget = light == orientation ? Rat((cake0 + d) / 2) : Rat((cake0 - d) / 2);
          std::vector<int> order(s);
          std::iota(order.begin(), order.end(), 0);
          std::sort(order.begin(), order.end(), [&](int a, int b) {
            bool fa = v0[a] == 0, fb = v0[b] == 0;
            if (fa != fb) return fa;  // free cake first
            Rat lhs = v1[a] * v0[b], rhs = v1[b] * v0[a];
            if (lhs != rhs) return lhs > rhs;
            return a < b;
          });
          for (int seg : order) {
            Rat take;
            if (v0[seg] == 0)
              take = 1;
            else if (budget >= v0[seg])
              take = 1;
            else if (budget > 0)
              take = budget / v0[seg];
            else
              take = 0;
            budget -= take * v0[seg];
            cand.frac[seg] = orientation == 0 ? take : 1 - take;
          }
        }
      }
      Rat c1_0 = 0, c1_1 = 0;
      for (int seg = 0; seg < s; ++seg) {
        c1_0 += cand.frac[seg] * v1[seg];
        c1_1 += (1 - cand.frac[seg]) * v1[seg];
      }
      Rat u1g0 = 0, u1g1 = 0;
      for (int g = 0; g < inst.m; ++g)
        if (split & (1u << g))
          u1g0 += inst.goods[1][g];
        else
          u1g1 += inst.goods[1][g];
      cand.u1_side0 = u1g0 + c1_0;
      cand.u1_side1 = u1g1 + c1_1;
      if (cand.diff > 0)
        cand.key = light == 0 ? cand.u1_side1 : cand.u1_side0;  // the heavy side
      else
        cand.key = rat_max(cand.u1_side0, cand.u1_side1);

      if (!best || cand.diff < best->diff || (cand.diff == best->diff && cand.key > best->key))
        best = std::move(cand);
    }
  }

  // Materialize the chosen partition; fractional segments give side 0 the
  // left part.
  std::vector<Interval> p0, p1;
  for (int seg = 0; seg < s; ++seg) {
    Rat lo = inst.breakpoints[seg], hi = inst.breakpoints[seg + 1];
    const Rat& f = best->frac[seg];
    if (f == 1) {
      p0.push_back({lo, hi});
    } else if (f == 0) {
      p1.push_back({lo, hi});
    } else {
      Rat mid = lo + f * (hi - lo);
      p0.push_back({lo, mid});
      p1.push_back({mid, hi});
    }
  }
  std::vector<int> goods0, goods1;
  for (int g = 0; g < inst.m; ++g)
    ((best->split & (1u << g)) ? goods0 : goods1).push_back(g);
  Bundle side0 = make_bundle(goods0, PieceSet::make(std::move(p0)));
  Bundle side1 = make_bundle(goods1, PieceSet::make(std::move(p1)));

  // Agent 1 chooses (ties toward side 0); agent 0 keeps the other bundle.
  bool takes_side0 = bundle_value(inst, 1, side0) >= bundle_value(inst, 1, side1);
  Allocation alloc;
  alloc.bundles = takes_side0 ? std::vector<Bundle>{side1, side0}
                              : std::vector<Bundle>{side0, side1};

  // Pareto lift: the sum-maximal allocation dominating the cut-and-choose
  // outcome is Pareto optimal and stays EF-alpha.
  Rat a0 = bundle_value(inst, 0, alloc.bundles[0]);
  Rat a1 = bundle_value(inst, 1, alloc.bundles[1]);
  MaxSumResult lift = max_sum_dominating(inst, a0, a1);
  if (lift.feasible && lift.u0 + lift.u1 > a0 + a1) alloc = lift.allocation;

  if (!check(inst, alloc, Criterion::efalpha()).satisfied)
    throw error("two_agent_efalpha_po: output is not EF-alpha (implementation bug)");
  if (auto fpo = check_fpo_two_agents(inst, alloc); !fpo.satisfied)
    throw error("two_agent_efalpha_po: output admits a Pareto-improving exchange");
  return alloc;
}

// ---------------------------------------------------------------------------
// identical_greedy
// ---------------------------------------------------------------------------

// EF1 over the indivisible goods by descending greedy into the lightest
// bundle, then water-filling the cake onto the lowest bundles. Requires
// exactly identical utility rows; the output satisfies EF f(alpha) with
// f = n^2 / (4(n-1)) * alpha.
inline Allocation identical_greedy(const Instance& inst, QueryLog* log = nullptr) {
  if (!inst.identical_agents()) throw error("identical_greedy: agents must be identical");
  const int n = inst.n;

  std::vector<int> order(inst.m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.goods[0][a] != inst.goods[0][b]) return inst.goods[0][a] > inst.goods[0][b];
    return a < b;
  });

  Allocation alloc;
  alloc.bundles.resize(n);
  std::vector<Rat> value(n, Rat(0));
  for (int g : order) {
    int lightest = 0;
    for (int i = 1; i < n; ++i)
      if (value[i] < value[lightest]) lightest = i;
    alloc.bundles[lightest].goods.push_back(g);
    value[lightest] += inst.goods[0][g];
  }
  for (auto& b : alloc.bundles) std::sort(b.goods.begin(), b.goods.end());

  if (inst.has_cake()) {
    Rat cake = eval_query(inst, 0, rat(0), rat(1), log);
    std::vector<Rat> adds = water_fill(value, cake);
    Rat cursor = 0;
    for (int i = 0; i < n; ++i) {
      if (adds[i] == 0) continue;
      Rat t = cut_query(inst, 0, cursor, adds[i], log).value();
      alloc.bundles[i].piece = PieceSet::interval(cursor, t);
      cursor = t;
    }
    if (cursor < 1)  // trailing worthless cake
      alloc.bundles[n - 1].piece = piece_union(alloc.bundles[n - 1].piece,
                                               PieceSet::interval(cursor, rat(1)));
  }

  if (n >= 2) {
    Rat c = Rat(n) * n / (4 * Rat(n - 1));
    if (!check(inst, alloc, Criterion::effa(c)).satisfied)
      throw error("identical_greedy: output misses the EF f(alpha) bound (implementation bug)");
  }
  return alloc;
}

}  // namespace mixedfair
