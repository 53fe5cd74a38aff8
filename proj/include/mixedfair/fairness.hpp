// Checkers for the fairness notions on mixed goods, exact maximin-share
// computation, and the two-agent fractional-Pareto-optimality check.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mixedfair/cake.hpp"
#include "mixedfair/model.hpp"
#include "mixedfair/waterfill.hpp"

namespace mixedfair {

struct CheckOptions {
  // PROPmM as displayed in its source (inner min over the agent's own
  // bundle) instead of the prose reading (min over the other bundle).
  bool propmm_literal_formula = false;
};

namespace detail {

struct Tableau {
  std::vector<std::vector<Rat>> val;  // val[i][j] = u_i(A_j)
  std::vector<Rat> total;             // u_i(A)
  std::vector<Rat> alpha;
};

inline Tableau tableau(const Instance& inst, const Allocation& alloc) {
  Tableau t;
  t.val.assign(inst.n, std::vector<Rat>(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) t.val[i][j] = bundle_value(inst, i, alloc.bundles[j]);
    t.total.push_back(inst.total_value(i));
    t.alpha.push_back(t.total.back() == 0 ? Rat(0) : indivisibility_ratio(inst, i));
  }
  return t;
}

// argmax of u_i over a good set; ties broken toward the lowest index.
inline std::optional<int> best_good(const Instance& inst, int i, const std::vector<int>& goods) {
  std::optional<int> best;
  for (int g : goods)
    if (!best || inst.goods[i][g] > inst.goods[i][*best]) best = g;
  return best;
}

inline std::vector<int> goods_outside(const Instance& inst, const std::vector<int>& own) {
  std::vector<int> out;
  for (int g = 0; g < inst.m; ++g)
    if (!std::binary_search(own.begin(), own.end(), g)) out.push_back(g);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// compute_mms
// ---------------------------------------------------------------------------

struct MmsCertificate {
  int agent = 0;
  Rat value;
  std::vector<std::vector<int>> partition_goods;  // n bundles of good indices
  std::vector<Rat> cake_shares;                   // per bundle, sums to u_i(C)
};

namespace detail {

struct MmsSearch {
  const Instance& inst;
  int agent;
  int n;
  Rat cake;
  Rat best = -1;
  std::vector<std::vector<int>> best_partition;
  std::vector<Rat> best_shares;

  void consider(const std::vector<Rat>& sums, const std::vector<std::vector<int>>& parts) {
    std::vector<Rat> adds = water_fill(sums, cake);
    Rat mn = sums[0] + adds[0];
    for (int b = 1; b < n; ++b) mn = rat_min(mn, sums[b] + adds[b]);
    if (mn > best) {
      best = mn;
      best_partition = parts;
      best_shares = adds;
    }
  }
};

}  // namespace detail

// Exact MMS_i by exhaustive partition enumeration plus water-filling of the
// cake value (the partition is judged by one agent, so only the cake's total
// matters). Goods with equal value for the agent are interchangeable and are
// enumerated as classes; for all-distinct values a restricted-growth-string
// enumeration of set partitions into <= n blocks is used (m <= 12, n <= 6).
inline MmsCertificate compute_mms(const Instance& inst, int agent) {
  const int n = inst.n;
  detail::MmsSearch search{inst, agent, n, inst.cake_value(agent), Rat(-1), {}, {}};

  // Classes of interchangeable goods under u_agent.
  std::map<Rat, std::vector<int>> classes_map;
  for (int g = 0; g < inst.m; ++g) classes_map[inst.goods[agent][g]].push_back(g);
  std::vector<std::pair<Rat, std::vector<int>>> classes(classes_map.begin(), classes_map.end());

  auto binom = [](long a, long b) {
    long double r = 1;
    for (long k = 1; k <= b; ++k) r = r * static_cast<long double>(a - b + k) / k;
    return r;
  };
  long double labeled_count = 1;
  for (const auto& [v, idxs] : classes)
    labeled_count *= binom(static_cast<long>(idxs.size()) + n - 1, n - 1);

  if (labeled_count <= 500000.0L) {
    // Per-class count compositions into n labeled bundles. Each class level
    // owns its counts vector; a shared one would be scribbled by deeper
    // levels between take-loop iterations.
    std::vector<Rat> sums(n, Rat(0));
    std::vector<std::vector<int>> parts(n);
    auto rec = [&](auto&& self, std::size_t ci) -> void {
      if (ci == classes.size()) {
        search.consider(sums, parts);
        return;
      }
      const auto& [value, idxs] = classes[ci];
      std::vector<int> counts(n, 0);
      auto distribute = [&](auto&& dself, int bundle, int left) -> void {
        if (bundle == n - 1) {
          counts[bundle] = left;
          int pos = 0;
          for (int b = 0; b < n; ++b) {
            sums[b] += value * counts[b];
            for (int k = 0; k < counts[b]; ++k) parts[b].push_back(idxs[pos++]);
          }
          self(self, ci + 1);
          for (int b = 0; b < n; ++b) {
            sums[b] -= value * counts[b];
            for (int k = 0; k < counts[b]; ++k) parts[b].pop_back();
          }
          return;
        }
        for (int take = 0; take <= left; ++take) {
          counts[bundle] = take;
          dself(dself, bundle + 1, left - take);
        }
      };
      distribute(distribute, 0, static_cast<int>(idxs.size()));
    };
    rec(rec, 0);
  } else if (inst.m <= 12 && n <= 6) {
    // Restricted growth strings: set partitions into <= n unlabeled blocks.
    std::vector<int> a(inst.m, 0);
    std::vector<Rat> sums(n, Rat(0));
    std::vector<std::vector<int>> parts(n);
    auto rec = [&](auto&& self, int k, int maxblock) -> void {
      if (k == inst.m) {
        search.consider(sums, parts);
        return;
      }
      int limit = std::min(maxblock + 1, n - 1);
      for (int b = 0; b <= limit; ++b) {
        sums[b] += inst.goods[agent][k];
        parts[b].push_back(k);
        self(self, k + 1, std::max(maxblock, b));
        parts[b].pop_back();
        sums[b] -= inst.goods[agent][k];
      }
    };
    rec(rec, 0, -1);
  } else {
    throw error("compute_mms: instance beyond enumeration bounds (m <= 12, n <= 6)");
  }

  // m == 0 or goods all in one class still pass through `consider` above.
  for (auto& p : search.best_partition) std::sort(p.begin(), p.end());
  return MmsCertificate{agent, search.best, search.best_partition, search.best_shares};
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

inline FairnessReport check(const Instance& inst, const Allocation& alloc,
                            const Criterion& criterion, const CheckOptions& opts = {}) {
  if (auto violations = validate_allocation(inst, alloc); !violations.empty())
    throw error("check: invalid allocation: " + violations.front().what);

  detail::Tableau t = detail::tableau(inst, alloc);
  FairnessReport report;
  report.criterion = criterion;

  auto pair_entry = [&](int i, int j, const Rat& removal_coeff, bool relaxed) {
    Witness w;
    w.agent = i;
    w.against = j;
    w.lhs = t.val[i][i];
    w.rhs = t.val[i][j];
    if (relaxed) {
      if (auto o = detail::best_good(inst, i, alloc.bundles[j].goods)) {
        w.good = o;
        w.rhs -= removal_coeff * inst.goods[i][*o];
      }
      // Empty M_j: the existential is unsatisfiable, plain EF is required.
    }
    w.satisfied = w.lhs >= w.rhs;
    return w;
  };

  auto prop_entry = [&](int i, const Rat& add_coeff, bool relaxed) {
    Witness w;
    w.agent = i;
    w.lhs = t.val[i][i];
    w.rhs = t.total[i] / inst.n;
    if (relaxed) {
      auto outside = detail::goods_outside(inst, alloc.bundles[i].goods);
      if (auto o = detail::best_good(inst, i, outside)) {
        w.good = o;
        w.lhs += add_coeff * inst.goods[i][*o];
      }
    }
    w.satisfied = w.lhs >= w.rhs;
    return w;
  };

  switch (criterion.kind) {
    case CriterionKind::EF:
    case CriterionKind::EF1:
    case CriterionKind::EFfA:
    case CriterionKind::EFM:
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
          if (i == j) continue;
          Witness w;
          switch (criterion.kind) {
            case CriterionKind::EF: w = pair_entry(i, j, 0, false); break;
            case CriterionKind::EF1: w = pair_entry(i, j, 1, true); break;
            case CriterionKind::EFfA: w = pair_entry(i, j, criterion.c * t.alpha[i], true); break;
            default: {  // EFM: EF1 only toward cake-free nonempty bundles
              bool ef1_branch =
                  alloc.bundles[j].piece.empty() && !alloc.bundles[j].goods.empty();
              w = ef1_branch ? pair_entry(i, j, 1, true) : pair_entry(i, j, 0, false);
            }
          }
          report.witnesses.push_back(w);
        }
      break;

    case CriterionKind::PROP:
      for (int i = 0; i < inst.n; ++i) report.witnesses.push_back(prop_entry(i, 0, false));
      break;
    case CriterionKind::PROP1:
      for (int i = 0; i < inst.n; ++i) report.witnesses.push_back(prop_entry(i, 1, true));
      break;
    case CriterionKind::PROPfA:
      for (int i = 0; i < inst.n; ++i)
        report.witnesses.push_back(prop_entry(i, criterion.c * t.alpha[i], true));
      break;

    case CriterionKind::MMS:
      for (int i = 0; i < inst.n; ++i) {
        Witness w;
        w.agent = i;
        w.lhs = t.val[i][i];
        w.rhs = criterion.beta * compute_mms(inst, i).value;
        w.satisfied = w.lhs >= w.rhs;
        report.witnesses.push_back(w);
      }
      break;

    case CriterionKind::PROPmM:
      for (int i = 0; i < inst.n; ++i) {
        Witness w;
        w.agent = i;
        w.lhs = t.val[i][i];
        w.rhs = t.total[i] / inst.n;
        if (opts.propmm_literal_formula) {
          // Displayed formula: min over the agent's own goods, provided some
          // other bundle is cake-free; an empty M_i contributes 0.
          for (int j = 0; j < inst.n && !w.against; ++j)
            if (j != i && alloc.bundles[j].piece.empty()) w.against = j;
          if (w.against && !alloc.bundles[i].goods.empty()) {
            int worst = alloc.bundles[i].goods[0];
            for (int g : alloc.bundles[i].goods)
              if (inst.goods[i][g] < inst.goods[i][worst]) worst = g;
            w.good = worst;
            w.lhs += inst.goods[i][worst];
          }
        } else {
          // Prose reading: the worst good in another cake-free bundle,
          // maximized over such bundles.
          std::optional<Rat> best_term;
          for (int j = 0; j < inst.n; ++j) {
            if (j == i) continue;
            const Bundle& b = alloc.bundles[j];
            if (!b.piece.empty() || b.goods.empty()) continue;
            int worst = b.goods[0];
            for (int g : b.goods)
              if (inst.goods[i][g] < inst.goods[i][worst]) worst = g;
            Rat term = inst.goods[i][worst];
            if (!best_term || term > *best_term) {
              best_term = term;
              w.against = j;
              w.good = worst;
            }
          }
          if (best_term) w.lhs += *best_term;
        }
        w.satisfied = w.lhs >= w.rhs;
        report.witnesses.push_back(w);
      }
      break;
  }

  report.satisfied = std::all_of(report.witnesses.begin(), report.witnesses.end(),
                                 [](const Witness& w) { return w.satisfied; });
  return report;
}

// ---------------------------------------------------------------------------
// Two-agent Pareto machinery
// ---------------------------------------------------------------------------

// Maximum of u_0 + u_1 over all allocations with u_0 >= bound0 and
// u_1 >= bound1 (goods stay whole, the cake divides freely). The deficit
// repair is a fractional knapsack per goods split, so the optimum is exact.
struct MaxSumResult {
  bool feasible = false;
  Rat u0, u1;
  Allocation allocation;
};

inline MaxSumResult max_sum_dominating(const Instance& inst, const Rat& bound0,
                                       const Rat& bound1) {
  if (inst.n != 2) throw error("max_sum_dominating: needs exactly 2 agents");
  if (inst.m > 16) throw error("max_sum_dominating: m <= 16 required");
  const int s = inst.segments();

  MaxSumResult best;
  std::vector<Rat> v0(s), v1(s);
  for (int seg = 0; seg < s; ++seg) {
    v0[seg] = inst.segment_value(0, seg);
    v1[seg] = inst.segment_value(1, seg);
  }

  for (unsigned split = 0; split < (1u << inst.m); ++split) {
    Rat b0 = 0, b1 = 0;
    for (int g = 0; g < inst.m; ++g)
      if (split & (1u << g))
        b0 += inst.goods[0][g];
      else
        b1 += inst.goods[1][g];

    // Segment f = agent 0's share; start from the sum-maximizing division.
    std::vector<Rat> f(s);
    Rat u0 = b0, u1 = b1;
    for (int seg = 0; seg < s; ++seg) {
      f[seg] = v0[seg] >= v1[seg] ? 1 : 0;
      if (f[seg] == 1)
        u0 += v0[seg];
      else
        u1 += v1[seg];
    }

    // Repair at most one deficit by shifting cake at the cheapest sum loss
    // per unit gained (ratio order, one fractional segment).
    auto repair = [&](int who) -> bool {
      Rat deficit = who == 0 ? bound0 - u0 : bound1 - u1;
      const std::vector<Rat>& gain = who == 0 ? v0 : v1;
      const std::vector<Rat>& loss = who == 0 ? v1 : v0;
      std::vector<int> order;
      for (int seg = 0; seg < s; ++seg) {
        bool held_by_other = who == 0 ? f[seg] == 0 : f[seg] == 1;
        if (held_by_other && gain[seg] > 0) order.push_back(seg);
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        Rat lhs = loss[a] * gain[b], rhs = loss[b] * gain[a];
        if (lhs != rhs) return lhs < rhs;
        return a < b;
      });
      for (int seg : order) {
        if (deficit <= 0) break;
        Rat take = rat_min(rat(1), deficit / gain[seg]);  // fraction of the segment
        if (who == 0) {
          f[seg] = take;
          u0 += take * gain[seg];
          u1 -= take * loss[seg];
        } else {
          f[seg] = 1 - take;
          u1 += take * gain[seg];
          u0 -= take * loss[seg];
        }
        deficit -= take * gain[seg];
      }
      return deficit <= 0;
    };
    if (u0 < bound0 && u1 < bound1) continue;
    if (u0 < bound0 && !repair(0)) continue;
    if (u1 < bound1 && !repair(1)) continue;
    if (u0 < bound0 || u1 < bound1) continue;

    if (!best.feasible || u0 + u1 > best.u0 + best.u1 ||
        (u0 + u1 == best.u0 + best.u1 && u0 > best.u0)) {
      Allocation alloc;
      alloc.bundles.resize(2);
      for (int g = 0; g < inst.m; ++g)
        alloc.bundles[(split & (1u << g)) ? 0 : 1].goods.push_back(g);
      std::vector<Interval> p0, p1;
      for (int seg = 0; seg < s; ++seg) {
        Rat lo = inst.breakpoints[seg], hi = inst.breakpoints[seg + 1];
        if (f[seg] == 1) {
          p0.push_back({lo, hi});
        } else if (f[seg] == 0) {
          p1.push_back({lo, hi});
        } else {
          Rat mid = lo + f[seg] * (hi - lo);
          p0.push_back({lo, mid});
          p1.push_back({mid, hi});
        }
      }
      alloc.bundles[0].piece = PieceSet::make(std::move(p0));
      alloc.bundles[1].piece = PieceSet::make(std::move(p1));
      best = MaxSumResult{true, u0, u1, std::move(alloc)};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// check_fpo_two_agents
// ---------------------------------------------------------------------------

// A utility-improving fractional exchange between the two agents: agent 0
// gives `give_fraction` of its `give` atom, receives `take_fraction` of
// agent 1's `take` atom. Both deltas are strictly positive.
struct FpoAtom {
  bool is_good = true;
  int index = 0;  // good index, or segment index for cake atoms
  Rat u1, u2;     // value of the held atom to agents 0 and 1
};

struct FpoExchange {
  std::optional<FpoAtom> give;  // from agent 0 (absent for a pure transfer)
  std::optional<FpoAtom> take;  // from agent 1
  Rat give_fraction, take_fraction;
  Rat delta1, delta2;  // utility gains of agents 0 and 1
};

struct FpoResult {
  bool satisfied = true;
  // An improving exchange when one is directly realizable (pure transfers,
  // cake-for-cake swaps), or a whole dominating reallocation otherwise.
  std::optional<FpoExchange> exchange;
  std::optional<Allocation> dominating;
  Rat delta1, delta2;
};

// Pareto optimality for two additive agents over whole goods and a divisible
// cake. Consistency with a u_1/u_2 ratio threshold (agent 0 holds everything
// strictly above, agent 1 everything strictly below, at most the threshold
// class split; 0/0 atoms unconstrained, x/0 atoms forced to the agent that
// values them) certifies even fractional optimality and is accepted
// immediately. A ratio inversion between two cake atoms, or a misplaced
// one-sided atom, is an improving exchange as-is. An inversion involving a
// good is only a fractional improvement, so the verdict falls to an exact
// search over goods splits with optimal cake re-division.
inline FpoResult check_fpo_two_agents(const Instance& inst, const Allocation& alloc) {
  if (inst.n != 2) throw error("check_fpo_two_agents: needs exactly 2 agents");
  if (auto v = validate_allocation(inst, alloc); !v.empty())
    throw error("check_fpo_two_agents: invalid allocation: " + v.front().what);

  std::vector<std::pair<FpoAtom, int>> atoms;  // (atom, holder)
  for (int holder = 0; holder < 2; ++holder) {
    for (int g : alloc.bundles[holder].goods)
      atoms.push_back({{true, g, inst.goods[0][g], inst.goods[1][g]}, holder});
    for (int s = 0; s < inst.segments(); ++s) {
      PieceSet seg = PieceSet::interval(inst.breakpoints[s], inst.breakpoints[s + 1]);
      Rat len = piece_intersect(alloc.bundles[holder].piece, seg).measure();
      if (len == 0) continue;
      atoms.push_back({{false, s, inst.densities[0][s] * len, inst.densities[1][s] * len}, holder});
    }
  }

  auto pure_transfer = [&](const FpoAtom& atom, int to) {
    FpoExchange ex;
    ex.give_fraction = 0;
    ex.take_fraction = 0;
    if (to == 0) {
      ex.take = atom;
      ex.take_fraction = 1;
      ex.delta1 = atom.u1;
      ex.delta2 = 0;
    } else {
      ex.give = atom;
      ex.give_fraction = 1;
      ex.delta1 = 0;
      ex.delta2 = atom.u2;
    }
    FpoResult r{false, ex, std::nullopt, ex.delta1, ex.delta2};
    return r;
  };

  std::optional<FpoAtom> min0;  // lowest-ratio positive atom held by agent 0
  std::optional<FpoAtom> max1;  // highest-ratio positive atom held by agent 1
  for (const auto& [atom, holder] : atoms) {
    if (atom.u1 == 0 && atom.u2 == 0) continue;
    if (atom.u2 == 0) {  // ratio infinity, belongs to agent 0
      if (holder == 1) return pure_transfer(atom, 0);
      continue;
    }
    if (atom.u1 == 0) {  // ratio zero, belongs to agent 1
      if (holder == 0) return pure_transfer(atom, 1);
      continue;
    }
    if (holder == 0) {
      if (!min0 || atom.u1 * min0->u2 < min0->u1 * atom.u2) min0 = atom;
    } else {
      if (!max1 || atom.u1 * max1->u2 > max1->u1 * atom.u2) max1 = atom;
    }
  }

  if (!(min0 && max1 && min0->u1 * max1->u2 < max1->u1 * min0->u2))
    return {true, std::nullopt, std::nullopt, Rat(0), Rat(0)};

  if (!min0->is_good && !max1->is_good) {
    // Cake-for-cake: the fractional exchange is realizable directly, with
    // f_take/f_give strictly between u1(give)/u1(take) and u2(give)/u2(take).
    const FpoAtom &p = *min0, &q = *max1;
    Rat lo = p.u1 / q.u1, hi = p.u2 / q.u2;
    Rat ratio = (lo + hi) / 2;
    Rat fp = rat_min(rat(1), 1 / ratio) / 2;
    Rat fq = ratio * fp;
    FpoExchange ex;
    ex.give = p;
    ex.take = q;
    ex.give_fraction = fp;
    ex.take_fraction = fq;
    ex.delta1 = fq * q.u1 - fp * p.u1;
    ex.delta2 = fp * p.u2 - fq * q.u2;
    return {false, ex, std::nullopt, ex.delta1, ex.delta2};
  }

  // The inversion involves a whole good; decide by exhaustive search.
  Rat v0 = bundle_value(inst, 0, alloc.bundles[0]);
  Rat v1 = bundle_value(inst, 1, alloc.bundles[1]);
  MaxSumResult best = max_sum_dominating(inst, v0, v1);
  if (!best.feasible || best.u0 + best.u1 <= v0 + v1)
    return {true, std::nullopt, std::nullopt, Rat(0), Rat(0)};
  return {false, std::nullopt, best.allocation, best.u0 - v0, best.u1 - v1};
}

}  // namespace mixedfair
