// Desk-scale maximum Nash welfare for mixed goods: an Eisenberg-Gale-style
// cake solver per fixed indivisible assignment, exhaustive assignment
// enumeration, and the transfer-condition / PROP-alpha verifiers.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mixedfair/fairness.hpp"
#include "mixedfair/model.hpp"

namespace mixedfair {

constexpr long double kEgKktTol = 1e-12L;
constexpr long double kNashTieTol = 1e-10L;

// ---------------------------------------------------------------------------
// eg_cake_solver
// ---------------------------------------------------------------------------

struct EgOutcome {
  std::vector<std::vector<Rat>> shares;  // n x s, exact partition per segment
  std::vector<Rat> utilities;            // exact, from the (rationalized) shares
  int positive_count = 0;
  long double nash_log = 0.0L;           // sum of logs of positive utilities
  bool exact = true;                     // no floating-point path involved
  long double kkt_residual = 0.0L;
  long iterations = 0;
};

namespace detail {

// Proportional-response dynamics for the linear Fisher market with equal
// budgets; fixed endowments enter as exclusive virtual items. Returns shares
// for the contested segments only.
struct PrMarket {
  std::vector<int> buyers;                  // agent ids
  std::vector<int> segs;                    // contested segment ids
  std::vector<std::vector<long double>> v;  // buyers x segs
  std::vector<long double> fixed;           // per buyer

  // x[b][s] shares; returns (residual, iterations) or throws on stall.
  // `warm` seeds the bids from a previous, structurally identical solve.
  std::pair<long double, long> solve(std::vector<std::vector<long double>>& x,
                                     std::vector<std::vector<long double>>* warm = nullptr) {
    const std::size_t nb = buyers.size(), ns = segs.size();
    std::vector<std::vector<long double>> bid(nb, std::vector<long double>(ns, 0.0L));
    std::vector<long double> virt_bid(nb, 0.0L);
    for (std::size_t b = 0; b < nb; ++b) {
      int cnt = (fixed[b] > 0 ? 1 : 0);
      for (std::size_t s = 0; s < ns; ++s)
        if (v[b][s] > 0) ++cnt;
      long double each = 1.0L / cnt;
      if (fixed[b] > 0) virt_bid[b] = each;
      for (std::size_t s = 0; s < ns; ++s)
        if (v[b][s] > 0) bid[b][s] = each;
    }
    if (warm && warm->size() == nb && (nb == 0 || (*warm)[0].size() == ns)) {
      for (std::size_t b = 0; b < nb; ++b) {
        long double spent = fixed[b] > 0 ? virt_bid[b] : 0.0L;
        long double warm_total = 0.0L;
        for (std::size_t s = 0; s < ns; ++s) warm_total += (*warm)[b][s];
        if (warm_total > 0)
          for (std::size_t s = 0; s < ns; ++s)
            if (v[b][s] > 0) bid[b][s] = (*warm)[b][s] / warm_total * (1.0L - spent) + 1e-9L;
      }
    }

    std::vector<long double> u(nb, 0.0L);
    x.assign(nb, std::vector<long double>(ns, 0.0L));
    long double residual = 1.0L;
    const long max_iter = 400000;
    for (long iter = 1; iter <= max_iter; ++iter) {
      for (std::size_t s = 0; s < ns; ++s) {
        long double price = 0.0L;
        for (std::size_t b = 0; b < nb; ++b) price += bid[b][s];
        for (std::size_t b = 0; b < nb; ++b) x[b][s] = price > 0 ? bid[b][s] / price : 0.0L;
      }
      for (std::size_t b = 0; b < nb; ++b) {
        u[b] = fixed[b];
        for (std::size_t s = 0; s < ns; ++s) u[b] += x[b][s] * v[b][s];
      }
      for (std::size_t b = 0; b < nb; ++b) {
        long double budget_used = 0.0L;
        if (fixed[b] > 0) {
          virt_bid[b] = fixed[b] / u[b];
          budget_used += virt_bid[b];
        }
        for (std::size_t s = 0; s < ns; ++s) {
          bid[b][s] = x[b][s] * v[b][s] / u[b];
          budget_used += bid[b][s];
        }
        (void)budget_used;  // budgets are 1 by construction
      }
      if (iter % 16 == 0 || iter == max_iter) {
        residual = 0.0L;
        for (std::size_t s = 0; s < ns; ++s) {
          long double best = 0.0L;
          for (std::size_t b = 0; b < nb; ++b) best = std::max(best, v[b][s] / u[b]);
          if (best <= 0) continue;
          for (std::size_t b = 0; b < nb; ++b)
            if (x[b][s] > 1e-11L)
              residual = std::max(residual, (best - v[b][s] / u[b]) / best);
        }
        if (residual <= kEgKktTol) return {residual, iter};
      }
    }
    throw error("eg_cake_solver: proportional response did not converge (residual " +
                std::to_string(static_cast<double>(residual)) + ")");
  }
};

// Exact Eisenberg-Gale optimum via KKT support enumeration. For each
// contested segment we guess the set of agents sharing it; supported agents
// within a segment have equal bang-per-buck, which pins utility ratios along
// connected components, and the component scale follows from money
// conservation in closed form. A guess is accepted when the non-member KKT
// inequalities hold and the implied spending admits a feasible share matrix
// (an exact transportation/max-flow check). Returns the shares or nullopt
// when the pattern space is too large.
struct EgExactProblem {
  std::vector<int> agents;             // active agent ids
  std::vector<int> segs;               // contested segment ids
  std::vector<std::vector<Rat>> v;     // agents x segs, >= 0
  std::vector<Rat> fixed;              // per agent
};

inline std::optional<std::vector<std::vector<Rat>>> eg_exact_supports(
    const EgExactProblem& p, std::vector<Rat>* utilities_out) {
  const int na = static_cast<int>(p.agents.size());
  const int ns = static_cast<int>(p.segs.size());

  std::vector<std::vector<int>> owners(ns);
  long double patterns = 1;
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a)
      if (p.v[a][s] > 0) owners[s].push_back(a);
    patterns *= static_cast<long double>((1u << owners[s].size()) - 1);
  }
  if (patterns > 200000.0L) return std::nullopt;

  std::vector<unsigned> support(ns, 0);
  std::optional<std::vector<std::vector<Rat>>> result;
  std::vector<Rat> utilities;

  auto try_pattern = [&]() -> bool {
    // Ratio components: factor[a] = u_a / u_root as an exact rational.
    std::vector<int> root(na);
    std::vector<Rat> factor(na, Rat(1));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int a) {
      while (root[a] != a) a = root[a];
      return a;
    };
    auto factor_to_root = [&](int a) {
      Rat f = 1;
      while (root[a] != a) {
        f *= factor[a];
        a = root[a];
      }
      return f;
    };
    std::vector<bool> supported(na, false);
    for (int s = 0; s < ns; ++s) {
      int first = -1;
      for (std::size_t k = 0; k < owners[s].size(); ++k) {
        if (!(support[s] & (1u << k))) continue;
        int a = owners[s][k];
        supported[a] = true;
        if (first < 0) {
          first = a;
          continue;
        }
        // u_a / u_first = v_a / v_first on this segment.
        Rat want = p.v[a][s] / p.v[first][s];
        int ra = find(a), rf = find(first);
        Rat fa = factor_to_root(a), ff = factor_to_root(first);
        if (ra == rf) {
          if (fa != want * ff) return false;  // inconsistent ratios
        } else {
          root[ra] = rf;
          factor[ra] = want * ff / fa;
        }
      }
    }

    // Component scales from money conservation.
    utilities.assign(na, Rat(0));
    std::vector<Rat> money_supply(na, Rat(0));  // w_a = 1 - fixed_a / u_a
    std::vector<Rat> kappa(na, Rat(0));
    std::vector<Rat> seg_price(ns, Rat(0));
    for (int c = 0; c < na; ++c) {
      if (find(c) != c) continue;
      std::vector<int> members;
      for (int a = 0; a < na; ++a)
        if (find(a) == c) members.push_back(a);
      bool any_supported = false;
      for (int a : members) any_supported = any_supported || supported[a];
      if (!any_supported) {
        for (int a : members) {
          if (p.fixed[a] == 0) return false;  // a capable agent cannot end at 0
          utilities[a] = p.fixed[a];
        }
        continue;
      }
      Rat price_sum = 0;
      for (int s = 0; s < ns; ++s) {
        int member = -1;
        for (std::size_t k = 0; k < owners[s].size(); ++k)
          if ((support[s] & (1u << k)) && find(owners[s][k]) == c) member = owners[s][k];
        if (member >= 0) price_sum += p.v[member][s] / factor_to_root(member);
      }
      Rat fixed_sum = 0;
      for (int a : members) fixed_sum += p.fixed[a] / factor_to_root(a);
      Rat k_c = (price_sum + fixed_sum) / static_cast<long>(members.size());
      if (k_c <= 0) return false;
      for (int a : members) {
        kappa[a] = k_c;
        utilities[a] = k_c * factor_to_root(a);
        if (utilities[a] < p.fixed[a]) return false;  // negative real spending
        money_supply[a] = utilities[a] == 0 ? Rat(0) : 1 - p.fixed[a] / utilities[a];
      }
    }
    for (int a = 0; a < na; ++a)
      if (utilities[a] <= 0) return false;

    // Prices and the non-member KKT inequalities.
    for (int s = 0; s < ns; ++s) {
      int member = -1;
      for (std::size_t k = 0; k < owners[s].size(); ++k)
        if (support[s] & (1u << k)) member = owners[s][k];
      seg_price[s] = p.v[member][s] / utilities[member];
      if (seg_price[s] <= 0) return false;
      for (int a = 0; a < na; ++a) {
        bool in_support = false;
        for (std::size_t k = 0; k < owners[s].size(); ++k)
          if ((support[s] & (1u << k)) && owners[s][k] == a) in_support = true;
        if (!in_support && p.v[a][s] * utilities[member] > p.v[member][s] * utilities[a])
          return false;
      }
    }

    // Transportation feasibility: agents supply money w_a, segments demand
    // their price, edges along the support. Exact Edmonds-Karp max-flow on
    // the tiny network (source, agents, segments, sink).
    const int nodes = na + ns + 2;
    const int source = 0, sink = nodes - 1;
    auto agent_node = [&](int a) { return 1 + a; };
    auto seg_node = [&](int s) { return 1 + na + s; };
    std::vector<std::vector<Rat>> cap(nodes, std::vector<Rat>(nodes, Rat(0)));
    Rat demand_total = 0;
    for (int a = 0; a < na; ++a) cap[source][agent_node(a)] = money_supply[a];
    for (int s = 0; s < ns; ++s) {
      cap[seg_node(s)][sink] = seg_price[s];
      demand_total += seg_price[s];
      for (std::size_t k = 0; k < owners[s].size(); ++k)
        if (support[s] & (1u << k))
          cap[agent_node(owners[s][k])][seg_node(s)] = demand_total + 1;  // effectively infinite
    }
    Rat flowed = 0;
    while (true) {
      std::vector<int> prev(nodes, -1);
      prev[source] = source;
      std::vector<int> queue{source};
      for (std::size_t q = 0; q < queue.size() && prev[sink] < 0; ++q) {
        int u = queue[q];
        for (int w = 0; w < nodes; ++w)
          if (prev[w] < 0 && cap[u][w] > 0) {
            prev[w] = u;
            queue.push_back(w);
          }
      }
      if (prev[sink] < 0) break;
      Rat bottleneck = -1;
      for (int w = sink; w != source; w = prev[w]) {
        const Rat& c = cap[prev[w]][w];
        bottleneck = bottleneck < 0 ? c : rat_min(bottleneck, c);
      }
      for (int w = sink; w != source; w = prev[w]) {
        cap[prev[w]][w] -= bottleneck;
        cap[w][prev[w]] += bottleneck;
      }
      flowed += bottleneck;
    }
    if (flowed != demand_total) return false;

    // Residual back-edges carry the money flow; convert to shares.
    auto shares = std::vector<std::vector<Rat>>(na, std::vector<Rat>(ns, Rat(0)));
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a) {
        const Rat& money = cap[seg_node(s)][agent_node(a)];  // reverse capacity
        if (money > 0) shares[a][s] = money / seg_price[s];
      }
    result = std::move(shares);
    return true;
  };

  auto rec = [&](auto&& self, int s) -> bool {
    if (s == ns) return try_pattern();
    unsigned full = (1u << owners[s].size()) - 1;
    for (unsigned mask = 1; mask <= full; ++mask) {
      support[s] = mask;
      if (self(self, s + 1)) return true;
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  if (utilities_out) *utilities_out = utilities;
  return result;
}

}  // namespace detail

// Bid state carried between structurally identical solves (assignment
// enumeration changes only the fixed endowments).
struct EgWarmCache {
  std::vector<int> buyers, segs;
  std::vector<std::vector<long double>> x;
};

// Maximizes the Nash product over cake divisions for a fixed assignment of
// the indivisible goods (assignment[g] = agent). Segments valued by nobody
// go to agent 0; singly-valued segments go to their only fan; two-agent
// competition is solved exactly via the marginal-segment KKT equation;
// larger markets run proportional response to KKT residual <= 1e-12 and the
// shares are rationalized (denominators <= 1e9).
inline EgOutcome eg_cake_solver(const Instance& inst, const std::vector<int>& assignment,
                                EgWarmCache* cache = nullptr) {
  const int n = inst.n, s = inst.segments();
  if (n > 6) throw error("eg_cake_solver: n <= 6 required");
  if (s > 8) throw error("eg_cake_solver: segments <= 8 required");
  if (static_cast<int>(assignment.size()) != inst.m)
    throw error("eg_cake_solver: assignment size mismatch");

  EgOutcome out;
  out.shares.assign(n, std::vector<Rat>(s, Rat(0)));
  std::vector<Rat> fixed(n, Rat(0));
  for (int g = 0; g < inst.m; ++g) {
    if (assignment[g] < 0 || assignment[g] >= n)
      throw error("eg_cake_solver: assignment out of range");
    fixed[assignment[g]] += inst.goods[assignment[g]][g];
  }

  // Agents that can end up with positive utility.
  std::vector<bool> capable(n, false);
  for (int i = 0; i < n; ++i) {
    if (fixed[i] > 0) capable[i] = true;
    for (int seg = 0; seg < s; ++seg)
      if (inst.segment_value(i, seg) > 0) capable[i] = true;
  }

  std::vector<int> contested;
  for (int seg = 0; seg < s; ++seg) {
    std::vector<int> owners;
    for (int i = 0; i < n; ++i)
      if (capable[i] && inst.segment_value(i, seg) > 0) owners.push_back(i);
    if (owners.empty())
      out.shares[0][seg] = 1;  // worthless to everyone
    else if (owners.size() == 1)
      out.shares[owners[0]][seg] = 1;
    else
      contested.push_back(seg);
  }

  auto fixed_plus_owned = [&](int i) {
    Rat u = fixed[i];
    for (int seg = 0; seg < s; ++seg)
      if (out.shares[i][seg] == 1) u += inst.segment_value(i, seg);
    return u;
  };

  if (!contested.empty()) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
      bool involved = false;
      for (int seg : contested)
        if (capable[i] && inst.segment_value(i, seg) > 0) involved = true;
      if (involved) active.push_back(i);
    }

    if (active.size() == 2) {
      // Exact: order contested segments by value ratio, enumerate the
      // marginal segment, solve the split share from the linear KKT equation.
      int a = active[0], b = active[1];
      std::vector<int> order = contested;
      std::sort(order.begin(), order.end(), [&](int s1, int s2) {
        // v_a(s1)/v_b(s1) > v_a(s2)/v_b(s2), exact cross-multiplication
        Rat lhs = inst.segment_value(a, s1) * inst.segment_value(b, s2);
        Rat rhs = inst.segment_value(a, s2) * inst.segment_value(b, s1);
        if (lhs != rhs) return lhs > rhs;
        return s1 < s2;
      });
      Rat Fa = fixed_plus_owned(a), Fb = fixed_plus_owned(b);
      bool solved = false;
      const int k = static_cast<int>(order.size());
      for (int split = 0; split < k && !solved; ++split) {
        // Segments before `split` to a, after to b, `split` shared at theta.
        Rat A0 = Fa, B0 = Fb;
        for (int idx = 0; idx < split; ++idx) A0 += inst.segment_value(a, order[idx]);
        for (int idx = split + 1; idx < k; ++idx) B0 += inst.segment_value(b, order[idx]);
        Rat va = inst.segment_value(a, order[split]), vb = inst.segment_value(b, order[split]);
        Rat theta = (va * B0 + va * vb - vb * A0) / (2 * va * vb);
        theta = rat_min(rat_max(theta, rat(0)), rat(1));
        Rat ua = A0 + theta * va, ub = B0 + (1 - theta) * vb;
        // KKT: earlier segments prefer a, later prefer b, at theta's interior
        // the marginal segment is balanced (the clamp keeps boundary cases).
        bool ok = ua > 0 && ub > 0;
        for (int idx = 0; idx < k && ok; ++idx) {
          Rat lhs = inst.segment_value(a, order[idx]) * ub;
          Rat rhs = inst.segment_value(b, order[idx]) * ua;
          if (idx < split) ok = lhs >= rhs;
          else if (idx > split) ok = lhs <= rhs;
          else if (theta > 0 && theta < 1) ok = lhs == rhs;
          else if (theta == 0) ok = lhs <= rhs;
          else ok = lhs >= rhs;
        }
        if (ok) {
          for (int idx = 0; idx < split; ++idx) out.shares[a][order[idx]] = 1;
          for (int idx = split + 1; idx < k; ++idx) out.shares[b][order[idx]] = 1;
          out.shares[a][order[split]] = theta;
          out.shares[b][order[split]] = 1 - theta;
          solved = true;
        }
      }
      if (!solved) throw error("eg_cake_solver: two-agent KKT enumeration failed");
    } else {
      detail::EgExactProblem problem;
      problem.agents = active;
      problem.segs = contested;
      problem.v.assign(active.size(), std::vector<Rat>(contested.size(), Rat(0)));
      for (std::size_t ai = 0; ai < active.size(); ++ai) {
        problem.fixed.push_back(fixed_plus_owned(active[ai]));
        for (std::size_t si = 0; si < contested.size(); ++si)
          problem.v[ai][si] = inst.segment_value(active[ai], contested[si]);
      }
      if (auto exact = detail::eg_exact_supports(problem, nullptr)) {
        for (std::size_t ai = 0; ai < active.size(); ++ai)
          for (std::size_t si = 0; si < contested.size(); ++si)
            out.shares[active[ai]][contested[si]] = (*exact)[ai][si];
      } else {
        // Pattern space too large for the exact route: proportional response.
        out.exact = false;
        detail::PrMarket market;
        market.buyers = active;
        market.segs = contested;
        market.v.assign(active.size(), std::vector<long double>(contested.size(), 0.0L));
        market.fixed.assign(active.size(), 0.0L);
        for (std::size_t bi = 0; bi < active.size(); ++bi) {
          market.fixed[bi] = to_long_double(fixed_plus_owned(active[bi]));
          for (std::size_t si = 0; si < contested.size(); ++si)
            market.v[bi][si] = to_long_double(inst.segment_value(active[bi], contested[si]));
        }
        std::vector<std::vector<long double>> x;
        bool warm_ok = cache && cache->buyers == active && cache->segs == contested;
        auto [residual, iters] = market.solve(x, warm_ok ? &cache->x : nullptr);
        out.kkt_residual = residual;
        out.iterations = iters;
        if (cache) {
          cache->buyers = active;
          cache->segs = contested;
          cache->x = x;
        }

        // Rationalize and renormalize into an exact partition per segment.
        for (std::size_t si = 0; si < contested.size(); ++si) {
          int seg = contested[si];
          Rat sum = 0;
          std::size_t largest = 0;
          for (std::size_t bi = 0; bi < active.size(); ++bi) {
            Rat share = snap_rational(x[bi][si]);
            share = rat_min(rat_max(share, rat(0)), rat(1));
            out.shares[active[bi]][seg] = share;
            sum += share;
            if (x[bi][si] > x[largest][si]) largest = bi;
          }
          out.shares[active[largest]][seg] += 1 - sum;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    Rat u = fixed[i];
    for (int seg = 0; seg < s; ++seg) u += out.shares[i][seg] * inst.segment_value(i, seg);
    out.utilities.push_back(u);
    if (u > 0) {
      ++out.positive_count;
      out.nash_log += log_rat(u);
    }
  }
  return out;
}

// Cuts each segment left to right in agent-index order at cumulative shares.
inline Allocation materialize_shares(const Instance& inst, const std::vector<int>& assignment,
                                     const std::vector<std::vector<Rat>>& shares) {
  Allocation alloc;
  alloc.bundles.resize(inst.n);
  for (int g = 0; g < inst.m; ++g) alloc.bundles[assignment[g]].goods.push_back(g);
  std::vector<std::vector<Interval>> pieces(inst.n);
  for (int seg = 0; seg < inst.segments(); ++seg) {
    Rat lo = inst.breakpoints[seg], width = inst.breakpoints[seg + 1] - lo;
    Rat cum = 0;
    for (int i = 0; i < inst.n; ++i) {
      const Rat& share = shares[i][seg];
      if (share == 0) continue;
      Rat from = lo + cum * width, to = lo + (cum + share) * width;
      pieces[i].push_back({from, to});
      cum += share;
    }
  }
  for (int i = 0; i < inst.n; ++i) {
    std::sort(alloc.bundles[i].goods.begin(), alloc.bundles[i].goods.end());
    alloc.bundles[i].piece = PieceSet::make(std::move(pieces[i]));
  }
  return alloc;
}

// ---------------------------------------------------------------------------
// solve_mnw
// ---------------------------------------------------------------------------

struct MnwCandidate {
  std::vector<int> assignment;
  Allocation allocation;
  std::vector<Rat> utilities;
  int positive_count = 0;
  long double nash_log = 0.0L;
  bool exact = true;
};

struct MnwSolution {
  // The tie set, lexicographically ordered by assignment; front() is the
  // canonical optimum.
  std::vector<MnwCandidate> ties;
  const MnwCandidate& best() const { return ties.front(); }
};

// Maximizes the number of positive-utility agents, then the Nash product,
// over all indivisible assignments (identical utility columns collapsed into
// interchangeable classes) with the cake divided optimally by eg_cake_solver.
// Candidates within 1e-10 of the optimal log-product form the tie set.
inline MnwSolution solve_mnw(const Instance& inst) {
  if (inst.n > 6) throw error("solve_mnw: n <= 6 required");
  if (inst.segments() > 8) throw error("solve_mnw: segments <= 8 required");

  // Interchangeable-good classes: identical utility columns.
  std::map<std::vector<Rat>, std::vector<int>> classes_map;
  for (int g = 0; g < inst.m; ++g) {
    std::vector<Rat> col;
    for (int i = 0; i < inst.n; ++i) col.push_back(inst.goods[i][g]);
    classes_map[col].push_back(g);
  }
  std::vector<std::vector<int>> classes;
  for (auto& [col, idxs] : classes_map) classes.push_back(idxs);

  long double combos = 1;
  for (const auto& cls : classes) {
    long double c = 1;
    for (int k = 1; k < inst.n; ++k)
      c = c * (static_cast<long double>(cls.size()) + k) / k;
    combos *= c;
  }
  if (combos > 2e6L)
    throw error("solve_mnw: assignment enumeration too large (" +
                std::to_string(static_cast<double>(combos)) + " candidates)");

  std::vector<MnwCandidate> pool;
  int best_count = -1;
  long double best_log = -std::numeric_limits<long double>::infinity();
  EgWarmCache cache;

  // Cheap per-assignment bounds for pruning: an agent's utility can never
  // exceed her fixed goods plus the whole cake.
  std::vector<bool> values_cake(inst.n, false);
  std::vector<Rat> cake_total(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    cake_total[i] = inst.cake_value(i);
    values_cake[i] = cake_total[i] > 0;
  }

  std::vector<int> assignment(inst.m, 0);
  auto evaluate = [&]() {
    std::vector<Rat> fixed(inst.n, Rat(0));
    for (int g = 0; g < inst.m; ++g) fixed[assignment[g]] += inst.goods[assignment[g]][g];
    int capable = 0;
    long double ub_log = 0.0L;
    for (int i = 0; i < inst.n; ++i) {
      if (fixed[i] > 0 || values_cake[i]) {
        ++capable;
        ub_log += log_rat(fixed[i] + cake_total[i]);
      }
    }
    if (capable < best_count) return;
    if (capable == best_count && ub_log < best_log - kNashTieTol) return;

    EgOutcome eg = eg_cake_solver(inst, assignment, &cache);
    if (eg.positive_count < best_count) return;
    if (eg.positive_count == best_count && eg.nash_log < best_log - kNashTieTol) return;
    MnwCandidate cand;
    cand.assignment = assignment;
    cand.allocation = materialize_shares(inst, assignment, eg.shares);
    cand.utilities = eg.utilities;
    cand.positive_count = eg.positive_count;
    cand.nash_log = eg.nash_log;
    cand.exact = eg.exact;
    if (eg.positive_count > best_count) {
      best_count = eg.positive_count;
      best_log = eg.nash_log;
    } else if (eg.nash_log > best_log) {
      best_log = eg.nash_log;
    }
    pool.push_back(std::move(cand));
  };

  // Depth-first over classes; within a class, counts per agent in order.
  // Each class level owns its counts vector (deeper levels would otherwise
  // scribble the prefix between take-loop iterations).
  auto rec = [&](auto&& self, std::size_t ci) -> void {
    if (ci == classes.size()) {
      evaluate();
      return;
    }
    const auto& cls = classes[ci];
    std::vector<int> counts(inst.n, 0);
    auto distribute = [&](auto&& dself, int agent, int left) -> void {
      if (agent == inst.n - 1) {
        counts[agent] = left;
        int pos = 0;
        for (int i = 0; i < inst.n; ++i)
          for (int k = 0; k < counts[i]; ++k) assignment[cls[pos++]] = i;
        self(self, ci + 1);
        return;
      }
      for (int take = 0; take <= left; ++take) {
        counts[agent] = take;
        dself(dself, agent + 1, left - take);
      }
    };
    distribute(distribute, 0, static_cast<int>(cls.size()));
  };
  rec(rec, 0);

  // Re-filter the pool against the final optimum.
  MnwSolution sol;
  for (auto& cand : pool) {
    if (cand.positive_count != best_count) continue;
    if (cand.nash_log < best_log - kNashTieTol) continue;
    sol.ties.push_back(std::move(cand));
  }
  std::sort(sol.ties.begin(), sol.ties.end(),
            [](const MnwCandidate& a, const MnwCandidate& b) {
              return a.assignment < b.assignment;
            });

  // When every surviving candidate is exact, ties are adjudicated exactly on
  // the rational Nash product instead of the float tolerance.
  bool all_exact = std::all_of(sol.ties.begin(), sol.ties.end(),
                               [](const MnwCandidate& c) { return c.exact; });
  if (all_exact && !sol.ties.empty()) {
    auto product = [](const MnwCandidate& c) {
      Rat p = 1;
      for (const auto& u : c.utilities)
        if (u > 0) p *= u;
      return p;
    };
    Rat best_product = product(sol.ties.front());
    for (const auto& c : sol.ties) best_product = rat_max(best_product, product(c));
    std::vector<MnwCandidate> filtered;
    for (auto& c : sol.ties)
      if (product(c) == best_product) filtered.push_back(std::move(c));
    sol.ties = std::move(filtered);
  }
  if (sol.ties.empty()) throw error("solve_mnw: empty candidate pool (implementation bug)");
  return sol;
}

// ---------------------------------------------------------------------------
// verify_mnw_transfer
// ---------------------------------------------------------------------------

struct TransferViolation {
  std::string family;  // "per-agent-bound" or "single-transfer"
  int i = 0, j = 0;
  std::optional<int> good;
  Rat lhs, rhs;
};

struct TransferResult {
  bool satisfied = true;
  std::optional<TransferViolation> violation;
};

// Checks the MNW transfer conditions exactly (tol absorbs numeric-solver
// noise): the per-agent bound u_i(C_j)/u_i(A_i) + sum_g u_i(g)/(u_i(A_i)+u_i(g)) <= 1
// for every ordered pair, and the single-item transfer family
// u_i(A_i \ g) * u_j(A_j + g) - u_i(A_i) * u_j(A_j) <= 0.
inline TransferResult verify_mnw_transfer(const Instance& inst, const Allocation& alloc,
                                          const Rat& tol) {
  std::vector<Rat> own(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    own[i] = bundle_value(inst, i, alloc.bundles[i]);
    if (own[i] == 0)
      throw error("verify_mnw_transfer: agent " + std::to_string(i) +
                  " has zero utility; apply the zero-utility reduction first "
                  "(such agents hold nothing and satisfy PROP-alpha via alpha_i = 1)");
  }

  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      Rat lhs = piece_value_direct(inst, i, alloc.bundles[j].piece) / own[i];
      for (int g : alloc.bundles[j].goods) lhs += inst.goods[i][g] / (own[i] + inst.goods[i][g]);
      if (lhs > 1 + tol)
        return {false, TransferViolation{"per-agent-bound", i, j, std::nullopt, lhs, Rat(1)}};
    }

  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      for (int g : alloc.bundles[i].goods) {
        Rat f = (own[i] - inst.goods[i][g]) * (own[j] + inst.goods[j][g]) - own[i] * own[j];
        Rat scale = rat_max(rat(1), own[i] * own[j]);
        if (f > tol * scale)
          return {false, TransferViolation{"single-transfer", i, j, g, f, Rat(0)}};
      }
    }
  return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// check_mnw_propalpha
// ---------------------------------------------------------------------------

struct MnwPropAlphaReport {
  MnwSolution solution;
  std::vector<FairnessReport> reports;  // one per tie-set member
  bool all_propalpha = true;
  bool bounds_hold = true;  // the u_i(C) and u_i(M) upper bounds
};

// Runs solve_mnw and asserts PROP-alpha for every optimum in the tie set;
// also re-derives the two utility upper bounds used in the proof, with `tol`
// slack for numerically solved cake divisions.
inline MnwPropAlphaReport check_mnw_propalpha(const Instance& inst, const Rat& tol = Rat(1, 1000000000)) {
  MnwPropAlphaReport out{solve_mnw(inst), {}, true, true};
  for (const auto& cand : out.solution.ties) {
    FairnessReport report = check(inst, cand.allocation, Criterion::propalpha());
    out.all_propalpha = out.all_propalpha && report.satisfied;
    out.reports.push_back(std::move(report));

    for (int i = 0; i < inst.n; ++i) {
      Rat ui = cand.utilities[i];
      if (ui == 0) continue;  // covered by the zero-utility reduction
      Rat w = 0;
      for (int g = 0; g < inst.m; ++g)
        if (!cand.allocation.holds_good(i, g)) w = rat_max(w, inst.goods[i][g]);
      Rat m_bound = inst.goods_value(i) / (ui + w);
      if (m_bound > inst.n + tol) out.bounds_hold = false;
      if (inst.cake_value(i) / ui > inst.n - m_bound + tol) out.bounds_hold = false;
    }
  }
  return out;
}

}  // namespace mixedfair
