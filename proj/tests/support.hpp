// Shared helpers for the test suites: seeded random instances/allocations
// and small builders.
#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "mixedfair/cake.hpp"
#include "mixedfair/fairness.hpp"
#include "mixedfair/model.hpp"

namespace testsupport {

using namespace mixedfair;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  int uniform(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }

  // Non-negative rational k/q with q <= max_den and value <= max_value.
  Rat rational(int max_value = 2, int max_den = 100) {
    int q = uniform(1, max_den);
    int k = uniform(0, max_value * q);
    Rat r(k, q);
    r.canonicalize();
    return r;
  }

  Rat positive_rational(int max_value = 2, int max_den = 100) {
    int q = uniform(1, max_den);
    int k = uniform(1, max_value * q);
    Rat r(k, q);
    r.canonicalize();
    return r;
  }

  // A point strictly inside (lo, hi) with a small denominator.
  Rat interior_point(const Rat& lo, const Rat& hi) {
    int q = uniform(2, 64);
    int k = uniform(1, q - 1);
    Rat t(k, q);
    t.canonicalize();
    return lo + t * (hi - lo);
  }
};

struct InstanceOptions {
  int n_min = 1, n_max = 4;
  int m_min = 0, m_max = 6;
  int seg_min = 0, seg_max = 3;
  int max_den = 100;
  bool homogeneous_cake = false;    // per-agent constant density
  bool positive_cake_rows = false;  // every agent values the cake
  bool identical = false;
};

inline Instance random_instance(Rng& rng, const InstanceOptions& opt = {}) {
  Instance inst;
  inst.n = rng.uniform(opt.n_min, opt.n_max);
  inst.m = rng.uniform(opt.m_min, opt.m_max);
  int segs = rng.uniform(opt.seg_min, opt.seg_max);
  if (inst.m == 0 && segs == 0) segs = 1;

  auto make_row_goods = [&]() {
    std::vector<Rat> row;
    for (int g = 0; g < inst.m; ++g) row.push_back(rng.rational(2, opt.max_den));
    return row;
  };
  auto make_row_density = [&]() {
    std::vector<Rat> row;
    for (int s = 0; s < segs; ++s)
      row.push_back(opt.positive_cake_rows ? rng.positive_rational(3, opt.max_den)
                                           : rng.rational(3, opt.max_den));
    if (opt.homogeneous_cake)
      for (int s = 1; s < segs; ++s) row[s] = row[0];
    return row;
  };

  if (segs > 0) {
    std::set<Rat> cuts;
    while (static_cast<int>(cuts.size()) < segs - 1) {
      int q = rng.uniform(2, opt.max_den);
      int k = rng.uniform(1, q - 1);
      Rat c(k, q);
      c.canonicalize();
      cuts.insert(c);
    }
    inst.breakpoints.push_back(rat(0));
    for (const auto& c : cuts) inst.breakpoints.push_back(c);
    inst.breakpoints.push_back(rat(1));
  }

  for (int i = 0; i < inst.n; ++i) {
    if (opt.identical && i > 0) {
      inst.goods.push_back(inst.goods[0]);
      inst.densities.push_back(inst.densities[0]);
      continue;
    }
    inst.goods.push_back(make_row_goods());
    inst.densities.push_back(segs > 0 ? make_row_density() : std::vector<Rat>{});
  }

  // Positive totals: bump a density or a good where a row came out zero.
  for (int i = 0; i < inst.n; ++i) {
    if (inst.total_value(i) > 0) continue;
    if (segs > 0)
      for (auto& d : inst.densities[i]) d = rat(1);
    else
      inst.goods[i][0] = rat(1, 2);
    if (opt.identical)
      for (int j = 0; j < inst.n; ++j) {
        inst.goods[j] = inst.goods[0];
        inst.densities[j] = inst.densities[0];
      }
  }
  return inst;
}

// A uniformly random valid allocation: goods to random agents, the cake cut
// at random interior points with pieces dealt to random agents.
inline Allocation random_allocation(Rng& rng, const Instance& inst) {
  Allocation alloc;
  alloc.bundles.resize(inst.n);
  for (int g = 0; g < inst.m; ++g)
    alloc.bundles[rng.uniform(0, inst.n - 1)].goods.push_back(g);
  for (auto& b : alloc.bundles) std::sort(b.goods.begin(), b.goods.end());

  if (inst.has_cake()) {
    std::set<Rat> cuts{rat(0), rat(1)};
    for (const auto& b : inst.breakpoints) cuts.insert(b);
    int extra = rng.uniform(0, inst.n + 1);
    for (int k = 0; k < extra; ++k) cuts.insert(rng.interior_point(rat(0), rat(1)));
    std::vector<Rat> points(cuts.begin(), cuts.end());
    std::vector<std::vector<Interval>> pieces(inst.n);
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
      pieces[rng.uniform(0, inst.n - 1)].push_back({points[k], points[k + 1]});
    for (int i = 0; i < inst.n; ++i) alloc.bundles[i].piece = PieceSet::make(pieces[i]);
  }
  return alloc;
}

inline Instance make_instance(int n, std::vector<std::vector<Rat>> goods,
                              std::vector<Rat> breakpoints,
                              std::vector<std::vector<Rat>> densities) {
  Instance inst;
  inst.n = n;
  inst.m = goods.empty() ? 0 : static_cast<int>(goods[0].size());
  inst.goods = std::move(goods);
  inst.breakpoints = std::move(breakpoints);
  inst.densities = std::move(densities);
  if (inst.goods.empty()) inst.goods.assign(n, {});
  if (inst.densities.empty()) inst.densities.assign(n, {});
  return inst;
}

// n identical agents, uniform cake worth `cake_total`, goods as given.
inline Instance identical_uniform(int n, std::vector<Rat> good_values, Rat cake_total) {
  std::vector<std::vector<Rat>> goods(n, good_values);
  if (cake_total > 0)
    return make_instance(n, goods, {rat(0), rat(1)},
                         std::vector<std::vector<Rat>>(n, {cake_total}));
  return make_instance(n, goods, {}, {});
}

inline Rat min_slack(const FairnessReport& r) {
  Rat s = r.witnesses.empty() ? Rat(0) : r.witnesses[0].lhs - r.witnesses[0].rhs;
  for (const auto& w : r.witnesses) s = rat_min(s, w.lhs - w.rhs);
  return s;
}

}  // namespace testsupport
