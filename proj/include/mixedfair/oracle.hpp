// Generators for the counterexample and tightness instances, brute-force
// falsifiers certifying non-existence of fair allocations at desk scale, and
// relation verifiers for the named allocations.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mixedfair/allocators.hpp"
#include "mixedfair/fairness.hpp"
#include "mixedfair/model.hpp"
#include "mixedfair/waterfill.hpp"

namespace mixedfair {

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

enum class Template { T3, T6, T7A, T7B, T9, T11, T13A, T13B, INTRO, PM1, PM2 };

inline Template template_from_token(const std::string& token) {
  static const std::map<std::string, Template> table = {
      {"t3", Template::T3},     {"t6", Template::T6},   {"t7a", Template::T7A},
      {"t7b", Template::T7B},   {"t9", Template::T9},   {"t11", Template::T11},
      {"t13a", Template::T13A}, {"t13b", Template::T13B}, {"intro", Template::INTRO},
      {"pm1", Template::PM1},   {"pm2", Template::PM2}};
  auto it = table.find(token);
  if (it == table.end()) throw parse_error("template", "unknown template '" + token + "'");
  return it->second;
}

inline std::string template_token(Template t) {
  switch (t) {
    case Template::T3: return "t3";
    case Template::T6: return "t6";
    case Template::T7A: return "t7a";
    case Template::T7B: return "t7b";
    case Template::T9: return "t9";
    case Template::T11: return "t11";
    case Template::T13A: return "t13a";
    case Template::T13B: return "t13b";
    case Template::INTRO: return "intro";
    case Template::PM1: return "pm1";
    case Template::PM2: return "pm2";
  }
  return "?";
}

struct TemplateParams {
  int n = 3;
  std::optional<Rat> eps;
  std::optional<Rat> x;
  std::optional<Rat> beta;
};

struct TemplateInstance {
  Template tmpl;
  Instance instance;
  int n = 0;
  Rat x = 0;    // effective x after integrality rounding
  Rat eps = 0;  // effective epsilon
  Rat beta = 1;
};

namespace detail {

inline Instance uniform_cake_instance(int n, const std::vector<Rat>& good_values,
                                      const Rat& cake_total) {
  Instance inst;
  inst.n = n;
  inst.m = static_cast<int>(good_values.size());
  inst.goods.assign(n, good_values);
  if (cake_total > 0) {
    inst.breakpoints = {rat(0), rat(1)};
    inst.densities.assign(n, {cake_total});
  } else {
    inst.densities.assign(n, {});
  }
  return inst;
}

// Rounds x down to 1/ceil(1/x) so that 1/x is an integer (the proofs'
// "choose another epsilon" recipe).
inline Rat round_to_unit_fraction(const Rat& x) {
  if (x <= 0 || x > 1) throw error("template parameter x must be in (0, 1]");
  mpz_class k = x.get_den() / x.get_num();  // floor(1/x)
  if (k * x.get_num() != x.get_den()) k += 1;
  Rat out(1, k);
  out.canonicalize();
  return out;
}

}  // namespace detail

inline TemplateInstance gen_instance(Template tmpl, const TemplateParams& params) {
  TemplateInstance out;
  out.tmpl = tmpl;
  out.n = params.n;
  switch (tmpl) {
    case Template::INTRO: {
      out.n = 3;
      out.instance = detail::uniform_cake_instance(3, {rat(1, 4), rat(1, 4)}, rat(1, 2));
      return out;
    }
    case Template::T3: {
      if (params.n < 3) throw error("t3: n >= 3 required");
      Rat good = rat(2, params.n), cake = rat(params.n - 2, params.n);
      out.instance = detail::uniform_cake_instance(params.n, {good}, cake);
      return out;
    }
    case Template::T6: {
      if (params.n < 2) throw error("t6: n >= 2 required");
      if (!params.eps) throw error("t6: eps required");
      if (*params.eps <= 0 || *params.eps > rat(2, 5))
        throw error("t6: eps must be in (0, 2/5]");
      out.eps = *params.eps;
      out.x = out.eps / (params.n - 1);
      Rat good = (1 - out.x) / (params.n - 1);
      out.instance = detail::uniform_cake_instance(
          params.n, std::vector<Rat>(params.n - 1, good), out.x);
      return out;
    }
    case Template::T7A:
    case Template::T7B: {
      out.n = 3;
      if (!params.x) throw error("t7: x required");
      out.x = detail::round_to_unit_fraction(*params.x);
      long block = mpz_class(out.x.get_den() / out.x.get_num()).get_si() + 1;  // (1+x)/x
      Rat u1_good = tmpl == Template::T7A ? out.x : out.x - out.x * out.x * out.x;
      Instance inst;
      inst.n = 3;
      inst.m = static_cast<int>(2 * block);
      inst.goods = {std::vector<Rat>(inst.m, u1_good), std::vector<Rat>(inst.m, out.x),
                    std::vector<Rat>(inst.m, out.x)};
      inst.breakpoints = {rat(0), rat(1)};
      inst.densities = {{rat(1)}, {rat(0)}, {rat(0)}};
      out.instance = std::move(inst);
      return out;
    }
    case Template::T9: {
      if (params.n < 2) throw error("t9: n >= 2 required");
      if (!params.eps || *params.eps <= 0) throw error("t9: eps > 0 required");
      Rat x = *params.eps / params.n;
      if (x >= 1) throw error("t9: eps too large (needs eps < n)");
      out.x = detail::round_to_unit_fraction(x);
      out.eps = out.x * params.n;
      long count = mpz_class(out.x.get_den() / out.x.get_num()).get_si();
      Rat cake = Rat(params.n - 1) * (1 - out.x);
      out.instance = detail::uniform_cake_instance(
          params.n, std::vector<Rat>(count, out.x), cake);
      return out;
    }
    case Template::T11: {
      if (params.n < 2) throw error("t11: n >= 2 required");
      if (!params.eps || *params.eps <= 0) throw error("t11: eps > 0 required");
      Rat x = Rat(params.n - 1) * *params.eps;
      if (x >= 1) throw error("t11: eps too large (needs (n-1)*eps < 1)");
      out.x = detail::round_to_unit_fraction(x);
      out.eps = out.x / (params.n - 1);
      long per_agent = mpz_class(out.x.get_den() / out.x.get_num()).get_si();
      long count = static_cast<long>(params.n - 1) * per_agent;
      out.instance = detail::uniform_cake_instance(
          params.n, std::vector<Rat>(count, out.x), 1 - out.x);
      return out;
    }
    case Template::T13A: {
      if (params.n < 2) throw error("t13a: n >= 2 required");
      out.beta = params.beta.value_or(rat(9, 10));
      if (out.beta <= 0 || out.beta >= 1) throw error("t13a: beta must be in (0, 1)");
      out.instance = detail::uniform_cake_instance(params.n, {}, rat(1));
      return out;
    }
    case Template::T13B: {
      if (params.n < 2) throw error("t13b: n >= 2 required");
      if (!params.x) throw error("t13b: x required");
      out.x = detail::round_to_unit_fraction(*params.x);
      if (out.x > rat(1, 2)) throw error("t13b: x must be at most 1/2");
      long k = mpz_class(out.x.get_den() / out.x.get_num()).get_si();  // 1/x
      out.instance = detail::uniform_cake_instance(
          params.n, std::vector<Rat>(static_cast<std::size_t>(params.n) * k, out.x), rat(0));
      return out;
    }
    case Template::PM1: {
      out.n = 2;
      out.instance = detail::uniform_cake_instance(
          2, {rat(1, 4), rat(1, 4), rat(1, 4)}, rat(1, 4));
      return out;
    }
    case Template::PM2: {
      out.n = 2;
      out.instance = detail::uniform_cake_instance(2, {rat(2, 5), rat(2, 5)}, rat(1, 5));
      return out;
    }
  }
  throw error("gen_instance: unhandled template");
}

// ---------------------------------------------------------------------------
// falsify
// ---------------------------------------------------------------------------

struct FalsifierResult {
  Criterion criterion;
  std::string family;     // which search family produced the verdict
  bool exact = false;     // verdict certified over all allocations
  bool satisfiable = false;
  Rat best_slack;
  Allocation best_allocation;
};

namespace detail {

inline bool prop_style(CriterionKind k) {
  return k == CriterionKind::PROP || k == CriterionKind::PROP1 || k == CriterionKind::PROPfA;
}
inline bool ef_style(CriterionKind k) {
  return k == CriterionKind::EF || k == CriterionKind::EF1 || k == CriterionKind::EFfA;
}

// Minimum witness slack of a report.
inline Rat report_slack(const FairnessReport& r) {
  Rat s = r.witnesses.empty() ? Rat(0) : r.witnesses[0].lhs - r.witnesses[0].rhs;
  for (const auto& w : r.witnesses) s = rat_min(s, w.lhs - w.rhs);
  return s;
}

// Allocation with the given goods assignment and consecutive cake pieces of
// the given lengths (fractions of [0,1], summing to 1).
inline Allocation consecutive_allocation(const Instance& inst, const std::vector<int>& assignment,
                                         const std::vector<Rat>& lengths) {
  Allocation alloc;
  alloc.bundles.resize(inst.n);
  for (int g = 0; g < inst.m; ++g) alloc.bundles[assignment[g]].goods.push_back(g);
  for (auto& b : alloc.bundles) std::sort(b.goods.begin(), b.goods.end());
  if (inst.has_cake()) {
    Rat cursor = 0;
    for (int i = 0; i < inst.n; ++i) {
      if (lengths[i] == 0) continue;
      alloc.bundles[i].piece = PieceSet::interval(cursor, cursor + lengths[i]);
      cursor += lengths[i];
    }
  }
  return alloc;
}

}  // namespace detail

// Brute-force search for an allocation satisfying `criterion`, over all
// indivisible assignments and cake splits in multiples of 1/K of the cake
// (valid because per-agent homogeneity makes only lengths matter). For
// identical agents the PROP-style criteria get an exact continuous optimum
// (water-filling per assignment), and single-good EF-style instances get the
// analytic optimum; both turn grid bounds into exact certificates.
inline FalsifierResult falsify(const Instance& inst, const Criterion& criterion, int K,
                               const CheckOptions& opts = {}) {
  if (K < 1 || K > 10000) throw error("falsify: K must be in [1, 10000]");
  for (int i = 0; i < inst.n; ++i)
    for (int s = 1; s < inst.segments(); ++s)
      if (inst.densities[i][s] != inst.densities[i][0])
        throw error("falsify: heterogeneous cake; the length-grid family is not exhaustive "
                    "(a per-segment grid would be slower and bound-only)");

  FalsifierResult result;
  result.criterion = criterion;

  const bool identical = inst.identical_agents();
  std::vector<Rat> cakeval(inst.n);
  for (int i = 0; i < inst.n; ++i) cakeval[i] = inst.cake_value(i);

  std::optional<Rat> exact_best;
  std::optional<Allocation> exact_alloc;

  // Exact branch (a): PROP-style + identical agents. Per assignment, the
  // optimal cake division water-fills bundle value + relaxation term.
  if (identical && detail::prop_style(criterion.kind)) {
    const Rat total = inst.total_value(0);
    const Rat share = total / inst.n;
    const Rat alpha = total == 0 ? Rat(0) : indivisibility_ratio(inst, 0);
    std::vector<int> assignment(inst.m, 0);
    auto relax_coeff = [&]() -> Rat {
      switch (criterion.kind) {
        case CriterionKind::PROP: return 0;
        case CriterionKind::PROP1: return 1;
        default: return criterion.c * alpha;
      }
    }();
    auto rec = [&](auto&& self, int g) -> void {
      if (g == inst.m) {
        std::vector<Rat> base(inst.n, Rat(0));
        std::vector<Rat> goods_of(inst.n, Rat(0));
        for (int gg = 0; gg < inst.m; ++gg) goods_of[assignment[gg]] += inst.goods[0][gg];
        for (int i = 0; i < inst.n; ++i) {
          Rat maxout = 0;
          for (int gg = 0; gg < inst.m; ++gg)
            if (assignment[gg] != i) maxout = rat_max(maxout, inst.goods[0][gg]);
          base[i] = goods_of[i] + relax_coeff * maxout;
        }
        std::vector<Rat> adds = water_fill(base, cakeval[0]);
        Rat mn = base[0] + adds[0];
        for (int i = 1; i < inst.n; ++i) mn = rat_min(mn, base[i] + adds[i]);
        Rat slack = mn - share;
        if (!exact_best || slack > *exact_best) {
          exact_best = slack;
          std::vector<Rat> lengths(inst.n, Rat(0));
          if (inst.has_cake()) {
            Rat leftover = 1;
            if (cakeval[0] > 0) {
              leftover = 1;
              for (int i = 0; i < inst.n; ++i) {
                lengths[i] = adds[i] / inst.densities[0][0];
                leftover -= lengths[i];
              }
            }
            lengths[inst.n - 1] += leftover;  // worthless tail, if any
          }
          exact_alloc = detail::consecutive_allocation(inst, assignment, lengths);
        }
        return;
      }
      for (int i = 0; i < inst.n; ++i) {
        assignment[g] = i;
        self(self, g + 1);
      }
    };
    rec(rec, 0);
    result.family = "exact: assignments x water-filling";
    result.exact = true;
  }

  // Exact branch (b): EF-style + identical agents + a single good. The
  // continuous optimum gives the good to one agent, no cake to her, and
  // splits the cake evenly among the rest (balanced via x_t when needed).
  if (identical && detail::ef_style(criterion.kind) && inst.m == 1 && inst.n >= 2 &&
      inst.has_cake()) {
    const Rat alpha = indivisibility_ratio(inst, 0);
    const Rat good = inst.goods[0][0];
    const Rat V = cakeval[0];
    Rat relax = 0;
    if (criterion.kind == CriterionKind::EF1) relax = good;
    if (criterion.kind == CriterionKind::EFfA) relax = criterion.c * alpha * good;
    // With the good at agent t, the symmetric optimum splits the cake evenly
    // among the rest; d(x_t) = u(o) + x_t * n/(n-1) - V/(n-1) is the envy gap
    // toward t, and the binding slacks are relax - d and d. Pairs of
    // cakeless agents add a hard 0 cap when n >= 3.
    Rat d_lo = good - V / (inst.n - 1);
    Rat d_hi = good + V;
    Rat d_star = rat_min(rat_max(relax / 2, d_lo), d_hi);
    Rat slack = rat_min(relax - d_star, d_star);
    if (inst.n >= 3) slack = rat_min(slack, rat(0));
    if (!exact_best || slack > *exact_best) {
      exact_best = slack;
      Rat x_t = (d_star - good + V / (inst.n - 1)) * (inst.n - 1) / inst.n;
      x_t = rat_min(rat_max(x_t, rat(0)), V);
      std::vector<Rat> lengths(inst.n, Rat(0));
      std::vector<int> assignment(1, 0);
      if (V > 0) {
        lengths[0] = x_t / inst.densities[0][0];
        Rat rest_len = (1 - lengths[0]) / (inst.n - 1);
        for (int i = 1; i < inst.n; ++i) lengths[i] = rest_len;
      } else {
        lengths[inst.n - 1] = 1;
      }
      exact_alloc = detail::consecutive_allocation(inst, assignment, lengths);
      result.family = "exact: single-good continuous optimum";
      result.exact = true;
    }
  }

  // Grid search; doubles as the fallback family for all other criteria. The
  // size bounds gate only the grid (the exact branches never enumerate it).
  if (!result.exact && (inst.n > 4 || inst.m > 6))
    throw error("falsify: grid bounds are n <= 4, m <= 6");
  long double combos = 1;
  for (int k = 1; k < inst.n; ++k)
    combos = combos * (static_cast<long double>(K) + k) / k;
  long double assignments_count = std::pow(static_cast<long double>(inst.n), inst.m);
  if (!result.exact && combos * assignments_count > 5e6L)
    throw error("falsify: grid too large (reduce K)");

  std::optional<Rat> grid_best;
  std::optional<Allocation> grid_alloc;
  if (result.exact) {
    // The exact branch already certified the verdict; skip the grid.
  } else {
    std::vector<Rat> mms_value;
    if (criterion.kind == CriterionKind::MMS)
      for (int i = 0; i < inst.n; ++i) mms_value.push_back(compute_mms(inst, i).value);

    std::vector<int> assignment(inst.m, 0);
    std::vector<int> kshares(inst.n, 0);
    const bool cake = inst.has_cake();
    auto eval_candidate = [&]() {
      std::vector<Rat> lengths(inst.n, Rat(0));
      if (cake)
        for (int i = 0; i < inst.n; ++i) lengths[i] = Rat(kshares[i], K);
      for (auto& l : lengths) l.canonicalize();
      Allocation alloc = detail::consecutive_allocation(inst, assignment, lengths);
      Rat slack;
      if (criterion.kind == CriterionKind::MMS) {
        slack = bundle_value(inst, 0, alloc.bundles[0]) - criterion.beta * mms_value[0];
        for (int i = 1; i < inst.n; ++i)
          slack = rat_min(slack, bundle_value(inst, i, alloc.bundles[i]) -
                                     criterion.beta * mms_value[i]);
      } else {
        slack = detail::report_slack(check(inst, alloc, criterion, opts));
      }
      if (!grid_best || slack > *grid_best) {
        grid_best = slack;
        grid_alloc = std::move(alloc);
      }
    };
    auto shares_rec = [&](auto&& self, int agent, int left) -> void {
      if (agent == inst.n - 1) {
        kshares[agent] = left;
        eval_candidate();
        return;
      }
      for (int take = 0; take <= left; ++take) {
        kshares[agent] = take;
        self(self, agent + 1, left - take);
      }
    };
    auto assign_rec = [&](auto&& self, int g) -> void {
      if (g == inst.m) {
        if (cake)
          shares_rec(shares_rec, 0, K);
        else
          eval_candidate();
        return;
      }
      for (int i = 0; i < inst.n; ++i) {
        assignment[g] = i;
        self(self, g + 1);
      }
    };
    assign_rec(assign_rec, 0);
    result.family = "grid(K=" + std::to_string(K) + ")";
  }

  if (result.exact) {
    result.best_slack = *exact_best;
    result.best_allocation = *exact_alloc;
  } else {
    result.best_slack = *grid_best;
    result.best_allocation = *grid_alloc;
  }
  result.satisfiable = result.best_slack >= 0;

  // The reported allocation must re-evaluate to the reported slack.
  Rat recheck = detail::report_slack(check(inst, result.best_allocation, criterion, opts));
  if (result.exact) {
    if (recheck != result.best_slack)
      throw error("falsify: exact optimum does not re-evaluate to its slack "
                  "(implementation bug)");
  } else if (recheck != result.best_slack) {
    throw error("falsify: grid candidate does not re-evaluate to its slack "
                "(implementation bug)");
  }
  return result;
}

// ---------------------------------------------------------------------------
// verify_relation
// ---------------------------------------------------------------------------

struct RelationCheck {
  std::string label;
  bool expected = true;
  bool actual = true;
  Rat lhs, rhs;  // the decisive inequality, when there is a single one
};

struct RelationReport {
  TemplateInstance generated;
  Allocation allocation;  // the template's named allocation (when one exists)
  std::vector<RelationCheck> checks;
  std::vector<std::pair<std::string, FairnessReport>> reports;
  bool ok = true;
};

namespace detail {

inline void add_check(RelationReport& rep, const Instance& inst, const Allocation& alloc,
                      const Criterion& crit, bool expected, const std::string& label,
                      const CheckOptions& opts = {}) {
  FairnessReport r = check(inst, alloc, crit, opts);
  RelationCheck c;
  c.label = label;
  c.expected = expected;
  c.actual = r.satisfied;
  if (const Witness* w = r.first_violation()) {
    c.lhs = w->lhs;
    c.rhs = w->rhs;
  } else if (!r.witnesses.empty()) {
    c.lhs = r.witnesses.front().lhs;
    c.rhs = r.witnesses.front().rhs;
  }
  rep.ok = rep.ok && c.actual == c.expected;
  rep.checks.push_back(c);
  rep.reports.emplace_back(label, std::move(r));
}

}  // namespace detail

// Builds the template's named allocation and checks the positive
// and negative sides of its relation exactly.
inline RelationReport verify_relation(Template tmpl, const TemplateParams& params) {
  RelationReport rep;
  rep.generated = gen_instance(tmpl, params);
  const Instance& inst = rep.generated.instance;
  const int n = inst.n;

  switch (tmpl) {
    case Template::INTRO: {
      rep.allocation.bundles = {Bundle{{}, PieceSet::interval(rat(0), rat(1, 2))},
                                Bundle{{}, PieceSet::interval(rat(1, 2), rat(1))},
                                make_bundle({0, 1})};
      detail::add_check(rep, inst, rep.allocation, Criterion::efm(), true, "efm");
      detail::add_check(rep, inst, rep.allocation, Criterion::efalpha(), false, "efalpha");
      break;
    }
    case Template::T3: {
      Rat boundary = Rat(n) * n / (4 * Rat(n - 1));
      FalsifierResult fr = falsify(inst, Criterion::efalpha(), 60);
      RelationCheck c{"efalpha-nonexistence", false, fr.satisfiable, fr.best_slack, Rat(0)};
      rep.ok = rep.ok && !fr.satisfiable && fr.exact;
      rep.checks.push_back(c);
      Allocation greedy = identical_greedy(inst);
      rep.allocation = greedy;
      detail::add_check(rep, inst, greedy, Criterion::effa(boundary), true, "greedy-boundary");
      break;
    }
    case Template::T6: {
      const Rat& x = rep.generated.x;
      Rat lhs = x + (Rat(1, n) - x) * (1 - x) * (1 - x);
      RelationCheck ineq{"gap-inequality", true, lhs < rat(1, n), lhs, rat(1, n)};
      rep.ok = rep.ok && ineq.actual;
      rep.checks.push_back(ineq);
      Rat c = Rat(n - 1, n) - rep.generated.eps;
      c.canonicalize();
      FalsifierResult fr = falsify(inst, Criterion::propfa(c), 60);
      RelationCheck nonex{"propfa-nonexistence", false, fr.satisfiable, fr.best_slack, Rat(0)};
      rep.ok = rep.ok && !fr.satisfiable && fr.exact;
      rep.checks.push_back(nonex);
      auto [alloc, trace] = alg1_propalpha(inst);
      rep.allocation = alloc;
      detail::add_check(rep, inst, alloc, Criterion::propalpha(), true, "alg1-propalpha");
      break;
    }
    case Template::T7A:
    case Template::T7B: {
      // (C, M_2, M_3): cake to agent 1, the good blocks to agents 2 and 3.
      int block = inst.m / 2;
      std::vector<int> m2, m3;
      for (int g = 0; g < block; ++g) m2.push_back(g);
      for (int g = block; g < inst.m; ++g) m3.push_back(g);
      rep.allocation.bundles = {Bundle{{}, PieceSet::full()}, make_bundle(m2), make_bundle(m3)};
      detail::add_check(rep, inst, rep.allocation, Criterion::propalpha(), true, "propalpha");
      Rat eps = params.eps.value_or(rat(1, 10));
      detail::add_check(rep, inst, rep.allocation, Criterion::propfa(1 - eps), false,
                        "propfa-1-minus-eps");
      break;
    }
    case Template::T9: {
      // M to agent 1, the cake split evenly among the rest.
      std::vector<int> all_goods(inst.m);
      std::iota(all_goods.begin(), all_goods.end(), 0);
      rep.allocation.bundles.assign(n, Bundle{});
      rep.allocation.bundles[0] = make_bundle(all_goods);
      Rat cursor = 0, width = Rat(1, n - 1);
      width.canonicalize();
      for (int i = 1; i < n; ++i) {
        rep.allocation.bundles[i].piece = PieceSet::interval(cursor, cursor + width);
        cursor += width;
      }
      detail::add_check(rep, inst, rep.allocation, Criterion::efm(), true, "efm");
      Rat c = Rat(n) - rep.generated.eps;
      detail::add_check(rep, inst, rep.allocation, Criterion::effa(c), false, "effa-n-minus-eps");
      break;
    }
    case Template::T11: {
      // C to agent 1, the goods split evenly among the rest.
      rep.allocation.bundles.assign(n, Bundle{});
      rep.allocation.bundles[0].piece = PieceSet::full();
      int per_agent = inst.m / (n - 1);
      for (int i = 1; i < n; ++i) {
        std::vector<int> goods;
        for (int g = (i - 1) * per_agent; g < i * per_agent; ++g) goods.push_back(g);
        rep.allocation.bundles[i] = make_bundle(goods);
      }
      detail::add_check(rep, inst, rep.allocation, Criterion::efm(), true, "efm");
      Rat c = 1 - rep.generated.eps;
      detail::add_check(rep, inst, rep.allocation, Criterion::propfa(c), false,
                        "propfa-1-minus-eps");
      break;
    }
    case Template::T13A: {
      const Rat& beta = rep.generated.beta;
      Rat first = beta / n;
      rep.allocation.bundles.assign(n, Bundle{});
      rep.allocation.bundles[0].piece = PieceSet::interval(rat(0), first);
      Rat cursor = first, width = (1 - first) / (n - 1);
      for (int i = 1; i < n; ++i) {
        Rat next = i == n - 1 ? Rat(1) : cursor + width;
        rep.allocation.bundles[i].piece = PieceSet::interval(cursor, next);
        cursor = next;
      }
      detail::add_check(rep, inst, rep.allocation, Criterion::mms(beta), true, "beta-mms");
      detail::add_check(rep, inst, rep.allocation, Criterion::mms(rat(1)), false, "mms");
      detail::add_check(rep, inst, rep.allocation, Criterion::propalpha(), false, "propalpha");
      break;
    }
    case Template::T13B: {
      long k = mpz_class(rep.generated.x.get_den() / rep.generated.x.get_num()).get_si();
      rep.allocation.bundles.assign(n, Bundle{});
      std::vector<int> first;
      for (long g = 0; g < k - 2; ++g) first.push_back(static_cast<int>(g));
      rep.allocation.bundles[0] = make_bundle(first);
      int cursor = static_cast<int>(k - 2);
      int extras = 2;
      for (int i = 1; i < n; ++i) {
        long take = k + (i >= n - extras ? 1 : 0);
        if (n == 2) take = k + 2;
        std::vector<int> goods;
        for (long g = 0; g < take; ++g) goods.push_back(cursor++);
        rep.allocation.bundles[i] = make_bundle(goods);
      }
      Rat beta = 1 - 2 * rep.generated.x;
      detail::add_check(rep, inst, rep.allocation, Criterion::mms(beta), true, "beta-mms");
      detail::add_check(rep, inst, rep.allocation, Criterion::prop1(), false, "prop1");
      detail::add_check(rep, inst, rep.allocation, Criterion::propalpha(), false, "propalpha");
      break;
    }
    case Template::PM1: {
      rep.allocation.bundles = {Bundle{{}, PieceSet::full()}, make_bundle({0, 1, 2})};
      detail::add_check(rep, inst, rep.allocation, Criterion::propmm(), true, "propmm");
      detail::add_check(rep, inst, rep.allocation, Criterion::propalpha(), false, "propalpha");
      break;
    }
    case Template::PM2: {
      rep.allocation.bundles = {make_bundle({0}), make_bundle({1}, PieceSet::full())};
      detail::add_check(rep, inst, rep.allocation, Criterion::propalpha(), true, "propalpha");
      detail::add_check(rep, inst, rep.allocation, Criterion::propmm(), false, "propmm");
      break;
    }
  }
  return rep;
}

}  // namespace mixedfair
