// Robertson-Webb query model over piecewise-constant valuations: exact
// evaluation and cut queries, with a per-run query log so query-complexity
// claims can be audited.
#pragma once

#include <optional>
#include <vector>

#include "mixedfair/model.hpp"

namespace mixedfair {

enum class QueryKind { Eval, Cut };

struct QueryRecord {
  int agent;
  QueryKind kind;
  Rat x;      // left endpoint
  Rat arg;    // y for eval, beta for cut
  std::optional<Rat> result;
};

// Append-only; one per run, single writer.
class QueryLog {
 public:
  void record(QueryRecord r) {
    (r.kind == QueryKind::Eval ? evals_ : cuts_)++;
    entries_.push_back(std::move(r));
  }
  const std::vector<QueryRecord>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t eval_count() const { return evals_; }
  std::size_t cut_count() const { return cuts_; }

 private:
  std::vector<QueryRecord> entries_;
  std::size_t evals_ = 0;
  std::size_t cuts_ = 0;
};

// u_i([x, y]), exact.
inline Rat eval_query(const Instance& inst, int agent, const Rat& x, const Rat& y,
                      QueryLog* log = nullptr) {
  if (x < 0 || y > 1 || x > y) throw error("eval_query: need 0 <= x <= y <= 1");
  Rat v = 0;
  for (int s = 0; s < inst.segments(); ++s) {
    Rat lo = rat_max(x, inst.breakpoints[s]);
    Rat hi = rat_min(y, inst.breakpoints[s + 1]);
    if (lo < hi) v += inst.densities[agent][s] * (hi - lo);
  }
  if (log) log->record({agent, QueryKind::Eval, x, y, v});
  return v;
}

// Leftmost y >= x with u_i([x, y]) = beta; nullopt when u_i([x, 1]) < beta.
// Inside a zero-density run the smallest qualifying point is returned.
inline std::optional<Rat> cut_query(const Instance& inst, int agent, const Rat& x,
                                    const Rat& beta, QueryLog* log = nullptr) {
  if (x < 0 || x > 1) throw error("cut_query: need 0 <= x <= 1");
  if (beta < 0) throw error("cut_query: need beta >= 0");
  std::optional<Rat> y;
  if (beta == 0) {
    y = x;  // leftmost point of value zero is x itself
  } else {
    Rat remaining = beta;
    for (int s = 0; s < inst.segments() && !y; ++s) {
      Rat lo = rat_max(x, inst.breakpoints[s]);
      Rat hi = inst.breakpoints[s + 1];
      if (!(lo < hi)) continue;
      const Rat& d = inst.densities[agent][s];
      if (d == 0) continue;
      Rat segval = d * (hi - lo);
      if (remaining <= segval)
        y = lo + remaining / d;
      else
        remaining -= segval;
    }
  }
  if (log) log->record({agent, QueryKind::Cut, x, beta, y});
  return y;
}

// Sum of eval queries over the piece's intervals.
inline Rat piece_value(const Instance& inst, int agent, const PieceSet& piece,
                       QueryLog* log = nullptr) {
  Rat v = 0;
  for (const auto& iv : piece.intervals()) v += eval_query(inst, agent, iv.lo, iv.hi, log);
  return v;
}

// Re-runs every logged query and checks the recorded results.
inline bool replay_log(const Instance& inst, const QueryLog& log) {
  for (const auto& r : log.entries()) {
    if (r.kind == QueryKind::Eval) {
      if (!r.result || eval_query(inst, r.agent, r.x, r.arg) != *r.result) return false;
    } else {
      if (cut_query(inst, r.agent, r.x, r.arg) != r.result) return false;
    }
  }
  return true;
}

}  // namespace mixedfair
