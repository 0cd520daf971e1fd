#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "trap/constructions.hpp"
#include "trap/game.hpp"
#include "trap/graph.hpp"
#include "trap/matching.hpp"
#include "trap/percolation.hpp"

namespace trap {

// ---------------------------------------------------------------------------
// Trial runner and statistics

/// Runs fn(0..trials-1) on `threads` workers. Results come back in trial
/// order, so any reduction over them is independent of the thread count.
template <class F>
auto run_trials(int trials, int threads, F&& fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  if (trials < 0) throw std::invalid_argument("run_trials: negative trial count");
  std::vector<R> out(static_cast<std::size_t>(trials));
  threads = std::max(1, std::min(threads, trials));
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) out[t] = fn(t);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int t = next++; t < trials; t = next++) {
        try {
          out[t] = fn(t);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct Proportion {
  int successes = 0;
  int trials = 0;

  double mean() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  double stderr_() const { return trials ? std::sqrt(mean() * (1 - mean()) / trials) : 0.0; }
};

inline Proportion count_true(const std::vector<std::uint8_t>& flags) {
  return {static_cast<int>(std::count(flags.begin(), flags.end(), 1)), static_cast<int>(flags.size())};
}

struct Summary {
  int count = 0;
  double mean = 0, stddev = 0, stderr_ = 0, median = 0, min = 0, max = 0;
};

inline Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  s.min = xs.front();
  s.max = xs.back();
  const std::size_t h = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[h] : (xs[h - 1] + xs[h]) / 2;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
  s.stderr_ = s.stddev / std::sqrt(static_cast<double>(xs.size()));
  return s;
}

/// Rows of named columns, written as CSV or as JSON with a schema version.
struct Table {
  static constexpr int kSchemaVersion = 1;
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table::add: row width mismatch");
    rows.push_back(std::move(row));
  }

  static std::string cell_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    return v.dump();
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << cell_text(r[c]);
      os << '\n';
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json out{{"schema_version", kSchemaVersion}, {"table", name}, {"columns", columns}};
    out["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t c = 0; c < r.size(); ++c) obj[columns[c]] = r[c];
      out["rows"].push_back(obj);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Draw maps

/// Outcome map of the n x n square [1+x_offset, n+x_offset] x [1, n] from two
/// boundary conditions: padded with a ring of open odd vertices (leaving the
/// square loses for Eve) and with a ring of open even vertices (leaving loses
/// for Odin). Where the two winners differ the cell is a Draw.
inline OutcomeGrid draw_map(const BoardSample& square) {
  const RegionKind& kind = square.region.kind();
  if (square.region.size() == 0) throw std::invalid_argument("draw_map: empty square");
  const int n = square.region.bounds().width();
  const int x_offset = square.region.bounds().xmin - 1;
  if (square.region.bounds().height() != n || square.region.bounds().ymin != 1 || square.region.size() != n * n ||
      (kind.shape != Shape::PlainSquare && kind.shape != Shape::Custom))
    throw std::invalid_argument("draw_map: expected an unpadded square [1+x_offset, n+x_offset] x [1, n]");
  auto solve_padded = [&](Parity pad) {
    BoardSample b{padded_square(n, x_offset, pad), {}, square.p, square.q, square.seed};
    b.closed.assign(static_cast<std::size_t>(b.region.size()), 0);
    for (int k = 0; k < square.region.size(); ++k) b.closed[b.region.id(square.region.vertex(k))] = square.closed[k];
    return solve_trap(b);
  };
  const OutcomeGrid odd_pad = solve_padded(Parity::Odd);
  const OutcomeGrid even_pad = solve_padded(Parity::Even);
  OutcomeGrid out{square.region, std::vector<Cell>(static_cast<std::size_t>(square.region.size()))};
  for (int k = 0; k < square.region.size(); ++k) {
    const Vertex v = square.region.vertex(k);
    const Cell a = odd_pad.at(v), b = even_pad.at(v);
    out.cells[k] = a == b ? a : Cell::Draw;
  }
  return out;
}

inline OutcomeGrid draw_map(int n, double p, double q, std::uint64_t seed, std::uint64_t trial = 0, int x_offset = 0) {
  if (n < 1) throw std::invalid_argument("draw_map: n must be positive");
  return draw_map(sample_board(padded_square(n, x_offset, std::nullopt), p, q, seed, trial));
}

inline double draw_fraction(const OutcomeGrid& g) {
  return static_cast<double>(g.count(Cell::Draw)) / static_cast<double>(g.cells.size());
}

// ---------------------------------------------------------------------------
// Winner strategies

inline Player trap_winner(const Graph& g, const EssentialityReport& r, int start) {
  const Player first = first_player(g.side(start));
  if (!g.alive(start)) return first;
  return r.essential[start] ? first : other(first);
}

// ---------------------------------------------------------------------------
// Theorem-scale checks on diamonds (q = 0)

inline int lower_scale_n(double c, double p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0, 1)");
  return static_cast<int>(std::floor(c / (p * std::log(1 / p))));
}

inline int upper_scale_n(double C, double p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0, 1)");
  return static_cast<int>(std::ceil(C * std::log(1 / p) / p));
}

/// Odin wins from every open vertex (closed starts are first-player wins by
/// convention and are not counted).
inline bool odin_wins_everywhere(const OutcomeGrid& g) {
  for (Cell c : g.cells)
    if (c == Cell::Eve) return false;
  return true;
}

struct LowerCheck {
  double c = 0, p = 0;
  int n = 0;
  Proportion all_odin;
  int audit_failures = 0;  // all-Odin boards where some open odd vertex is matched in every maximum matching
};

inline LowerCheck theorem_lower_check(double c, double p, int trials, std::uint64_t seed, int threads = 1) {
  LowerCheck out;
  out.c = c;
  out.p = p;
  out.n = lower_scale_n(c, p);
  if (out.n < 1) throw std::invalid_argument("theorem_lower_check: n = floor(c / (p log(1/p))) is below 1");
  const Region d = build_region(RegionKind::diamond(out.n));
  struct Result {
    std::uint8_t all_odin = 0, audit_failed = 0;
  };
  const auto results = run_trials(trials, threads, [&](int t) {
    const BoardSample s = sample_board(d, p, 0, seed, static_cast<std::uint64_t>(t));
    const Graph g = open_subgraph(s);
    const auto report = classify_essential(g);
    const OutcomeGrid grid = outcome_grid(s, report);
    Result r;
    r.all_odin = odin_wins_everywhere(grid);
    if (r.all_odin)
      for (int v = 0; v < g.num_vertices(); ++v)
        if (g.alive(v) && g.side(v) == Parity::Odd && report.essential[v]) r.audit_failed = 1;
    return r;
  });
  for (const auto& r : results) {
    out.all_odin.successes += r.all_odin;
    out.audit_failures += r.audit_failed;
  }
  out.all_odin.trials = trials;
  return out;
}

struct UpperCheck {
  double C = 0, p = 0, c_prime = 0;
  int n = 0;
  Proportion eve_everywhere;     // every odd vertex and every protected even vertex
  Proportion quadrant_events;    // E
  Proportion S_protected;        // every even vertex of S protected
  double bound_simple = 0;       // 1 - 2n exp(-pn/2)
  double bound_exact = 0;        // 1 - (n+1)(1-p)^(n-2), one quadrant
  int construction_mismatches = 0;  // boards with E where the constructed matching is not maximum
};

inline UpperCheck theorem_upper_check(double C, double p, int trials, std::uint64_t seed, int threads = 1,
                                      double c_prime = 2.0, bool audit_constructions = false) {
  UpperCheck out;
  out.C = C;
  out.p = p;
  out.c_prime = c_prime;
  out.n = upper_scale_n(C, p);
  const int n = out.n;
  if (static_cast<double>(n) * n > 5e7) throw std::length_error("theorem_upper_check: board exceeds the memory budget");
  out.bound_simple = 1 - 2.0 * n * std::exp(-p * n / 2);
  out.bound_exact = 1 - (n + 1.0) * std::pow(1 - p, n - 2);
  const Region d = build_region(RegionKind::diamond(n));
  std::vector<int> s_even;
  for (Vertex v : set_S(n, p, c_prime))
    if (parity(v) == Parity::Even) s_even.push_back(d.id(v));
  struct Result {
    std::uint8_t eve = 0, events = 0, s_ok = 0, mismatch = 0;
  };
  const auto results = run_trials(trials, threads, [&](int t) {
    const BoardSample s = sample_board(d, p, 0, seed, static_cast<std::uint64_t>(t));
    const Graph g = open_subgraph(s);
    const auto report = classify_essential(g);
    const auto prot = protected_mask(s);
    Result r;
    r.eve = 1;
    for (int v = 0; v < g.num_vertices() && r.eve; ++v) {
      const bool relevant = g.side(v) == Parity::Odd || prot[v];
      if (relevant && trap_winner(g, report, v) != Player::Eve) r.eve = 0;
    }
    r.s_ok = std::all_of(s_even.begin(), s_even.end(), [&](int v) { return prot[v] != 0; });
    const EventFlags f = event_flags(s, 1);
    r.events = f.all_quadrants;
    if (audit_constructions && f.all_quadrants) {
      const GlobalMatchings gm(s);
      r.mismatch = gm.base().size() != report.matching.size();
    }
    return r;
  });
  for (const auto& r : results) {
    out.eve_everywhere.successes += r.eve;
    out.quadrant_events.successes += r.events;
    out.S_protected.successes += r.s_ok;
    out.construction_mismatches += r.mismatch;
  }
  out.eve_everywhere.trials = out.quadrant_events.trials = out.S_protected.trials = trials;
  return out;
}

// ---------------------------------------------------------------------------
// Closed even vertices and the star lattice

/// A diamond is good when it has no closed even vertex and some matching
/// covers all its open odd vertices.
inline bool diamond_good(const BoardSample& s) {
  if (s.count_closed(Parity::Even) != 0) return false;
  const Graph g = open_subgraph(s);
  int open_odd = 0;
  for (int v = 0; v < g.num_vertices(); ++v) open_odd += g.alive(v) && g.side(v) == Parity::Odd;
  return hopcroft_karp(g).size() == open_odd;
}

struct DensityCheck {
  double p = 0;
  int n = 0;
  std::vector<double> qs;
  std::vector<Proportion> good;  // per q, on coupled samples
};

inline DensityCheck density_corollary_check(double p, int n, std::vector<double> qs, int trials, std::uint64_t seed,
                                            int threads = 1) {
  DensityCheck out{p, n, std::move(qs), {}};
  const Region d = build_region(RegionKind::diamond(n));
  const auto results = run_trials(trials, threads, [&](int t) {
    std::vector<std::uint8_t> good;
    for (double q : out.qs) good.push_back(diamond_good(sample_board(d, p, q, seed, static_cast<std::uint64_t>(t))));
    return good;
  });
  out.good.assign(out.qs.size(), Proportion{0, trials});
  for (const auto& r : results)
    for (std::size_t k = 0; k < r.size(); ++k) out.good[k].successes += r[k];
  return out;
}

/// Site percolation threshold of the square lattice with sup-norm adjacency,
/// estimated by adding sites in random order (union-find) until the L x L
/// square spans top to bottom; the mean spanning density over trials.
inline Summary star_lattice_threshold(int L, int trials, std::uint64_t seed, int threads = 1) {
  const auto results = run_trials(trials, threads, [&](int t) {
    const int n = L * L;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, static_cast<std::uint64_t>(t));
    for (int k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    std::vector<int> parent(static_cast<std::size_t>(n) + 2);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::uint8_t> occupied(static_cast<std::size_t>(n), 0);
    const int top = n, bottom = n + 1;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (int k = 0; k < n; ++k) {
      const int v = order[k];
      occupied[v] = 1;
      const int x = v % L, y = v / L;
      if (y == 0) unite(v, top);
      if (y == L - 1) unite(v, bottom);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if ((dx || dy) && xx >= 0 && xx < L && yy >= 0 && yy < L && occupied[yy * L + xx]) unite(v, yy * L + xx);
        }
      if (find(top) == find(bottom)) return static_cast<double>(k + 1) / n;
    }
    return 1.0;
  });
  return summarize(results);
}

// ---------------------------------------------------------------------------
// Game length

struct LengthCheck {
  double p = 0;
  int n_small = 0;                 // floor(c / (p log(1/p)))
  int n_large = 0;                 // ceil(C log(1/p) / p)
  Proportion odin_holds_small;     // Odin wins from both (0,0) and (1,0) inside D_{n_small}
  Summary eve_win_moves;           // matching strategy vs greedy Odin on D_{n_large}
  int over_budget = 0;             // playouts longer than |D_{n_large}|
  int eve_losses = 0;              // Eve was the designated winner but lost (never expected)
  int board_size = 0;
};

inline LengthCheck game_length_stats(double p, int trials, double c, double C, std::uint64_t seed, int threads = 1) {
  LengthCheck out;
  out.p = p;
  out.n_small = lower_scale_n(c, p);
  out.n_large = upper_scale_n(C, p);
  const Region small = build_region(RegionKind::diamond(std::max(out.n_small, 1)));
  const Region large = build_region(RegionKind::diamond(out.n_large));
  out.board_size = large.size();
  struct Result {
    std::uint8_t odin_small = 0;
    std::vector<double> lengths;
    int over = 0, losses = 0;
  };
  const auto results = run_trials(trials, threads, [&](int t) {
    Result r;
    {
      const BoardSample s = sample_board(small, p, 0, seed, 2 * static_cast<std::uint64_t>(t));
      const OutcomeGrid grid = solve_trap(s);
      r.odin_small = grid.at({0, 0}) == Cell::Odin && grid.at({1, 0}) == Cell::Odin;
    }
    const BoardSample s = sample_board(large, p, 0, seed, 2 * static_cast<std::uint64_t>(t) + 1);
    const Graph g = open_subgraph(s);
    const auto report = classify_essential(g);
    for (Vertex start : {Vertex{0, 0}, Vertex{1, 0}}) {
      const int v = large.id(start);
      if (!g.alive(v) || trap_winner(g, report, v) != Player::Eve) continue;
      const Strategy eve = MatchingStrategy(g, winning_matching(g, report, v), MatchingStrategy::Mode::Incremental);
      const Transcript tr = play(g, v, eve, greedy_strategy(g), large.size() + 1);
      if (tr.winner != Player::Eve) ++r.losses;
      if (tr.length > large.size()) ++r.over;
      r.lengths.push_back(tr.length);
    }
    return r;
  });
  std::vector<double> all;
  for (const auto& r : results) {
    out.odin_holds_small.successes += r.odin_small;
    all.insert(all.end(), r.lengths.begin(), r.lengths.end());
    out.over_budget += r.over;
    out.eve_losses += r.losses;
  }
  out.odin_holds_small.trials = trials;
  out.eve_win_moves = summarize(std::move(all));
  return out;
}

}  // namespace trap
