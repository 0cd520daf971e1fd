#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trap/graph.hpp"
#include "trap/matching.hpp"
#include "trap/percolation.hpp"
#include "trap/rng.hpp"

namespace trap {

// Odin moves to odd vertices, Eve to even ones. So whoever moves first from an
// even vertex is Odin, and from an odd vertex is Eve.
enum class Player : std::uint8_t { Eve, Odin };

inline Player other(Player p) { return p == Player::Eve ? Player::Odin : Player::Eve; }
inline const char* to_string(Player p) { return p == Player::Eve ? "Eve" : "Odin"; }
inline Player first_player(Parity start) { return start == Parity::Even ? Player::Odin : Player::Eve; }
inline Player first_player(Vertex v) { return first_player(parity(v)); }

enum class Winner : std::uint8_t { First, Second };

inline Player winner_player(Parity start, Winner w) {
  return w == Winner::First ? first_player(start) : other(first_player(start));
}

// ---------------------------------------------------------------------------
// Outcome grids

enum class Cell : std::uint8_t { Eve, Odin, Draw, ClosedOdd, ClosedEven };

inline char to_char(Cell c) {
  switch (c) {
    case Cell::Eve: return 'E';
    case Cell::Odin: return 'O';
    case Cell::Draw: return 'D';
    case Cell::ClosedOdd:
    case Cell::ClosedEven: return '#';
  }
  return '?';
}

inline bool is_closed(Cell c) { return c == Cell::ClosedOdd || c == Cell::ClosedEven; }

/// Winner of the start at a cell; closed starts are won by the first player.
inline std::optional<Player> cell_winner(Cell c) {
  switch (c) {
    case Cell::Eve:
    case Cell::ClosedOdd: return Player::Eve;
    case Cell::Odin:
    case Cell::ClosedEven: return Player::Odin;
    case Cell::Draw: return std::nullopt;
  }
  return std::nullopt;
}

struct OutcomeGrid {
  Region region;
  std::vector<Cell> cells;  // indexed by region id

  Cell at(Vertex v) const { return cells[static_cast<std::size_t>(region.id(v))]; }
  int count(Cell c) const { return static_cast<int>(std::count(cells.begin(), cells.end(), c)); }
  friend bool operator==(const OutcomeGrid& a, const OutcomeGrid& b) {
    return a.region.kind() == b.region.kind() && a.cells == b.cells &&
           std::equal(a.region.vertices().begin(), a.region.vertices().end(), b.region.vertices().begin(),
                      b.region.vertices().end());
  }
};

/// Per vertex: does the first player win Trap from here? Open vertices win
/// exactly when they are essential; dead (closed) starts count as first-player wins.
inline std::vector<std::uint8_t> first_player_wins(const Graph& g, const EssentialityReport& r) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(g.num_vertices()), 1);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.alive(v)) out[v] = r.essential[v];
  return out;
}

inline std::vector<std::uint8_t> first_player_wins(const Graph& g) {
  return first_player_wins(g, classify_essential(g));
}

inline OutcomeGrid outcome_grid(const BoardSample& s, const EssentialityReport& r) {
  OutcomeGrid grid{s.region, std::vector<Cell>(static_cast<std::size_t>(s.region.size()))};
  for (int v = 0; v < s.region.size(); ++v) {
    const Parity par = parity(s.region.vertex(v));
    if (s.closed[v]) {
      grid.cells[v] = par == Parity::Odd ? Cell::ClosedOdd : Cell::ClosedEven;
      continue;
    }
    const Player w = winner_player(par, r.essential[v] ? Winner::First : Winner::Second);
    grid.cells[v] = w == Player::Eve ? Cell::Eve : Cell::Odin;
  }
  return grid;
}

/// Outcome of Trap from every start vertex of a board.
///
/// Maximum matchings of the open subgraph split into maximum matchings of its
/// components, so one global matching classifies every component at once.
inline OutcomeGrid solve_trap(const BoardSample& s) {
  const Graph g = open_subgraph(s);
  return outcome_grid(s, classify_essential(g));
}

// ---------------------------------------------------------------------------
// Exhaustive game-tree oracles over small components.

namespace detail {

/// The connected component of a start vertex with bitmask adjacency.
struct LocalComponent {
  std::vector<int> global;   // local -> graph id
  std::vector<std::uint64_t> adj;
  std::unordered_map<int, int> local;

  LocalComponent(const Graph& g, int v, int limit, const char* who) {
    global = g.component(v);
    if (static_cast<int>(global.size()) > limit)
      throw std::length_error(std::string(who) + ": component of " + std::to_string(global.size()) +
                              " vertices exceeds the limit of " + std::to_string(limit));
    std::sort(global.begin(), global.end());
    for (int k = 0; k < static_cast<int>(global.size()); ++k) local.emplace(global[k], k);
    adj.assign(global.size(), 0);
    for (int k = 0; k < static_cast<int>(global.size()); ++k)
      for (int w : g.neighbors(global[k])) adj[k] |= std::uint64_t{1} << local.at(w);
  }

  int size() const { return static_cast<int>(global.size()); }
  std::uint64_t all() const { return size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size()) - 1; }

  /// Vertices reachable from `w` inside `mask` (w itself included).
  std::uint64_t reach(int w, std::uint64_t mask) const {
    std::uint64_t seen = std::uint64_t{1} << w;
    std::uint64_t frontier = seen;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::uint64_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen;
  }
};

struct StateKey {
  std::uint64_t mask;
  int token;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return static_cast<std::size_t>(splitmix64(k.mask ^ (static_cast<std::uint64_t>(k.token) << 58)));
  }
};

inline std::uint64_t bit(int k) { return std::uint64_t{1} << k; }

}  // namespace detail

/// Exact Trap solver by memoized game-tree search.
///
/// A position is (token, set of vertices still reachable from the token);
/// vertices cut off by the visited path can never matter again, so histories
/// that leave the same reachable set share one memo entry. Intended as an
/// oracle for the matching-based solver, not for large boards.
class TrapTreeSearch {
 public:
  static constexpr int kMaxComponent = 64;

  explicit TrapTreeSearch(const Graph& g, std::size_t state_budget = 20'000'000)
      : g_(&g), budget_(state_budget) {}

  Winner solve(int v) {
    if (!g_->alive(v)) return Winner::First;
    const detail::LocalComponent& c = component_for(v);
    const int t = c.local.at(v);
    memo_ = &memos_[c.global.front()];
    comp_ = &c;
    return wins(t, c.all()) ? Winner::First : Winner::Second;
  }

  std::size_t states() const {
    std::size_t s = 0;
    for (auto& [k, m] : memos_) s += m.size();
    return s;
  }

 private:
  const detail::LocalComponent& component_for(int v) {
    for (auto& c : components_)
      if (c.local.count(v)) return c;
    components_.emplace_back(*g_, v, kMaxComponent, "brute_force_trap");
    return components_.back();
  }

  bool wins(int t, std::uint64_t avail) {
    const detail::StateKey key{avail, t};
    if (auto it = memo_->find(key); it != memo_->end()) return it->second;
    const std::uint64_t rest = avail & ~detail::bit(t);
    std::uint64_t moves = comp_->adj[t] & rest;
    // Try moves into the most constrained vertices first; only speed depends on order.
    int order[64];
    int count = 0;
    for (; moves; moves &= moves - 1) order[count++] = std::countr_zero(moves);
    std::sort(order, order + count, [&](int a, int b) {
      const int da = std::popcount(comp_->adj[a] & rest), db = std::popcount(comp_->adj[b] & rest);
      return da != db ? da < db : a < b;
    });
    bool result = false;
    for (int k = 0; k < count && !result; ++k) {
      const int w = order[k];
      if (!wins(w, comp_->reach(w, rest))) result = true;
    }
    if (++inserted_ > budget_) throw std::length_error("brute_force_trap: state budget exhausted");
    memo_->emplace(key, result);
    return result;
  }

  const Graph* g_;
  std::size_t budget_;
  std::size_t inserted_ = 0;
  std::vector<detail::LocalComponent> components_;
  std::unordered_map<int, std::unordered_map<detail::StateKey, bool, detail::StateKeyHash>> memos_;
  std::unordered_map<detail::StateKey, bool, detail::StateKeyHash>* memo_ = nullptr;
  const detail::LocalComponent* comp_ = nullptr;
};

/// Winner of Trap from `v` by exhaustive minimax. Closed (dead) starts are
/// first-player wins by convention.
inline Winner brute_force_trap(const Graph& g, int v) { return TrapTreeSearch(g).solve(v); }

/// Vicious Trap: a mover may also delete any subset of the other vertices it
/// could have moved to.
///
/// Two independent computations are run and must agree: (a) exhaustive game
/// tree over (token, remaining vertices); (b) the first player loses iff `v`
/// lies in every maximum independent set of its component.
inline Winner brute_force_vicious(const Graph& g, int v) {
  constexpr int kMax = 18;
  if (!g.alive(v)) return Winner::First;
  const detail::LocalComponent c(g, v, kMax, "brute_force_vicious");
  const int k = c.size();
  const int t0 = c.local.at(v);

  // (a) game tree
  std::vector<std::int8_t> memo(static_cast<std::size_t>(k) << k, -1);
  std::function<bool(int, std::uint64_t)> wins = [&](int t, std::uint64_t avail) -> bool {
    auto& slot = memo[(static_cast<std::size_t>(t) << k) | avail];
    if (slot >= 0) return slot != 0;
    const std::uint64_t rest = avail & ~detail::bit(t);
    const std::uint64_t nb = c.adj[t] & rest;
    bool result = false;
    for (std::uint64_t moves = nb; moves && !result; moves &= moves - 1) {
      const int w = std::countr_zero(moves);
      const std::uint64_t others = nb & ~detail::bit(w);
      // every subset of `others` may be destroyed along with the move
      std::uint64_t del = 0;
      do {
        if (!wins(w, c.reach(w, rest & ~del))) {
          result = true;
          break;
        }
        del = (del - others) & others;
      } while (del != 0);
    }
    slot = result ? 1 : 0;
    return result;
  };
  const bool tree_first_wins = wins(t0, c.all());

  // (b) maximum independent sets
  int alpha = 0;
  bool some_mis_avoids_v = false;
  const std::uint64_t full = c.all();
  for (std::uint64_t s = 0;; s = (s - full) & full) {
    bool independent = true;
    for (std::uint64_t f = s; f && independent; f &= f - 1)
      independent = (c.adj[std::countr_zero(f)] & s) == 0;
    if (independent) {
      const int size = std::popcount(s);
      if (size > alpha) {
        alpha = size;
        some_mis_avoids_v = false;
      }
      if (size == alpha && !(s & detail::bit(t0))) some_mis_avoids_v = true;
    }
    if (s == full) break;
  }
  const bool mis_first_wins = some_mis_avoids_v;

  if (tree_first_wins != mis_first_wins)
    throw std::logic_error("brute_force_vicious: game tree and independent-set characterization disagree at vertex " +
                           std::to_string(v));
  return tree_first_wins ? Winner::First : Winner::Second;
}

// ---------------------------------------------------------------------------
// Play

struct Position {
  int token = -1;
  std::span<const std::uint8_t> visited;  // indexed by graph id
};

/// Maps a position with at least one legal move to a legal move.
using Strategy = std::function<int(const Position&)>;

inline std::vector<int> legal_moves(const Graph& g, const Position& pos) {
  std::vector<int> out;
  for (int w : g.neighbors(pos.token))
    if (!pos.visited[w]) out.push_back(w);
  return out;
}

struct Transcript {
  int start = -1;
  std::vector<int> moves;
  std::optional<Player> winner;
  int length = 0;
  bool truncated = false;
  bool closed_start = false;
};

/// Plays strategies against each other from `start`. A closed start is an
/// immediate first-player win; reaching `move_cap` moves ends the game as truncated.
inline Transcript play(const Graph& g, int start, const Strategy& eve, const Strategy& odin, int move_cap) {
  if (move_cap < 1) throw std::invalid_argument("play: move_cap must be at least 1");
  Transcript t;
  t.start = start;
  const Player first = first_player(g.side(start));
  if (!g.alive(start)) {
    t.closed_start = true;
    t.winner = first;
    return t;
  }
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(g.num_vertices()), 0);
  visited[start] = 1;
  int token = start;
  while (true) {
    const Player mover = first_player(g.side(token));
    const Position pos{token, visited};
    bool any = false;
    for (int w : g.neighbors(token)) any = any || !visited[w];
    if (!any) {
      t.winner = other(mover);
      break;
    }
    if (t.length >= move_cap) {
      t.truncated = true;
      break;
    }
    const int w = (mover == Player::Eve ? eve : odin)(pos);
    if (w < 0 || w >= g.num_vertices() || !g.adjacent(token, w) || visited[w])
      throw std::runtime_error(std::string(to_string(mover)) + "'s strategy returned illegal move " +
                               std::to_string(w) + " from " + std::to_string(token));
    visited[w] = 1;
    token = w;
    t.moves.push_back(w);
    ++t.length;
  }
  return t;
}

/// Transcript as JSON; `label` turns graph ids into JSON values (e.g. [x, y]).
inline nlohmann::json transcript_json(const Transcript& t,
                                      const std::function<nlohmann::json(int)>& label = {}) {
  auto lab = [&](int v) { return label ? label(v) : nlohmann::json(v); };
  nlohmann::json moves = nlohmann::json::array();
  for (int m : t.moves) moves.push_back(lab(m));
  return {{"start", lab(t.start)},
          {"moves", moves},
          {"winner", t.winner ? nlohmann::json(to_string(*t.winner)) : nlohmann::json(nullptr)},
          {"length", t.length},
          {"truncated", t.truncated}};
}

// ---------------------------------------------------------------------------
// Strategies

/// Winner's strategy from a maximum matching: always move to the token's
/// partner.
///
/// If the token is essential in the residual graph and M is maximum there,
/// then M minus the edge just used is maximum on the next residual graph and
/// the opponent's reply lands on an essential vertex again. Incremental mode
/// relies on exactly that and never recomputes unless the stored partner is
/// unusable (for instance when the strategy joins a game midway). Recompute
/// mode rebuilds the residual component and its maximum matching every move.
class MatchingStrategy {
 public:
  enum class Mode { Incremental, Recompute };

  MatchingStrategy(const Graph& g, Matching maximum, Mode mode)
      : g_(&g), m_(std::move(maximum)), mode_(mode) {}

  int operator()(const Position& pos) {
    if (mode_ == Mode::Incremental) {
      const int w = m_.mate(pos.token);
      if (w >= 0 && !pos.visited[w] && g_->alive(w)) return w;
    }
    m_ = residual_matching(pos);
    ++recomputations_;
    return m_.mate(pos.token);
  }

  int recomputations() const { return recomputations_; }

  /// Maximum matching of the residual component of the token; throws when the
  /// token is not essential there (the mover is not the winner).
  Matching residual_matching(const Position& pos) const {
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(g_->num_vertices()), 0);
    const Graph& g = *g_;
    std::vector<int> queue{pos.token};
    keep[pos.token] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (int w : g.neighbors(queue[head]))
        if (!keep[w] && !pos.visited[w]) {
          keep[w] = 1;
          queue.push_back(w);
        }
    const Graph residual = g.induced(keep);
    const auto report = classify_essential(residual);
    if (!report.essential[pos.token])
      throw std::logic_error("matching strategy: the mover does not win from vertex " + std::to_string(pos.token));
    return report.matching;
  }

 private:
  const Graph* g_;
  Matching m_;
  Mode mode_;
  int recomputations_ = 0;
};

/// A maximum matching suited to the winner at `start`: any maximum matching
/// when the first player wins (start is essential), otherwise one leaving
/// `start` unmatched. Either way the winner follows partners of the token.
inline Matching winning_matching(const Graph& g, const EssentialityReport& r, int start) {
  if (r.essential[start] || !r.matching.matched(start)) return r.matching;
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(g.num_vertices()), 1);
  keep[start] = 0;
  Matching m = hopcroft_karp(g.induced(keep));
  if (m.size() != r.matching.size()) throw std::logic_error("winning_matching: start vertex is not avoidable");
  return m;
}

/// Strategy for whichever player wins from `start` (the graph must outlive it).
inline Strategy matching_strategy(const Graph& g, const EssentialityReport& report, int start,
                                  MatchingStrategy::Mode mode = MatchingStrategy::Mode::Incremental) {
  if (!g.alive(start)) throw std::invalid_argument("matching_strategy: start vertex is closed");
  return MatchingStrategy(g, winning_matching(g, report, start), mode);
}

inline Strategy random_strategy(const Graph& g, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [&g, rng](const Position& pos) {
    const auto moves = legal_moves(g, pos);
    return moves[rng->below(moves.size())];
  };
}

/// Moves to the neighbor with the most unvisited neighbors of its own,
/// smallest id on ties.
inline Strategy greedy_strategy(const Graph& g) {
  return [&g](const Position& pos) {
    int best = -1, best_degree = -1;
    for (int w : g.neighbors(pos.token)) {
      if (pos.visited[w]) continue;
      int deg = 0;
      for (int x : g.neighbors(w)) deg += !pos.visited[x] && x != pos.token;
      if (deg > best_degree) {
        best = w;
        best_degree = deg;
      }
    }
    return best;
  };
}

// ---------------------------------------------------------------------------
// Game length

/// Exact minimax game length for Eve wins: Eve minimizes the number of turns,
/// Odin maximizes it. A turn in which the mover is stuck counts, so a single
/// winning move gives T = 2.
class GameLengthSolver {
 public:
  static constexpr int kMaxComponent = 20;

  struct Value {
    bool eve_wins = false;
    int turns = 0;
  };

  GameLengthSolver(const Graph& g, int start)
      : g_(&g), c_(g, start, kMaxComponent, "minimax_game_length"), start_(start) {
    if (!g.alive(start)) throw std::invalid_argument("minimax_game_length: start vertex is closed");
  }

  Value value_at_start() { return value(c_.local.at(start_), c_.all()); }

  /// Value of the position (token, visited) for a token inside this component.
  Value value(const Position& pos) { return value(c_.local.at(pos.token), residual_mask(pos)); }

  /// Optimal move: Eve picks the fastest win, Odin the longest defence (or a win).
  int best_move(const Position& pos) {
    const int t = c_.local.at(pos.token);
    const std::uint64_t avail = residual_mask(pos);
    const std::uint64_t rest = avail & ~detail::bit(t);
    const Player mover = first_player(g_->side(pos.token));
    int best = -1;
    Value best_value{};
    for (std::uint64_t mv = c_.adj[t] & rest; mv; mv &= mv - 1) {
      const int w = std::countr_zero(mv);
      const Value child = value(w, c_.reach(w, rest));
      const bool better = [&] {
        if (best < 0) return true;
        if (mover == Player::Eve) {
          if (child.eve_wins != best_value.eve_wins) return child.eve_wins;
          return child.eve_wins && child.turns < best_value.turns;
        }
        if (child.eve_wins != best_value.eve_wins) return !child.eve_wins;
        return child.eve_wins && child.turns > best_value.turns;
      }();
      if (better) {
        best = w;
        best_value = child;
      }
    }
    if (best < 0) throw std::logic_error("best_move: no legal move");
    return c_.global[best];
  }

 private:
  std::uint64_t residual_mask(const Position& pos) const {
    std::uint64_t rest = 0;
    for (int k = 0; k < c_.size(); ++k)
      if (!pos.visited[c_.global[k]]) rest |= detail::bit(k);
    const int t = c_.local.at(pos.token);
    return c_.reach(t, rest | detail::bit(t));
  }

  Value value(int t, std::uint64_t avail) {
    const detail::StateKey key{avail, t};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::uint64_t rest = avail & ~detail::bit(t);
    const Player mover = first_player(g_->side(c_.global[t]));
    Value v{mover == Player::Odin, 1};
    std::uint64_t moves = c_.adj[t] & rest;
    if (moves) {
      if (mover == Player::Eve) {
        int best = std::numeric_limits<int>::max();
        for (; moves; moves &= moves - 1) {
          const int w = std::countr_zero(moves);
          const Value child = value(w, c_.reach(w, rest));
          if (child.eve_wins) best = std::min(best, child.turns + 1);
        }
        v = best == std::numeric_limits<int>::max() ? Value{false, 0} : Value{true, best};
      } else {
        int worst = 0;
        v = Value{true, 0};
        for (; moves; moves &= moves - 1) {
          const int w = std::countr_zero(moves);
          const Value child = value(w, c_.reach(w, rest));
          if (!child.eve_wins) {
            v = Value{false, 0};
            break;
          }
          worst = std::max(worst, child.turns + 1);
        }
        if (v.eve_wins) v.turns = worst;
      }
    }
    memo_.emplace(key, v);
    return v;
  }

  const Graph* g_;
  detail::LocalComponent c_;
  int start_;
  std::unordered_map<detail::StateKey, Value, detail::StateKeyHash> memo_;
};

/// Minimum number of turns in which Eve can force a win from `v`.
inline int minimax_game_length(const Graph& g, int v) {
  GameLengthSolver solver(g, v);
  const auto value = solver.value_at_start();
  if (!value.eve_wins) throw std::invalid_argument("minimax_game_length: Eve does not win from this vertex");
  return value.turns;
}

/// Optimal strategy for either side derived from a shared length solver.
inline Strategy minimax_strategy(std::shared_ptr<GameLengthSolver> solver) {
  return [solver](const Position& pos) { return solver->best_move(pos); };
}

}  // namespace trap
