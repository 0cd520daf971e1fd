#pragma once

// Brute-force reference implementations used as test oracles. Nothing here
// calls into the matching or game code under test.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oracle {

struct SmallGraph {
  int n = 0;
  std::vector<std::uint32_t> adj;  // bitmask neighborhoods
  std::vector<std::pair<int, int>> edges;
  std::vector<int> side;           // 0/1 when built bipartite, empty otherwise

  bool bipartite() const {
    std::vector<int> colour(n, -1);
    for (int s = 0; s < n; ++s) {
      if (colour[s] >= 0) continue;
      colour[s] = 0;
      std::vector<int> stack{s};
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
          if (!(adj[u] >> v & 1)) continue;
          if (colour[v] < 0) {
            colour[v] = 1 - colour[u];
            stack.push_back(v);
          } else if (colour[v] == colour[u]) {
            return false;
          }
        }
      }
    }
    return true;
  }
};

inline SmallGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  SmallGraph g;
  g.n = n;
  g.adj.assign(n, 0);
  g.edges = edges;
  for (auto [u, v] : edges) {
    g.adj[u] |= 1u << v;
    g.adj[v] |= 1u << u;
  }
  return g;
}

/// Erdos-Renyi graph; with `bipartite` the vertices get random sides and only
/// cross edges are kept.
inline SmallGraph random_graph(int n, double density, bool bipartite, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5), edge(density);
  std::vector<int> side(n, 0);
  if (bipartite)
    for (auto& s : side) s = coin(rng);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if ((!bipartite || side[u] != side[v]) && edge(rng)) edges.emplace_back(u, v);
  SmallGraph g = make_graph(n, edges);
  if (bipartite) g.side = side;
  return g;
}

inline int lowest(std::uint32_t m) { return __builtin_ctz(m); }

/// Maximum matching size of the subgraph induced by `mask`.
class MatchingNumber {
 public:
  explicit MatchingNumber(const SmallGraph& g) : g_(g), memo_(std::size_t{1} << g.n, -1) {}

  int operator()(std::uint32_t mask) {
    if (mask == 0) return 0;
    int& slot = memo_[mask];
    if (slot >= 0) return slot;
    const int v = lowest(mask);
    const std::uint32_t rest = mask & ~(1u << v);
    int best = (*this)(rest);
    for (std::uint32_t nb = g_.adj[v] & rest; nb; nb &= nb - 1) {
      const int u = lowest(nb);
      best = std::max(best, 1 + (*this)(rest & ~(1u << u)));
    }
    return slot = best;
  }

 private:
  const SmallGraph& g_;
  std::vector<int> memo_;
};

/// Independence number of the subgraph induced by `mask`.
class IndependenceNumber {
 public:
  explicit IndependenceNumber(const SmallGraph& g) : g_(g), memo_(std::size_t{1} << g.n, -1) {}

  int operator()(std::uint32_t mask) {
    if (mask == 0) return 0;
    int& slot = memo_[mask];
    if (slot >= 0) return slot;
    const int v = lowest(mask);
    const std::uint32_t rest = mask & ~(1u << v);
    return slot = std::max((*this)(rest), 1 + (*this)(rest & ~g_.adj[v]));
  }

 private:
  const SmallGraph& g_;
  std::vector<int> memo_;
};

inline std::uint32_t full(int n) { return n == 32 ? ~0u : (1u << n) - 1; }

/// v lies in every maximum matching.
inline std::vector<bool> in_every_max_matching(const SmallGraph& g) {
  MatchingNumber nu(g);
  const int all = nu(full(g.n));
  std::vector<bool> out(g.n);
  for (int v = 0; v < g.n; ++v) out[v] = nu(full(g.n) & ~(1u << v)) < all;
  return out;
}

/// v lies in every maximum independent set.
inline std::vector<bool> in_every_mis(const SmallGraph& g) {
  IndependenceNumber alpha(g);
  const int all = alpha(full(g.n));
  std::vector<bool> out(g.n);
  for (int v = 0; v < g.n; ++v) out[v] = alpha(full(g.n) & ~(1u << v)) < all;
  return out;
}

/// Plain game tree of Trap: the player to move loses when stuck.
class TrapGame {
 public:
  explicit TrapGame(const SmallGraph& g) : g_(g) {}

  bool first_player_wins(int v) { return mover_wins(v, 1u << v); }

  bool mover_wins(int token, std::uint32_t visited) {
    const std::uint64_t key = (static_cast<std::uint64_t>(visited) << 5) | static_cast<std::uint64_t>(token);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool win = false;
    for (std::uint32_t nb = g_.adj[token] & ~visited; nb && !win; nb &= nb - 1) {
      const int w = lowest(nb);
      win = !mover_wins(w, visited | (1u << w));
    }
    memo_.emplace(key, win);
    return win;
  }

 private:
  const SmallGraph& g_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

/// Vicious Trap: a move may also delete any subset of the other vertices the
/// mover could have moved to.
class ViciousGame {
 public:
  explicit ViciousGame(const SmallGraph& g) : g_(g) {}

  bool first_player_wins(int v) { return mover_wins(v, 1u << v); }

  bool mover_wins(int token, std::uint32_t gone) {
    const std::uint64_t key = (static_cast<std::uint64_t>(gone) << 5) | static_cast<std::uint64_t>(token);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::uint32_t options = g_.adj[token] & ~gone;
    bool win = false;
    for (std::uint32_t nb = options; nb && !win; nb &= nb - 1) {
      const int w = lowest(nb);
      const std::uint32_t others = options & ~(1u << w);
      // every subset of the other options
      for (std::uint32_t del = others;; del = (del - 1) & others) {
        if (!mover_wins(w, gone | (1u << w) | del)) {
          win = true;
          break;
        }
        if (del == 0) break;
      }
    }
    memo_.emplace(key, win);
    return win;
  }

 private:
  const SmallGraph& g_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

/// Exact game length of Trap when the winner plays to finish fast and the loser
/// to last long. Length counts turns including the final stuck turn, so a game
/// with m moves has length m + 1. Returns {mover wins, length}.
class GameLength {
 public:
  explicit GameLength(const SmallGraph& g) : g_(g) {}

  std::pair<bool, int> value(int token, std::uint32_t visited) {
    const std::uint64_t key = (static_cast<std::uint64_t>(visited) << 5) | static_cast<std::uint64_t>(token);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool win = false;
    int best_win = 1 << 30, best_loss = 0;
    bool any = false;
    for (std::uint32_t nb = g_.adj[token] & ~visited; nb; nb &= nb - 1) {
      const int w = lowest(nb);
      any = true;
      auto [child_wins, len] = value(w, visited | (1u << w));
      if (!child_wins) {
        win = true;
        best_win = std::min(best_win, len + 1);
      } else {
        best_loss = std::max(best_loss, len + 1);
      }
    }
    std::pair<bool, int> out = !any ? std::pair{false, 1} : win ? std::pair{true, best_win} : std::pair{false, best_loss};
    memo_.emplace(key, out);
    return out;
  }

 private:
  const SmallGraph& g_;
  std::unordered_map<std::uint64_t, std::pair<bool, int>> memo_;
};

/// Kuhn's augmenting-path matching over adjacency lists; left vertices are
/// those with side 0. Returns the matching size.
inline int kuhn_matching_size(const std::vector<std::vector<int>>& adj, const std::vector<int>& side) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> mate(n, -1), seen(n, -1);
  std::function<bool(int, int)> augment = [&](int u, int stamp) {
    for (int w : adj[u]) {
      if (seen[w] == stamp) continue;
      seen[w] = stamp;
      if (mate[w] < 0 || augment(mate[w], stamp)) {
        mate[w] = u;
        mate[u] = w;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (int u = 0; u < n; ++u)
    if (side[u] == 0 && mate[u] < 0 && augment(u, u)) ++size;
  return size;
}

/// Grid graph on explicit cells (x, y) with 4-neighbor adjacency.
struct GridGraph {
  std::vector<std::pair<int, int>> cells;
  SmallGraph graph;

  int index(int x, int y) const {
    for (int k = 0; k < static_cast<int>(cells.size()); ++k)
      if (cells[k].first == x && cells[k].second == y) return k;
    return -1;
  }
};

inline GridGraph grid_graph(std::vector<std::pair<int, int>> cells) {
  GridGraph out;
  out.cells = std::move(cells);
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(out.cells.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int dx = std::abs(out.cells[a].first - out.cells[b].first);
      const int dy = std::abs(out.cells[a].second - out.cells[b].second);
      if (dx + dy == 1) edges.emplace_back(a, b);
    }
  out.graph = make_graph(n, edges);
  return out;
}

}  // namespace oracle
