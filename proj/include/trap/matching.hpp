#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trap/graph.hpp"

namespace trap {

/// Partner map over a graph's vertex ids; -1 marks an unmatched vertex.
class Matching {
 public:
  Matching() = default;
  explicit Matching(int num_vertices) : mate_(static_cast<std::size_t>(num_vertices), -1) {}

  int num_vertices() const { return static_cast<int>(mate_.size()); }
  bool matched(int v) const { return mate_[static_cast<std::size_t>(v)] >= 0; }
  int mate(int v) const { return mate_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& mates() const { return mate_; }

  /// Number of edges.
  int size() const {
    int c = 0;
    for (int m : mate_) c += m >= 0;
    return c / 2;
  }

  bool contains(int u, int v) const { return u >= 0 && mate(u) == v; }

  void match(int u, int v) {
    if (u == v) throw std::invalid_argument("cannot match a vertex to itself");
    if (matched(u) || matched(v))
      throw std::logic_error("match(" + std::to_string(u) + ", " + std::to_string(v) +
                             "): endpoint already matched");
    mate_[u] = v;
    mate_[v] = u;
  }

  void unmatch(int v) {
    const int w = mate(v);
    if (w < 0) return;
    mate_[v] = -1;
    mate_[w] = -1;
  }

  /// Edges as (u, v) with u < v, ascending by u.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < num_vertices(); ++u)
      if (mate_[u] > u) out.emplace_back(u, mate_[u]);
    return out;
  }

  /// Direct access for algorithms that maintain the invariant themselves.
  std::vector<int>& raw() { return mate_; }

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<int> mate_;
};

/// True iff the partner map is an involution along edges of `g` between alive vertices.
inline bool verify_matching(const Graph& g, const Matching& m) {
  if (m.num_vertices() != g.num_vertices()) return false;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int w = m.mate(v);
    if (w < 0) continue;
    if (w >= g.num_vertices() || w == v) return false;
    if (m.mate(w) != v) return false;
    if (!g.alive(v) || !g.alive(w) || !g.adjacent(v, w)) return false;
  }
  return true;
}

/// Removes every edge with an endpoint that is dead in `g`.
inline Matching restrict_to_alive(const Matching& m, const Graph& g) {
  Matching out = m;
  for (int v = 0; v < m.num_vertices(); ++v)
    if (out.matched(v) && (!g.alive(v) || !g.alive(out.mate(v)))) out.unmatch(v);
  return out;
}

/// Maximum-cardinality matching of a bipartite graph (Hopcroft-Karp).
///
/// Even-side vertices are the BFS roots. Vertices and neighbor lists are
/// scanned in ascending id order so the returned matching is deterministic.
/// The DFS is iterative: lattice boards produce augmenting paths far longer
/// than the call stack allows.
inline Matching hopcroft_karp(const Graph& g) {
  if (!g.bipartite()) throw std::invalid_argument("hopcroft_karp: graph is not bipartite");
  const int n = g.num_vertices();
  constexpr int kInf = std::numeric_limits<int>::max();

  std::vector<int> left;
  for (int v = 0; v < n; ++v)
    if (g.alive(v) && g.side(v) == Parity::Even && g.degree(v) > 0) left.push_back(v);

  Matching m(n);
  auto& mate = m.raw();

  // Greedy start.
  for (int u : left)
    for (int w : g.neighbors(u))
      if (mate[w] < 0) {
        mate[u] = w;
        mate[w] = u;
        break;
      }

  std::vector<int> dist(static_cast<std::size_t>(n), kInf);
  std::vector<int> queue;
  std::vector<int> stack;
  std::vector<int> cursor(static_cast<std::size_t>(n), 0);
  queue.reserve(left.size());

  while (true) {
    queue.clear();
    for (int u : left) {
      if (mate[u] < 0) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kInf;
      }
    }
    int free_layer = kInf;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      if (dist[u] >= free_layer) continue;
      for (int w : g.neighbors(u)) {
        const int x = mate[w];
        if (x < 0) {
          if (free_layer == kInf) free_layer = dist[u] + 1;
        } else if (dist[x] == kInf) {
          dist[x] = dist[u] + 1;
          queue.push_back(x);
        }
      }
    }
    if (free_layer == kInf) break;

    for (int u : left) cursor[u] = 0;
    bool augmented = false;
    for (int root : left) {
      if (mate[root] >= 0) continue;
      stack.assign(1, root);
      while (!stack.empty()) {
        const int u = stack.back();
        auto nb = g.neighbors(u);
        if (cursor[u] >= static_cast<int>(nb.size())) {
          dist[u] = kInf;
          stack.pop_back();
          continue;
        }
        const int w = nb[cursor[u]++];
        const int x = mate[w];
        if (x < 0) {
          if (dist[u] + 1 != free_layer) continue;
          // Flip the path recorded on the stack.
          for (int k = static_cast<int>(stack.size()) - 1; k >= 0; --k) {
            const int a = stack[k];
            const int b = g.neighbors(a)[cursor[a] - 1];
            mate[a] = b;
            mate[b] = a;
          }
          for (int a : stack) dist[a] = kInf;
          augmented = true;
          stack.clear();
        } else if (dist[x] == dist[u] + 1) {
          stack.push_back(x);
        }
      }
    }
    if (!augmented) break;
  }
  return m;
}

// ---------------------------------------------------------------------------

struct EssentialityReport {
  Matching matching;
  std::vector<std::uint8_t> essential;  // in every maximum matching
  std::vector<std::uint8_t> avoidable;  // matched here, unmatched in some maximum matching
  std::vector<std::uint8_t> unmatched;  // alive and unmatched here

  std::vector<int> list(const std::vector<std::uint8_t>& flags) const {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(flags.size()); ++v)
      if (flags[v]) out.push_back(v);
    return out;
  }
};

/// Splits the matched vertices of a maximum matching into essential and avoidable.
///
/// A matched vertex is avoidable iff an alternating path starting with a
/// non-matching edge leads to it from an unmatched vertex (of its own side).
/// One BFS per side; meeting an unmatched vertex on the far side means an
/// augmenting path exists, so `m` was not maximum.
inline EssentialityReport classify_essential(const Graph& g, const Matching& m) {
  if (!g.bipartite()) throw std::invalid_argument("classify_essential: graph is not bipartite");
  if (!verify_matching(g, m)) throw std::invalid_argument("classify_essential: invalid matching");
  const int n = g.num_vertices();
  EssentialityReport r{m, std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0),
                       std::vector<std::uint8_t>(n, 0)};
  std::vector<int> queue;
  for (Parity side : {Parity::Even, Parity::Odd}) {
    queue.clear();
    for (int v = 0; v < n; ++v)
      if (g.alive(v) && g.side(v) == side && !m.matched(v)) queue.push_back(v);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int b : g.neighbors(u)) {
        const int a = m.mate(b);
        if (a < 0)
          throw std::logic_error("classify_essential: augmenting path found, matching is not maximum");
        if (!r.avoidable[a]) {
          r.avoidable[a] = 1;
          queue.push_back(a);
        }
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!g.alive(v)) continue;
    if (!m.matched(v))
      r.unmatched[v] = 1;
    else if (!r.avoidable[v])
      r.essential[v] = 1;
  }
  return r;
}

inline EssentialityReport classify_essential(const Graph& g) { return classify_essential(g, hopcroft_karp(g)); }

/// Flips an alternating path (v0, v1, ..., v_{2l+1}) whose edges v0v1, v2v3, ...
/// are in `m`: those edges leave the matching and v1v2, v3v4, ... enter it,
/// so v0 and the terminal vertex end up unmatched.
inline Matching alternating_flip(const Matching& m, std::span<const int> path) {
  const std::size_t len = path.size();
  if (len < 2 || len % 2 != 0)
    throw std::invalid_argument("alternating_flip: path must have an even number of vertices (odd length)");
  std::vector<int> sorted(path.begin(), path.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("alternating_flip: path is not self-avoiding");
  for (int v : path)
    if (v < 0 || v >= m.num_vertices()) throw std::out_of_range("alternating_flip: vertex out of range");
  for (std::size_t k = 0; k + 1 < len; k += 2)
    if (m.mate(path[k]) != path[k + 1])
      throw std::invalid_argument("alternating_flip: edge " + std::to_string(k) + " of the path is not matched");
  Matching out = m;
  for (std::size_t k = 0; k + 1 < len; k += 2) out.unmatch(path[k]);
  for (std::size_t k = 1; k + 1 < len; k += 2) out.match(path[k], path[k + 1]);
  return out;
}

/// One edge per line, "u v" with u < v, ascending.
inline void write_matching(std::ostream& os, const Matching& m) {
  for (auto [u, v] : m.edges()) os << u << ' ' << v << '\n';
}

}  // namespace trap
