#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trap/lattice.hpp"

namespace trap {

/// Undirected simple graph over dense ids 0..N-1 in compressed adjacency form.
///
/// A vertex may be dead (for example a closed lattice site): dead vertices keep
/// their id but have no edges. Neighbor lists are sorted ascending, which fixes
/// the canonical iteration order used by every algorithm. Sides (parities) are
/// either supplied or found by 2-colouring; `bipartite()` is false when neither
/// works.
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(int n, std::span<const std::pair<int, int>> edges,
                          std::vector<Parity> sides = {}, std::vector<std::uint8_t> alive = {}) {
    Graph g;
    g.alive_ = alive.empty() ? std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1) : std::move(alive);
    if (static_cast<int>(g.alive_.size()) != n) throw std::invalid_argument("alive mask size mismatch");
    std::vector<int> degree(static_cast<std::size_t>(n) + 1, 0);
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loops are not allowed");
      if (!g.alive_[u] || !g.alive_[v]) continue;
      ++degree[u + 1];
      ++degree[v + 1];
    }
    for (int k = 0; k < n; ++k) degree[k + 1] += degree[k];
    g.offsets_ = degree;
    g.targets_.assign(static_cast<std::size_t>(g.offsets_[n]), 0);
    std::vector<int> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : edges) {
      if (!g.alive_[u] || !g.alive_[v]) continue;
      g.targets_[fill[u]++] = v;
      g.targets_[fill[v]++] = u;
    }
    for (int k = 0; k < n; ++k) {
      auto first = g.targets_.begin() + g.offsets_[k];
      auto last = g.targets_.begin() + g.offsets_[k + 1];
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last) throw std::invalid_argument("duplicate edge");
    }
    g.assign_sides(std::move(sides));
    return g;
  }

  int num_vertices() const { return static_cast<int>(alive_.size()); }
  int num_alive() const { return static_cast<int>(std::count(alive_.begin(), alive_.end(), 1)); }
  bool alive(int v) const { return alive_[static_cast<std::size_t>(v)] != 0; }
  const std::vector<std::uint8_t>& alive_mask() const { return alive_; }

  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  bool adjacent(int u, int v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool bipartite() const { return !sides_.empty(); }
  Parity side(int v) const {
    if (sides_.empty()) throw std::logic_error("graph is not bipartite");
    return sides_[static_cast<std::size_t>(v)];
  }
  const std::vector<Parity>& sides() const { return sides_; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(num_edges());
    for (int u = 0; u < num_vertices(); ++u)
      for (int v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Same id space with only the vertices flagged in `keep` (and alive here) left alive.
  Graph induced(std::span<const std::uint8_t> keep) const {
    std::vector<std::uint8_t> alive(alive_.size());
    for (std::size_t k = 0; k < alive.size(); ++k) alive[k] = alive_[k] && keep[k];
    auto es = edges();
    return from_edges(num_vertices(), es, sides_, std::move(alive));
  }

  /// Alive vertices in the connected component of `v`, in BFS order from `v`.
  std::vector<int> component(int v) const {
    std::vector<int> out;
    if (!alive(v)) return out;
    std::vector<std::uint8_t> seen(alive_.size(), 0);
    out.push_back(v);
    seen[v] = 1;
    for (std::size_t head = 0; head < out.size(); ++head)
      for (int w : neighbors(out[head]))
        if (!seen[w]) {
          seen[w] = 1;
          out.push_back(w);
        }
    return out;
  }

 private:
  void assign_sides(std::vector<Parity> sides) {
    const int n = num_vertices();
    if (!sides.empty()) {
      if (static_cast<int>(sides.size()) != n) throw std::invalid_argument("side vector size mismatch");
      for (int u = 0; u < n; ++u)
        for (int v : neighbors(u))
          if (sides[u] == sides[v]) throw std::invalid_argument("edge joins two vertices of the same side");
      sides_ = std::move(sides);
      return;
    }
    std::vector<int> colour(static_cast<std::size_t>(n), -1);
    std::vector<int> queue;
    for (int s = 0; s < n; ++s) {
      if (colour[s] >= 0) continue;
      colour[s] = 0;
      queue.assign(1, s);
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v : neighbors(u)) {
          if (colour[v] < 0) {
            colour[v] = 1 - colour[u];
            queue.push_back(v);
          } else if (colour[v] == colour[u]) {
            return;  // odd cycle: leave sides_ empty
          }
        }
      }
    }
    sides_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) sides_[v] = colour[v] == 0 ? Parity::Even : Parity::Odd;
  }

  std::vector<std::uint8_t> alive_;
  std::vector<int> offsets_{0};
  std::vector<int> targets_;
  std::vector<Parity> sides_;
};

/// Lattice graph of a region, with lattice parities as sides. Vertices whose
/// `closed` flag is set are dead.
inline Graph region_graph(const Region& region, std::span<const std::uint8_t> closed = {}) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(region.size()) * 2);
  for (int u = 0; u < region.size(); ++u) {
    const Vertex v = region.vertex(u);
    for (Vertex step : {Vertex{1, 0}, Vertex{0, 1}}) {
      const int w = region.id(v + step);
      if (w >= 0) edges.emplace_back(u, w);
    }
  }
  std::vector<Parity> sides(static_cast<std::size_t>(region.size()));
  for (int u = 0; u < region.size(); ++u) sides[u] = parity(region.vertex(u));
  std::vector<std::uint8_t> alive(static_cast<std::size_t>(region.size()), 1);
  if (!closed.empty())
    for (int u = 0; u < region.size(); ++u) alive[u] = closed[u] ? 0 : 1;
  return Graph::from_edges(region.size(), edges, std::move(sides), std::move(alive));
}

}  // namespace trap
