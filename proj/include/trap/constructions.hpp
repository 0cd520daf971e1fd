#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trap/graph.hpp"
#include "trap/lattice.hpp"
#include "trap/matching.hpp"
#include "trap/percolation.hpp"

namespace trap {

// Everything here works on diamond boards in rc coordinates. A "frame" is the
// board seen after rotating it by -90k degrees: frame-k position u is the real
// position theta^k(u). Quadrant Q^k in frame k is Q^0, so one code path serves
// all four quadrants, and the row construction in frame 1 is the column
// construction on the real board.

class DiamondView {
 public:
  DiamondView(const BoardSample& s, int frame) : s_(&s), n_(s.region.kind().n), frame_(((frame % 4) + 4) % 4) {
    if (s.region.kind().shape != Shape::Diamond) throw std::invalid_argument("expected a diamond board");
  }

  int n() const { return n_; }
  int frame() const { return frame_; }
  int top() const { return 2 * n_ - 1; }

  bool inside(RcCoord u) const {
    return std::abs(u.i) <= top() && std::abs(u.j) <= top() && ((u.i - u.j) & 1) == 0;
  }
  RcCoord to_real(RcCoord u) const { return rotate(u, frame_); }
  RcCoord from_real(RcCoord u) const { return rotate(u, -frame_); }
  RcCoord from_real(Vertex v) const { return from_real(xy_to_rc(v)); }

  /// Region id, or -1 outside the diamond.
  int id(RcCoord u) const { return inside(u) ? s_->region.id(rc_to_xy(to_real(u))) : -1; }
  int id(int i, int j) const { return id(RcCoord{i, j}); }
  bool closed(RcCoord u) const {
    const int k = id(u);
    return k >= 0 && s_->closed[k] != 0;
  }
  bool closed(int i, int j) const { return closed(RcCoord{i, j}); }

  const BoardSample& sample() const { return *s_; }

 private:
  const BoardSample* s_;
  int n_;
  int frame_;
};

inline void require_no_closed_even(const BoardSample& s, const char* who) {
  if (s.count_closed(Parity::Even) != 0)
    throw std::invalid_argument(std::string(who) + ": the board has closed even vertices");
}

// ---------------------------------------------------------------------------
// Quadrant events and matchings

/// F: every odd row of Q has a closed vertex away from both ends.
inline bool quadrant_rows_event(const DiamondView& v) {
  for (int j = 1; j <= v.top(); j += 2) {
    bool found = false;
    for (int i = 3; i <= v.top() - 2 && !found; i += 2) found = v.closed(i, j);
    if (!found) return false;
  }
  return true;
}

/// G: the rightmost column of Q has a closed vertex.
inline bool quadrant_edge_event(const DiamondView& v) {
  for (int j = 1; j <= v.top(); j += 2)
    if (v.closed(v.top(), j)) return true;
  return false;
}

struct QuadrantData {
  int k = 0;
  int n = 0;
  std::vector<int> m;    // m[j] for odd rows j of Q, else -1
  Matching matching;     // region ids; edges inside Q^k only
  bool rows_event = false;
  bool edge_event = false;

  std::vector<RcCoord> designated() const {
    std::vector<RcCoord> out;
    for (int j = 1; j < static_cast<int>(m.size()); j += 2) out.push_back({m[j], j});
    return out;
  }
};

/// Matching of Q^k that matches every odd vertex except the designated
/// closed vertex of each odd row (the rightmost closed one short of the
/// rightmost column). Each odd vertex pairs with the even row below it,
/// down-left right of the designated vertex and down-right left of it.
inline QuadrantData build_quadrant_matching(const BoardSample& s, int k) {
  const DiamondView v(s, k);
  const int n = v.n();
  if (n < 3) throw std::invalid_argument("build_quadrant_matching: needs n >= 3");
  QuadrantData q{k, n, std::vector<int>(static_cast<std::size_t>(2 * n), -1), Matching(s.region.size()),
                 quadrant_rows_event(v), quadrant_edge_event(v)};
  if (!q.rows_event)
    throw std::invalid_argument("build_quadrant_matching: some odd row of quadrant " + std::to_string(k) +
                                " has no closed vertex away from its ends");
  for (int j = 1; j <= v.top(); j += 2) {
    for (int i = v.top() - 2; i >= 3; i -= 2)
      if (v.closed(i, j)) {
        q.m[j] = i;
        break;
      }
    for (int i = 1; i <= v.top(); i += 2) {
      if (i == q.m[j]) continue;
      const int partner = i > q.m[j] ? v.id(i - 1, j - 1) : v.id(i + 1, j - 1);
      q.matching.match(v.id(i, j), partner);
    }
  }
  return q;
}

enum class CornerCase : std::uint8_t { TopLeft, TopRight };

struct CornerPath {
  CornerCase kind = CornerCase::TopLeft;
  std::vector<RcCoord> frame_path;  // coordinates in the quadrant's frame
  std::vector<int> ids;
};

namespace detail {

inline void walk_step(const DiamondView& v, const Matching& m, CornerPath& p, RcCoord next, bool matched_edge) {
  const int a = p.ids.back();
  const int b = v.id(next);
  if (b < 0) throw std::logic_error("corner path left the diamond");
  if (matched_edge != (m.mate(a) == b))
    throw std::logic_error(std::string("corner path: expected a ") + (matched_edge ? "matched" : "non-matched") +
                           " edge");
  p.frame_path.push_back(next);
  p.ids.push_back(b);
}

}  // namespace detail

/// Alternating path from a protected even vertex of Q^k (real coordinates) to
/// the top-left or top-right corner of the quadrant. The top-right kind always
/// passes through a closed vertex of the rightmost column.
inline CornerPath corner_path(const BoardSample& s, const QuadrantData& q, Vertex start) {
  const DiamondView v(s, q.k);
  const RcCoord u = v.from_real(start);
  if (!in_quadrant0(q.n, u) || parity(start) != Parity::Even)
    throw std::invalid_argument("corner_path: start is not an even vertex of quadrant " + std::to_string(q.k));
  const int top = v.top();
  const Matching& m = q.matching;

  // lowest designated vertex strictly above and right
  int jstar = -1;
  for (int j = u.j + 1; j <= top; j += 2)
    if (q.m[j] > u.i) {
      jstar = j;
      break;
    }

  CornerPath p;
  p.frame_path.push_back(u);
  p.ids.push_back(v.id(u));
  auto step = [&](int di, int dj, bool matched) {
    const RcCoord c = p.frame_path.back();
    detail::walk_step(v, m, p, {c.i + di, c.j + dj}, matched);
  };

  if (jstar >= 0) {
    p.kind = CornerCase::TopLeft;
    while (p.frame_path.back().j < jstar - 1) {
      step(+1, +1, true);
      step(-1, +1, false);
    }
    while (p.frame_path.back().i > 2) {
      step(-1, +1, true);
      step(-1, -1, false);
    }
    while (true) {
      step(-1, +1, true);
      if (p.frame_path.back().j == top) break;
      step(+1, +1, false);
    }
    return p;
  }

  bool edge_closed_above = false;
  for (int j = u.j + 1; j <= top; j += 2) edge_closed_above = edge_closed_above || v.closed(top, j);
  if (!edge_closed_above)
    throw std::invalid_argument("corner_path: start vertex has no closed vertex above and right within the quadrant");
  p.kind = CornerCase::TopRight;
  while (true) {
    step(+1, +1, true);
    if (p.frame_path.back().i == top) break;
    step(+1, -1, false);
  }
  while (p.frame_path.back().j < top) {
    step(-1, +1, false);
    step(+1, +1, true);
  }
  return p;
}

/// Continues a top-left corner path along the top edge of the next quadrant
/// (frame coordinates ⟨0,2n-2⟩, ⟨-1,2n-1⟩, ..., ⟨-2n+1,2n-1⟩).
inline void extend_along_next_quadrant(const BoardSample& s, const Matching& global, int frame, CornerPath& p) {
  const DiamondView v(s, frame);
  const int top = v.top();
  if (p.frame_path.back().i != 1 || p.frame_path.back().j != top)
    throw std::invalid_argument("extend_along_next_quadrant: path does not end at the top-left corner");
  while (p.frame_path.back().i > -top) {
    const RcCoord c = p.frame_path.back();
    detail::walk_step(v, global, p, {c.i - 1, c.j - 1}, false);
    detail::walk_step(v, global, p, {c.i - 2, c.j}, true);
  }
}

// ---------------------------------------------------------------------------
// Protection

namespace detail {

/// For each rc cell, whether the open cone in direction (si, sj) holds a closed vertex.
inline std::vector<std::uint8_t> cone_has_closed(const DiamondView& v, int si, int sj) {
  const int top = v.top();
  const int w = 2 * top + 1;
  // reach[a][b] = closed somewhere at (i', j') with si*(i'-i) >= 0 and sj*(j'-j) >= 0
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(w + 1) * (w + 1), 0);
  auto at = [&](int a, int b) -> std::uint8_t& { return reach[static_cast<std::size_t>(a) * (w + 1) + b]; };
  // a, b count steps from the far corner of the cone direction
  for (int a = w - 1; a >= 0; --a)
    for (int b = w - 1; b >= 0; --b) {
      const int i = si > 0 ? -top + a : top - a;
      const int j = sj > 0 ? -top + b : top - b;
      at(a, b) = static_cast<std::uint8_t>(v.closed(i, j) || at(a + 1, b) || at(a, b + 1));
    }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * w, 0);
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b) {
      const int i = si > 0 ? -top + a : top - a;
      const int j = sj > 0 ? -top + b : top - b;
      out[static_cast<std::size_t>(i + top) * w + (j + top)] = at(a + 1, b + 1);
    }
  return out;
}

}  // namespace detail

/// Per region id: even vertex with a closed vertex in each of the four open
/// cones around it (in rc coordinates, the four open quarter-planes).
inline std::vector<std::uint8_t> protected_mask(const BoardSample& s) {
  const DiamondView v(s, 0);
  const int top = v.top();
  const int w = 2 * top + 1;
  std::array<std::vector<std::uint8_t>, 4> cones{detail::cone_has_closed(v, +1, +1), detail::cone_has_closed(v, -1, +1),
                                                 detail::cone_has_closed(v, -1, -1), detail::cone_has_closed(v, +1, -1)};
  std::vector<std::uint8_t> out(static_cast<std::size_t>(s.region.size()), 0);
  for (int id = 0; id < s.region.size(); ++id) {
    const Vertex x = s.region.vertex(id);
    if (parity(x) != Parity::Even) continue;
    const RcCoord c = xy_to_rc(x);
    const std::size_t cell = static_cast<std::size_t>(c.i + top) * w + (c.j + top);
    out[id] = cones[0][cell] && cones[1][cell] && cones[2][cell] && cones[3][cell];
  }
  return out;
}

inline bool is_protected(const BoardSample& s, Vertex x) {
  const int id = s.region.id(x);
  if (id < 0 || parity(x) != Parity::Even) return false;
  const RcCoord c = xy_to_rc(x);
  bool cone[2][2] = {{false, false}, {false, false}};
  for (int k = 0; k < s.region.size(); ++k) {
    if (!s.closed[k]) continue;
    const RcCoord d = xy_to_rc(s.region.vertex(k));
    const int di = d.i - c.i, dj = d.j - c.j;
    if (di != 0 && dj != 0) cone[di > 0][dj > 0] = true;
  }
  return cone[0][0] && cone[0][1] && cone[1][0] && cone[1][1];
}

/// Vertices of D_n with (2n - |x+y|)(2n - |x-y|) > C' log(1/p) / p.
inline std::vector<Vertex> set_S(int n, double p, double c_prime) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("set_S: p must lie in (0, 1)");
  const double bound = c_prime * std::log(1 / p) / p;
  const Region d = build_region(RegionKind::diamond(n));
  std::vector<Vertex> out;
  for (Vertex x : d.vertices()) {
    const double a = 2.0 * n - std::abs(x.x + x.y), b = 2.0 * n - std::abs(x.x - x.y);
    if (a * b > bound) out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matchings of all open odd vertices and their protected-vertex variants

/// The union M of the four quadrant matchings, plus, for each protected even
/// vertex, the alternating path whose flip frees it.
///
/// The quadrant matchings pair lattice sites regardless of closures (closed
/// odd sites other than the designated ones are matched too); `lattice()` is
/// that matching, `base()` and `avoiding()` drop the edges at closed sites.
class GlobalMatchings {
 public:
  explicit GlobalMatchings(const BoardSample& s) : s_(&s) {
    if (s.region.kind().shape != Shape::Diamond) throw std::invalid_argument("GlobalMatchings: expected a diamond");
    require_no_closed_even(s, "GlobalMatchings");
    base_ = Matching(s.region.size());
    for (int k = 0; k < 4; ++k) {
      quadrants_[k] = build_quadrant_matching(s, k);
      if (!quadrants_[k].edge_event)
        throw std::invalid_argument("GlobalMatchings: rightmost column of quadrant " + std::to_string(k) +
                                    " has no closed vertex");
      for (auto [a, b] : quadrants_[k].matching.edges()) base_.match(a, b);
    }
    protected_ = protected_mask(s);
    open_ = drop_closed(base_);
  }

  const Matching& lattice() const { return base_; }
  const Matching& base() const { return open_; }
  const QuadrantData& quadrant(int k) const { return quadrants_[k]; }
  const std::vector<std::uint8_t>& protected_vertices() const { return protected_; }

  /// Alternating path from even vertex `id` ending at its first closed odd
  /// vertex; empty for the origin, which M already leaves unmatched.
  std::vector<int> freeing_path(int id) const {
    const Vertex x = s_->region.vertex(id);
    if (!protected_[id]) throw std::invalid_argument("freeing_path: vertex is not a protected even vertex");
    const int k = quadrant_of(s_->region.kind().n, x);
    if (k < 0) return {};
    CornerPath p = corner_path(*s_, quadrants_[k], x);
    if (p.kind == CornerCase::TopLeft) extend_along_next_quadrant(*s_, base_, k, p);
    for (std::size_t t = 1; t < p.ids.size(); t += 2)
      if (s_->closed[p.ids[t]]) {
        p.ids.resize(t + 1);
        return p.ids;
      }
    throw std::logic_error("freeing_path: alternating path from vertex " + std::to_string(id) +
                           " meets no closed vertex");
  }

  /// M_v on the open sites: matches every open odd vertex and leaves `id` unmatched.
  Matching avoiding(int id) const {
    const auto path = freeing_path(id);
    return path.empty() ? open_ : drop_closed(alternating_flip(base_, path));
  }

 private:
  Matching drop_closed(Matching m) const {
    for (int v = 0; v < m.num_vertices(); ++v)
      if (s_->closed[v]) m.unmatch(v);
    return m;
  }

  const BoardSample* s_;
  Matching base_;
  Matching open_;
  std::array<QuadrantData, 4> quadrants_;
  std::vector<std::uint8_t> protected_;
};

// ---------------------------------------------------------------------------
// Lower-bound events and row-interval matchings

/// Block size for the row construction: ceil(4 log(1/p) / log(log(1/p) / 4c)).
inline int choose_s(double p, double c) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("choose_s: p must lie in (0, 1)");
  if (!(c > 0)) throw std::invalid_argument("choose_s: c must be positive");
  const double lp = std::log(1 / p);
  const double arg = lp / (4 * c);
  if (!(arg > 1))
    throw std::domain_error("choose_s: log(1/p) / 4c = " + std::to_string(arg) + " is not above 1");
  return static_cast<int>(std::ceil(4 * lp / std::log(arg)));
}

namespace detail {

/// Closed rows per odd column of a frame, ascending.
inline std::vector<std::vector<int>> closed_by_column(const DiamondView& v) {
  const int top = v.top();
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(2 * top + 1));
  for (int i = -top; i <= top; i += 2)
    for (int j = -top; j <= top; j += 2)
      if (v.closed(i, j)) cols[i + top].push_back(j);
  return cols;
}

/// Every window of s consecutive odd rows holds at most s-1 closed vertices.
inline bool row_windows_event(const DiamondView& v, int s) {
  const int rows = 2 * v.n();
  if (s > rows) return true;
  std::vector<int> count(static_cast<std::size_t>(rows), 0);
  for (int r = 0; r < rows; ++r)
    for (int i = -v.top(); i <= v.top(); i += 2) count[r] += v.closed(i, -v.top() + 2 * r);
  int window = 0;
  for (int r = 0; r < rows; ++r) {
    window += count[r];
    if (r >= s) window -= count[r - s];
    if (r >= s - 1 && window > s - 1) return false;
  }
  return true;
}

/// No two closed vertices share a column within vertical distance < 2s.
inline bool column_gap_event(const std::vector<std::vector<int>>& cols, int s) {
  for (const auto& c : cols)
    for (std::size_t t = 1; t < c.size(); ++t)
      if (c[t] - c[t - 1] < 2 * s) return false;
  return true;
}

inline bool column_clear(const std::vector<std::vector<int>>& cols, int top, RcCoord u, int s) {
  for (int j : cols[u.i + top])
    if (j != u.j && std::abs(j - u.j) < 2 * s) return false;
  return true;
}

}  // namespace detail

struct EventFlags {
  std::array<bool, 4> rows{};   // F^k
  std::array<bool, 4> edge{};   // G^k
  bool all_quadrants = false;   // E
  int s = 0;
  bool row_windows = false;     // R
  bool row_windows_rot = false; // R'
  bool column_gaps = false;     // T
  bool column_gaps_rot = false; // T'
  std::vector<std::uint8_t> column_clear;      // X_v per region id (odd vertices)
  std::vector<std::uint8_t> column_clear_rot;  // X'_v
  bool every_odd_clear = false;
  bool lower = false;           // O

  nlohmann::json to_json() const {
    return {{"F", rows}, {"G", edge}, {"E", all_quadrants}, {"s", s}, {"R", row_windows},
            {"R_rot", row_windows_rot}, {"T", column_gaps}, {"T_rot", column_gaps_rot},
            {"every_odd_clear", every_odd_clear}, {"O", lower}};
  }
};

inline EventFlags event_flags(const BoardSample& b, int s) {
  if (s < 1) throw std::invalid_argument("event_flags: s must be positive");
  EventFlags f;
  f.s = s;
  f.all_quadrants = true;
  for (int k = 0; k < 4; ++k) {
    const DiamondView v(b, k);
    f.rows[k] = v.n() >= 3 && quadrant_rows_event(v);
    f.edge[k] = quadrant_edge_event(v);
    f.all_quadrants = f.all_quadrants && f.rows[k] && f.edge[k];
  }
  const DiamondView v0(b, 0), v1(b, 1);
  const auto cols0 = detail::closed_by_column(v0), cols1 = detail::closed_by_column(v1);
  f.row_windows = detail::row_windows_event(v0, s);
  f.row_windows_rot = detail::row_windows_event(v1, s);
  f.column_gaps = detail::column_gap_event(cols0, s);
  f.column_gaps_rot = detail::column_gap_event(cols1, s);
  f.column_clear.assign(static_cast<std::size_t>(b.region.size()), 0);
  f.column_clear_rot.assign(static_cast<std::size_t>(b.region.size()), 0);
  f.every_odd_clear = true;
  for (int id = 0; id < b.region.size(); ++id) {
    const Vertex x = b.region.vertex(id);
    if (parity(x) != Parity::Odd) continue;
    f.column_clear[id] = detail::column_clear(cols0, v0.top(), v0.from_real(x), s);
    f.column_clear_rot[id] = detail::column_clear(cols1, v1.top(), v1.from_real(x), s);
    f.every_odd_clear = f.every_odd_clear && (f.column_clear[id] || f.column_clear_rot[id]);
  }
  f.lower = f.row_windows && f.row_windows_rot && f.column_gaps && f.column_gaps_rot && f.every_odd_clear;
  return f;
}

using RcEdge = std::pair<RcCoord, RcCoord>;

/// Matching of rows a..b of D_n that matches every even vertex and avoids the
/// odd set `avoid` (at most one per column; when b is even, the top t odd rows
/// may hold at most t of them for every t).
///
/// Row by row from the bottom: in even row a+1, vertices left of the leftmost
/// avoided vertex z of row a go down-left, those right of it go down-right, or
/// up-right when down-right is avoided. Vertices taken that way in row a+2
/// join the avoided set for the next step; z itself is dropped.
inline std::vector<RcEdge> build_interval_matching(int n, int a, int b, const std::vector<RcCoord>& avoid) {
  const int top = 2 * n - 1;
  if (n < 1) throw std::invalid_argument("build_interval_matching: n must be positive");
  if ((a & 1) == 0 || a > b || a < -top || b > top)
    throw std::invalid_argument("build_interval_matching: bad row interval " + std::to_string(a) + ".." +
                                std::to_string(b));
  constexpr int kNone = std::numeric_limits<int>::min();
  std::vector<int> row_in_col(static_cast<std::size_t>(2 * top + 1), kNone);
  std::vector<int> per_row(static_cast<std::size_t>(2 * top + 1), 0);
  for (RcCoord h : avoid) {
    if ((h.i & 1) == 0 || (h.j & 1) == 0 || std::abs(h.i) > top || h.j < a || h.j > b)
      throw std::invalid_argument("build_interval_matching: avoided vertex outside the odd vertices of the interval");
    if (row_in_col[h.i + top] != kNone)
      throw std::invalid_argument("build_interval_matching: two avoided vertices in column " + std::to_string(h.i));
    row_in_col[h.i + top] = h.j;
    ++per_row[h.j + top];
  }
  if ((b & 1) == 0) {
    int seen = 0, t = 0;
    for (int j = b - 1; j >= a; j -= 2) {
      seen += per_row[j + top];
      if (seen > ++t)
        throw std::invalid_argument("build_interval_matching: top " + std::to_string(t) + " odd rows hold " +
                                    std::to_string(seen) + " avoided vertices");
    }
  }

  std::vector<RcEdge> edges;
  for (int row = a; row + 1 <= b; row += 2) {
    int leftmost = std::numeric_limits<int>::max();
    for (int i = -top; i <= top; i += 2)
      if (row_in_col[i + top] == row) {
        leftmost = i;
        break;
      }
    for (int i = -top + 1; i <= top - 1; i += 2) {
      const RcCoord u{i, row + 1};
      if (i < leftmost) {
        edges.emplace_back(u, RcCoord{i - 1, row});
      } else if (row_in_col[i + 1 + top] != row) {
        edges.emplace_back(u, RcCoord{i + 1, row});
      } else {
        if (row + 2 > b)
          throw std::logic_error("build_interval_matching: avoided vertices exceed the top-rows bound");
        edges.emplace_back(u, RcCoord{i + 1, row + 2});
        row_in_col[i + 1 + top] = row + 2;
      }
    }
  }
  return edges;
}

struct EvenMatching {
  Matching matching;       // region ids
  int frame = 0;           // 0: row blocks, 1: the rotated (column) construction
  std::vector<int> blocks; // block start rows in the frame, then the end sentinel 2n

  nlohmann::json to_json() const { return {{"frame", frame}, {"blocks", blocks}}; }
};

/// Matching of D_n covering every even vertex and avoiding `odd` and every
/// closed odd vertex. Uses the row construction when no closed vertex sits in
/// odd's column within distance < 2s, else the rotated one.
inline EvenMatching build_evens_matching_avoiding(const BoardSample& s, Vertex odd, int block_rows) {
  if (s.region.kind().shape != Shape::Diamond) throw std::invalid_argument("expected a diamond board");
  if (parity(odd) != Parity::Odd || s.region.id(odd) < 0)
    throw std::invalid_argument("build_evens_matching_avoiding: vertex is not an odd vertex of the board");
  require_no_closed_even(s, "build_evens_matching_avoiding");
  const int n = s.region.kind().n;
  const int top = 2 * n - 1;

  int frame = -1;
  for (int k : {0, 1}) {
    const DiamondView v(s, k);
    if (detail::column_clear(detail::closed_by_column(v), top, v.from_real(odd), block_rows)) {
      frame = k;
      break;
    }
  }
  if (frame < 0)
    throw std::logic_error("build_evens_matching_avoiding: closed vertices crowd both the row and column of the vertex");
  const DiamondView v(s, frame);

  std::vector<RcCoord> avoid;
  std::vector<int> per_row(static_cast<std::size_t>(2 * top + 1), 0);
  const RcCoord target = v.from_real(odd);
  for (int i = -top; i <= top; i += 2)
    for (int j = -top; j <= top; j += 2)
      if (v.closed(i, j) || RcCoord{i, j} == target) {
        avoid.push_back({i, j});
        ++per_row[j + top];
      }

  EvenMatching out{Matching(s.region.size()), frame, {-top}};
  int start = -top;
  while (true) {
    int next = 2 * n;
    int held = 0;
    for (int cand = start + 2; cand <= top; cand += 2) {
      held += per_row[cand - 2 + top];
      if (held <= (cand - start) / 2) {
        next = cand;
        break;
      }
    }
    out.blocks.push_back(next);
    std::vector<RcCoord> block_avoid;
    for (RcCoord h : avoid)
      if (h.j >= start && h.j <= next - 1) block_avoid.push_back(h);
    for (auto [e, o] : build_interval_matching(n, start, next - 1, block_avoid)) out.matching.match(v.id(e), v.id(o));
    if (next == 2 * n) break;
    start = next;
  }
  return out;
}

}  // namespace trap
