#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trap/game.hpp"
#include "trap/graph.hpp"
#include "trap/rng.hpp"

namespace trap {

// ---------------------------------------------------------------------------
// Boxes in Z^d

/// Integer box [0, dims[0]) x ... x [0, dims[d-1]), row-major with the last axis fastest.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 4) throw std::invalid_argument("Box: dimension must be 1..4");
    size_ = 1;
    for (int w : dims_) {
      if (w < 1) throw std::invalid_argument("Box: side lengths must be positive");
      size_ *= static_cast<std::size_t>(w);
    }
    stride_.assign(dims_.size(), 1);
    for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k) stride_[k] = stride_[k + 1] * dims_[k + 1];
  }

  static Box cube(int d, int side) { return Box(std::vector<int>(static_cast<std::size_t>(d), side)); }

  int d() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  bool contains(std::span<const int> c) const {
    for (int k = 0; k < d(); ++k)
      if (c[k] < 0 || c[k] >= dims_[k]) return false;
    return true;
  }
  std::size_t index(std::span<const int> c) const {
    std::size_t idx = 0;
    for (int k = 0; k < d(); ++k) idx += static_cast<std::size_t>(c[k]) * stride_[k];
    return idx;
  }
  std::vector<int> coords(std::size_t idx) const {
    std::vector<int> c(dims_.size());
    for (int k = 0; k < d(); ++k) {
      c[k] = static_cast<int>(idx / stride_[k]);
      idx %= stride_[k];
    }
    return c;
  }
  int coord(std::size_t idx, int axis) const { return static_cast<int>(idx / stride_[axis] % dims_[axis]); }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Bootstrap closure

enum class BootstrapRule : std::uint8_t {
  /// A unit hypercube u + {0,1}^d with all but one vertex occupied fills the last one.
  Frobose,
  /// Experimental: on odd sites of Z^d, an even site with all but one of its
  /// 2d odd neighbors occupied fills the last neighbor. Even sites never fill.
  OddNeighbors,
};

inline constexpr std::uint32_t kNever = std::numeric_limits<std::uint32_t>::max();

/// Occupation times T(v) of a bootstrap run confined to a box; kNever marks
/// sites that stay empty.
struct BootstrapField {
  Box box;
  BootstrapRule rule = BootstrapRule::Frobose;
  std::vector<std::uint32_t> time;

  bool occupied(std::size_t idx) const { return time[idx] != kNever; }
  /// Whether every site the rule can fill is occupied.
  bool full() const {
    for (std::size_t k = 0; k < time.size(); ++k)
      if (time[k] == kNever && fillable(k)) return false;
    return true;
  }
  bool fillable(std::size_t idx) const { return rule == BootstrapRule::Frobose || coord_sum_odd(idx); }
  bool coord_sum_odd(std::size_t idx) const {
    int s = 0;
    for (int k = 0; k < box.d(); ++k) s += box.coord(idx, k);
    return (s & 1) != 0;
  }
  std::uint32_t max_time() const {
    std::uint32_t m = 0;
    for (auto t : time)
      if (t != kNever) m = std::max(m, t);
    return m;
  }
};

namespace detail {

/// Cells are the sets whose "all but one occupied" triggers the rule: unit
/// hypercubes (indexed by their low corner) or even sites with their odd
/// neighbors.
struct CellSystem {
  const Box* box;
  BootstrapRule rule;

  bool cell_valid(std::size_t anchor) const {
    const int d = box->d();
    if (rule == BootstrapRule::Frobose) {
      for (int k = 0; k < d; ++k)
        if (box->coord(anchor, k) + 1 >= box->dims()[k]) return false;
      return true;
    }
    int s = 0;
    for (int k = 0; k < d; ++k) {
      const int c = box->coord(anchor, k);
      if (c == 0 || c + 1 >= box->dims()[k]) return false;
      s += c;
    }
    return (s & 1) == 0;
  }

  template <class F>
  void members(std::size_t anchor, F&& f) const {
    const int d = box->d();
    if (rule == BootstrapRule::Frobose) {
      for (int mask = 0; mask < (1 << d); ++mask) {
        std::size_t idx = anchor;
        for (int k = 0; k < d; ++k)
          if (mask >> k & 1) idx += box->stride(k);
        f(idx);
      }
      return;
    }
    for (int k = 0; k < d; ++k) {
      f(anchor - box->stride(k));
      f(anchor + box->stride(k));
    }
  }

  template <class F>
  void cells_containing(std::size_t v, F&& f) const {
    const int d = box->d();
    if (rule == BootstrapRule::Frobose) {
      for (int mask = 0; mask < (1 << d); ++mask) {
        std::size_t idx = v;
        bool ok = true;
        for (int k = 0; k < d && ok; ++k)
          if (mask >> k & 1) {
            if (box->coord(v, k) == 0) ok = false;
            else idx -= box->stride(k);
          }
        if (ok && cell_valid(idx)) f(idx);
      }
      return;
    }
    for (int k = 0; k < d; ++k) {
      const int c = box->coord(v, k);
      if (c > 0 && cell_valid(v - box->stride(k))) f(v - box->stride(k));
      if (c + 1 < box->dims()[k] && cell_valid(v + box->stride(k))) f(v + box->stride(k));
    }
  }

  int cell_size() const { return rule == BootstrapRule::Frobose ? 1 << box->d() : 2 * box->d(); }
};

}  // namespace detail

/// Bootstrap closure of `initial` inside `box`, with exact first-occupation
/// times. Runs round by round; only cells touching a site filled in the
/// previous round can fire in the next.
inline BootstrapField frobose_closure(const Box& box, std::span<const std::uint8_t> initial,
                                      BootstrapRule rule = BootstrapRule::Frobose) {
  if (initial.size() != box.size()) throw std::invalid_argument("frobose_closure: initial set size mismatch");
  BootstrapField f{box, rule, std::vector<std::uint32_t>(box.size(), kNever)};
  const detail::CellSystem cells{&f.box, rule};
  std::vector<std::size_t> frontier, next;
  for (std::size_t k = 0; k < box.size(); ++k)
    if (initial[k] && f.fillable(k)) {
      f.time[k] = 0;
      frontier.push_back(k);
    }
  std::vector<std::uint32_t> seen_round(box.size(), kNever);
  const int need = cells.cell_size() - 1;
  for (std::uint32_t t = 1; !frontier.empty(); ++t) {
    next.clear();
    for (std::size_t v : frontier)
      cells.cells_containing(v, [&](std::size_t c) {
        if (seen_round[c] == t) return;
        seen_round[c] = t;
        int count = 0;
        std::size_t missing = 0;
        cells.members(c, [&](std::size_t m) {
          if (f.time[m] != kNever && f.time[m] < t) ++count;
          else missing = m;
        });
        if (count == need && f.time[missing] == kNever) {
          f.time[missing] = t;
          next.push_back(missing);
        }
      });
    std::swap(frontier, next);
  }
  return f;
}

/// Checks the defining recurrence at every site: T(v) = 0 iff initially
/// occupied, and T(v) = t > 0 iff t is one more than the earliest time at which
/// some cell containing v had all its other members occupied.
inline bool audit_times(const BootstrapField& f, std::span<const std::uint8_t> initial) {
  const detail::CellSystem cells{&f.box, f.rule};
  for (std::size_t v = 0; v < f.box.size(); ++v) {
    if (!f.fillable(v)) {
      if (f.time[v] != kNever) return false;
      continue;
    }
    if (initial[v]) {
      if (f.time[v] != 0) return false;
      continue;
    }
    std::uint32_t best = kNever;
    cells.cells_containing(v, [&](std::size_t c) {
      std::uint32_t latest = 0;
      bool complete = true;
      cells.members(c, [&](std::size_t m) {
        if (m == v) return;
        if (f.time[m] == kNever) complete = false;
        else latest = std::max(latest, f.time[m]);
      });
      if (complete) best = std::min(best, latest + 1);
    });
    if (f.time[v] != best) return false;
  }
  return true;
}

/// True iff the box fills up from the initially occupied sites inside it.
inline bool internally_spanned(const Box& box, std::span<const std::uint8_t> initial,
                               BootstrapRule rule = BootstrapRule::Frobose) {
  return frobose_closure(box, initial, rule).full();
}

inline std::vector<std::uint8_t> random_occupation(const Box& box, double p, std::uint64_t seed,
                                                   std::uint64_t trial = 0) {
  check_probability(p, "p");
  Rng rng(seed, trial);
  std::vector<std::uint8_t> x(box.size());
  for (auto& v : x) v = rng.uniform() < p;
  return x;
}

// ---------------------------------------------------------------------------
// Body-centered lattice windows
//
// Vertices of the body-centered lattice have all coordinates odd (odd
// vertices) or all even (even vertices), with neighbors at sup-distance 1.
// Odd vertices lo + 2a, a in [0, width)^d, form a copy of a Z^d box; even
// vertex lo + 2b + 1, b in [0, width-1)^d, is adjacent exactly to the odd unit
// hypercube b + {0,1}^d.

struct BccWindow {
  int d = 2;
  int width = 0;
  std::vector<int> lo;  // real coordinates of odd index 0 (all odd)
  Box odd;
  Box even;
  std::vector<std::uint8_t> odd_closed;
  std::vector<std::uint8_t> even_closed;
  double p = 0;
  double q = 0;
  std::uint64_t seed = 0;

  /// Graph ids: odd sites first, then even sites.
  int odd_id(std::size_t a) const { return static_cast<int>(a); }
  int even_id(std::size_t b) const { return static_cast<int>(odd.size() + b); }
  bool is_odd_id(int v) const { return static_cast<std::size_t>(v) < odd.size(); }

  std::vector<int> real_coords(int v) const {
    std::vector<int> c;
    if (is_odd_id(v)) {
      c = odd.coords(static_cast<std::size_t>(v));
      for (int k = 0; k < d; ++k) c[k] = lo[k] + 2 * c[k];
    } else {
      c = even.coords(static_cast<std::size_t>(v) - odd.size());
      for (int k = 0; k < d; ++k) c[k] = lo[k] + 2 * c[k] + 1;
    }
    return c;
  }
};

/// Samples a window; one uniform per odd site, then one per even site, each in index order.
inline BccWindow sample_bcc(int d, int width, std::vector<int> lo, double p, double q, std::uint64_t seed,
                            std::uint64_t trial = 0) {
  if (d < 2 || d > 4) throw std::invalid_argument("sample_bcc: d must be 2, 3 or 4");
  if (width < 2) throw std::invalid_argument("sample_bcc: width must be at least 2");
  if (static_cast<int>(lo.size()) != d) throw std::invalid_argument("sample_bcc: lo has the wrong dimension");
  for (int c : lo)
    if ((c & 1) == 0) throw std::invalid_argument("sample_bcc: lo must be an odd vertex");
  check_probability(p, "p");
  check_probability(q, "q");
  BccWindow w{d, width, std::move(lo), Box::cube(d, width), Box::cube(d, width - 1), {}, {}, p, q, seed};
  Rng rng(seed, trial);
  w.odd_closed.resize(w.odd.size());
  for (auto& c : w.odd_closed) c = rng.uniform() < p;
  w.even_closed.resize(w.even.size());
  for (auto& c : w.even_closed) c = rng.uniform() < q;
  return w;
}

/// Open subgraph of a window (closed sites dead). Sides: odd ids Odd, even ids Even.
inline Graph bcc_graph(const BccWindow& w) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(w.even.size() * (std::size_t{1} << w.d));
  for (std::size_t b = 0; b < w.even.size(); ++b)
    for (int mask = 0; mask < (1 << w.d); ++mask) {
      std::size_t a = 0;
      for (int k = 0; k < w.d; ++k) a += static_cast<std::size_t>(w.even.coord(b, k) + (mask >> k & 1)) * w.odd.stride(k);
      edges.emplace_back(w.odd_id(a), w.even_id(b));
    }
  const int n = static_cast<int>(w.odd.size() + w.even.size());
  std::vector<Parity> sides(static_cast<std::size_t>(n), Parity::Even);
  std::vector<std::uint8_t> alive(static_cast<std::size_t>(n), 1);
  for (std::size_t a = 0; a < w.odd.size(); ++a) {
    sides[a] = Parity::Odd;
    alive[a] = !w.odd_closed[a];
  }
  for (std::size_t b = 0; b < w.even.size(); ++b) alive[w.odd.size() + b] = !w.even_closed[b];
  return Graph::from_edges(n, edges, std::move(sides), std::move(alive));
}

/// The box with odd part u + 2[1,n]^d and the even sites all of whose
/// neighbors lie in it, located by window index of its lowest odd site.
struct BccBoxIndex {
  std::vector<int> first;  // odd index of u + 2(1,...,1)
  int n = 0;

  bool contains_odd(const Box& odd, std::size_t a) const {
    for (int k = 0; k < static_cast<int>(first.size()); ++k) {
      const int c = odd.coord(a, k);
      if (c < first[k] || c >= first[k] + n) return false;
    }
    return true;
  }
  bool contains_even(const Box& even, std::size_t b) const {
    for (int k = 0; k < static_cast<int>(first.size()); ++k) {
      const int c = even.coord(b, k);
      if (c < first[k] || c >= first[k] + n - 1) return false;
    }
    return true;
  }
};

inline BccBoxIndex locate_box(const BccWindow& w, std::span<const int> u, int n) {
  if (n < 1) throw std::invalid_argument("box side must be positive");
  if (static_cast<int>(u.size()) != w.d) throw std::invalid_argument("box corner has the wrong dimension");
  BccBoxIndex box{std::vector<int>(static_cast<std::size_t>(w.d)), n};
  for (int k = 0; k < w.d; ++k) {
    if ((u[k] & 1) == 0) throw std::invalid_argument("box corner must be an odd vertex");
    box.first[k] = (u[k] - w.lo[k]) / 2 + 1;
    if (box.first[k] < 0 || box.first[k] + n > w.width)
      throw std::out_of_range("box is not contained in the sampled window");
  }
  return box;
}

struct GoodBoxReport {
  BccBoxIndex box;
  bool even_all_open = false;
  bool odd_spanned = false;
  bool good = false;
  BootstrapField field;  // closure of the closed odd sites of the box, in box coordinates

  /// Occupation time of an odd window site inside the box.
  std::uint32_t time_of(const Box& odd, std::size_t a) const {
    std::vector<int> c(box.first.size());
    for (int k = 0; k < static_cast<int>(c.size()); ++k) c[k] = odd.coord(a, k) - box.first[k];
    return field.time[field.box.index(c)];
  }
};

inline GoodBoxReport good_box(const BccWindow& w, std::span<const int> u, int n) {
  GoodBoxReport r;
  r.box = locate_box(w, u, n);
  const Box local = Box::cube(w.d, n);
  std::vector<std::uint8_t> initial(local.size());
  std::vector<int> c(static_cast<std::size_t>(w.d));
  for (std::size_t k = 0; k < local.size(); ++k) {
    for (int a = 0; a < w.d; ++a) c[a] = local.coord(k, a) + r.box.first[a];
    initial[k] = w.odd_closed[w.odd.index(c)];
  }
  r.even_all_open = true;
  if (n >= 2) {
    const Box inner = Box::cube(w.d, n - 1);
    for (std::size_t k = 0; k < inner.size() && r.even_all_open; ++k) {
      for (int a = 0; a < w.d; ++a) c[a] = inner.coord(k, a) + r.box.first[a];
      r.even_all_open = !w.even_closed[w.even.index(c)];
    }
  }
  r.field = frobose_closure(local, initial);
  r.odd_spanned = r.field.full();
  r.good = r.even_all_open && r.odd_spanned;
  return r;
}

/// Eve's strategy inside a good box: from odd v with T(v) = t, move to an
/// even neighbor inside the box whose other neighbors all have T < t. Odin's
/// reply then lands on a site of strictly smaller T, so the token never
/// leaves the box and Eve moves at most T(start) times.
class EveBoxStrategy {
 public:
  EveBoxStrategy(const BccWindow& w, const Graph& g, const GoodBoxReport& report)
      : w_(&w), g_(&g), r_(&report) {
    if (!report.good) throw std::invalid_argument("EveBoxStrategy: box is not good");
  }

  int operator()(const Position& pos) const {
    if (!w_->is_odd_id(pos.token) || !r_->box.contains_odd(w_->odd, static_cast<std::size_t>(pos.token)))
      throw std::logic_error("EveBoxStrategy: token is not on an odd site of the box");
    const std::uint32_t t = r_->time_of(w_->odd, static_cast<std::size_t>(pos.token));
    for (int e : g_->neighbors(pos.token)) {
      if (pos.visited[e]) continue;
      const std::size_t b = static_cast<std::size_t>(e) - w_->odd.size();
      if (!r_->box.contains_even(w_->even, b)) continue;
      bool drops = true;
      // closed neighbors are dead in the graph, so scan the hypercube directly
      for (int mask = 0; mask < (1 << w_->d) && drops; ++mask) {
        std::size_t a = 0;
        for (int k = 0; k < w_->d; ++k) a += static_cast<std::size_t>(w_->even.coord(b, k) + (mask >> k & 1)) * w_->odd.stride(k);
        if (static_cast<int>(a) != pos.token && r_->time_of(w_->odd, a) >= t) drops = false;
      }
      if (drops) return e;
    }
    throw std::logic_error("EveBoxStrategy: no even neighbor lowers the occupation time");
  }

 private:
  const BccWindow* w_;
  const Graph* g_;
  const GoodBoxReport* r_;
};

// ---------------------------------------------------------------------------
// Renormalization around the origin

/// Boxes B(x) = box with corner iota + 2n x (iota = all ones) for x in
/// [-R, R]^d; K is the star-lattice component of 0 among {x : B(x) not good} + {0};
/// S is the union of K's boxes and the even sites next to them.
struct RenormalizedComponent {
  int d = 2;
  int n = 0;
  int radius = 0;
  BccWindow window;
  Box grid;                           // box coordinates x + R
  std::vector<std::uint8_t> good;     // per grid cell
  std::vector<std::uint8_t> in_component;
  std::vector<std::uint8_t> odd_in_S, even_in_S;  // per window site
  bool truncated = false;
  std::size_t component_size = 0;

  std::size_t box_of_odd(std::size_t a) const {
    std::vector<int> x(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const int c = window.odd.coord(a, k);
      if (c == 0) return grid.size();
      x[k] = (c - 1) / n;
    }
    return grid.index(x);
  }
};

inline RenormalizedComponent renormalized_component(int d, int n, int radius, double p, double q, std::uint64_t seed,
                                                    std::uint64_t trial = 0) {
  if (d != 2 && d != 3) throw std::invalid_argument("renormalized_component: d must be 2 or 3");
  if (n < 2 || radius < 1) throw std::invalid_argument("renormalized_component: need n >= 2 and radius >= 1");
  RenormalizedComponent rc;
  rc.d = d;
  rc.n = n;
  rc.radius = radius;
  rc.window = sample_bcc(d, (2 * radius + 1) * n + 1, std::vector<int>(static_cast<std::size_t>(d), 1 - 2 * radius * n),
                         p, q, seed, trial);
  rc.grid = Box::cube(d, 2 * radius + 1);
  rc.good.assign(rc.grid.size(), 0);
  std::vector<int> corner(static_cast<std::size_t>(d));
  for (std::size_t g = 0; g < rc.grid.size(); ++g) {
    for (int k = 0; k < d; ++k) corner[k] = 1 + 2 * n * (rc.grid.coord(g, k) - radius);
    rc.good[g] = good_box(rc.window, corner, n).good;
  }

  // star-lattice component of the origin
  rc.in_component.assign(rc.grid.size(), 0);
  std::vector<int> c0(static_cast<std::size_t>(d), radius);
  std::vector<std::size_t> queue{rc.grid.index(c0)};
  rc.in_component[queue[0]] = 1;
  std::vector<int> x(static_cast<std::size_t>(d));
  int offsets = 1;
  for (int k = 0; k < d; ++k) offsets *= 3;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t g = queue[head];
    for (int k = 0; k < d; ++k) {
      const int c = rc.grid.coord(g, k);
      if (c == 0 || c == 2 * radius) rc.truncated = true;
    }
    for (int o = 0; o < offsets; ++o) {
      bool ok = true;
      for (int k = 0, r = o; k < d; ++k, r /= 3) {
        x[k] = rc.grid.coord(g, k) + r % 3 - 1;
        ok = ok && x[k] >= 0 && x[k] <= 2 * radius;
      }
      if (!ok) continue;
      const std::size_t h = rc.grid.index(x);
      if (rc.in_component[h] || rc.good[h]) continue;
      rc.in_component[h] = 1;
      queue.push_back(h);
    }
  }
  rc.component_size = queue.size();

  rc.odd_in_S.assign(rc.window.odd.size(), 0);
  rc.even_in_S.assign(rc.window.even.size(), 0);
  for (std::size_t a = 0; a < rc.window.odd.size(); ++a) {
    const std::size_t g = rc.box_of_odd(a);
    rc.odd_in_S[a] = g < rc.grid.size() && rc.in_component[g];
  }
  for (std::size_t b = 0; b < rc.window.even.size(); ++b)
    for (int mask = 0; mask < (1 << d) && !rc.even_in_S[b]; ++mask) {
      std::size_t a = 0;
      for (int k = 0; k < d; ++k) a += static_cast<std::size_t>(rc.window.even.coord(b, k) + (mask >> k & 1)) * rc.window.odd.stride(k);
      rc.even_in_S[b] = rc.odd_in_S[a];
    }
  return rc;
}

/// Every step out of S lands on an odd site of a good box. Exhaustive over the
/// boundary of S; meaningless (returns false) when the component was truncated.
inline bool contour_holds(const RenormalizedComponent& rc) {
  if (rc.truncated) return false;
  const auto& w = rc.window;
  for (std::size_t b = 0; b < w.even.size(); ++b) {
    if (!rc.even_in_S[b]) continue;
    for (int mask = 0; mask < (1 << rc.d); ++mask) {
      std::size_t a = 0;
      for (int k = 0; k < rc.d; ++k) a += static_cast<std::size_t>(w.even.coord(b, k) + (mask >> k & 1)) * w.odd.stride(k);
      if (rc.odd_in_S[a]) continue;
      const std::size_t g = rc.box_of_odd(a);
      if (g >= rc.grid.size() || !rc.good[g]) return false;
    }
  }
  return true;
}

/// Random walks from the origin's box until they leave S; each exit must land
/// on an odd site of a good box. Returns the number of failed probes.
inline int contour_probes(const RenormalizedComponent& rc, int probes, std::uint64_t seed) {
  const auto& w = rc.window;
  const Graph g = [&] {
    BccWindow open = w;
    std::fill(open.odd_closed.begin(), open.odd_closed.end(), 0);
    std::fill(open.even_closed.begin(), open.even_closed.end(), 0);
    return bcc_graph(open);
  }();
  auto in_S = [&](int v) {
    return w.is_odd_id(v) ? rc.odd_in_S[static_cast<std::size_t>(v)] != 0
                          : rc.even_in_S[static_cast<std::size_t>(v) - w.odd.size()] != 0;
  };
  std::vector<int> iota_idx(static_cast<std::size_t>(rc.d));
  for (int k = 0; k < rc.d; ++k) iota_idx[k] = rc.radius * rc.n + 1;
  const int start = w.odd_id(w.odd.index(iota_idx));
  Rng rng(seed);
  int failures = 0;
  for (int t = 0; t < probes; ++t) {
    int v = start;
    for (int steps = 0; in_S(v) && steps < 1'000'000; ++steps) {
      auto nb = g.neighbors(v);
      v = nb[rng.below(nb.size())];
    }
    if (in_S(v)) continue;
    if (!w.is_odd_id(v)) {
      ++failures;
      continue;
    }
    const std::size_t box = rc.box_of_odd(static_cast<std::size_t>(v));
    if (box >= rc.grid.size() || !rc.good[box]) ++failures;
  }
  return failures;
}

}  // namespace trap
