#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace trap {

enum class Parity : std::uint8_t { Even, Odd };

inline Parity opposite(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

/// A point of the square lattice Z^2.
struct Vertex {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
  friend constexpr Vertex operator+(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vertex operator-(Vertex a, Vertex b) { return {a.x - b.x, a.y - b.y}; }
};

inline Parity parity(Vertex v) { return ((v.x + v.y) & 1) != 0 ? Parity::Odd : Parity::Even; }

inline int l1_norm(Vertex v) { return std::abs(v.x) + std::abs(v.y); }

/// Anticlockwise rotation by 90 degrees about the origin, applied k times.
inline Vertex rotate(Vertex v, int k = 1) {
  k = ((k % 4) + 4) % 4;
  for (int t = 0; t < k; ++t) v = {-v.y, v.x};
  return v;
}

inline constexpr std::array<Vertex, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// ---------------------------------------------------------------------------
// Diamond row/column coordinates.
//
// Column C_i = {x + y = i}, row R_j = {y - x = j}. A column and a row meet
// only when i and j share parity, in the vertex <i,j> = ((i-j)/2, (i+j)/2).
// In these coordinates D_n is the square |i|, |j| <= 2n-1.

struct RcCoord {
  int i = 0;
  int j = 0;

  friend constexpr auto operator<=>(const RcCoord&, const RcCoord&) = default;
};

inline Vertex rc_to_xy(int i, int j) {
  if (((i - j) & 1) != 0)
    throw std::invalid_argument("rc_to_xy: column " + std::to_string(i) + " and row " +
                                std::to_string(j) + " have different parity");
  return {(i - j) / 2, (i + j) / 2};
}

inline Vertex rc_to_xy(RcCoord c) { return rc_to_xy(c.i, c.j); }

inline RcCoord xy_to_rc(Vertex v) { return {v.x + v.y, v.y - v.x}; }

/// theta<i,j> = <-j,i>, the same rotation as rotate() expressed in rc coordinates.
inline RcCoord rotate(RcCoord c, int k = 1) {
  k = ((k % 4) + 4) % 4;
  for (int t = 0; t < k; ++t) c = {-c.j, c.i};
  return c;
}

// ---------------------------------------------------------------------------
// Regions

enum class Shape : std::uint8_t {
  Diamond,
  OddBoundarySquare,
  EvenBoundarySquare,
  PlainSquare,
  BccBox,
  Custom,
};

inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::Diamond: return "diamond";
    case Shape::OddBoundarySquare: return "odd-square";
    case Shape::EvenBoundarySquare: return "even-square";
    case Shape::PlainSquare: return "square";
    case Shape::BccBox: return "bcc-box";
    case Shape::Custom: return "custom";
  }
  return "?";
}

inline Shape shape_from_string(const std::string& s) {
  for (Shape k : {Shape::Diamond, Shape::OddBoundarySquare, Shape::EvenBoundarySquare,
                  Shape::PlainSquare, Shape::BccBox, Shape::Custom})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown region kind '" + s + "'");
}

/// Descriptor of a region. `u` is only used by body-centered boxes (odd corner).
struct RegionKind {
  Shape shape = Shape::Diamond;
  int n = 1;
  int d = 2;
  std::vector<int> u{};

  static RegionKind diamond(int n) { return {Shape::Diamond, n, 2, {}}; }
  static RegionKind odd_square(int n) { return {Shape::OddBoundarySquare, n, 2, {}}; }
  static RegionKind even_square(int n) { return {Shape::EvenBoundarySquare, n, 2, {}}; }
  static RegionKind square(int n) { return {Shape::PlainSquare, n, 2, {}}; }
  static RegionKind bcc_box(std::vector<int> u, int n, int d) {
    return {Shape::BccBox, n, d, std::move(u)};
  }

  friend bool operator==(const RegionKind&, const RegionKind&) = default;
};

inline void to_json(nlohmann::json& j, const RegionKind& k) {
  j = nlohmann::json{{"kind", to_string(k.shape)}, {"n", k.n}, {"d", k.d}};
  if (!k.u.empty()) j["u"] = k.u;
}

inline void from_json(const nlohmann::json& j, RegionKind& k) {
  k.shape = shape_from_string(j.at("kind").get<std::string>());
  k.n = j.at("n").get<int>();
  k.d = j.value("d", 2);
  k.u = j.value("u", std::vector<int>{});
}

struct BoundingBox {
  int xmin = 0, xmax = -1, ymin = 0, ymax = -1;

  int width() const { return xmax - xmin + 1; }
  int height() const { return ymax - ymin + 1; }
  bool contains(Vertex v) const { return v.x >= xmin && v.x <= xmax && v.y >= ymin && v.y <= ymax; }
};

/// Immutable finite vertex set of Z^2 with dense ids.
///
/// Ids follow the canonical order: row-major over the bounding box, y
/// ascending, then x ascending. Membership and id lookup are O(1) through a
/// dense table over the bounding box. Adjacency is ||u - v||_1 = 1 restricted
/// to the region.
class Region {
 public:
  Region() = default;

  Region(RegionKind kind, std::vector<Vertex> vertices) : kind_(std::move(kind)) {
    std::sort(vertices.begin(), vertices.end(),
              [](Vertex a, Vertex b) { return std::pair(a.y, a.x) < std::pair(b.y, b.x); });
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    vertices_ = std::move(vertices);
    if (vertices_.empty()) return;
    box_ = {vertices_.front().x, vertices_.front().x, vertices_.front().y, vertices_.back().y};
    for (Vertex v : vertices_) {
      box_.xmin = std::min(box_.xmin, v.x);
      box_.xmax = std::max(box_.xmax, v.x);
    }
    cell_id_.assign(static_cast<std::size_t>(box_.width()) * box_.height(), -1);
    for (std::size_t k = 0; k < vertices_.size(); ++k) cell_id_[cell(vertices_[k])] = static_cast<int>(k);
  }

  const RegionKind& kind() const { return kind_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  const BoundingBox& bounds() const { return box_; }
  std::span<const Vertex> vertices() const { return vertices_; }
  Vertex vertex(int id) const { return vertices_[static_cast<std::size_t>(id)]; }

  bool contains(Vertex v) const { return box_.contains(v) && cell_id_[cell(v)] >= 0; }

  /// Dense id of `v`, or -1 when `v` lies outside the region.
  int id(Vertex v) const { return box_.contains(v) ? cell_id_[cell(v)] : -1; }

  /// Neighbors of vertex `id` inside the region, in the fixed order +x, -x, +y, -y.
  template <class F>
  void for_each_neighbor(int id, F&& f) const {
    const Vertex v = vertex(id);
    for (Vertex step : kSteps) {
      const int w = this->id(v + step);
      if (w >= 0) f(w);
    }
  }

  int count(Parity p) const {
    return static_cast<int>(
        std::count_if(vertices_.begin(), vertices_.end(), [p](Vertex v) { return parity(v) == p; }));
  }

  /// Vertices of the region with at least one lattice neighbor outside it.
  std::vector<int> internal_boundary() const {
    std::vector<int> out;
    for (int k = 0; k < size(); ++k) {
      const Vertex v = vertex(k);
      for (Vertex step : kSteps)
        if (!contains(v + step)) {
          out.push_back(k);
          break;
        }
    }
    return out;
  }

 private:
  std::size_t cell(Vertex v) const {
    return static_cast<std::size_t>(v.y - box_.ymin) * box_.width() + (v.x - box_.xmin);
  }

  RegionKind kind_{};
  std::vector<Vertex> vertices_;
  BoundingBox box_{};
  std::vector<int> cell_id_;
};

namespace detail {

inline std::vector<Vertex> square_with_padding(int n, int x_offset, std::optional<Parity> pad) {
  std::vector<Vertex> out;
  for (int y = 0; y <= n + 1; ++y)
    for (int x = x_offset; x <= x_offset + n + 1; ++x) {
      const Vertex v{x, y};
      const bool inner = x >= x_offset + 1 && x <= x_offset + n && y >= 1 && y <= n;
      if (inner || (pad && parity(v) == *pad)) out.push_back(v);
    }
  return out;
}

}  // namespace detail

/// Square [x_offset+1, x_offset+n] x [1, n], optionally padded with the ring of
/// vertices of one parity just outside it. With x_offset = 0 and odd padding
/// this is B#(n); even padding is its mirror, whose internal boundary is even.
inline Region padded_square(int n, int x_offset, std::optional<Parity> pad) {
  if (n <= 0) throw std::invalid_argument("square side must be positive");
  RegionKind kind{Shape::Custom, n, 2, {}};
  if (x_offset == 0)
    kind.shape = !pad ? Shape::PlainSquare
                 : *pad == Parity::Odd ? Shape::OddBoundarySquare
                                       : Shape::EvenBoundarySquare;
  return Region(kind, detail::square_with_padding(n, x_offset, pad));
}

inline Region custom_region(std::vector<Vertex> vertices) {
  return Region(RegionKind{Shape::Custom, 0, 2, {}}, std::move(vertices));
}

/// Builds one of the planar regions. Body-centered boxes are accepted for
/// d = 2 through the isomorphism (x, y) -> ((x+y)/2, (y-x)/2) of B^2 onto Z^2,
/// which preserves parity; boxes with d = 3, 4 live in bootstrap.hpp (BccWindow).
inline Region build_region(const RegionKind& kind) {
  if (kind.n <= 0) throw std::invalid_argument("region size n must be positive");
  switch (kind.shape) {
    case Shape::Diamond: {
      const int r = 2 * kind.n - 1;
      std::vector<Vertex> vs;
      vs.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
      for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
          if (std::abs(x) + std::abs(y) <= r) vs.push_back({x, y});
      return Region(kind, std::move(vs));
    }
    case Shape::OddBoundarySquare: return padded_square(kind.n, 0, Parity::Odd);
    case Shape::EvenBoundarySquare: return padded_square(kind.n, 0, Parity::Even);
    case Shape::PlainSquare: return padded_square(kind.n, 0, std::nullopt);
    case Shape::BccBox: {
      if (kind.d < 2 || kind.d > 4) throw std::invalid_argument("body-centered boxes need d in {2,3,4}");
      if (kind.d != 2)
        throw std::invalid_argument("planar Region holds only d = 2 boxes; use BccWindow for d > 2");
      std::vector<int> u = kind.u.empty() ? std::vector<int>{1, 1} : kind.u;
      if (u.size() != 2 || (u[0] & 1) == 0 || (u[1] & 1) == 0)
        throw std::invalid_argument("body-centered box corner must be an odd vertex");
      // Odd part u + 2B(n); even part = even points whose four diagonal
      // neighbours all lie in the odd part.
      std::vector<Vertex> vs;
      auto to_z2 = [](int x, int y) { return Vertex{(x + y) / 2, (y - x) / 2}; };
      for (int a = 1; a <= kind.n; ++a)
        for (int b = 1; b <= kind.n; ++b) vs.push_back(to_z2(u[0] + 2 * a, u[1] + 2 * b));
      for (int a = 1; a < kind.n; ++a)
        for (int b = 1; b < kind.n; ++b) vs.push_back(to_z2(u[0] + 2 * a + 1, u[1] + 2 * b + 1));
      return Region(kind, std::move(vs));
    }
    case Shape::Custom: throw std::invalid_argument("custom regions are built with custom_region()");
  }
  throw std::invalid_argument("unknown region shape");
}

// ---------------------------------------------------------------------------
// Diamond quadrants

/// Q^0 = rows 0..2n-1 intersected with columns 1..2n-1, and Q^k = theta^k(Q^0).
inline bool in_quadrant0(int n, RcCoord c) {
  return c.j >= 0 && c.j <= 2 * n - 1 && c.i >= 1 && c.i <= 2 * n - 1 && ((c.i - c.j) & 1) == 0;
}

/// Which quadrant holds `v` (0..3), or -1 for the origin.
inline int quadrant_of(int n, Vertex v) {
  for (int k = 0; k < 4; ++k)
    if (in_quadrant0(n, xy_to_rc(rotate(v, -k)))) return k;
  return -1;
}

inline std::vector<Vertex> quadrant(const Region& diamond, int k) {
  if (diamond.kind().shape != Shape::Diamond) throw std::invalid_argument("quadrant() needs a diamond");
  const int n = diamond.kind().n;
  std::vector<Vertex> out;
  for (int j = 0; j <= 2 * n - 1; ++j)
    for (int i = 1; i <= 2 * n - 1; ++i)
      if (((i - j) & 1) == 0) out.push_back(rotate(rc_to_xy(i, j), k));
  return out;
}

}  // namespace trap
