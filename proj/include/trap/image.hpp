#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>

#include "trap/game.hpp"

namespace trap {

// One pixel / character per cell of the region's bounding box, top row = largest y.

using Rgb = std::array<std::uint8_t, 3>;

inline Rgb cell_color(Cell c) {
  switch (c) {
    case Cell::Eve: return {0, 0, 255};
    case Cell::Odin: return {255, 0, 0};
    case Cell::Draw: return {255, 255, 255};
    case Cell::ClosedOdd:
    case Cell::ClosedEven: return {0, 0, 0};
  }
  return {0, 0, 0};
}

inline constexpr Rgb kOutsideColor{128, 128, 128};

inline int cell_gray(Cell c) {
  switch (c) {
    case Cell::Eve: return 64;
    case Cell::Odin: return 192;
    case Cell::Draw: return 255;
    case Cell::ClosedOdd:
    case Cell::ClosedEven: return 0;
  }
  return 0;
}

inline constexpr int kOutsideGray = 128;

template <class F>
void for_each_pixel(const OutcomeGrid& g, F&& f) {
  const auto& b = g.region.bounds();
  for (int y = b.ymax; y >= b.ymin; --y)
    for (int x = b.xmin; x <= b.xmax; ++x) {
      const int id = g.region.id({x, y});
      f(x, y, id);
    }
}

/// Binary PPM (P6).
inline void write_ppm(std::ostream& os, const OutcomeGrid& g) {
  const auto& b = g.region.bounds();
  os << "P6\n" << b.width() << ' ' << b.height() << "\n255\n";
  for_each_pixel(g, [&](int, int, int id) {
    const Rgb c = id < 0 ? kOutsideColor : cell_color(g.cells[id]);
    os.write(reinterpret_cast<const char*>(c.data()), 3);
  });
}

/// Plain PGM (P2): closed 0, Eve 64, outside 128, Odin 192, Draw 255.
inline void write_pgm(std::ostream& os, const OutcomeGrid& g) {
  const auto& b = g.region.bounds();
  os << "P2\n" << b.width() << ' ' << b.height() << "\n255\n";
  int col = 0;
  for_each_pixel(g, [&](int, int, int id) {
    os << (id < 0 ? kOutsideGray : cell_gray(g.cells[id]));
    os << (++col == b.width() ? '\n' : ' ');
    if (col == b.width()) col = 0;
  });
}

/// ASCII: E, O, D, '#' closed, '.' outside the region.
inline void write_ascii(std::ostream& os, const OutcomeGrid& g) {
  const auto& b = g.region.bounds();
  int col = 0;
  for_each_pixel(g, [&](int, int, int id) {
    os << (id < 0 ? '.' : to_char(g.cells[id]));
    if (++col == b.width()) {
      os << '\n';
      col = 0;
    }
  });
}

}  // namespace trap
