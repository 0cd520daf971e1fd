#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "trap/graph.hpp"
#include "trap/lattice.hpp"
#include "trap/rng.hpp"

namespace trap {

/// A region together with its random closed sites.
///
/// Odd sites are closed with probability p and even sites with probability q.
/// One uniform is drawn per vertex in canonical id order and the site is closed
/// iff that uniform falls below its parity's probability, so samples with the
/// same seed are coupled across (p, q).
struct BoardSample {
  Region region;
  std::vector<std::uint8_t> closed;  // indexed by region id
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;

  bool is_closed(Vertex v) const {
    const int id = region.id(v);
    return id >= 0 && closed[id] != 0;
  }

  int count_closed(Parity par) const {
    int c = 0;
    for (int k = 0; k < region.size(); ++k) c += closed[k] && parity(region.vertex(k)) == par;
    return c;
  }
};

inline void check_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
}

inline BoardSample sample_board(Region region, double p, double q, std::uint64_t seed,
                                std::uint64_t trial = 0) {
  check_probability(p, "p");
  check_probability(q, "q");
  BoardSample s{std::move(region), {}, p, q, seed};
  s.closed.assign(static_cast<std::size_t>(s.region.size()), 0);
  Rng rng(seed, trial);
  for (int k = 0; k < s.region.size(); ++k) {
    const double u = rng.uniform();
    s.closed[k] = u < (parity(s.region.vertex(k)) == Parity::Odd ? p : q) ? 1 : 0;
  }
  return s;
}

/// Lattice graph of the open sites; closed sites keep their ids but are dead.
inline Graph open_subgraph(const BoardSample& s) { return region_graph(s.region, s.closed); }

// ---------------------------------------------------------------------------
// Board dump: header "n p q seed kind", then one line per lattice row from the
// top (largest y) down, one character per bounding-box column:
// '.' open, '#' closed, ' ' outside the region.

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

inline void write_board(std::ostream& os, const BoardSample& s) {
  const auto& b = s.region.bounds();
  os << s.region.kind().n << ' ' << format_double(s.p) << ' ' << format_double(s.q) << ' ' << s.seed
     << ' ' << to_string(s.region.kind().shape) << '\n';
  std::string line;
  for (int y = b.ymax; y >= b.ymin; --y) {
    line.clear();
    for (int x = b.xmin; x <= b.xmax; ++x) {
      const int id = s.region.id({x, y});
      line += id < 0 ? ' ' : (s.closed[id] ? '#' : '.');
    }
    os << line << '\n';
  }
}

inline BoardSample read_board(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("board dump: missing header");
  std::istringstream hs(header);
  int n = 0;
  std::string p_text, q_text, kind_text;
  std::uint64_t seed = 0;
  if (!(hs >> n >> p_text >> q_text >> seed >> kind_text))
    throw std::runtime_error("board dump: malformed header '" + header + "'");
  auto parse = [](const std::string& t) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw std::runtime_error("board dump: bad number '" + t + "'");
    return v;
  };
  RegionKind kind{shape_from_string(kind_text), n, 2, {}};
  if (kind.shape == Shape::Custom || kind.shape == Shape::BccBox)
    throw std::runtime_error("board dump: region kind '" + kind_text + "' cannot be re-read");
  BoardSample s{build_region(kind), {}, parse(p_text), parse(q_text), seed};
  s.closed.assign(static_cast<std::size_t>(s.region.size()), 0);
  const auto& b = s.region.bounds();
  std::string line;
  for (int y = b.ymax; y >= b.ymin; --y) {
    if (!std::getline(is, line)) throw std::runtime_error("board dump: truncated at row y=" + std::to_string(y));
    if (static_cast<int>(line.size()) != b.width())
      throw std::runtime_error("board dump: row y=" + std::to_string(y) + " has wrong width");
    for (int x = b.xmin; x <= b.xmax; ++x) {
      const char c = line[static_cast<std::size_t>(x - b.xmin)];
      const int id = s.region.id({x, y});
      if ((id < 0) != (c == ' '))
        throw std::runtime_error("board dump: row y=" + std::to_string(y) + " disagrees with region shape");
      if (id >= 0) {
        if (c != '.' && c != '#') throw std::runtime_error(std::string("board dump: bad cell '") + c + "'");
        s.closed[id] = c == '#';
      }
    }
  }
  return s;
}

}  // namespace trap
