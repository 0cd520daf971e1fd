// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--threads N] [--only K]...

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "trap/trap.hpp"
#include "trap/cli.hpp"

using namespace trap;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

Graph to_graph(const oracle::SmallGraph& s) {
  std::vector<Parity> sides;
  for (int x : s.side) sides.push_back(x ? Parity::Odd : Parity::Even);
  return Graph::from_edges(s.n, s.edges, sides);
}

std::uint64_t seed_for(int criterion) { return calibration::kAcceptanceSeed + 1000 * static_cast<std::uint64_t>(criterion); }

// 1 -------------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  int boards = 0, vertices = 0, mismatches = 0;
  auto compare = [&](const Graph& g) {
    ++boards;
    const auto wins = first_player_wins(g);
    TrapTreeSearch tree(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
      ++vertices;
      if ((wins[v] != 0) != (tree.solve(v) == Winner::First)) ++mismatches;
    }
  };
  std::mt19937_64 rng(seed_for(1));
  for (int k = 0; k < 700; ++k) compare(to_graph(oracle::random_graph(1 + k % 14, 0.15 + 0.05 * (k % 7), true, rng)));
  for (int n : {2, 3})
    for (double p : {0.1, 0.3, 0.6})
      for (std::uint64_t t = 0; t < 50; ++t)
        compare(open_subgraph(sample_board(build_region(RegionKind::diamond(n)), p, p, seed_for(1), t)));
  const double secs = seconds_since(t0);
  return {mismatches == 0 && boards >= 1000 && secs < 60,
          std::to_string(boards) + " boards, " + std::to_string(vertices) + " starts, " + std::to_string(mismatches) +
              " mismatches, " + fmt(secs, 2) + " s (limit 60 s)"};
}

// 2 -------------------------------------------------------------------------

Verdict vicious_dual() {
  std::mt19937_64 rng(seed_for(2));
  int graphs = 0, bipartite = 0, disagree_mis = 0, disagree_trap = 0;
  for (int k = 0; k < 400; ++k) {
    const bool bip = k % 2 == 0;
    const auto s = oracle::random_graph(1 + k % 12, 0.2 + 0.05 * (k % 5), bip, rng);
    const Graph g = bip ? to_graph(s) : Graph::from_edges(s.n, s.edges);
    ++graphs;
    const auto in_all = oracle::in_every_mis(s);
    std::vector<std::uint8_t> trap_wins;
    if (s.bipartite()) {
      ++bipartite;
      trap_wins = first_player_wins(g.bipartite() ? g : to_graph(s));
    }
    for (int v = 0; v < s.n; ++v) {
      bool first = false;
      try {
        first = brute_force_vicious(g, v) == Winner::First;
      } catch (const std::logic_error&) {
        ++disagree_mis;  // internal game tree vs independent-set check
        continue;
      }
      if (first != !in_all[v]) ++disagree_mis;
      if (!trap_wins.empty() && first != (trap_wins[v] != 0)) ++disagree_trap;
    }
  }
  return {graphs >= 300 && bipartite > 0 && disagree_mis == 0 && disagree_trap == 0,
          std::to_string(graphs) + " graphs (" + std::to_string(bipartite) + " bipartite), " +
              std::to_string(disagree_mis) + " game/MIS disagreements, " + std::to_string(disagree_trap) +
              " Vicious/Trap disagreements"};
}

// 3 -------------------------------------------------------------------------

Verdict konig_property() {
  std::mt19937_64 rng(seed_for(3));
  int graphs = 0, bad = 0;
  for (int k = 0; k < 300; ++k) {
    const auto s = oracle::random_graph(1 + k % 12, 0.2 + 0.05 * (k % 5), true, rng);
    const auto r = classify_essential(to_graph(s));
    const auto in_all = oracle::in_every_mis(s);
    ++graphs;
    for (int v = 0; v < s.n; ++v) bad += (r.essential[v] != 0) != !in_all[v];
  }
  return {graphs >= 300 && bad == 0, std::to_string(graphs) + " bipartite graphs, " + std::to_string(bad) + " violations"};
}

// 4 -------------------------------------------------------------------------

bool covers_open_odd(const BoardSample& s, const Matching& m) {
  for (int k = 0; k < s.region.size(); ++k)
    if (!s.closed[k] && parity(s.region.vertex(k)) == Parity::Odd && !m.matched(k)) return false;
  return true;
}

Verdict constructive_matchings(int threads) {
  const auto t0 = Clock::now();
  int e_boards = 0, e_samples = 0, mv_checked = 0, e_bad = 0;
  const Region d60 = build_region(RegionKind::diamond(60));
  std::vector<std::uint64_t> event_trials;
  for (std::uint64_t t = 0; event_trials.size() < 200 && t < 5000; ++t) {
    ++e_samples;
    if (event_flags(sample_board(d60, 0.1, 0, seed_for(4), t), 1).all_quadrants) event_trials.push_back(t);
  }
  e_boards = static_cast<int>(event_trials.size());
  const auto per_board = run_trials(e_boards, threads, [&](int k) {
    const auto s = sample_board(d60, 0.1, 0, seed_for(4), event_trials[k]);
    const GlobalMatchings gm(s);
    const Graph g = open_subgraph(s);
    std::pair<int, int> checked_bad{0, 0};
    if (!verify_matching(g, gm.base()) || !covers_open_odd(s, gm.base())) ++checked_bad.second;
    const auto& prot = gm.protected_vertices();
    for (int id = 0; id < s.region.size(); ++id) {
      if (!prot[id]) continue;
      ++checked_bad.first;
      const Matching mv = gm.avoiding(id);
      if (!verify_matching(g, mv) || mv.matched(id) || !covers_open_odd(s, mv)) ++checked_bad.second;
    }
    return checked_bad;
  });
  for (auto [c, b] : per_board) {
    mv_checked += c;
    e_bad += b;
  }

  int o_boards = 0, o_samples = 0, o_checked = 0, o_bad = 0;
  const int s_rows = calibration::kIntervalBlockRows;
  const Region d12 = build_region(RegionKind::diamond(12));
  std::mt19937_64 rng(seed_for(4));
  std::vector<int> odd_ids;
  for (int k = 0; k < d12.size(); ++k)
    if (parity(d12.vertex(k)) == Parity::Odd) odd_ids.push_back(k);
  for (std::uint64_t t = 0; o_boards < 200 && t < 20000; ++t) {
    const auto s = sample_board(d12, 0.02, 0, seed_for(4) + 1, t);
    ++o_samples;
    if (!event_flags(s, s_rows).lower) continue;
    ++o_boards;
    const Graph g = open_subgraph(s);
    for (int k = 0; k < 50; ++k) {
      const int id = odd_ids[rng() % odd_ids.size()];
      ++o_checked;
      try {
        const EvenMatching em = build_evens_matching_avoiding(s, d12.vertex(id), s_rows);
        bool ok = verify_matching(g, em.matching) && !em.matching.matched(id);
        for (int e = 0; e < d12.size() && ok; ++e)
          if (parity(d12.vertex(e)) == Parity::Even) ok = em.matching.matched(e);
        o_bad += !ok;
      } catch (const std::exception&) {
        ++o_bad;
      }
    }
  }
  return {e_boards == 200 && o_boards == 200 && e_bad == 0 && o_bad == 0,
          "quadrant-event boards: " + std::to_string(e_boards) + " boards of " + std::to_string(e_samples) + " samples, " +
              std::to_string(mv_checked) + " avoiding matchings, " + std::to_string(e_bad) + " invalid; row-interval boards (s=" + std::to_string(s_rows) +
              "): " + std::to_string(o_boards) + " boards of " + std::to_string(o_samples) + " samples, " +
              std::to_string(o_checked) + " avoided vertices, " + std::to_string(o_bad) + " invalid; " +
              fmt(seconds_since(t0), 1) + " s"};
}

// 5 -------------------------------------------------------------------------

Verdict theorem_lower(int threads) {
  std::string detail;
  double prev = -1;
  bool monotone = true, audits = true;
  double last = 0;
  for (double p : {0.05, 0.02, 0.01}) {
    const LowerCheck r = theorem_lower_check(calibration::kLowerC, p, 200, seed_for(5), threads);
    const double f = r.all_odin.mean();
    monotone = monotone && f >= prev;
    audits = audits && r.audit_failures == 0;
    prev = last = f;
    detail += "p=" + format_double(p) + " n=" + std::to_string(r.n) + ": " + fmt(f) + " +- " + fmt(r.all_odin.stderr_()) + "; ";
  }
  detail += "200 trials each, c=" + format_double(calibration::kLowerC);
  return {monotone && last >= 0.9 && audits, detail};
}

// 6 -------------------------------------------------------------------------

Verdict theorem_upper(int threads) {
  const auto t0 = Clock::now();
  const UpperCheck r = theorem_upper_check(calibration::kUpperC, 0.05, 100, seed_for(6), threads,
                                           calibration::kSetSConstant, true);
  const double e = r.quadrant_events.mean(), se = r.quadrant_events.stderr_();
  const bool bound_ok = e >= r.bound_simple - 3 * se;
  std::cout << "INFO [6] every even vertex of S protected: " << fmt(r.S_protected.mean()) << " +- "
            << fmt(r.S_protected.stderr_()) << " (C'=" << format_double(r.c_prime) << ", target >= 0.99)\n";
  return {r.eve_everywhere.mean() >= 0.9 && bound_ok && r.construction_mismatches == 0,
          "n=" + std::to_string(r.n) + ": Eve everywhere " + fmt(r.eve_everywhere.mean()) + " +- " +
              fmt(r.eve_everywhere.stderr_()) + " over 100 trials; P(E)=" + fmt(e) + " +- " + fmt(se) +
              " vs bound " + fmt(r.bound_simple) + (r.bound_simple <= 0 ? " (vacuous at this n, p)" : "") + "; " + std::to_string(r.construction_mismatches) +
              " construction mismatches; " + fmt(seconds_since(t0), 1) + " s"};
}

// 7 -------------------------------------------------------------------------

Verdict bootstrap_checks(int threads) {
  int field_failures = 0;
  for (int k = 0; k < 100; ++k) {
    const Box box = Box::cube(2 + k % 3, k % 3 == 2 ? 6 : (k % 3 == 1 ? 10 : 24));
    const auto a = random_occupation(box, 0.1 + 0.002 * k, seed_for(7), 2 * k);
    auto b = a;
    const auto extra = random_occupation(box, 0.05, seed_for(7), 2 * k + 1);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] |= extra[i];
    const auto fa = frobose_closure(box, a), fb = frobose_closure(box, b);
    std::vector<std::uint8_t> occ(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) occ[i] = fa.occupied(i);
    const auto again = frobose_closure(box, occ);
    bool ok = audit_times(fa, a);
    for (std::size_t i = 0; i < box.size() && ok; ++i) ok = again.occupied(i) == fa.occupied(i) && (!fa.occupied(i) || fb.occupied(i));
    field_failures += !ok;
  }

  const Box b64 = Box::cube(2, 64);
  const auto spanned = run_trials(200, threads, [&](int t) {
    return static_cast<std::uint8_t>(internally_spanned(b64, random_occupation(b64, 0.3, seed_for(7) + 1, t)));
  });
  const Proportion span = count_true(spanned);

  int playouts = 0, losses = 0, non_decreasing = 0, boxes = 0;
  for (std::uint64_t t = 0; playouts < 200 && t < 10000; ++t) {
    const int d = 2 + static_cast<int>(t % 2);
    const int n = d == 2 ? 12 : 6;
    const auto w = sample_bcc(d, n + 2, std::vector<int>(d, -1), 0.4, 0, seed_for(7) + 2, t);
    const GoodBoxReport r = good_box(w, std::vector<int>(d, -1), n);
    if (!r.good) continue;
    ++boxes;
    const Graph g = bcc_graph(w);
    const Strategy eve = EveBoxStrategy(w, g, r);
    std::mt19937_64 pick(t);
    std::vector<std::size_t> starts;
    for (std::size_t a = 0; a < w.odd.size(); ++a)
      if (!w.odd_closed[a] && r.box.contains_odd(w.odd, a)) starts.push_back(a);
    for (int k = 0; k < 5 && playouts < 200 && !starts.empty(); ++k) {
      const std::size_t a = starts[pick() % starts.size()];
      const Transcript tr = play(g, w.odd_id(a), eve, random_strategy(g, pick()), g.num_vertices());
      ++playouts;
      losses += tr.winner != Player::Eve;
      std::uint32_t last = r.time_of(w.odd, a);
      for (std::size_t m = 1; m < tr.moves.size(); m += 2) {
        const std::uint32_t now = r.time_of(w.odd, static_cast<std::size_t>(tr.moves[m]));
        if (now >= last) ++non_decreasing;
        last = now;
      }
    }
  }
  return {field_failures == 0 && span.mean() >= 0.9 && playouts == 200 && losses == 0 && non_decreasing == 0,
          "closure: " + std::to_string(field_failures) + "/100 fields fail; P(B(64) spanned | p=0.3)=" +
              fmt(span.mean()) + " +- " + fmt(span.stderr_()) + " over 200; box strategy: " + std::to_string(playouts) +
              " playouts on " + std::to_string(boxes) + " good boxes, " + std::to_string(losses) + " losses, " +
              std::to_string(non_decreasing) + " non-decreasing T steps"};
}

// 8 -------------------------------------------------------------------------

// Winner of Trap from every open cell of a padded n x n square, from an
// explicit grid graph and the plain game tree. Returns one entry per interior cell.
std::vector<std::optional<Player>> brute_force_padded(int n, int x_offset, const std::vector<std::uint8_t>& closed,
                                                      Parity pad) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 1; y <= n; ++y)
    for (int x = x_offset + 1; x <= x_offset + n; ++x)
      if (!closed[(y - 1) * n + (x - x_offset - 1)]) cells.emplace_back(x, y);
  for (int y = 0; y <= n + 1; ++y)
    for (int x = x_offset; x <= x_offset + n + 1; ++x) {
      const bool ring = y == 0 || y == n + 1 || x == x_offset || x == x_offset + n + 1;
      const bool odd = ((x + y) & 1) != 0;
      if (ring && odd == (pad == Parity::Odd)) cells.emplace_back(x, y);
    }
  const auto grid = oracle::grid_graph(cells);
  oracle::TrapGame tree(grid.graph);
  std::vector<std::optional<Player>> out(static_cast<std::size_t>(n) * n);
  for (int y = 1; y <= n; ++y)
    for (int x = x_offset + 1; x <= x_offset + n; ++x) {
      const int v = grid.index(x, y);
      if (v < 0) continue;
      // Odin moves first from even cells, Eve from odd cells
      const Player first = ((x + y) & 1) ? Player::Eve : Player::Odin;
      out[(y - 1) * n + (x - x_offset - 1)] = tree.first_player_wins(v) ? first : other(first);
    }
  return out;
}

Verdict draw_maps(int threads) {
  const auto t0 = Clock::now();
  long squares = 0, mismatches = 0;
  for (int n = 1; n <= 4; ++n)
    for (int x_offset : {0, 1}) {
      const int cells = n * n;
      const auto results = run_trials(1 << cells, threads, [&](int pattern) {
        BoardSample s{padded_square(n, x_offset, std::nullopt), {}, 0, 0, 0};
        s.closed.assign(static_cast<std::size_t>(cells), 0);
        std::vector<std::uint8_t> closed(static_cast<std::size_t>(cells));
        for (int k = 0; k < cells; ++k) closed[k] = pattern >> k & 1;
        for (int k = 0; k < cells; ++k) {
          const Vertex v = s.region.vertex(k);
          s.closed[k] = closed[(v.y - 1) * n + (v.x - x_offset - 1)];
        }
        const OutcomeGrid g = draw_map(s);
        const auto odd = brute_force_padded(n, x_offset, closed, Parity::Odd);
        const auto even = brute_force_padded(n, x_offset, closed, Parity::Even);
        int bad = 0;
        for (int k = 0; k < cells; ++k) {
          const Vertex v = s.region.vertex(k);
          const int c = (v.y - 1) * n + (v.x - x_offset - 1);
          Cell expect;
          if (closed[c])
            expect = parity(v) == Parity::Odd ? Cell::ClosedOdd : Cell::ClosedEven;
          else if (*odd[c] != *even[c])
            expect = Cell::Draw;
          else
            expect = *odd[c] == Player::Eve ? Cell::Eve : Cell::Odin;
          bad += g.cells[k] != expect;
        }
        return bad;
      });
      squares += static_cast<long>(results.size());
      for (int b : results) mismatches += b;
    }
  const double brute_secs = seconds_since(t0);

  std::string trend;
  double prev = 2;
  bool decreasing = true;
  for (double p : {0.05, 0.1, 0.15, 0.2}) {
    const auto fr = run_trials(20, threads, [&](int s) { return draw_fraction(draw_map(50, p, p, seed_for(8), s)); });
    const Summary m = summarize(fr);
    decreasing = decreasing && m.mean < prev;
    prev = m.mean;
    trend += format_double(p) + ":" + fmt(m.mean) + "+-" + fmt(m.stderr_) + " ";
  }
  return {mismatches == 0 && decreasing,
          std::to_string(squares) + " padded squares (n<=4, both column offsets, every closure pattern), " +
              std::to_string(mismatches) + " label mismatches, " + fmt(brute_secs, 1) +
              " s; draw fraction at n=50 over 20 seeds: " + trend};
}

// 9 -------------------------------------------------------------------------

Verdict performance() {
  auto t0 = Clock::now();
  const BoardSample s = sample_board(build_region(RegionKind::odd_square(400)), 0.1, 0.1, seed_for(9));
  const OutcomeGrid g = solve_trap(s);
  const double solve = seconds_since(t0);
  t0 = Clock::now();
  const auto fr = run_trials(20, 8, [&](int t) { return draw_fraction(draw_map(400, 0.1, 0.1, seed_for(9), t)); });
  const double sweep = seconds_since(t0);
  return {solve <= 10 && sweep <= 300 && g.cells.size() == static_cast<std::size_t>(s.region.size()) && fr.size() == 20,
          "400x400 odd-boundary solve " + fmt(solve, 2) + " s (limit 10); 20-seed draw-map sweep at n=400 with 8 workers " +
              fmt(sweep, 1) + " s (limit 300) on " + std::to_string(std::thread::hardware_concurrency()) + " cores"};
}

// 10 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trap_cli");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "trap_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands{
      {"solve", "--region", "diamond", "--n", "60", "--p", "0.1", "--q", "0", "--seed", "7", "--format", "ppm"},
      {"draw-map", "--n", "50", "--p", "0.1", "--q", "0.1", "--seed", "3"},
      {"verify-lower", "--c", "1", "--p", "0.02", "--trials", "50"},
      {"lengths", "--p", "0.2", "--trials", "10"},
      {"figure", "--n", "30", "--p", "0.15", "--q", "0.15", "--trials", "4"},
  };
  int files = 0, differ = 0, failures = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (const char* run : {"a", "b", "t4"}) {
      dirs.push_back(root / std::to_string(c) / run);
      auto args = commands[c];
      args.insert(args.end(), {"--threads", std::string(run) == "t4" ? "4" : "1", "--out", dirs.back().string()});
      failures += run_cli(args) != 0;
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      const std::string ref = slurp(e.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) differ += ref != slurp(dirs[k] / e.path().filename());
    }
  }
  fs::remove_all(root);
  return {failures == 0 && differ == 0 && files > 0,
          std::to_string(files) + " output files from " + std::to_string(commands.size()) +
              " commands compared across two --threads 1 runs and one --threads 4 run: " + std::to_string(differ) +
              " differ, " + std::to_string(failures) + " command failures"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int threads = 8;
  std::vector<int> only;
  app.add_option("--threads", threads, "trial workers")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"vicious trap dual", vicious_dual},
      {"konig property", konig_property},
      {"constructive matchings", [&] { return constructive_matchings(threads); }},
      {"small-diamond odin check", [&] { return theorem_lower(threads); }},
      {"large-diamond eve check", [&] { return theorem_upper(threads); }},
      {"bootstrap", [&] { return bootstrap_checks(threads); }},
      {"draw maps", [&] { return draw_maps(threads); }},
      {"performance", performance},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[k].first << ": " << v.detail << std::endl;
  }
  return failed ? 1 : 0;
}
