#include <gtest/gtest.h>

#include <memory>
#include <random>

#include "oracles.hpp"
#include "trap/game.hpp"
#include "trap/percolation.hpp"

using namespace trap;

namespace {

Graph to_graph(const oracle::SmallGraph& s) {
  std::vector<Parity> sides;
  for (int x : s.side) sides.push_back(x ? Parity::Odd : Parity::Even);
  return Graph::from_edges(s.n, s.edges, sides);
}

oracle::SmallGraph from_board(const BoardSample& b) {
  std::vector<std::pair<int, int>> edges;
  const Graph g = open_subgraph(b);
  for (auto e : g.edges()) edges.push_back(e);
  auto s = oracle::make_graph(g.num_vertices(), edges);
  for (int v = 0; v < g.num_vertices(); ++v) s.side.push_back(parity(b.region.vertex(v)) == Parity::Odd);
  return s;
}

}  // namespace

TEST(Game, MatchingVerdictEqualsGameTreeOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracle::random_graph(1 + trial % 14, 0.3, true, rng);
    const Graph g = to_graph(s);
    const auto wins = first_player_wins(g);
    oracle::TrapGame tree(s);
    for (int v = 0; v < s.n; ++v) {
      EXPECT_EQ(wins[v] != 0, tree.first_player_wins(v)) << "trial " << trial << " v " << v;
      EXPECT_EQ(brute_force_trap(g, v) == Winner::First, tree.first_player_wins(v));
    }
  }
}

TEST(Game, SolveTrapEqualsGameTreeOnSmallDiamonds) {
  for (int seed = 0; seed < 30; ++seed) {
    const auto b = sample_board(build_region(RegionKind::diamond(2)), 0.1 + 0.05 * (seed % 6), 0.05 * (seed % 3), seed);
    const auto s = from_board(b);
    const OutcomeGrid grid = solve_trap(b);
    oracle::TrapGame tree(s);
    for (int v = 0; v < s.n; ++v) {
      const Vertex x = b.region.vertex(v);
      if (b.closed[v]) {
        EXPECT_TRUE(is_closed(grid.cells[v]));
        continue;
      }
      const Player first = first_player(x);
      const Player expected = tree.first_player_wins(v) ? first : other(first);
      EXPECT_EQ(*cell_winner(grid.cells[v]), expected);
    }
  }
}

TEST(Game, ViciousGameTreeAgainstIndependentSets) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const bool bip = trial % 2 == 0;
    const auto s = oracle::random_graph(1 + trial % 12, 0.3, bip, rng);
    const Graph g = bip ? to_graph(s) : Graph::from_edges(s.n, s.edges);
    oracle::ViciousGame tree(s);
    const auto in_all = oracle::in_every_mis(s);
    for (int v = 0; v < s.n; ++v) {
      const bool first = brute_force_vicious(g, v) == Winner::First;
      EXPECT_EQ(first, tree.first_player_wins(v));
      EXPECT_EQ(first, !in_all[v]);
      if (bip) {
        EXPECT_EQ(first, oracle::TrapGame(s).first_player_wins(v));
      }
    }
  }
}

TEST(Game, ClosedStartIsFirstPlayerWin) {
  const auto b = sample_board(build_region(RegionKind::diamond(3)), 1.0, 0.0, 1);
  const OutcomeGrid grid = solve_trap(b);
  EXPECT_EQ(grid.at({1, 0}), Cell::ClosedOdd);
  EXPECT_EQ(*cell_winner(Cell::ClosedOdd), Player::Eve);
  EXPECT_EQ(*cell_winner(Cell::ClosedEven), Player::Odin);
  // the origin is isolated: Odin moves first and is stuck
  EXPECT_EQ(grid.at({0, 0}), Cell::Eve);
}

TEST(Game, MatchingStrategyWinsAgainstEveryOpponent) {
  for (int seed = 0; seed < 40; ++seed) {
    const auto b = sample_board(build_region(RegionKind::diamond(6)), 0.2, 0.1, seed);
    const Graph g = open_subgraph(b);
    const auto report = classify_essential(g);
    for (int v = 0; v < g.num_vertices(); v += 7) {
      if (!g.alive(v)) continue;
      const Player first = first_player(g.side(v));
      const Player winner = report.essential[v] ? first : other(first);
      for (auto mode : {MatchingStrategy::Mode::Incremental, MatchingStrategy::Mode::Recompute}) {
        const Strategy win = matching_strategy(g, report, v, mode);
        const Strategy lose = seed % 2 ? random_strategy(g, seed) : greedy_strategy(g);
        const Transcript t = winner == Player::Eve ? play(g, v, win, lose, g.num_vertices())
                                                   : play(g, v, lose, win, g.num_vertices());
        ASSERT_FALSE(t.truncated);
        EXPECT_EQ(*t.winner, winner) << "seed " << seed << " v " << v;
        EXPECT_LE(t.length, g.num_alive() - 1);
      }
    }
  }
}

TEST(Game, MinimaxLengthEqualsOracle) {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracle::random_graph(2 + trial % 11, 0.35, true, rng);
    const Graph g = to_graph(s);
    oracle::GameLength oracle_len(s);
    oracle::TrapGame tree(s);
    for (int v = 0; v < s.n; ++v) {
      const Player first = first_player(g.side(v));
      const bool eve_wins = tree.first_player_wins(v) == (first == Player::Eve);
      if (!eve_wins) {
        EXPECT_THROW(minimax_game_length(g, v), std::invalid_argument);
        continue;
      }
      const int expected = oracle_len.value(v, 1u << v).second;
      EXPECT_EQ(minimax_game_length(g, v), expected);
      // playout under both optimal policies realizes the value: moves + 1 turns
      auto solver = std::make_shared<GameLengthSolver>(g, v);
      const Strategy both = minimax_strategy(solver);
      const Transcript t = play(g, v, both, both, s.n + 1);
      EXPECT_EQ(*t.winner, Player::Eve);
      EXPECT_EQ(t.length + 1, expected);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Game, TreeSearchGuards) {
  const auto b = sample_board(build_region(RegionKind::diamond(8)), 0.0, 0.0, 1);
  const Graph g = open_subgraph(b);
  EXPECT_THROW(brute_force_trap(g, 0), std::length_error);
  EXPECT_THROW(brute_force_vicious(g, 0), std::length_error);
}

TEST(Game, MatchingStrategyOnSingleEdge) {
  // single edge from an odd start: Eve moves once and Odin is stuck
  const std::vector<std::pair<int, int>> e{{0, 1}};
  const Graph g = Graph::from_edges(2, e, {Parity::Odd, Parity::Even});
  const auto report = classify_essential(g);
  EXPECT_TRUE(report.essential[0]);
  const Strategy s = matching_strategy(g, report, 0, MatchingStrategy::Mode::Incremental);
  const Transcript t = play(g, 0, s, greedy_strategy(g), 4);
  EXPECT_EQ(*t.winner, Player::Eve);
  EXPECT_EQ(t.length, 1);
}

TEST(Game, TranscriptJson) {
  Transcript t;
  t.start = 3;
  t.moves = {4, 5};
  t.winner = Player::Odin;
  t.length = 2;
  const auto j = transcript_json(t);
  EXPECT_EQ(j["winner"], "Odin");
  EXPECT_EQ(j["moves"].size(), 2u);
}
