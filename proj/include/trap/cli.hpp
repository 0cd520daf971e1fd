#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trap/bootstrap.hpp"
#include "trap/calibration.hpp"
#include "trap/experiments.hpp"
#include "trap/game.hpp"
#include "trap/image.hpp"
#include "trap/percolation.hpp"

namespace trap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// I/O failure with the offending path.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& path) : std::runtime_error("cannot write '" + path + "'"), path(path) {}
  std::string path;
};

struct Options {
  std::string command;
  std::string region = "diamond";
  int n = 0;  // 0: derived from the command's scale constants
  int d = 2;
  double p = 0.1;
  double q = 0.0;
  std::uint64_t seed = 1;
  int trials = 100;
  double c = calibration::kLowerC;
  double C = calibration::kUpperC;
  double c_prime = calibration::kSetSConstant;
  int threads = 1;
  std::string out = ".";
  std::string format;  // empty: command default
  std::string board;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> k{"sample",       "solve",        "draw-map", "bootstrap", "verify-lower",
                                          "verify-upper", "lengths",      "density",  "figure"};
  return k;
}

/// `<command>_<region><n>_p<p>_q<q>_s<seed>.<ext>`
inline std::string output_name(const std::string& command, const std::string& region, int n, double p, double q,
                               std::uint64_t seed, const std::string& ext) {
  return command + "_" + region + std::to_string(n) + "_p" + format_double(p) + "_q" + format_double(q) + "_s" +
         std::to_string(seed) + "." + ext;
}

namespace detail {

struct Context {
  Options opt;
  std::ostream& log;
  std::vector<std::string> written;

  std::string path_for(const std::string& region, int n, double p, double q, std::uint64_t seed,
                       const std::string& ext) const {
    return (std::filesystem::path(opt.out) / output_name(opt.command, region, n, p, q, seed, ext)).string();
  }

  void write(const std::string& path, const std::function<void(std::ostream&)>& body, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError(path);
    body(os);
    os.flush();
    if (!os) throw IoError(path);
    log << path << '\n';
    written.push_back(path);
  }

  std::string format_or(const std::string& fallback, std::initializer_list<const char*> allowed) const {
    const std::string f = opt.format.empty() ? fallback : opt.format;
    for (const char* a : allowed)
      if (f == a) return f;
    throw std::invalid_argument("--format " + f + " is not available for '" + opt.command + "'");
  }

  void write_table(const Table& t, const std::string& region, int n, double q) {
    const std::string f = format_or("csv", {"csv", "json"});
    write(path_for(region, n, opt.p, q, opt.seed, f), [&](std::ostream& os) {
      if (f == "csv")
        t.write_csv(os);
      else
        os << t.to_json().dump(2) << '\n';
    });
  }

  void write_grid(const OutcomeGrid& g, const std::string& region, int n, double p, double q, std::uint64_t seed,
                  const std::string& f) {
    const std::string path = path_for(region, n, p, q, seed, f);
    if (f == "ppm") write(path, [&](std::ostream& os) { write_ppm(os, g); }, true);
    if (f == "pgm") write(path, [&](std::ostream& os) { write_pgm(os, g); });
    if (f == "txt") write(path, [&](std::ostream& os) { write_ascii(os, g); });
  }
};

inline int require_n(const Options& o) {
  if (o.n < 1) throw std::invalid_argument("--n is required for '" + o.command + "'");
  return o.n;
}

inline BoardSample board_from_options(const Options& o) {
  if (!o.board.empty()) {
    std::ifstream is(o.board);
    if (!is) throw IoError(o.board);
    return read_board(is);
  }
  const Shape shape = shape_from_string(o.region);
  if (shape == Shape::Custom || shape == Shape::BccBox)
    throw std::invalid_argument("--region must be diamond, square, odd-square or even-square");
  return sample_board(build_region(RegionKind{shape, require_n(o), 2, {}}), o.p, o.q, o.seed);
}

inline void cmd_sample(Context& ctx) {
  ctx.format_or("txt", {"txt"});
  const BoardSample s = board_from_options(ctx.opt);
  ctx.write(ctx.path_for(to_string(s.region.kind().shape), s.region.kind().n, s.p, s.q, s.seed, "txt"),
            [&](std::ostream& os) { write_board(os, s); });
}

inline void cmd_solve(Context& ctx) {
  const std::string f = ctx.format_or("ppm", {"ppm", "pgm", "txt", "json"});
  const BoardSample s = board_from_options(ctx.opt);
  const std::string region = to_string(s.region.kind().shape);
  const int n = s.region.kind().n;
  const Graph g = open_subgraph(s);
  const auto report = classify_essential(g);
  const OutcomeGrid grid = outcome_grid(s, report);
  if (f != "json") {
    ctx.write_grid(grid, region, n, s.p, s.q, s.seed, f);
    return;
  }
  nlohmann::json j{{"schema_version", Table::kSchemaVersion},
                   {"region", s.region.kind()},
                   {"p", s.p},
                   {"q", s.q},
                   {"seed", s.seed},
                   {"maximum_matching", report.matching.size()},
                   {"eve", grid.count(Cell::Eve)},
                   {"odin", grid.count(Cell::Odin)},
                   {"closed_odd", grid.count(Cell::ClosedOdd)},
                   {"closed_even", grid.count(Cell::ClosedEven)}};
  ctx.write(ctx.path_for(region, n, s.p, s.q, s.seed, "json"), [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

inline void cmd_draw_map(Context& ctx) {
  const std::string f = ctx.format_or("ppm", {"ppm", "pgm", "txt"});
  const int n = ctx.opt.n > 0 ? ctx.opt.n : 50;
  const OutcomeGrid g = draw_map(n, ctx.opt.p, ctx.opt.q, ctx.opt.seed);
  ctx.write_grid(g, "square", n, ctx.opt.p, ctx.opt.q, ctx.opt.seed, f);
}

/// One image per seed in [seed, seed + trials) plus a table of draw fractions.
inline void cmd_figure(Context& ctx) {
  const std::string f = ctx.format_or("ppm", {"ppm", "pgm", "txt"});
  const Options& o = ctx.opt;
  const int n = o.n > 0 ? o.n : 50;
  const auto grids = run_trials(o.trials, o.threads, [&](int t) {
    return draw_map(n, o.p, o.q, o.seed + static_cast<std::uint64_t>(t));
  });
  Table t{"draw_fraction", {"n", "p", "q", "seed", "eve", "odin", "draw", "draw_fraction"}, {}};
  for (int k = 0; k < o.trials; ++k) {
    const auto& g = grids[k];
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
    ctx.write_grid(g, "square", n, o.p, o.q, seed, f);
    t.add({n, o.p, o.q, seed, g.count(Cell::Eve), g.count(Cell::Odin), g.count(Cell::Draw), draw_fraction(g)});
  }
  const std::string path = ctx.path_for("square", n, o.p, o.q, o.seed, "csv");
  ctx.write(path, [&](std::ostream& os) { t.write_csv(os); });
}

inline void cmd_bootstrap(Context& ctx) {
  const Options& o = ctx.opt;
  const int n = require_n(o);
  if (o.d < 2 || o.d > 4) throw std::invalid_argument("--d must be 2, 3 or 4");
  const Box box = Box::cube(o.d, n);
  const auto spanned = run_trials(o.trials, o.threads, [&](int t) {
    return static_cast<std::uint8_t>(internally_spanned(box, random_occupation(box, o.p, o.seed, static_cast<std::uint64_t>(t))));
  });
  const Proportion pr = count_true(spanned);
  Table t{"bootstrap", {"d", "n", "p", "trials", "spanned", "spanned_se"}, {}};
  t.add({o.d, n, o.p, o.trials, pr.mean(), pr.stderr_()});
  ctx.write_table(t, "box", n, 0.0);
}

inline void cmd_verify_lower(Context& ctx) {
  const Options& o = ctx.opt;
  const LowerCheck r = theorem_lower_check(o.c, o.p, o.trials, o.seed, o.threads);
  Table t{"lower", {"c", "p", "n", "trials", "all_odin", "all_odin_se", "audit_failures"}, {}};
  t.add({r.c, r.p, r.n, o.trials, r.all_odin.mean(), r.all_odin.stderr_(), r.audit_failures});
  ctx.write_table(t, "diamond", r.n, 0.0);
}

inline void cmd_verify_upper(Context& ctx) {
  const Options& o = ctx.opt;
  const UpperCheck r = theorem_upper_check(o.C, o.p, o.trials, o.seed, o.threads, o.c_prime);
  Table t{"upper",
          {"C", "p", "n", "Cprime", "trials", "eve_everywhere", "eve_everywhere_se", "quadrant_events",
           "quadrant_events_se", "bound", "S_protected", "S_protected_se"},
          {}};
  t.add({r.C, r.p, r.n, r.c_prime, o.trials, r.eve_everywhere.mean(), r.eve_everywhere.stderr_(),
         r.quadrant_events.mean(), r.quadrant_events.stderr_(), r.bound_simple, r.S_protected.mean(),
         r.S_protected.stderr_()});
  ctx.write_table(t, "diamond", r.n, 0.0);
}

inline void cmd_lengths(Context& ctx) {
  const Options& o = ctx.opt;
  const LengthCheck r = game_length_stats(o.p, o.trials, o.c, o.C, o.seed, o.threads);
  Table t{"lengths",
          {"p", "n_small", "n_large", "trials", "odin_holds_small", "odin_holds_small_se", "playouts", "median_moves",
           "mean_moves", "mean_moves_se", "max_moves", "board_size", "over_budget", "eve_losses"},
          {}};
  const Summary& m = r.eve_win_moves;
  t.add({r.p, r.n_small, r.n_large, o.trials, r.odin_holds_small.mean(), r.odin_holds_small.stderr_(), m.count,
         m.median, m.mean, m.stderr_, m.max, r.board_size, r.over_budget, r.eve_losses});
  ctx.write_table(t, "diamond", r.n_large, 0.0);
}

/// Good-diamond probability at q in {0, q/4, q/2, q} on coupled samples, next
/// to 1 - p_c of the star lattice.
inline void cmd_density(Context& ctx) {
  const Options& o = ctx.opt;
  const int n = o.n > 0 ? o.n : upper_scale_n(o.C, o.p);
  const DensityCheck r = density_corollary_check(o.p, n, {0.0, o.q / 4, o.q / 2, o.q}, o.trials, o.seed, o.threads);
  const Summary pc = star_lattice_threshold(64, o.trials, o.seed, o.threads);
  Table t{"density", {"p", "n", "q", "trials", "good", "good_se", "star_pc", "star_pc_se"}, {}};
  for (std::size_t k = 0; k < r.qs.size(); ++k)
    t.add({o.p, n, r.qs[k], o.trials, r.good[k].mean(), r.good[k].stderr_(), pc.mean, pc.stderr_});
  ctx.write_table(t, "diamond", n, o.q);
}

}  // namespace detail

inline void build_app(CLI::App& app, Options& o) {
  app.description("Trap on percolation boards: solver, constructions and experiments");
  app.add_option("command", o.command, "sample | solve | draw-map | bootstrap | verify-lower | verify-upper | "
                                       "lengths | density | figure")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--region", o.region, "diamond | square | odd-square | even-square")
      ->check(CLI::IsMember({"diamond", "square", "odd-square", "even-square"}));
  app.add_option("--n", o.n, "region size (0: derived from the scale constants)")->check(CLI::NonNegativeNumber);
  app.add_option("--d", o.d, "dimension for bootstrap")->check(CLI::Range(2, 4));
  app.add_option("--p", o.p, "closure probability of odd sites")->check(CLI::Range(0.0, 1.0));
  app.add_option("--q", o.q, "closure probability of even sites")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--trials", o.trials, "independent trials")->check(CLI::PositiveNumber);
  app.add_option("--c", o.c, "small-scale constant")->check(CLI::PositiveNumber);
  app.add_option("--C", o.C, "large-scale constant")->check(CLI::PositiveNumber);
  app.add_option("--Cprime", o.c_prime, "constant of the protected set")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "trial workers")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.format, "ppm | pgm | txt | csv | json")
      ->check(CLI::IsMember({"ppm", "pgm", "txt", "csv", "json"}));
  app.add_option("--board", o.board, "board dump to solve instead of sampling")->check(CLI::ExistingFile);
  app.set_config("--config", "", "key=value file of defaults; flags win");
}

/// Parses argv, runs one command and reports written paths on `out`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app;
  Options o;
  build_app(app, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  detail::Context ctx{o, out, {}};
  try {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw IoError(o.out);
    static const std::map<std::string, void (*)(detail::Context&)> table{
        {"sample", detail::cmd_sample},   {"solve", detail::cmd_solve},
        {"draw-map", detail::cmd_draw_map}, {"figure", detail::cmd_figure},
        {"bootstrap", detail::cmd_bootstrap}, {"verify-lower", detail::cmd_verify_lower},
        {"verify-upper", detail::cmd_verify_upper}, {"lengths", detail::cmd_lengths},
        {"density", detail::cmd_density}};
    table.at(o.command)(ctx);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace trap::cli
