// Command-line front end: instance generation, matching, Birkhoff-von-Neumann
// decomposition and a benchmark sweep that emits CSV (see README for formats).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <variant>

#include "CLI11.hpp"
#include "regmatch/adversary.hpp"
#include "regmatch/baselines.hpp"
#include "regmatch/bench.hpp"
#include "regmatch/bvn.hpp"
#include "regmatch/graph.hpp"
#include "regmatch/walk.hpp"

namespace {

using namespace regmatch;

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBounds = 3;

constexpr const char* kVersion = "regmatch 0.1.0";

double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

long long now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Grid values: "8", "2^10", "8,64,256", "2^8..2^12" (doubling range).
std::vector<int> parse_grid(const std::string& text) {
  auto parse_one = [](const std::string& tok) {
    std::size_t caret = tok.find('^');
    if (caret != std::string::npos) {
      int base = std::stoi(tok.substr(0, caret));
      int exp = std::stoi(tok.substr(caret + 1));
      long long v = 1;
      for (int i = 0; i < exp; ++i) v *= base;
      if (v > std::numeric_limits<int>::max())
        throw CLI::ValidationError("grid value too large: " + tok);
      return static_cast<int>(v);
    }
    return std::stoi(tok);
  };
  std::vector<int> out;
  const std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    int lo = parse_one(text.substr(0, dots));
    int hi = parse_one(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw CLI::ValidationError("bad grid range: " + text);
    for (long long v = lo; v <= hi; v *= 2) out.push_back(static_cast<int>(v));
    return out;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_one(tok));
  }
  if (out.empty()) throw CLI::ValidationError("empty grid: " + text);
  return out;
}

struct MatchRun {
  Matching matching;
  BenchRecord record;
};

MatchRun run_matcher(const std::string& algo, const BipartiteRegularGraph& g,
                     std::uint64_t seed) {
  MatchRun run;
  run.record.algo = algo;
  run.record.n = g.n;
  run.record.d = g.d;
  run.record.seed = seed;
  run.record.m = g.edge_count();
  const long long t0 = now_ns();
  if (algo == "walk" || algo == "walk-untruncated") {
    Rng rng = derive_rng(seed, 0x77616c6b);  // walk stream
    // Inputs reach this point already validated (file read or generator).
    FindResult res =
        find_perfect_matching(g, rng, algo == "walk", /*validate_input=*/false);
    run.matching = std::move(res.matching);
    run.record.total_steps = res.stats.total_steps;
    run.record.total_restarts = res.stats.total_restarts;
    run.record.augmentations = res.stats.augmentations;
  } else if (algo == "hk") {
    run.matching = hopcroft_karp(g);
    run.record.augmentations = run.matching.size;
  } else if (algo == "euler") {
    run.matching = euler_matching(g);
    run.record.augmentations = run.matching.size;
  } else {
    throw CLI::ValidationError("unknown algorithm: " + algo);
  }
  run.record.wall_time_ns = now_ns() - t0;
  return run;
}

int cmd_gen(const std::string& kind, int n, int d, std::uint64_t seed, bool simple,
            int perms, const std::string& mode, const std::string& out,
            const std::string& hidden_out) {
  if (kind == "regular") {
    BipartiteRegularGraph g = gen_union_permutations(n, d, seed, simple);
    write_graph(g, out);
  } else if (kind == "canonical") {
    CanonicalGraph cg = gen_canonical(d, seed);
    if (auto err = validate_canonical(cg))
      throw std::runtime_error("generated canonical instance invalid: " + *err);
    write_graph(cg.graph, out);
    if (!hidden_out.empty()) {
      Matching hidden(cg.side());
      for (auto [p, q] : cg.hidden) {
        hidden.match_p[p] = q;
        hidden.match_q[q] = p;
        ++hidden.size;
      }
      write_matching(hidden, hidden_out);
    }
  } else if (kind == "ds") {
    if (mode == "float") {
      auto triplets = gen_random_doubly_stochastic(n, perms, seed);
      (void)DoublyStochasticMatrix<double>::load(n, triplets);  // self-check
      write_matrix_float(n, triplets, out);
    } else if (mode == "int") {
      auto triplets = gen_integer_doubly_stochastic(n, perms, seed);
      (void)DoublyStochasticMatrix<long long>::load(n, triplets);
      write_matrix_int(n, triplets, out);
    } else {
      throw CLI::ValidationError("--mode must be float or int");
    }
  } else {
    throw CLI::ValidationError("--kind must be regular, canonical or ds");
  }
  return 0;
}

int cmd_match(const std::string& in, const std::string& algo, std::uint64_t seed,
              const std::string& out) {
  BipartiteRegularGraph g = read_graph(in);
  MatchRun run = run_matcher(algo, g, seed);
  if (auto err = verify_matching(g, run.matching, /*require_perfect=*/true)) {
    std::cerr << "verification failed: " << *err << "\n";
    return kExitVerify;
  }
  if (!out.empty()) write_matching(run.matching, out);
  std::cout << "# " << kVersion << " rng=" << kRngName << "\n"
            << BenchRecord::kHeader << "\n"
            << run.record.to_csv() << "\n";
  return 0;
}

template <typename W>
int verify_and_write(DoublyStochasticMatrix<W> matrix, std::size_t k,
                     std::uint64_t seed, const std::string& out) {
  const int n = matrix.n();
  std::unordered_map<long long, W> original;
  for (const auto& t : matrix.live_triplets())
    original[static_cast<long long>(t.row) * n + t.col] = t.weight;

  Rng rng = derive_rng(seed, 0x62766e);  // bvn stream
  BvnDecomposition<W> dec = matrix.decompose(k, rng);

  // Reconstruct sum(lambda_i * P_i) + residual entries and compare.
  std::unordered_map<long long, W> acc;
  for (const auto& term : dec.terms)
    for (int p = 0; p < n; ++p)
      acc[static_cast<long long>(p) * n + term.perm[p]] += term.lambda;
  for (const auto& t : matrix.live_triplets())
    acc[static_cast<long long>(t.row) * n + t.col] += t.weight;
  for (const auto& [key, w] : acc) {
    auto it = original.find(key);
    const W want = it == original.end() ? W(0) : it->second;
    const double diff = std::abs(static_cast<double>(w - want));
    if (diff > 1e-9) {
      std::cerr << "reconstruction mismatch at entry (" << key / n << ","
                << key % n << "): off by " << diff << "\n";
      return kExitVerify;
    }
  }
  for (const auto& [key, w] : original) {
    if (!acc.count(key) && std::abs(static_cast<double>(w)) > 1e-9) {
      std::cerr << "reconstruction lost entry (" << key / n << "," << key % n
                << ")\n";
      return kExitVerify;
    }
  }
  write_decomposition(dec, out);
  W lambda_sum = W(0);
  for (const auto& term : dec.terms) lambda_sum += term.lambda;
  std::cout << "terms=" << dec.terms.size() << " lambda_sum="
            << detail::weight_str(lambda_sum) << " residual="
            << detail::weight_str(dec.residual) << "\n";
  return 0;
}

int cmd_bvn(const std::string& in, const std::string& k_text, std::uint64_t seed,
            const std::string& out) {
  std::size_t k = std::numeric_limits<std::size_t>::max();
  if (k_text != "full") {
    long long v = std::stoll(k_text);
    if (v < 1) throw CLI::ValidationError("--k must be >= 1 or 'full'");
    k = static_cast<std::size_t>(v);
  }
  MatrixVariant mx = read_matrix(in);
  return std::visit(
      [&](auto matrix) { return verify_and_write(std::move(matrix), k, seed, out); },
      std::move(mx));
}

void write_transcripts(const std::string& path,
                       const std::vector<std::pair<int, GameResult>>& games) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "d,probe,u_side,u_index,v,nonevasive,hidden\n";
  for (const auto& [d, res] : games)
    for (const auto& rec : res.transcript)
      out << d << ',' << rec.probe << ',' << (rec.u.side == GSide::P ? 'P' : 'Q')
          << ',' << rec.u.index << ',' << rec.v << ',' << (rec.nonevasive ? 1 : 0)
          << ',' << (rec.hidden_edge ? 1 : 0) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_bench(const std::string& algo_list, const std::string& n_grid,
              const std::string& d_grid, int seeds, std::uint64_t base_seed,
              bool check_bounds, const std::string& out_path,
              const std::string& transcript_path) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open " + out_path);
    out = &file;
  }
  *out << "# " << kVersion << " bench algo=" << algo_list << " rng=" << kRngName
       << " base_seed=" << base_seed << " streams=splitmix64(seed,n,d,trial)\n";
  *out << BenchRecord::kHeader << "\n";

  std::vector<std::string> algos;
  {
    std::istringstream in(algo_list);
    std::string tok;
    while (std::getline(in, tok, ','))
      if (!tok.empty()) algos.push_back(tok);
    if (algos.empty()) throw CLI::ValidationError("empty --algo list");
  }

  const std::vector<int> ds = parse_grid(d_grid);
  std::vector<BenchRecord> rows;
  std::vector<std::pair<int, GameResult>> games;

  for (const std::string& algo : algos) {
    if (algo == "probe-scan" || algo == "probe-greedy") {
      for (int d : ds) {
        std::unique_ptr<Prober> prober;
        if (algo == "probe-scan")
          prober = std::make_unique<SequentialScanProber>();
        else
          prober = std::make_unique<GreedyAugmentingProber>();
        BenchRecord r;
        r.algo = algo;
        r.n = 4 * d + 1;
        r.d = d;
        r.seed = 0;  // the game is deterministic
        r.m = static_cast<long long>(r.n) * d;
        const long long t0 = now_ns();
        GameResult res = run_game(*prober, d);
        r.wall_time_ns = now_ns() - t0;
        r.total_steps = res.probes_before_reveal;
        rows.push_back(r);
        games.emplace_back(d, std::move(res));
      }
    } else {
      const std::vector<int> ns = parse_grid(n_grid);
      for (int n : ns) {
        for (int d : ds) {
          if (d > n) continue;
          for (int trial = 0; trial < seeds; ++trial) {
            const std::uint64_t seed = derive_seed(base_seed, n, d, trial);
            BipartiteRegularGraph g = gen_union_permutations(n, d, seed);
            MatchRun run = run_matcher(algo, g, seed);
            if (auto err = verify_matching(g, run.matching, true))
              throw std::runtime_error("verification failed at n=" +
                                       std::to_string(n) + " d=" +
                                       std::to_string(d) + ": " + *err);
            rows.push_back(run.record);
          }
        }
      }
    }
  }
  if (!transcript_path.empty()) write_transcripts(transcript_path, games);
  for (const auto& r : rows) *out << r.to_csv() << "\n";

  if (!check_bounds) return 0;

  // Probe rows are gated individually, walk rows per (algo, n, d) cell mean.
  std::map<std::tuple<std::string, int, int>, std::pair<double, long long>> cells;
  for (const auto& r : rows) {
    if (r.algo == "probe-scan" || r.algo == "probe-greedy") {
      if (r.total_steps < static_cast<long long>(r.d) * r.d) {
        std::cerr << "bound check failed: " << r.algo << " d=" << r.d
                  << " probes=" << r.total_steps << " < d^2=" << r.d * r.d << "\n";
        return kExitBounds;
      }
      continue;
    }
    if (r.algo == "hk" || r.algo == "euler") continue;
    auto& cell = cells[{r.algo, r.n, r.d}];
    cell.first += static_cast<double>(r.total_steps);
    cell.second += 1;
  }
  for (const auto& [key, cell] : cells) {
    const auto& [algo, n, d] = key;
    const double mean = cell.first / static_cast<double>(cell.second);
    const double h = harmonic(n);
    const double bound =
        algo == "walk" ? 8.0 * n + 4.0 * n * h : 1.5 * (n + n * h);
    if (mean > bound) {
      std::cerr << "bound check failed: algo=" << algo << " n=" << n << " d=" << d
                << " mean_steps=" << mean << " > " << bound << "\n";
      return kExitBounds;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect matchings in regular bipartite graphs via truncated "
               "random walks, plus Birkhoff-von-Neumann decomposition and a "
               "probe-game lower-bound harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate instances");
  std::string gen_kind, gen_out, gen_hidden, gen_mode = "float";
  int gen_n = 0, gen_d = 0, gen_perms = 10;
  std::uint64_t gen_seed = 0;
  bool gen_simple = false;
  gen->add_option("--kind", gen_kind, "regular | canonical | ds")->required();
  gen->add_option("--n", gen_n, "vertices per side / matrix dimension");
  gen->add_option("--d", gen_d, "degree");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--simple", gen_simple, "forbid parallel edges (regular only)");
  gen->add_option("--perms", gen_perms,
                  "permutations to combine (ds float) or common sum D (ds int)");
  gen->add_option("--mode", gen_mode, "ds matrix mode: float | int");
  gen->add_option("--out", gen_out, "output file")->required();
  gen->add_option("--hidden-out", gen_hidden,
                  "also write the hidden matching (canonical only)");

  // match
  auto* match = app.add_subcommand("match", "find a perfect matching");
  std::string match_in, match_algo = "walk", match_out;
  std::uint64_t match_seed = 0;
  match->add_option("--in", match_in, "graph file")->required();
  match->add_option("--algo", match_algo, "walk | walk-untruncated | hk | euler");
  match->add_option("--seed", match_seed, "random seed");
  match->add_option("--out", match_out, "matching output file");

  // bvn
  auto* bvn = app.add_subcommand("bvn", "Birkhoff-von-Neumann decomposition");
  std::string bvn_in, bvn_k = "full", bvn_out;
  std::uint64_t bvn_seed = 0;
  bvn->add_option("--in", bvn_in, "matrix file")->required();
  bvn->add_option("--k", bvn_k, "number of terms or 'full'");
  bvn->add_option("--seed", bvn_seed, "random seed");
  bvn->add_option("--out", bvn_out, "decomposition output file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark sweep, CSV output");
  std::string bench_algo = "walk", bench_n = "2^8..2^10", bench_d = "8";
  std::string bench_out, bench_transcript;
  int bench_seeds = 1;
  std::uint64_t bench_seed = 0;
  bool bench_check = false;
  bench->add_option("--algo", bench_algo,
                    "comma list of walk | walk-untruncated | hk | euler | "
                    "probe-scan | probe-greedy");
  bench->add_option("--n", bench_n, "n grid, e.g. 2^8..2^12 or 64,128");
  bench->add_option("--d", bench_d, "d grid");
  bench->add_option("--seeds", bench_seeds, "trials per cell");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_flag("--check-bounds", bench_check,
                  "gate mean step counts against the expected-scaling bounds");
  bench->add_option("--out", bench_out, "CSV output file (default stdout)");
  bench->add_option("--transcript-out", bench_transcript,
                    "probe-game only: write the full query transcripts as CSV");

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return cmd_gen(gen_kind, gen_n, gen_d, gen_seed, gen_simple, gen_perms,
                     gen_mode, gen_out, gen_hidden);
    if (match->parsed()) return cmd_match(match_in, match_algo, match_seed, match_out);
    if (bvn->parsed()) return cmd_bvn(bvn_in, bvn_k, bvn_seed, bvn_out);
    if (bench->parsed())
      return cmd_bench(bench_algo, bench_n, bench_d, bench_seeds, bench_seed,
                       bench_check, bench_out, bench_transcript);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
