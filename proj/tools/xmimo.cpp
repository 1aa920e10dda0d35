// Command-line front end: Monte Carlo sweeps, numerical oracles, and
// codeword-difference rank scans.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xmimo/xmimo.hpp"

namespace {

using namespace xmimo;

// Shared flag set; the config file (if given) is applied first, then any
// explicitly passed flags override it.
struct FlagSet {
  std::string config_file;
  std::string scheme, constellation, pdb, wep_scope, decode, dist, srp, out;
  double phi = 0, theta = 0, dist_a = 0, dist_b = 0;
  long trials = 0, max_errors = 0;
  std::uint64_t seed = 0;
  int workers = 0, m = 0;
  bool no_noise = false;
};

void add_common_flags(CLI::App* app, FlagSet& f) {
  app->add_option("--config", f.config_file,
                  "key=value config file (flags override it)");
  app->add_option("--scheme", f.scheme, "ljj|msr|js|trivial|tdma");
  app->add_option("--const", f.constellation, "bpsk|qam4|qam8|qam16");
  app->add_option("--phi", f.phi, "constellation rotation (rad)");
  app->add_option("--theta", f.theta, "codeword rotation (rad)");
  app->add_option("--pdb", f.pdb, "power grid, dB: start:step:stop or list");
  app->add_option("--trials", f.trials, "trial budget per grid point");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--workers", f.workers, "worker count (results invariant)");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--no-noise", f.no_noise, "disable channel noise (diagnostic)");
  app->add_option("--wep-scope", f.wep_scope, "network|per-rx");
  app->add_option("--m", f.m, "antennas per node");
  app->add_option("--decode", f.decode, "sphere|exhaustive");
  app->add_option("--max-errors", f.max_errors,
                  "early-stop word-error target (0 disables)");
  app->add_option("--dist", f.dist, "gaussian|uniform");
  app->add_option("--dist-a", f.dist_a, "uniform box lower edge");
  app->add_option("--dist-b", f.dist_b, "uniform box upper edge");
  app->add_option("--srp", f.srp,
                  "single-user precoder triples tau:psi:theta[,...]");
}

SimConfig build_config(const CLI::App* app, const FlagSet& f) {
  SimConfig cfg;
  if (!f.config_file.empty()) {
    const auto kv = parse_key_value_file(f.config_file);
    // "scheme" carries a default antenna count, so apply it before an
    // explicit "m" from the same file can be overridden by it.
    if (const auto it = kv.find("scheme"); it != kv.end())
      apply_config_entry(cfg, it->first, it->second);
    for (const auto& [k, v] : kv)
      if (k != "scheme") apply_config_entry(cfg, k, v);
  }
  const auto passed = [&](const std::string& name) {
    return app->count(name) > 0;
  };
  if (passed("--scheme")) apply_config_entry(cfg, "scheme", f.scheme);
  if (passed("--m")) cfg.scheme.m = f.m;
  if (passed("--const")) apply_config_entry(cfg, "const", f.constellation);
  if (passed("--phi")) cfg.scheme.phi = f.phi;
  if (passed("--theta")) cfg.scheme.theta = f.theta;
  if (passed("--pdb")) cfg.p_db = parse_pdb(f.pdb);
  if (passed("--trials")) cfg.trials = f.trials;
  if (passed("--seed")) cfg.master_seed = f.seed;
  if (passed("--workers")) cfg.workers = f.workers;
  if (passed("--out")) cfg.out_dir = f.out;
  if (passed("--no-noise")) cfg.noise_on = false;
  if (passed("--wep-scope")) cfg.scope = parse_wep_scope(f.wep_scope);
  if (passed("--decode")) cfg.decode = parse_decode_mode(f.decode);
  if (passed("--max-errors")) cfg.max_word_errors = f.max_errors;
  if (passed("--dist")) cfg.dist.kind = parse_channel_dist(f.dist);
  if (passed("--dist-a")) cfg.dist.a = f.dist_a;
  if (passed("--dist-b")) cfg.dist.b = f.dist_b;
  if (passed("--srp")) cfg.srp = parse_srp(f.srp);
  return cfg;
}

int cmd_sweep(const CLI::App* app, const FlagSet& f) {
  SimConfig cfg = build_config(app, f);
  const SimResult res = run_wep_sweep(cfg);
  emit_outputs(res, cfg, cfg.out_dir);
  std::printf("p_db,trials,word_errors,wep,ci_low,ci_high,degenerate_resamples\n");
  for (const SimPointRow& r : res.rows)
    std::printf("%g,%ld,%ld,%.6g,%.6g,%.6g,%ld\n", r.p_db, r.trials,
                r.word_errors, r.wep, r.ci_low, r.ci_high,
                r.degenerate_resamples);
  try {
    const SlopeEstimate s =
        estimate_diversity_slope(res, 0, res.rows.size());
    std::printf("diversity=%.4f stderr=%.4f points=%d\n", s.diversity,
                s.stderr_, s.points_used);
  } catch (const InsufficientDataError&) {
    std::printf("diversity=NA (not enough error events)\n");
  }
  std::printf("wrote %s/wep.csv, wep.svg, manifest.txt\n",
              cfg.out_dir.c_str());
  return 0;
}

int cmd_verify(const CLI::App* app, const FlagSet& f, long draws) {
  SimConfig cfg = build_config(app, f);
  Rng rng(cfg.master_seed);
  const double theta = cfg.scheme.theta;

  RankReport rr = check_R_fullrank(draws, cfg.dist, rng);
  std::printf("rank.draws=%ld\n", rr.draws);
  std::printf("rank.min_sigma_ratio=%.6e\n", rr.min_sigma_ratio);
  std::printf("rank.failures=%ld\n", rr.failures);
  std::printf("rank.threshold=%.1e\n", rr.threshold);

  double worst_align = 0.0;
  int min_rank = 12;
  double min_abs_p = std::numeric_limits<double>::infinity();
  double min_abs_final = min_abs_p;
  for (long i = 0; i < draws; ++i) {
    const ChannelRealization ch = sample_channel_set(4, cfg.dist, rng);
    try {
      const JsAlignmentReport ar = check_js_alignment(ch);
      worst_align = std::max({worst_align, ar.align1, ar.align2});
      min_rank = std::min(min_rank, ar.signal_rank);
    } catch (const DegenerateDrawError&) {
    }
    try {
      const PivotReport pr = check_appendixE_pivots(ch, theta);
      min_abs_p = std::min(min_abs_p, std::abs(pr.p_value));
      min_abs_final = std::min(min_abs_final, std::abs(pr.final_entry));
    } catch (const DegenerateDrawError&) {
    }
  }
  std::printf("align.draws=%ld\n", draws);
  std::printf("align.worst_residual=%.6e\n", worst_align);
  std::printf("align.min_signal_rank=%d\n", min_rank);
  std::printf("pivots.min_abs_p=%.6e\n", min_abs_p);
  std::printf("pivots.min_abs_final=%.6e\n", min_abs_final);

  for (int which = 0; which < 2; ++which) {
    const cplx v = pivot_regression_value(pivot_regression_channel(which), theta);
    std::printf("regression.%d=%.12g%+.12gj\n", which, v.real(), v.imag());
  }

  // Pairwise-error trend for a full-rank difference pair: every symbol of
  // the first codeword differs, the second codeword is shared.
  const ConstellationSpec c =
      make_constellation(cfg.scheme.constellation, cfg.scheme.phi);
  Sym8 a{}, b{}, shared{};
  for (int k = 0; k < 8; ++k) {
    a[k] = shared[k] = c.points.front();
    b[k] = c.points.back();
  }
  SchemeConfig msr_cfg;
  msr_cfg.scheme = Scheme::msr;
  msr_cfg.m = 4;
  msr_cfg.theta = theta;
  const CodewordPair pair =
      codeword_pair_from_symbols(a, shared, b, shared, theta);
  const std::vector<double> grid = {1.0, 2.0, 4.0};
  const std::vector<double> pep =
      pep_probe(msr_cfg, pair, grid, std::max(1000L, draws), rng);
  for (std::size_t i = 0; i < grid.size(); ++i)
    std::printf("pep.P%.0f=%.6e\n", grid[i], pep[i]);
  const std::size_t n = grid.size();
  if (pep[n - 1] > 0.0 && pep[n - 2] > 0.0) {
    const double slope = (std::log10(pep[n - 1]) - std::log10(pep[n - 2])) /
                         (std::log10(grid[n - 1]) - std::log10(grid[n - 2]));
    std::printf("pep.tail_slope=%.4f\n", slope);
  }
  return 0;
}

int cmd_rankscan(const FlagSet& f, const CLI::App* app, const std::string& mode,
                 std::uint64_t samples) {
  SimConfig cfg = build_config(app, f);
  const ConstellationSpec c =
      make_constellation(cfg.scheme.constellation, cfg.scheme.phi);
  RankScanReport rep;
  if (mode == "exhaustive") {
    rep = diff_rank_scan(c, cfg.scheme.theta, ScanMode::exhaustive);
  } else if (mode == "sampled") {
    Rng rng(cfg.master_seed);
    rep = diff_rank_scan(c, cfg.scheme.theta, ScanMode::sampled, samples, &rng);
  } else {
    throw ConfigError("rankscan: mode must be exhaustive or sampled");
  }
  std::printf("scan.mode=%s\n", rep.exhaustive ? "exhaustive" : "sampled");
  std::printf("scan.tuples=%" PRIu64 "\n", rep.tuples_scanned);
  std::printf("scan.min_abs_det=%.6e\n", rep.min_abs_det);
  std::printf("scan.witness=");
  for (int k = 0; k < 8; ++k)
    std::printf("%s%g%+gj", k ? ";" : "", rep.witness[k].real(),
                rep.witness[k].imag());
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2x2 MIMO X-network link-level simulator"};
  app.require_subcommand(1);

  FlagSet fs, fv, fr;
  CLI::App* sweep = app.add_subcommand("sweep", "run a WEP sweep");
  add_common_flags(sweep, fs);

  CLI::App* verify = app.add_subcommand("verify", "run the numerical oracles");
  add_common_flags(verify, fv);
  long draws = 1000;
  verify->add_option("--draws", draws, "channel draws per oracle");

  CLI::App* rankscan =
      app.add_subcommand("rankscan", "codeword-difference rank scan");
  add_common_flags(rankscan, fr);
  std::string mode = "exhaustive";
  std::uint64_t samples = 100000;
  rankscan->add_option("--mode", mode, "exhaustive|sampled");
  rankscan->add_option("--samples", samples, "tuples for sampled mode");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sweep->parsed()) return cmd_sweep(sweep, fs);
    if (verify->parsed()) return cmd_verify(verify, fv, draws);
    if (rankscan->parsed()) return cmd_rankscan(fr, rankscan, mode, samples);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
