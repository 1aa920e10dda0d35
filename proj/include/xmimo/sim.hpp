#pragma once

// Monte Carlo word-error sweep engine with deterministic per-trial random
// streams, Wilson confidence intervals, early stopping, diversity-slope
// fitting, and batch file emission (CSV table, SVG plot, run manifest).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xmimo/channel.hpp"
#include "xmimo/common.hpp"
#include "xmimo/constellation.hpp"
#include "xmimo/decoder.hpp"
#include "xmimo/receiver.hpp"
#include "xmimo/rng.hpp"
#include "xmimo/schemes.hpp"
#include "xmimo/stbc.hpp"

namespace xmimo {

// What counts as one "word" for the error rate: the whole network's four
// messages per channel trial, or each receiver's desired message pair
// (two words per trial).
enum class WepScope { network, per_rx };

inline WepScope parse_wep_scope(const std::string& s) {
  if (s == "network") return WepScope::network;
  if (s == "per-rx" || s == "per_rx") return WepScope::per_rx;
  throw ConfigError("unknown wep scope: " + s);
}

inline const char* wep_scope_name(WepScope s) {
  return s == WepScope::network ? "network" : "per-rx";
}

inline const char* decode_mode_name(DecodeMode m) {
  return m == DecodeMode::exhaustive ? "exhaustive" : "sphere";
}

inline DecodeMode parse_decode_mode(const std::string& s) {
  if (s == "exhaustive") return DecodeMode::exhaustive;
  if (s == "sphere") return DecodeMode::sphere;
  throw ConfigError("unknown decode mode: " + s);
}

struct SimConfig {
  SchemeConfig scheme;
  std::vector<double> p_db;  // strictly increasing grid, dB
  long trials = 1000;        // per-point trial budget
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string out_dir = "out";
  long max_word_errors = 200;  // early-stop target; 0 disables
  bool noise_on = true;
  WepScope scope = WepScope::network;
  DecodeMode decode = DecodeMode::sphere;
  ChannelDistSpec dist{};
  SrpParams srp{};  // required only by the TDMA baseline

  void validate() const {
    scheme.validate();
    if (p_db.empty()) throw ConfigError("sim: empty power grid");
    for (std::size_t i = 1; i < p_db.size(); ++i)
      if (!(p_db[i - 1] < p_db[i]))
        throw ConfigError("sim: power grid must be strictly increasing");
    if (trials < 1) throw ConfigError("sim: trials must be >= 1");
    if (workers < 1) throw ConfigError("sim: workers must be >= 1");
    if (max_word_errors < 0)
      throw ConfigError("sim: max_word_errors must be >= 0");
  }
};

struct SimPointRow {
  double p_db = 0.0;
  long trials = 0;  // words counted (per-rx scope counts two per trial)
  long word_errors = 0;
  double wep = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long degenerate_resamples = 0;
};

inline bool operator==(const SimPointRow& a, const SimPointRow& b) {
  return a.p_db == b.p_db && a.trials == b.trials &&
         a.word_errors == b.word_errors && a.wep == b.wep &&
         a.ci_low == b.ci_low && a.ci_high == b.ci_high &&
         a.degenerate_resamples == b.degenerate_resamples;
}

struct SimResult {
  std::vector<SimPointRow> rows;
};

inline bool operator==(const SimResult& a, const SimResult& b) {
  return a.rows == b.rows;
}

// 95% score interval for a binomial proportion; z defaults to the two-sided
// 95% normal quantile.
inline std::pair<double, double> wilson_interval(long errors, long n,
                                                 double z = 1.96) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

struct TrialOutcome {
  bool rx_err[2] = {false, false};
  long degenerate = 0;
};

// Shared per-sweep context so constellation tables are built once.
struct SweepContext {
  ConstellationSpec c;
  bool separable = false;  // enables the per-half code-domain factorization
};

inline Vec2 pick2(const std::vector<cplx>& pts, const std::array<int, 2>& i) {
  return Vec2(pts[static_cast<std::size_t>(i[0])],
              pts[static_cast<std::size_t>(i[1])]);
}

inline TrialOutcome ljj_trial(const SimConfig& cfg, const SweepContext& ctx,
                              double p, Rng& rng) {
  TrialOutcome out;
  int rej = 0;
  const ChannelRealization ch = sample_channel_set(2, cfg.dist, rng, &rej);
  out.degenerate = rej;
  const PrecoderSet pr = ljj_precoders(ch);
  const std::size_t n = ctx.c.points.size();
  // Message order: Tx-1 first/second pair, Tx-2 first/second pair.
  std::array<std::array<int, 2>, 4> idx{};
  for (auto& pair : idx)
    for (int& v : pair) v = static_cast<int>(rng.index(n));
  const Mat x1 = ljj_transmit(pr, 0, pick2(ctx.c.points, idx[0]),
                              pick2(ctx.c.points, idx[1]), p);
  const Mat x2 = ljj_transmit(pr, 1, pick2(ctx.c.points, idx[2]),
                              pick2(ctx.c.points, idx[3]), p);
  for (int rx = 0; rx < 2; ++rx) {
    const Mat y = apply_channel(ch, rx, x1, x2, cfg.noise_on, rng);
    const EffectiveChannels eff = effective_channels(ch, pr, rx);
    const ProcessedObservation obs = ljj_process(y, eff, rx, p);
    const MlModel m = linear_ml_model(obs, ctx.c.points);
    const MlDecision d = ml_decode(m, obs.y.col(0), cfg.decode);
    // Desired slots: (Tx-1 pair, Tx-2 pair) for this receiver.
    const std::array<int, 4> want = {idx[0 + rx][0], idx[0 + rx][1],
                                     idx[2 + rx][0], idx[2 + rx][1]};
    for (int k = 0; k < 4; ++k)
      if (d.idx[static_cast<std::size_t>(k)] != want[static_cast<std::size_t>(k)])
        out.rx_err[rx] = true;
  }
  return out;
}

inline Sym8 pick8(const std::vector<cplx>& pts, const std::array<int, 8>& i) {
  Sym8 s{};
  for (int k = 0; k < 8; ++k) s[static_cast<std::size_t>(k)] =
      pts[static_cast<std::size_t>(i[static_cast<std::size_t>(k)])];
  return s;
}

// Joint or per-half ML over the processed 4x4 block; returns the decoded
// constellation indices for the two desired messages (8 + 8, user-major).
inline std::array<std::array<int, 8>, 2> msr_decode_words(
    const SimConfig& cfg, const SweepContext& ctx, double theta,
    const ProcessedObservation& obs) {
  std::array<std::array<int, 8>, 2> got{};
  if (!ctx.separable) {
    const MlModel m = msr_ml_model_joint(obs, theta, ctx.c.points);
    const MlDecision d = ml_decode(m, vec_cm(obs.y), cfg.decode);
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 8; ++k)
        got[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)] =
            d.idx[static_cast<std::size_t>(8 * u + k)];
    return got;
  }
  // Separable coordinates: the code domain splits into two independent
  // halves; decode each and recombine through the involutive symbol map.
  std::array<Sym8, 2> xp{};
  for (int half = 0; half < 2; ++half) {
    const MlModel m = msr_ml_model_half(obs, theta, half, ctx.c);
    Vec y(8);
    for (int r = 0; r < 4; ++r) {
      y(r) = obs.y(r, 2 * half);
      y(4 + r) = obs.y(r, 2 * half + 1);
    }
    const MlDecision d = ml_decode(m, y, cfg.decode);
    const std::vector<cplx> vals = decision_values(m, d);
    const auto slots = msr_half_xprime_indices(half);
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 4; ++k)
        xp[static_cast<std::size_t>(u)][static_cast<std::size_t>(
            slots[static_cast<std::size_t>(k)])] =
            vals[static_cast<std::size_t>(4 * u + k)];
  }
  for (int u = 0; u < 2; ++u) {
    const Sym8 x = xprime_unmap(xp[static_cast<std::size_t>(u)]);
    for (int k = 0; k < 8; ++k)
      got[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)] =
          nearest_point(ctx.c, x[static_cast<std::size_t>(k)]);
  }
  return got;
}

inline TrialOutcome msr_trial(const SimConfig& cfg, const SweepContext& ctx,
                              double p, Rng& rng) {
  TrialOutcome out;
  const double theta =
      (cfg.scheme.scheme == Scheme::trivial_repetition) ? 0.0
                                                        : cfg.scheme.theta;
  int rej = 0;
  const ChannelRealization ch = sample_channel_set(4, cfg.dist, rng, &rej);
  out.degenerate = rej;
  const PrecoderSet pr = ljj_precoders(ch);
  const std::size_t n = ctx.c.points.size();
  // Message order: Tx-1 first/second word, Tx-2 first/second word.
  std::array<std::array<int, 8>, 4> idx{};
  for (auto& w : idx)
    for (int& v : w) v = static_cast<int>(rng.index(n));
  const Mat x1 = msr_transmit(pr, 0, pick8(ctx.c.points, idx[0]),
                              pick8(ctx.c.points, idx[1]), theta, p);
  const Mat x2 = msr_transmit(pr, 1, pick8(ctx.c.points, idx[2]),
                              pick8(ctx.c.points, idx[3]), theta, p);
  for (int rx = 0; rx < 2; ++rx) {
    const Mat y = apply_channel(ch, rx, x1, x2, cfg.noise_on, rng);
    ProcessedObservation obs = msr_process(y, theta, rx, p);
    const EffectiveChannels eff = effective_channels(ch, pr, rx);
    obs.model_matrix.resize(4, 8);
    obs.model_matrix << eff.hhat, eff.ghat;
    const auto got = msr_decode_words(cfg, ctx, theta, obs);
    const std::array<int, 8>& want_first = idx[static_cast<std::size_t>(0 + rx)];
    const std::array<int, 8>& want_second =
        idx[static_cast<std::size_t>(2 + rx)];
    if (got[0] != want_first || got[1] != want_second) out.rx_err[rx] = true;
  }
  return out;
}

inline TrialOutcome js_trial(const SimConfig& cfg, const SweepContext& ctx,
                             double p, Rng& rng) {
  TrialOutcome out;
  ChannelRealization ch;
  JsPrecoderSet js;
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    int rej = 0;
    ch = sample_channel_set(4, cfg.dist, rng, &rej);
    out.degenerate += rej;
    try {
      js = js_precoders(ch);
      ok = true;
    } catch (const DegenerateDrawError&) {
      ++out.degenerate;
    }
  }
  if (!ok)
    throw DegenerateDrawError("js_trial: no usable eigensystem in 100 draws");
  const std::size_t n = ctx.c.points.size();
  std::array<std::array<int, 4>, 4> idx{};
  for (auto& w : idx)
    for (int& v : w) v = static_cast<int>(rng.index(n));
  const auto pick4 = [&](const std::array<int, 4>& i) {
    Vec4 v;
    for (int k = 0; k < 4; ++k)
      v(k) = ctx.c.points[static_cast<std::size_t>(i[static_cast<std::size_t>(k)])];
    return v;
  };
  const Mat x1 = js_transmit(js, 0, pick4(idx[0]), pick4(idx[1]), p);
  const Mat x2 = js_transmit(js, 1, pick4(idx[2]), pick4(idx[3]), p);
  for (int rx = 0; rx < 2; ++rx) {
    const Mat y = apply_channel(ch, rx, x1, x2, cfg.noise_on, rng);
    MlDecision d;
    js_receive(y, js, ch, rx, p, ctx.c, cfg.decode, &d);
    const std::array<int, 4>& want_first = idx[static_cast<std::size_t>(0 + rx)];
    const std::array<int, 4>& want_second =
        idx[static_cast<std::size_t>(2 + rx)];
    for (int k = 0; k < 4; ++k) {
      if (d.idx[static_cast<std::size_t>(k)] !=
          want_first[static_cast<std::size_t>(k)])
        out.rx_err[rx] = true;
      if (d.idx[static_cast<std::size_t>(4 + k)] !=
          want_second[static_cast<std::size_t>(k)])
        out.rx_err[rx] = true;
    }
  }
  return out;
}

inline TrialOutcome tdma_trial(const SimConfig& cfg, const SweepContext& ctx,
                               double p, Rng& rng) {
  TrialOutcome out;
  const int m = cfg.scheme.m;
  int rej = 0;
  const ChannelRealization ch = sample_channel_set(m, cfg.dist, rng, &rej);
  out.degenerate = rej;
  const std::size_t n = ctx.c.points.size();
  // One precoded single-user transmission per message, each over its own
  // direct channel, at full power while active.
  for (int tx = 0; tx < 2; ++tx) {
    for (int rx = 0; rx < 2; ++rx) {
      std::vector<int> idx(static_cast<std::size_t>(m));
      for (int& v : idx) v = static_cast<int>(rng.index(n));
      Vec x(m);
      for (int k = 0; k < m; ++k)
        x(k) = ctx.c.points[static_cast<std::size_t>(
            idx[static_cast<std::size_t>(k)])];
      const Mat& h = ch.H(tx, rx);
      Vec y = h * tdma_srp_transmit(h, x, cfg.srp, p);
      if (cfg.noise_on)
        for (int r = 0; r < m; ++r) y(r) += rng.cgauss();
      MlModel model;
      model.coeff_re.resize(m, m);
      model.coeff_im.resize(m, m);
      for (int k = 0; k < m; ++k) {
        Vec e = Vec::Zero(m);
        e(k) = 1.0;
        const Vec col = h * tdma_srp_transmit(h, e, cfg.srp, p);
        model.coeff_re.col(k) = col;
        model.coeff_im.col(k) = cplx(0, 1) * col;
      }
      model.noise_var = Eigen::VectorXd::Ones(m);
      model.alphabets.assign(static_cast<std::size_t>(m), ctx.c.points);
      const MlDecision d = ml_decode(model, y, cfg.decode);
      for (int k = 0; k < m; ++k)
        if (d.idx[static_cast<std::size_t>(k)] !=
            idx[static_cast<std::size_t>(k)])
          out.rx_err[rx] = true;
    }
  }
  return out;
}

inline TrialOutcome run_trial(const SimConfig& cfg, const SweepContext& ctx,
                              double p, Rng& rng) {
  switch (cfg.scheme.scheme) {
    case Scheme::ljj:
      return ljj_trial(cfg, ctx, p, rng);
    case Scheme::msr:
    case Scheme::trivial_repetition:
      return msr_trial(cfg, ctx, p, rng);
    case Scheme::js:
      return js_trial(cfg, ctx, p, rng);
    case Scheme::tdma_srp:
      return tdma_trial(cfg, ctx, p, rng);
  }
  throw ConfigError("run_trial: unknown scheme");
}

}  // namespace detail

// Runs the configured sweep.  Every trial draws from its own random stream
// keyed by (master seed, point index, trial index), so the result is a pure
// function of (config, seed): the worker count never enters the streams or
// the stop rule (trials are counted in index order; the sweep stops after
// the trial in which the error target is reached).
inline SimResult run_wep_sweep(const SimConfig& cfg) {
  cfg.validate();
  detail::SweepContext ctx;
  ctx.c = make_constellation(cfg.scheme.constellation, cfg.scheme.phi);
  ctx.separable = coordinate_sets(ctx.c).separable;

  SimResult res;
  res.rows.reserve(cfg.p_db.size());
  for (std::size_t pi = 0; pi < cfg.p_db.size(); ++pi) {
    const double p = db_to_linear(cfg.p_db[pi]);
    SimPointRow row;
    row.p_db = cfg.p_db[pi];
    for (long t = 0; t < cfg.trials; ++t) {
      Rng rng(stream_key(cfg.master_seed, pi, static_cast<std::uint64_t>(t)));
      const detail::TrialOutcome o = detail::run_trial(cfg, ctx, p, rng);
      row.degenerate_resamples += o.degenerate;
      if (cfg.scope == WepScope::network) {
        row.trials += 1;
        if (o.rx_err[0] || o.rx_err[1]) row.word_errors += 1;
      } else {
        row.trials += 2;
        row.word_errors += (o.rx_err[0] ? 1 : 0) + (o.rx_err[1] ? 1 : 0);
      }
      if (cfg.max_word_errors > 0 && row.word_errors >= cfg.max_word_errors)
        break;
    }
    row.wep = row.trials > 0
                  ? static_cast<double>(row.word_errors) /
                        static_cast<double>(row.trials)
                  : 0.0;
    const auto ci = wilson_interval(row.word_errors, row.trials);
    row.ci_low = ci.first;
    row.ci_high = ci.second;
    res.rows.push_back(row);
  }
  return res;
}

struct SlopeEstimate {
  double diversity = 0.0;  // positive estimate: -slope of log10 WEP vs log10 P
  double stderr_ = 0.0;
  int points_used = 0;
};

// Least-squares slope of log10(wep) against log10(P) over rows
// [begin, end), using only rows with at least min_errors word errors.
inline SlopeEstimate estimate_diversity_slope(const SimResult& res,
                                              std::size_t begin,
                                              std::size_t end,
                                              long min_errors = 50) {
  if (end > res.rows.size() || begin > end)
    throw ConfigError("estimate_diversity_slope: bad window");
  std::vector<double> xs, ys;
  for (std::size_t i = begin; i < end; ++i) {
    const SimPointRow& r = res.rows[i];
    if (r.word_errors >= min_errors && r.wep > 0.0) {
      xs.push_back(r.p_db / 10.0);  // log10 of linear power
      ys.push_back(std::log10(r.wep));
    }
  }
  const int n = static_cast<int>(xs.size());
  if (n < 2)
    throw InsufficientDataError(
        "estimate_diversity_slope: need >= 2 points with enough errors");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[static_cast<std::size_t>(i)];
    sy += ys[static_cast<std::size_t>(i)];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = xs[static_cast<std::size_t>(i)] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[static_cast<std::size_t>(i)] - my);
  }
  if (sxx <= 0.0)
    throw InsufficientDataError(
        "estimate_diversity_slope: degenerate abscissa");
  const double b = sxy / sxx;
  SlopeEstimate est;
  est.diversity = -b;
  est.points_used = n;
  if (n > 2) {
    double ss = 0;
    for (int i = 0; i < n; ++i) {
      const double pred =
          my + b * (xs[static_cast<std::size_t>(i)] - mx);
      const double r = ys[static_cast<std::size_t>(i)] - pred;
      ss += r * r;
    }
    est.stderr_ = std::sqrt(ss / (n - 2) / sxx);
  }
  return est;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Git-style blob hash (SHA-1 over "blob <len>\0<content>").
inline std::string sha1_hex(const std::string& data) {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                        0xC3D2E1F0u};
  std::string msg = data;
  const std::uint64_t bits = static_cast<std::uint64_t>(msg.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  const auto rol = [](std::uint32_t v, int s) {
    return (v << s) | (v >> (32 - s));
  };
  for (std::size_t off = 0; off < msg.size(); off += 64) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = 0;
      for (int b = 0; b < 4; ++b)
        w[i] = (w[i] << 8) |
               static_cast<std::uint8_t>(msg[off + 4 * static_cast<std::size_t>(i) +
                                             static_cast<std::size_t>(b)]);
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
  char out[41];
  std::snprintf(out, sizeof out, "%08x%08x%08x%08x%08x", h[0], h[1], h[2],
                h[3], h[4]);
  return out;
}

inline std::string git_blob_hash(const std::string& content) {
  return sha1_hex("blob " + std::to_string(content.size()) + '\0' + content);
}

}  // namespace detail

// Flat key=value serialization of the full configuration (also the hashed
// manifest payload).
inline std::string serialize_config(const SimConfig& cfg) {
  std::ostringstream os;
  os << "scheme=" << scheme_name(cfg.scheme.scheme) << '\n';
  os << "m=" << cfg.scheme.m << '\n';
  os << "const=" << const_kind_name(cfg.scheme.constellation) << '\n';
  os << "phi=" << detail::fmt_double(cfg.scheme.phi) << '\n';
  os << "theta=" << detail::fmt_double(cfg.scheme.theta) << '\n';
  os << "pdb=";
  for (std::size_t i = 0; i < cfg.p_db.size(); ++i)
    os << (i ? "," : "") << detail::fmt_double(cfg.p_db[i]);
  os << '\n';
  os << "trials=" << cfg.trials << '\n';
  os << "seed=" << cfg.master_seed << '\n';
  os << "workers=" << cfg.workers << '\n';
  os << "out=" << cfg.out_dir << '\n';
  os << "max-errors=" << cfg.max_word_errors << '\n';
  os << "no-noise=" << (cfg.noise_on ? 0 : 1) << '\n';
  os << "wep-scope=" << wep_scope_name(cfg.scope) << '\n';
  os << "decode=" << decode_mode_name(cfg.decode) << '\n';
  os << "dist=" << channel_dist_name(cfg.dist.kind) << '\n';
  os << "dist-a=" << detail::fmt_double(cfg.dist.a) << '\n';
  os << "dist-b=" << detail::fmt_double(cfg.dist.b) << '\n';
  os << "srp=";
  for (std::size_t i = 0; i < cfg.srp.blocks.size(); ++i) {
    const auto& b = cfg.srp.blocks[i];
    os << (i ? "," : "") << detail::fmt_double(b[0]) << ':'
       << detail::fmt_double(b[1]) << ':' << detail::fmt_double(b[2]);
  }
  os << '\n';
  return os.str();
}

inline std::string render_csv(const SimResult& res) {
  std::string out = "p_db,trials,word_errors,wep,ci_low,ci_high,degenerate_resamples\n";
  for (const SimPointRow& r : res.rows) {
    out += detail::fmt_double(r.p_db);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += std::to_string(r.word_errors);
    out += ',';
    out += detail::fmt_double(r.wep);
    out += ',';
    out += detail::fmt_double(r.ci_low);
    out += ',';
    out += detail::fmt_double(r.ci_high);
    out += ',';
    out += std::to_string(r.degenerate_resamples);
    out += '\n';
  }
  return out;
}

inline SimResult parse_csv(std::istream& in) {
  SimResult res;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("csv: missing header line");
  if (line != "p_db,trials,word_errors,wep,ci_low,ci_high,degenerate_resamples")
    throw ConfigError("csv: unexpected header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SimPointRow r;
    if (std::sscanf(line.c_str(), "%lf,%ld,%ld,%lf,%lf,%lf,%ld", &r.p_db,
                    &r.trials, &r.word_errors, &r.wep, &r.ci_low, &r.ci_high,
                    &r.degenerate_resamples) != 7)
      throw ConfigError("csv: malformed row: " + line);
    res.rows.push_back(r);
  }
  return res;
}

inline SimResult read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  return parse_csv(in);
}

// Minimal static log-y plot of the sweep.
inline std::string render_svg(const SimResult& res) {
  const int W = 640, H = 480, ML = 70, MR = 20, MT = 30, MB = 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H
     << "\" fill=\"white\"/>\n";
  double x0 = 0, x1 = 1, ly0 = -1, ly1 = 0;
  std::vector<std::pair<double, double>> pts;  // (p_db, log10 wep)
  for (const SimPointRow& r : res.rows)
    if (r.wep > 0.0) pts.emplace_back(r.p_db, std::log10(r.wep));
  if (!res.rows.empty()) {
    x0 = res.rows.front().p_db;
    x1 = res.rows.back().p_db;
    if (x1 <= x0) x1 = x0 + 1;
  }
  if (!pts.empty()) {
    ly0 = ly1 = pts.front().second;
    for (const auto& pp : pts) {
      ly0 = std::min(ly0, pp.second);
      ly1 = std::max(ly1, pp.second);
    }
    ly0 = std::floor(ly0) - 0.2;
    ly1 = std::ceil(ly1) + 0.2;
    if (ly1 <= ly0) ly1 = ly0 + 1;
  }
  const auto px = [&](double p) {
    return ML + (p - x0) / (x1 - x0) * (W - ML - MR);
  };
  const auto py = [&](double lw) {
    return H - MB - (lw - ly0) / (ly1 - ly0) * (H - MT - MB);
  };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                ML, H - MB, W - MR, H - MB);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                ML, MT, ML, H - MB);
  os << buf;
  os << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
     << "\" text-anchor=\"middle\" font-size=\"14\">P (dB)</text>\n";
  os << "<text x=\"16\" y=\"" << (H / 2)
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
        "16 "
     << (H / 2) << ")\">log10 WEP</text>\n";
  for (const SimPointRow& r : res.rows) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-size=\"11\">%g</text>\n",
                  px(r.p_db), H - MB + 18, r.p_db);
    os << buf;
  }
  if (!pts.empty()) {
    for (double g = std::ceil(ly0); g <= ly1 + 1e-9; g += 1.0) {
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                    "font-size=\"11\">1e%g</text>\n",
                    ML - 6, py(g) + 4, g);
      os << buf;
    }
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
          "points=\"";
    for (const auto& pp : pts) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(pp.first),
                    py(pp.second));
      os << buf;
    }
    os << "\"/>\n";
    for (const SimPointRow& r : res.rows) {
      if (r.wep <= 0.0) continue;
      if (r.ci_low > 0.0 && r.ci_high > 0.0) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"#1f77b4\"/>\n",
                      px(r.p_db), py(std::log10(r.ci_low)), px(r.p_db),
                      py(std::log10(r.ci_high)));
        os << buf;
      }
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" "
                    "fill=\"#1f77b4\"/>\n",
                    px(r.p_db), py(std::log10(r.wep)));
      os << buf;
    }
  }
  os << "</svg>\n";
  return os.str();
}

// Writes wep.csv, wep.svg, and manifest.txt into the given directory.
inline void emit_outputs(const SimResult& res, const SimConfig& cfg,
                         const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output dir " + dir + ": " +
                             ec.message());
  const auto write_file = [&](const std::string& name,
                              const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
  };
  write_file("wep.csv", render_csv(res));
  write_file("wep.svg", render_svg(res));
  const std::string conf = serialize_config(cfg);
  write_file("manifest.txt",
             conf + "config-hash=" + detail::git_blob_hash(conf) + '\n');
}

// --- configuration text -----------------------------------------------------

// Parses "start:step:stop" (inclusive stop, positive step) or a single value
// or a comma list into a power grid in dB.
inline std::vector<double> parse_pdb(const std::string& s) {
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    double start = 0, step = 0, stop = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3)
      throw ConfigError("pdb: expected start:step:stop, got " + s);
    if (step <= 0) throw ConfigError("pdb: step must be positive");
    if (stop + 1e-9 < start) throw ConfigError("pdb: stop before start");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw ConfigError("pdb: empty grid spec: " + s);
  return grid;
}

inline SrpParams parse_srp(const std::string& s) {
  SrpParams p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::array<double, 3> b{};
    if (std::sscanf(tok.c_str(), "%lf:%lf:%lf", &b[0], &b[1], &b[2]) != 3)
      throw ConfigError("srp: expected tau:psi:theta triple, got " + tok);
    p.blocks.push_back(b);
  }
  return p;
}

// Flat key=value file: blank lines and '#' comments ignored; keys mirror the
// command-line flag names (without the leading dashes).
inline std::map<std::string, std::string> parse_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    auto trim = [](std::string v) {
      const auto a = v.find_first_not_of(" \t\r");
      const auto b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Applies one key=value entry (config-file route; flags use the same keys).
inline void apply_config_entry(SimConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "scheme") {
    cfg.scheme.scheme = parse_scheme(value);
    cfg.scheme.m = (cfg.scheme.scheme == Scheme::ljj) ? 2 : 4;
  } else if (key == "m") {
    cfg.scheme.m = std::stoi(value);
  } else if (key == "const") {
    cfg.scheme.constellation = parse_const_kind(value);
  } else if (key == "phi") {
    cfg.scheme.phi = std::stod(value);
  } else if (key == "theta") {
    cfg.scheme.theta = std::stod(value);
  } else if (key == "pdb") {
    cfg.p_db = parse_pdb(value);
  } else if (key == "trials") {
    cfg.trials = std::stol(value);
  } else if (key == "seed") {
    cfg.master_seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "workers") {
    cfg.workers = std::stoi(value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "max-errors") {
    cfg.max_word_errors = std::stol(value);
  } else if (key == "no-noise") {
    cfg.noise_on = (value == "0" || value == "false");
  } else if (key == "wep-scope") {
    cfg.scope = parse_wep_scope(value);
  } else if (key == "decode") {
    cfg.decode = parse_decode_mode(value);
  } else if (key == "dist") {
    cfg.dist.kind = parse_channel_dist(value);
  } else if (key == "dist-a") {
    cfg.dist.a = std::stod(value);
  } else if (key == "dist-b") {
    cfg.dist.b = std::stod(value);
  } else if (key == "srp") {
    cfg.srp = parse_srp(value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace xmimo
