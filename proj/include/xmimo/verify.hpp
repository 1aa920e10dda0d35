#pragma once

// Numerical oracles for the almost-sure structural claims behind the
// cancellation receivers: full rank of the zero-forced symbol model,
// precoder alignment for the four-antenna baseline, the pivots of the
// three-stage cancellation chain, and the pairwise-error trend of the
// stacked-codeword scheme.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "xmimo/channel.hpp"
#include "xmimo/common.hpp"
#include "xmimo/receiver.hpp"
#include "xmimo/rng.hpp"
#include "xmimo/schemes.hpp"
#include "xmimo/stbc.hpp"

namespace xmimo {

// Gaussian tail probability Q(x) = P[N(0,1) > x].
inline double q_function(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

struct RankReport {
  long draws = 0;
  double min_sigma_ratio = std::numeric_limits<double>::infinity();
  long failures = 0;  // draws with sigma_min/sigma_max below threshold
  double threshold = 1e-12;
};

// sigma_min/sigma_max of the cancelled 4x4 symbol model R, assembled by
// pushing the four canonical symbol vectors through the actual
// transmit/channel/processing path (not the closed-form model_matrix), with
// the interference symbols at zero and unit transmit scale.
inline double r_probe_sigma_ratio(const ChannelRealization& ch, int rx = 0) {
  const PrecoderSet pr = ljj_precoders(ch);
  const EffectiveChannels eff = effective_channels(ch, pr, rx);
  Rng quiet(0);  // apply_channel draws nothing with the noise off
  const double p_unit = 4.0 / 3.0;
  const Vec2 zero2 = Vec2::Zero();
  Mat r(4, 4);
  for (int k = 0; k < 4; ++k) {
    Vec2 s0 = Vec2::Zero(), s1 = Vec2::Zero();
    if (k < 2)
      s0(k) = 1.0;
    else
      s1(k - 2) = 1.0;
    Mat x1, x2;
    if (rx == 0) {
      x1 = ljj_transmit(pr, 0, s0, zero2, p_unit);
      x2 = ljj_transmit(pr, 1, s1, zero2, p_unit);
    } else {
      x1 = ljj_transmit(pr, 0, zero2, s0, p_unit);
      x2 = ljj_transmit(pr, 1, zero2, s1, p_unit);
    }
    const Mat y = apply_channel(ch, rx, x1, x2, false, quiet);
    r.col(k) = ljj_process(y, eff, rx, p_unit).y;
  }
  Eigen::JacobiSVD<Mat> svd(r);
  const Eigen::VectorXd sv = svd.singularValues();
  return sv(3) / sv(0);
}

inline RankReport check_R_fullrank(long n_draws, const ChannelDistSpec& dist,
                                   Rng& rng, double threshold = 1e-12,
                                   int rx = 0) {
  if (n_draws <= 0) throw ConfigError("check_R_fullrank: n_draws must be > 0");
  RankReport rep;
  rep.draws = n_draws;
  rep.threshold = threshold;
  for (long i = 0; i < n_draws; ++i) {
    const ChannelRealization ch = sample_channel_set(2, dist, rng);
    const double ratio = r_probe_sigma_ratio(ch, rx);
    rep.min_sigma_ratio = std::min(rep.min_sigma_ratio, ratio);
    if (ratio < threshold) ++rep.failures;
  }
  return rep;
}

struct JsAlignmentReport {
  double align1 = 0.0;  // interference alignment residual at Rx-2, relative
  double align2 = 0.0;  // interference alignment residual at Rx-1, relative
  int signal_rank = 0;  // rank of the stacked desired-signal matrix (12 full)
  double rank_sigma_ratio = 0.0;  // sigma_12/sigma_1 of that matrix
};

inline JsAlignmentReport check_js_alignment(const ChannelRealization& ch,
                                            double rank_tol = 1e-9) {
  if (ch.m != 4) throw ConfigError("check_js_alignment: m=4 required");
  const JsPrecoderSet js = js_precoders(ch);
  const auto rel = [](const Mat& a, const Mat& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale > 0.0 ? (a - b).norm() / scale : 0.0;
  };
  JsAlignmentReport rep;
  rep.align1 = rel(detail::slotwise(ch.H(1, 1), js.v21),
                   detail::slotwise(ch.H(0, 1), js.v11));
  rep.align2 = rel(detail::slotwise(ch.H(1, 0), js.v22),
                   detail::slotwise(ch.H(0, 0), js.v12));
  Mat sig(12, 12);
  sig << detail::slotwise(ch.H(0, 0), js.v11),
      detail::slotwise(ch.H(1, 0), js.v21),
      detail::slotwise(ch.H(0, 0), js.v12);
  Eigen::JacobiSVD<Mat> svd(sig);
  const Eigen::VectorXd sv = svd.singularValues();
  rep.rank_sigma_ratio = sv(11) / sv(0);
  for (int i = 0; i < 12; ++i)
    if (sv(i) > rank_tol * sv(0)) ++rep.signal_rank;
  return rep;
}

struct PivotReport {
  cplx p_value{0.0, 0.0};          // closed-form stage-3 pivot predictor
  std::vector<double> stage_norms;  // n_1..n_4, m_1..m_3, p_1..p_4
  cplx final_entry{0.0, 0.0};       // (1,1) entry of the stage-3 model
};

// Runs the cancellation chain (first half, first user primary, Rx-1) on a
// symbol-free observation and reports every pivot together with the
// closed-form predictor p computed from the first stage-2 block product and
// the first row of the Tx-1 precoder.
inline PivotReport check_appendixE_pivots(const ChannelRealization& ch,
                                          double theta) {
  if (ch.m != 4) throw ConfigError("check_appendixE_pivots: m=4 required");
  const PrecoderSet pr = ljj_precoders(ch);
  const EffectiveChannels eff = effective_channels(ch, pr, 0);
  const ProcessedObservation obs =
      msr_process(Mat::Zero(4, 6), theta, 0, 4.0 / 3.0);
  const IcChain chain = msr_ic_appendixE(obs, eff, theta, 0, 0);

  const Mat2 e_block = (chain.g_stage1[1].adjoint() / chain.m_pivot[1]) *
                       (chain.g_blocks[2].adjoint() / chain.n_pivot[2]);
  const cplx e1 = e_block(0, 0), e2 = e_block(0, 1);
  const Mat& v11 = pr.v[0];
  const cplx om(std::cos(theta), std::sin(theta));
  PivotReport rep;
  rep.p_value = (std::norm(e1) + std::norm(e2)) *
                (om * std::conj(v11(0, 1)) * v11(0, 3) +
                 std::conj(om) * v11(0, 0) * std::conj(v11(0, 2)));
  rep.stage_norms.reserve(11);
  for (double n : chain.n_pivot) rep.stage_norms.push_back(n);
  for (double m : chain.m_pivot) rep.stage_norms.push_back(m);
  for (double p : chain.p_pivot) rep.stage_norms.push_back(p);
  rep.final_entry = chain.final_mat(0, 0);
  return rep;
}

// Fixed interference-channel fixtures for which the normalized final-stage
// regression below has the closed-form values -exp(-j theta) (fixture 0) and
// -2 exp(-j theta) (fixture 1).
inline Mat pivot_regression_channel(int which) {
  Mat h(4, 4);
  if (which == 0)
    h << 0, 0, 1, 0, 0, 0, 0, 1, 1.5, -1, -0.5, -0.5, -1, 1, 0, 0;
  else if (which == 1)
    h << 0, 0, 1, 0, 0, 0, 0, 1, 1, -0.5, -0.5, -0.5, -0.5, 0.5, 0, 0;
  else
    throw ConfigError("pivot_regression_channel: fixture index must be 0 or 1");
  return h;
}

// Normalized regression value of the stage-3 pivot predictor for a given
// interference channel: with W = h22^{-1} and
// t_r = e^{j theta} conj(W(r,1)) W(r,3) + e^{-j theta} W(r,2) conj(W(r,4))
// (1-based columns), the value is
// [ (|W(2,1)|^2+|W(2,2)|^2) t_1 - (|W(1,1)|^2+|W(1,2)|^2) t_2 ]
//   / (|W(1,1)|^2+|W(1,2)|^2).
inline cplx pivot_regression_value(const Mat& h22, double theta) {
  if (h22.rows() != 4 || h22.cols() != 4)
    throw ConfigError("pivot_regression_value: 4x4 channel required");
  const Mat w = h22.partialPivLu().inverse();
  const cplx om(std::cos(theta), std::sin(theta));
  const auto term = [&](int r) {
    return om * std::conj(w(r, 0)) * w(r, 2) +
           std::conj(om) * w(r, 1) * std::conj(w(r, 3));
  };
  const double n1 = std::norm(w(0, 0)) + std::norm(w(0, 1));
  const double n2 = std::norm(w(1, 0)) + std::norm(w(1, 1));
  return (n2 * term(0) - n1 * term(1)) / n1;
}

// A pair of stacked-codeword hypotheses per user, in the code domain.
struct CodewordPair {
  Mat4 first_a = Mat4::Zero(), first_b = Mat4::Zero();
  Mat4 second_a = Mat4::Zero(), second_b = Mat4::Zero();
};

inline CodewordPair codeword_pair_from_symbols(const Sym8& first_a,
                                               const Sym8& second_a,
                                               const Sym8& first_b,
                                               const Sym8& second_b,
                                               double theta) {
  CodewordPair cp;
  cp.first_a = compact_codeword(xprime_map(first_a), theta);
  cp.second_a = compact_codeword(xprime_map(second_a), theta);
  cp.first_b = compact_codeword(xprime_map(first_b), theta);
  cp.second_b = compact_codeword(xprime_map(second_b), theta);
  return cp;
}

// Monte Carlo estimate of the pairwise error probability of the
// stacked-codeword scheme at Rx-1 for the supplied hypothesis pair, at each
// power level in p_grid (linear scale).  The decision distance uses the
// effective desired channels H11 V11 and H21 V21 and the doubled-variance
// effective noise of the processed observation:
//   PEP(P) = E[ Q( sqrt( (3P/4) ||H11 V11 dX1 + H21 V21 dX2||^2 / 2 ) ) ].
// All power levels share each channel draw, so the estimate is exactly
// non-increasing in P and equals Q(0) = 1/2 when both differences vanish.
inline std::vector<double> pep_probe(const SchemeConfig& cfg,
                                     const CodewordPair& pair,
                                     const std::vector<double>& p_grid,
                                     long n_draws, Rng& rng,
                                     const ChannelDistSpec& dist = {}) {
  if (cfg.scheme != Scheme::msr)
    throw ConfigError("pep_probe: stacked-codeword (msr) scheme required");
  if (n_draws <= 0) throw ConfigError("pep_probe: n_draws must be > 0");
  const Mat4 dxf = pair.first_a - pair.first_b;
  const Mat4 dxs = pair.second_a - pair.second_b;
  std::vector<double> acc(p_grid.size(), 0.0);
  for (long d = 0; d < n_draws; ++d) {
    const ChannelRealization ch = sample_channel_set(cfg.m, dist, rng);
    const PrecoderSet pr = ljj_precoders(ch);
    const EffectiveChannels eff = effective_channels(ch, pr, 0);
    const double s = (eff.hhat * dxf + eff.ghat * dxs).squaredNorm();
    for (std::size_t i = 0; i < p_grid.size(); ++i)
      acc[i] += q_function(std::sqrt(0.75 * p_grid[i] * s / 2.0));
  }
  for (double& a : acc) a /= static_cast<double>(n_draws);
  return acc;
}

}  // namespace xmimo
