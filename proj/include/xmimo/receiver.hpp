#pragma once

// Receive-side processing chains.
//
// Conventions shared by all chains:
//  - Processing works on the raw receive block; the effective desired
//    channels (hhat/ghat from effective_channels) enter only through the
//    returned model matrix.  Interference is removed structurally, without
//    knowledge of its (scalar) effective gains.
//  - ProcessedObservation.noise_cov_diag lists the per-entry complex noise
//    variance of vec(y) relative to the unit variance at the antennas; the
//    processing steps only ever produce entries 1 or 2.
//  - signal_scale is the power factor folded into the transmitter; the
//    noiseless identity is vec(y) == signal_scale * (model applied to the
//    information symbols).  The default parameter value 4/3 for p_linear
//    makes signal_scale exactly 1 for callers that bypass the transmitter.

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "xmimo/channel.hpp"
#include "xmimo/common.hpp"
#include "xmimo/constellation.hpp"
#include "xmimo/decoder.hpp"
#include "xmimo/schemes.hpp"
#include "xmimo/stbc.hpp"

namespace xmimo {

struct ProcessedObservation {
  Mat y;                      // processed observation (4x1 or 4x4)
  Mat model_matrix;           // R (4x4) or [Hhat | Ghat] (4x8)
  Eigen::VectorXd noise_cov_diag;        // one entry per entry of vec(y)
  std::vector<std::string> symbol_slots; // information symbols, model order
  double signal_scale = 1.0;
};

namespace detail {

inline Vec vec_cm(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

// 2x2 block families.  "anti" is the column form [[a,b],[conj b,-conj a]];
// "standard" is [[a,b],[-conj b,conj a]].  Both are column-orthogonal with
// A^H A = ||A(0,:)||^2 I; products A^H B of same-family blocks are standard,
// and each family is closed under real-linear combinations.
inline Mat2 anti_block(cplx a, cplx b) {
  Mat2 m;
  m << a, b, std::conj(b), -std::conj(a);
  return m;
}

inline Mat2 anti_block_theta(cplx a, cplx b, double theta) {
  const cplx e = std::polar(1.0, theta);
  Mat2 m;
  m << e * a, e * b, std::conj(e * b), -std::conj(e * a);
  return m;
}

}  // namespace detail

// The fixed 4x6 zero-forcing matrix applied to the stacked vector Y''.
inline Mat ljj_zero_forcing_matrix() {
  Mat f = Mat::Zero(4, 6);
  f(0, 0) = 1;
  f(1, 1) = 1;
  f(1, 5) = -1;
  f(2, 2) = 1;
  f(2, 4) = 1;
  f(3, 3) = 1;
  return f;
}

// Two-antenna scheme, receive processing.  rx = 0: conjugate the middle
// column of the 2x3 receive block, stack the two antenna rows into the
// 6-vector Y'', and zero-force with the fixed matrix F; the result obeys
// y = signal_scale * R * (x1_first, x2_first, x1_second, x2_second) with
// per-entry noise variances (1,2,2,1).  rx = 1 mirrors the staggering: the
// pure-interference first column cancels the interference part of the middle
// column, giving variances (2,1,2,1).
inline ProcessedObservation ljj_process(const Mat& y_rx,
                                        const EffectiveChannels& eff,
                                        int rx = 0,
                                        double p_linear = 4.0 / 3.0) {
  if (y_rx.rows() != 2 || y_rx.cols() != 3)
    throw ConfigError("ljj_process: receive block must be 2x3");
  if (rx != 0 && rx != 1) throw ConfigError("ljj_process: rx must be 0 or 1");
  const Mat& h = eff.hhat;
  const Mat& g = eff.ghat;

  ProcessedObservation obs;
  obs.signal_scale = std::sqrt(3.0 * p_linear / 4.0);
  obs.noise_cov_diag.resize(4);
  Mat r(4, 4);
  Vec y(4);

  if (rx == 0) {
    // Y' = [y0, conj(y1), y2], stacked row-major into Y''.
    Vec ypp(6);
    ypp << y_rx(0, 0), std::conj(y_rx(0, 1)), y_rx(0, 2),
           y_rx(1, 0), std::conj(y_rx(1, 1)), y_rx(1, 2);
    y = ljj_zero_forcing_matrix() * ypp;
    r.row(0) << h(0, 0), h(0, 1), g(0, 0), g(0, 1);
    r.row(1) << std::conj(h(0, 1)), -std::conj(h(0, 0)),
                std::conj(g(0, 1)), -std::conj(g(0, 0));
    r.row(2) << std::conj(h(1, 1)), -std::conj(h(1, 0)),
                std::conj(g(1, 1)), -std::conj(g(1, 0));
    r.row(3) << h(1, 0), h(1, 1), g(1, 0), g(1, 1);
    obs.noise_cov_diag << 1, 2, 2, 1;
    obs.symbol_slots = {"x1_11", "x2_11", "x1_21", "x2_21"};
  } else {
    // The interference block's second column is J conj(first column) with
    // J = [[0,-1],[1,0]]; the first receive column is pure interference.
    Mat2 j2;
    j2 << 0, -1, 1, 0;
    const Vec2 yc = y_rx.col(1) - j2 * y_rx.col(0).conjugate();
    y << yc(0), std::conj(y_rx(0, 2)), yc(1), std::conj(y_rx(1, 2));
    r.row(0) << h(0, 0), h(0, 1), g(0, 0), g(0, 1);
    r.row(1) << std::conj(h(0, 1)), -std::conj(h(0, 0)),
                std::conj(g(0, 1)), -std::conj(g(0, 0));
    r.row(2) << h(1, 0), h(1, 1), g(1, 0), g(1, 1);
    r.row(3) << std::conj(h(1, 1)), -std::conj(h(1, 0)),
                std::conj(g(1, 1)), -std::conj(g(1, 0));
    obs.noise_cov_diag << 2, 1, 2, 1;
    obs.symbol_slots = {"x1_12", "x2_12", "x1_22", "x2_22"};
  }
  obs.y = y;
  obs.model_matrix = r;
  return obs;
}

// MAC-style interference cancellation on the 4x4 model R: project each
// antenna pair onto one user's block and difference out the other user.
struct LjjIcResult {
  Mat2 h_tilde, g_tilde;  // 2x2 models for the two symbol pairs
  Vec2 y_tilde, z_tilde;
  Vec2 x_h, x_g;          // symbol estimates, divided by signal_scale
};

inline LjjIcResult ljj_ic(const ProcessedObservation& obs) {
  if (obs.model_matrix.rows() != 4 || obs.model_matrix.cols() != 4)
    throw ConfigError("ljj_ic: expected a 4x4 model");
  const Mat2 h1 = obs.model_matrix.block(0, 0, 2, 2);
  const Mat2 h2 = obs.model_matrix.block(2, 0, 2, 2);
  const Mat2 g1 = obs.model_matrix.block(0, 2, 2, 2);
  const Mat2 g2 = obs.model_matrix.block(2, 2, 2, 2);
  const Vec2 y1 = obs.y.col(0).head(2);
  const Vec2 y2 = obs.y.col(0).tail(2);

  const double g1n = g1.row(0).squaredNorm(), g2n = g2.row(0).squaredNorm();
  const double h1n = h1.row(0).squaredNorm(), h2n = h2.row(0).squaredNorm();
  if (g1n < 1e-14 || g2n < 1e-14 || h1n < 1e-14 || h2n < 1e-14)
    throw DegenerateDrawError("ljj_ic: vanishing block row norm");

  LjjIcResult r;
  r.y_tilde = g1.adjoint() * y1 / g1n - g2.adjoint() * y2 / g2n;
  r.h_tilde = g1.adjoint() * h1 / g1n - g2.adjoint() * h2 / g2n;
  r.z_tilde = h1.adjoint() * y1 / h1n - h2.adjoint() * y2 / h2n;
  r.g_tilde = h1.adjoint() * g1 / h1n - h2.adjoint() * g2 / h2n;

  if (std::abs(r.h_tilde.determinant()) < 1e-14 ||
      std::abs(r.g_tilde.determinant()) < 1e-14)
    throw DegenerateDrawError("ljj_ic: singular cancelled model");
  r.x_h = r.h_tilde.inverse() * r.y_tilde / obs.signal_scale;
  r.x_g = r.g_tilde.inverse() * r.z_tilde / obs.signal_scale;
  return r;
}

namespace detail {

// Relations between consecutive codeword columns: with column vectors u,
// col2 = phi_of_conj(col1), col1 = phi_inv(col2), col4 = psi_of_conj(col3),
// col3 = psi_inv(col4).  All four are conj-linear with unit-modulus weights,
// so they commute with real scalar channel gains and preserve the
// per-entry noise variance.
inline Vec4 phi_of_conj(const Vec4& u, double theta) {
  const cplx e2 = std::polar(1.0, 2.0 * theta);
  Vec4 v;
  v << -std::conj(u(1)), std::conj(u(0)), -e2 * std::conj(u(3)),
      e2 * std::conj(u(2));
  return v;
}

inline Vec4 phi_inv(const Vec4& u, double theta) {
  const cplx e2 = std::polar(1.0, 2.0 * theta);
  Vec4 v;
  v << std::conj(u(1)), -std::conj(u(0)), e2 * std::conj(u(3)),
      -e2 * std::conj(u(2));
  return v;
}

inline Vec4 psi_of_conj(const Vec4& u, double theta) {
  const cplx e2 = std::polar(1.0, 2.0 * theta);
  Vec4 v;
  v << -e2 * std::conj(u(1)), e2 * std::conj(u(0)), -std::conj(u(3)),
      std::conj(u(2));
  return v;
}

inline Vec4 psi_inv(const Vec4& u, double theta) {
  const cplx e2 = std::polar(1.0, 2.0 * theta);
  Vec4 v;
  v << e2 * std::conj(u(1)), -e2 * std::conj(u(0)), std::conj(u(3)),
      -std::conj(u(2));
  return v;
}

}  // namespace detail

// Four-antenna scheme, receive processing.  The staggered interference
// occupies columns {2,3,5,6} (rx = 0 wants the block on {1,2,4,5}); its
// pure columns reconstruct its mixed columns through the codeword column
// relations, leaving the 4x4 desired model
//   Y' = signal_scale * (Hhat C_first + Ghat C_second) + noise
// with per-column noise variances (1,2,1,2) for rx = 0 and (2,1,2,1) for
// rx = 1.  No channel knowledge is used.
inline ProcessedObservation msr_process(const Mat& y_rx, double theta,
                                        int rx = 0,
                                        double p_linear = 4.0 / 3.0) {
  if (y_rx.rows() != 4 || y_rx.cols() != 6)
    throw ConfigError("msr_process: receive block must be 4x6");
  if (rx != 0 && rx != 1) throw ConfigError("msr_process: rx must be 0 or 1");

  ProcessedObservation obs;
  obs.signal_scale = std::sqrt(3.0 * p_linear / 4.0);
  Mat yp(4, 4);
  obs.noise_cov_diag.resize(16);
  if (rx == 0) {
    yp.col(0) = y_rx.col(0);
    yp.col(1) = y_rx.col(1) - detail::phi_inv(y_rx.col(2), theta);
    yp.col(2) = y_rx.col(3);
    yp.col(3) = y_rx.col(4) - detail::psi_inv(y_rx.col(5), theta);
    obs.noise_cov_diag << 1, 1, 1, 1, 2, 2, 2, 2, 1, 1, 1, 1, 2, 2, 2, 2;
  } else {
    yp.col(0) = y_rx.col(1) - detail::phi_of_conj(y_rx.col(0), theta);
    yp.col(1) = y_rx.col(2);
    yp.col(2) = y_rx.col(4) - detail::psi_of_conj(y_rx.col(3), theta);
    yp.col(3) = y_rx.col(5);
    obs.noise_cov_diag << 2, 2, 2, 2, 1, 1, 1, 1, 2, 2, 2, 2, 1, 1, 1, 1;
  }
  obs.y = yp;
  obs.symbol_slots.clear();
  for (int u = 0; u < 2; ++u)
    for (int k = 1; k <= 8; ++k)
      obs.symbol_slots.push_back("xp" + std::to_string(k) + "_" +
                                 std::to_string(u + 1) +
                                 std::to_string(rx + 1));
  return obs;
}

// Three-step cancellation chain over one column-pair half of the processed
// 4x4 observation.  "Primary" selects which user's blocks play the H role
// (its first symbol pair survives to stage 3); the other user takes the G
// role.  Every stored block is Alamouti: the per-antenna blocks are in the
// anti family, all stage products in the standard family.
struct IcChain {
  std::array<Mat2, 8> h_blocks, g_blocks;  // per-antenna blocks H1..H8, G1..G8
  std::array<Mat2, 6> h_stage1;            // H'1..H'6
  std::array<Mat2, 3> g_stage1;            // G'1..G'3
  std::array<Mat2, 4> h_stage2;            // H''1..H''4
  Mat2 final_mat;                          // stage-3 2x2 model
  std::array<Vec2, 4> z;                   // per-antenna stacked pairs
  std::array<Vec2, 3> zp;
  std::array<Vec2, 2> zpp;
  Vec2 zppp;
  std::array<double, 4> n_pivot;  // ||G_i(0,:)||^2, stage-1 normalizers
  std::array<double, 3> m_pivot;  // ||G'_i(0,:)||^2
  std::array<double, 4> p_pivot;  // ||H''_i(0,:)||^2
  // Back-substituted symbol-pair estimates, divided by signal_scale:
  // (u12, u34) of the primary user and of the other user.
  Vec2 pair_first, pair_second, other_first, other_second;
  // The half's code-domain symbol estimates in ascending index order
  // (half 0: x'1,x'2,x'5,x'6; half 1: x'3,x'4,x'7,x'8).
  std::array<cplx, 4> xprime_primary, xprime_other;
  int half = 0, primary = 0;
};

inline std::array<int, 4> msr_half_xprime_indices(int half) {
  return half == 0 ? std::array<int, 4>{0, 1, 4, 5}
                   : std::array<int, 4>{2, 3, 6, 7};
}

inline IcChain msr_ic_appendixE(const ProcessedObservation& obs,
                                const EffectiveChannels& eff, double theta,
                                int half = 0, int primary = 0) {
  if (obs.y.rows() != 4 || obs.y.cols() != 4)
    throw ConfigError("msr_ic_appendixE: expected a 4x4 processed block");
  if (half != 0 && half != 1)
    throw ConfigError("msr_ic_appendixE: half must be 0 or 1");
  const Mat& a_src = (primary == 0) ? eff.hhat : eff.ghat;
  const Mat& b_src = (primary == 0) ? eff.ghat : eff.hhat;

  IcChain c;
  c.half = half;
  c.primary = primary;
  const int c0 = 2 * half;       // first column of the half
  const int o0 = 2 - 2 * half;   // first column of the other half
  for (int i = 0; i < 4; ++i) {
    c.z[i] = Vec2(obs.y(i, c0), std::conj(obs.y(i, c0 + 1)));
    c.h_blocks[i] = detail::anti_block(a_src(i, c0), a_src(i, c0 + 1));
    c.h_blocks[4 + i] =
        detail::anti_block_theta(a_src(i, o0), a_src(i, o0 + 1), theta);
    c.g_blocks[i] = detail::anti_block(b_src(i, c0), b_src(i, c0 + 1));
    c.g_blocks[4 + i] =
        detail::anti_block_theta(b_src(i, o0), b_src(i, o0 + 1), theta);
  }

  for (int i = 0; i < 4; ++i) {
    c.n_pivot[i] = c.g_blocks[i].row(0).squaredNorm();
    if (c.n_pivot[i] < 1e-14)
      throw DegenerateDrawError("msr_ic_appendixE: vanishing stage-1 pivot");
  }
  // Stage 1: project on the other user's first-pair blocks and difference
  // against antenna 1, eliminating that pair.
  for (int i = 1; i < 4; ++i) {
    const Mat2 gi = c.g_blocks[i].adjoint() / c.n_pivot[i];
    const Mat2 g1 = c.g_blocks[0].adjoint() / c.n_pivot[0];
    c.zp[i - 1] = gi * c.z[i] - g1 * c.z[0];
    c.h_stage1[i - 1] = gi * c.h_blocks[i] - g1 * c.h_blocks[0];
    c.h_stage1[3 + i - 1] = gi * c.h_blocks[4 + i] - g1 * c.h_blocks[4];
    c.g_stage1[i - 1] = gi * c.g_blocks[4 + i] - g1 * c.g_blocks[4];
  }

  for (int i = 0; i < 3; ++i) {
    c.m_pivot[i] = c.g_stage1[i].row(0).squaredNorm();
    if (c.m_pivot[i] < 1e-14)
      throw DegenerateDrawError("msr_ic_appendixE: vanishing stage-2 pivot");
  }
  // Stage 2: eliminate the other user's second pair.
  {
    const Mat2 q1 = c.g_stage1[0].adjoint() / c.m_pivot[0];
    const Mat2 q2 = c.g_stage1[1].adjoint() / c.m_pivot[1];
    const Mat2 q3 = c.g_stage1[2].adjoint() / c.m_pivot[2];
    c.zpp[0] = q2 * c.zp[1] - q1 * c.zp[0];
    c.zpp[1] = q3 * c.zp[2] - q1 * c.zp[0];
    c.h_stage2[0] = q2 * c.h_stage1[1] - q1 * c.h_stage1[0];
    c.h_stage2[1] = q3 * c.h_stage1[2] - q1 * c.h_stage1[0];
    c.h_stage2[2] = q2 * c.h_stage1[4] - q1 * c.h_stage1[3];
    c.h_stage2[3] = q3 * c.h_stage1[5] - q1 * c.h_stage1[3];
  }

  for (int i = 0; i < 4; ++i)
    c.p_pivot[i] = c.h_stage2[i].row(0).squaredNorm();
  if (c.p_pivot[2] < 1e-14 || c.p_pivot[3] < 1e-14)
    throw DegenerateDrawError("msr_ic_appendixE: vanishing stage-3 pivot");
  // Stage 3: eliminate the primary user's second pair.
  {
    const Mat2 r3 = c.h_stage2[2].adjoint() / c.p_pivot[2];
    const Mat2 r4 = c.h_stage2[3].adjoint() / c.p_pivot[3];
    c.zppp = r3 * c.zpp[0] - r4 * c.zpp[1];
    c.final_mat = r3 * c.h_stage2[0] - r4 * c.h_stage2[1];
  }

  if (c.final_mat.row(0).squaredNorm() < 1e-14)
    throw DegenerateDrawError("msr_ic_appendixE: vanishing final model");

  // Back-substitution through the three stages.
  const Vec2 pf = c.final_mat.inverse() * c.zppp;
  const Vec2 ps = c.h_stage2[2].inverse() * (c.zpp[0] - c.h_stage2[0] * pf);
  const Vec2 os =
      c.g_stage1[0].inverse() *
      (c.zp[0] - c.h_stage1[0] * pf - c.h_stage1[3] * ps);
  const Vec2 of = c.g_blocks[0].inverse() *
                  (c.z[0] - c.h_blocks[0] * pf - c.h_blocks[4] * ps -
                   c.g_blocks[4] * os);
  c.pair_first = pf / obs.signal_scale;
  c.pair_second = ps / obs.signal_scale;
  c.other_first = of / obs.signal_scale;
  c.other_second = os / obs.signal_scale;

  // Unpack (u12, u34) = ((xa, xb), (xc, -conj xd)) into the half's
  // code-domain symbols; for half 1 the first pair is (xa, -conj xb).
  auto unpack = [&](const Vec2& u12, const Vec2& u34) {
    std::array<cplx, 4> xp;
    xp[0] = u12(0);
    xp[1] = (half == 0) ? u12(1) : -std::conj(u12(1));
    xp[2] = u34(0);
    xp[3] = -std::conj(u34(1));
    return xp;
  };
  c.xprime_primary = unpack(c.pair_first, c.pair_second);
  c.xprime_other = unpack(c.other_first, c.other_second);
  return c;
}

// Runs both half-chains with the given primary user and assembles the
// full code-domain and constellation-domain symbol estimates of both users.
struct MsrIcSymbols {
  Sym8 xp_first{}, xp_second{};  // code-domain estimates per user
  Sym8 x_first{}, x_second{};    // constellation-domain estimates
};

inline MsrIcSymbols msr_ic_full(const ProcessedObservation& obs,
                                const EffectiveChannels& eff, double theta) {
  MsrIcSymbols s;
  for (int half = 0; half < 2; ++half) {
    const IcChain c = msr_ic_appendixE(obs, eff, theta, half, 0);
    const auto idx = msr_half_xprime_indices(half);
    for (int k = 0; k < 4; ++k) {
      s.xp_first[idx[k]] = c.xprime_primary[k];
      s.xp_second[idx[k]] = c.xprime_other[k];
    }
  }
  s.x_first = xprime_unmap(s.xp_first);
  s.x_second = xprime_unmap(s.xp_second);
  return s;
}

// --- ML models over the processed observations -----------------------------

// Observation already in linear-vector form (the 2-antenna R model): one
// slot per model column, identical alphabet on each.
inline MlModel linear_ml_model(const ProcessedObservation& obs,
                               const std::vector<cplx>& alphabet) {
  if (obs.y.cols() != 1)
    throw ConfigError("linear_ml_model: observation is not a vector");
  const int n = static_cast<int>(obs.y.rows());
  const int k = static_cast<int>(obs.model_matrix.cols());
  MlModel m;
  m.coeff_re.resize(n, k);
  m.coeff_im.resize(n, k);
  for (int j = 0; j < k; ++j) {
    m.coeff_re.col(j) = obs.signal_scale * obs.model_matrix.col(j);
    m.coeff_im.col(j) = obs.signal_scale * cplx(0, 1) * obs.model_matrix.col(j);
  }
  m.noise_var = obs.noise_cov_diag;
  m.alphabets.assign(k, alphabet);
  return m;
}

// Joint 16-slot model over both users' constellation-domain symbols for the
// processed 4x4 observation.  Column k is obtained by probing the
// transmit-side map (interleaving + codeword) with a unit basis symbol.
inline MlModel msr_ml_model_joint(const ProcessedObservation& obs,
                                  double theta,
                                  const std::vector<cplx>& alphabet) {
  if (obs.y.rows() != 4 || obs.y.cols() != 4)
    throw ConfigError("msr_ml_model_joint: expected a 4x4 observation");
  MlModel m;
  m.coeff_re.resize(16, 16);
  m.coeff_im.resize(16, 16);
  for (int u = 0; u < 2; ++u) {
    const Mat mu = obs.model_matrix.middleCols(4 * u, 4);
    for (int i = 0; i < 8; ++i) {
      Sym8 e{};
      e[i] = 1.0;
      m.coeff_re.col(8 * u + i) =
          obs.signal_scale *
          detail::vec_cm(mu * compact_codeword(xprime_map(e), theta));
      e[i] = cplx(0, 1);
      m.coeff_im.col(8 * u + i) =
          obs.signal_scale *
          detail::vec_cm(mu * compact_codeword(xprime_map(e), theta));
    }
  }
  m.noise_var = obs.noise_cov_diag;
  m.alphabets.assign(16, alphabet);
  return m;
}

// Per-half 8-slot model in the code domain.  Valid only when the
// constellation's real/imaginary coordinate sets are separable (the code
// domain then factors into two independent halves); the slot alphabets are
// sign_re * re + j*im over the coordinate sets, with sign_re = -1 on code
// symbols 4, 6, 8.
inline MlModel msr_ml_model_half(const ProcessedObservation& obs,
                                 double theta, int half,
                                 const ConstellationSpec& c) {
  if (obs.y.rows() != 4 || obs.y.cols() != 4)
    throw ConfigError("msr_ml_model_half: expected a 4x4 observation");
  if (half != 0 && half != 1)
    throw ConfigError("msr_ml_model_half: half must be 0 or 1");
  const CoordSets coords = coordinate_sets(c);
  if (!coords.separable)
    throw ConfigError(
        "msr_ml_model_half: constellation coordinates are not separable; "
        "use the joint model");
  const auto idx = msr_half_xprime_indices(half);
  MlModel m;
  m.coeff_re.resize(8, 8);
  m.coeff_im.resize(8, 8);
  m.noise_var.resize(8);
  for (int r = 0; r < 4; ++r) {
    m.noise_var(r) = obs.noise_cov_diag(4 * (2 * half) + r);
    m.noise_var(4 + r) = obs.noise_cov_diag(4 * (2 * half + 1) + r);
  }
  for (int u = 0; u < 2; ++u) {
    const Mat mu = obs.model_matrix.middleCols(4 * u, 4);
    for (int k = 0; k < 4; ++k) {
      for (int part = 0; part < 2; ++part) {
        Sym8 xp{};
        xp[idx[k]] = (part == 0) ? cplx(1, 0) : cplx(0, 1);
        const Mat full = mu * compact_codeword(xp, theta);
        Vec col(8);
        col.head(4) = full.col(2 * half);
        col.tail(4) = full.col(2 * half + 1);
        col *= obs.signal_scale;
        if (part == 0)
          m.coeff_re.col(4 * u + k) = col;
        else
          m.coeff_im.col(4 * u + k) = col;
      }
      const double sign_re =
          (idx[k] == 3 || idx[k] == 5 || idx[k] == 7) ? -1.0 : 1.0;
      std::vector<cplx> alpha;
      alpha.reserve(coords.re.size() * coords.im.size());
      for (double re : coords.re)
        for (double im : coords.im) alpha.emplace_back(sign_re * re, im);
      m.alphabets.push_back(std::move(alpha));
    }
  }
  return m;
}

// Values selected by a decision, in model slot order.
inline std::vector<cplx> decision_values(const MlModel& m,
                                         const MlDecision& d) {
  std::vector<cplx> v(d.idx.size());
  for (std::size_t k = 0; k < d.idx.size(); ++k)
    v[k] = m.alphabets[k][static_cast<std::size_t>(d.idx[k])];
  return v;
}

// --- Alignment-scheme receiver ---------------------------------------------

// Joint model over the 3-slot extension: 4 + 4 desired symbol slots plus 4
// aligned-interference slots whose alphabet is the weighted sumset of the
// two interfering constellations.
inline MlModel js_model(const JsPrecoderSet& js, const ChannelRealization& ch,
                        int rx, double p_linear, const ConstellationSpec& c) {
  if (ch.m != 4) throw ConfigError("js_model: scheme is defined for m = 4");
  if (rx != 0 && rx != 1) throw ConfigError("js_model: rx must be 0 or 1");
  const double s = std::sqrt(3.0 * p_linear / 2.0);
  const Mat& hf = ch.H(0, rx);  // channel from Tx-1
  const Mat& hs = ch.H(1, rx);  // channel from Tx-2
  const Mat& vf = (rx == 0) ? js.v11 : js.v12;
  const Mat& vs = (rx == 0) ? js.v21 : js.v22;
  const Mat& va = (rx == 0) ? js.v12 : js.v11;  // aligned via Tx-1's image
  const double tf = js.trace_norm[rx == 0 ? 0 : 1];
  const double ts = js.trace_norm[rx == 0 ? 2 : 3];
  const double ta = js.trace_norm[rx == 0 ? 1 : 0];
  const double tb = js.trace_norm[rx == 0 ? 3 : 2];

  const Mat cf = s * detail::slotwise(hf, vf) / tf;
  const Mat cs = s * detail::slotwise(hs, vs) / ts;
  const Mat ca = s * detail::slotwise(hf, va);

  MlModel m;
  m.coeff_re.resize(12, 12);
  m.coeff_im.resize(12, 12);
  for (int k = 0; k < 4; ++k) {
    m.coeff_re.col(k) = cf.col(k);
    m.coeff_im.col(k) = cplx(0, 1) * cf.col(k);
    m.coeff_re.col(4 + k) = cs.col(k);
    m.coeff_im.col(4 + k) = cplx(0, 1) * cs.col(k);
    m.coeff_re.col(8 + k) = ca.col(k);
    m.coeff_im.col(8 + k) = cplx(0, 1) * ca.col(k);
  }
  m.noise_var = Eigen::VectorXd::Ones(12);

  std::vector<cplx> pa(c.points), pb(c.points);
  for (auto& v : pa) v /= ta;
  for (auto& v : pb) v /= tb;
  const std::vector<cplx> sums = sumset(pa, pb);
  m.alphabets.assign(4, c.points);
  m.alphabets.resize(8, c.points);
  m.alphabets.resize(12, sums);
  return m;
}

// Decodes the desired pair (message from Tx-1, message from Tx-2) at the
// given receiver by joint ML including the aligned sum; only the desired
// decisions are returned.
inline std::pair<Vec4, Vec4> js_receive(const Mat& y_rx,
                                        const JsPrecoderSet& js,
                                        const ChannelRealization& ch, int rx,
                                        double p_linear,
                                        const ConstellationSpec& c,
                                        DecodeMode mode,
                                        MlDecision* decision_out = nullptr) {
  if (y_rx.rows() != 4 || y_rx.cols() != 3)
    throw ConfigError("js_receive: receive block must be 4x3");
  const MlModel m = js_model(js, ch, rx, p_linear, c);
  const MlDecision d = ml_decode(m, detail::vec_cm(y_rx), mode);
  Vec4 xf, xs;
  for (int k = 0; k < 4; ++k) {
    xf(k) = c.points[static_cast<std::size_t>(d.idx[k])];
    xs(k) = c.points[static_cast<std::size_t>(d.idx[4 + k])];
  }
  if (decision_out) *decision_out = d;
  return {xf, xs};
}

}  // namespace xmimo
