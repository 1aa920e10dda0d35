#pragma once

// Transmitter assembly for the four X-network schemes plus the single-user
// precoded baseline, and the shared channel application.
//
// Power bookkeeping: the per-scheme scaling constants sqrt(3P/4) (staggered
// block schemes) and sqrt(3P/2) (alignment scheme) are folded into the
// transmit functions exactly as the scheme equations write them;
// apply_channel never rescales.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "xmimo/channel.hpp"
#include "xmimo/common.hpp"
#include "xmimo/constellation.hpp"
#include "xmimo/rng.hpp"
#include "xmimo/stbc.hpp"

namespace xmimo {

enum class Scheme { ljj, msr, js, trivial_repetition, tdma_srp };

inline Scheme parse_scheme(const std::string& s) {
  if (s == "ljj") return Scheme::ljj;
  if (s == "msr") return Scheme::msr;
  if (s == "js") return Scheme::js;
  if (s == "trivial") return Scheme::trivial_repetition;
  if (s == "tdma") return Scheme::tdma_srp;
  throw ConfigError("unknown scheme: " + s);
}

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ljj: return "ljj";
    case Scheme::msr: return "msr";
    case Scheme::js: return "js";
    case Scheme::trivial_repetition: return "trivial";
    case Scheme::tdma_srp: return "tdma";
  }
  return "?";
}

struct SchemeConfig {
  Scheme scheme = Scheme::msr;
  int m = 4;
  double theta = M_PI / 4;       // internal codeword rotation
  double phi = std::atan(2.0) / 2;  // constellation rotation
  ConstKind constellation = ConstKind::qam4;
  double p_linear = 1.0;         // transmit power budget P (noise var is 1)

  void validate() const {
    const bool ok = (scheme == Scheme::ljj && m == 2) ||
                    ((scheme == Scheme::msr || scheme == Scheme::js ||
                      scheme == Scheme::trivial_repetition) && m == 4) ||
                    (scheme == Scheme::tdma_srp && (m == 2 || m == 4));
    if (!ok)
      throw ConfigError(std::string("scheme ") + scheme_name(scheme) +
                        " incompatible with m=" + std::to_string(m));
  }
};

// X_i = sqrt(3P/4) (V_i1 X_i1 + V_i2 X_i2) with the staggered 2x3 Alamouti
// blocks; s_first is decoded at Rx-1, s_second at Rx-2.
inline Mat ljj_transmit(const PrecoderSet& p, int tx, const Vec2& s_first,
                        const Vec2& s_second, double P) {
  auto [x1, x2] = ljj_blocks(s_first, s_second);
  return std::sqrt(3.0 * P / 4.0) *
         (p.v[tx * 2 + 0] * x1 + p.v[tx * 2 + 1] * x2);
}

// X_i = sqrt(3P/4) (V_i1 X_i1 + V_i2 X_i2) with the staggered 4x6 codeword
// blocks.  theta = 0 with the same pipeline is the trivial repetition scheme.
inline Mat msr_transmit(const PrecoderSet& p, int tx, const Sym8& x_first,
                        const Sym8& x_second, double theta, double P) {
  auto [x1, x2] = msr_blocks(compact_codeword(xprime_map(x_first), theta),
                             compact_codeword(xprime_map(x_second), theta));
  return std::sqrt(3.0 * P / 4.0) *
         (p.v[tx * 2 + 0] * x1 + p.v[tx * 2 + 1] * x2);
}

// X_i = sqrt(3P/2) * sum_k (V_ik / tr(V_ik V_ik^H)) x_ik over the 3-slot
// extension, reshaped slot-major into a 4x3 block.
inline Mat js_transmit(const JsPrecoderSet& js, int tx, const Vec4& x_first,
                       const Vec4& x_second, double P) {
  const Mat& va = (tx == 0) ? js.v11 : js.v21;
  const Mat& vb = (tx == 0) ? js.v12 : js.v22;
  const double ta = js.trace_norm[tx * 2 + 0];
  const double tb = js.trace_norm[tx * 2 + 1];
  const Vec stacked = std::sqrt(3.0 * P / 2.0) *
                      ((va / ta) * x_first + (vb / tb) * x_second);
  Mat x(4, 3);
  for (int s = 0; s < 3; ++s) x.col(s) = stacked.segment(4 * s, 4);
  return x;
}

// Single-user precoded baseline.  params holds one (tau, psi, theta) triple
// for m = 2 and two triples for m = 4.
struct SrpParams {
  std::vector<std::array<double, 3>> blocks;  // {tau_i, psi_i, theta_i}
};

namespace detail {

inline Eigen::Matrix2d srp_block(const std::array<double, 3>& b) {
  const double tau = b[0], psi = b[1], th = b[2];
  Eigen::Matrix2d p;
  p << std::cos(psi) * std::cos(th), -std::cos(psi) * std::sin(th),
       std::sin(psi) * std::sin(th), std::sin(psi) * std::cos(th);
  return std::sqrt(2.0 * tau * tau) * p;
}

}  // namespace detail

// Transmit vector sqrt(SNR/m) * Q x with Q = V P: V from the channel's SVD
// and P the parameterized real rotation (one 2x2 block for m = 2; two blocks
// interleaved over antenna pairs (1,4) and (2,3) for m = 4).  The angle
// parameters must be supplied by the caller; there are no defaults.
inline Vec tdma_srp_transmit(const Mat& ch_single, const Vec& x,
                             const SrpParams& params, double snr) {
  const int m = static_cast<int>(ch_single.rows());
  if (m != 2 && m != 4)
    throw ConfigError("tdma_srp_transmit: m must be 2 or 4");
  const std::size_t need = (m == 2) ? 1 : 2;
  if (params.blocks.size() != need)
    throw ConfigError("tdma_srp_transmit: expected " + std::to_string(need) +
                      " precoder parameter triple(s), got " +
                      std::to_string(params.blocks.size()));
  if (x.size() != m)
    throw ConfigError("tdma_srp_transmit: symbol vector size mismatch");

  Eigen::JacobiSVD<Mat> svd(ch_single, Eigen::ComputeFullV);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  if (m == 2) {
    p = detail::srp_block(params.blocks[0]);
  } else {
    const Eigen::Matrix2d p1 = detail::srp_block(params.blocks[0]);
    const Eigen::Matrix2d p2 = detail::srp_block(params.blocks[1]);
    p(0, 0) = p1(0, 0); p(0, 3) = p1(0, 1);
    p(3, 0) = p1(1, 0); p(3, 3) = p1(1, 1);
    p(1, 1) = p2(0, 0); p(1, 2) = p2(0, 1);
    p(2, 1) = p2(1, 0); p(2, 2) = p2(1, 1);
  }
  return std::sqrt(snr / m) * (svd.matrixV() * p.cast<cplx>()) * x;
}

// Y_rx = H(1,rx) X1 + H(2,rx) X2 (+ unit-variance complex gaussian noise).
// Noise is drawn column-major so the stream position of every entry is fixed.
inline Mat apply_channel(const ChannelRealization& ch, int rx, const Mat& x1,
                         const Mat& x2, bool noise_on, Rng& rng) {
  Mat y = ch.H(0, rx) * x1 + ch.H(1, rx) * x2;
  if (noise_on) {
    for (int c = 0; c < y.cols(); ++c)
      for (int r = 0; r < y.rows(); ++r) y(r, c) += rng.cgauss();
  }
  return y;
}

}  // namespace xmimo
