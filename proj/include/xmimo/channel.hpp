#pragma once

// Channel draws and the channel-dependent precoders of the three schemes.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "xmimo/common.hpp"
#include "xmimo/rng.hpp"

namespace xmimo {

enum class ChannelDist { gaussian_unit, uniform_box };

struct ChannelDistSpec {
  ChannelDist kind = ChannelDist::gaussian_unit;
  // uniform_box: entries have re/im i.i.d. uniform in [a, b].
  double a = -1.0;
  double b = 1.0;
};

inline ChannelDist parse_channel_dist(const std::string& s) {
  if (s == "gaussian") return ChannelDist::gaussian_unit;
  if (s == "uniform") return ChannelDist::uniform_box;
  throw ConfigError("unknown channel distribution: " + s);
}

inline const char* channel_dist_name(ChannelDist d) {
  return d == ChannelDist::gaussian_unit ? "gaussian" : "uniform";
}

// One network draw: the four m x m channel matrices H(i,j) from transmitter i
// to receiver j (0-based indices, stored i-major).
struct ChannelRealization {
  int m = 0;
  std::array<Mat, 4> h;
  const Mat& H(int tx, int rx) const { return h[tx * 2 + rx]; }
  Mat& H(int tx, int rx) { return h[tx * 2 + rx]; }
};

namespace detail {

inline Mat draw_matrix(int m, const ChannelDistSpec& dist, Rng& rng) {
  Mat h(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < m; ++r) {
      if (dist.kind == ChannelDist::gaussian_unit) {
        h(r, c) = rng.cgauss();
      } else {
        const double re = rng.uniform(dist.a, dist.b);
        const double im = rng.uniform(dist.a, dist.b);
        h(r, c) = cplx(re, im);
      }
    }
  return h;
}

// Reciprocal condition estimate (L1 norm) via LU.
inline double rcond(const Mat& h) {
  return Eigen::PartialPivLU<Mat>(h).rcond();
}

}  // namespace detail

// Draws the four channel matrices.  A set containing any matrix with
// condition number above 1e12 is discarded and redrawn; redraws are counted
// into *rejections when provided.  One hundred consecutive rejections abort.
inline ChannelRealization sample_channel_set(int m, const ChannelDistSpec& dist,
                                             Rng& rng,
                                             int* rejections = nullptr) {
  if (m <= 0) throw ConfigError("sample_channel_set: m must be positive");
  for (int attempt = 0; attempt < 100; ++attempt) {
    ChannelRealization ch;
    ch.m = m;
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      ch.h[i] = detail::draw_matrix(m, dist, rng);
      if (detail::rcond(ch.h[i]) < 1e-12) ok = false;
    }
    if (ok) return ch;
    if (rejections) ++(*rejections);
  }
  throw std::runtime_error(
      "sample_channel_set: 100 consecutive near-singular draws");
}

// Zero-forcing precoders V_ik = H^{-1} / sqrt(tr(H^{-1} H^{-H})) used by both
// the 2-antenna and the 4-antenna scheme.  v = {V11, V12, V21, V22};
// normalization[k] is the scalar with V = normalization * H^{-1}, so each
// precoder has unit Frobenius norm.
//
// The message of V_ik is decoded at receiver k; the inverse is taken of the
// channel to the *other* receiver, which turns that transmitter's second
// message into a scaled identity there.  Each entry depends only on the
// transmitter's own outgoing channels (local CSIT).
struct PrecoderSet {
  std::array<Mat, 4> v;
  std::array<double, 4> normalization;
};

inline PrecoderSet ljj_precoders(const ChannelRealization& ch) {
  PrecoderSet p;
  // V_ik inverts H(i, other(k)).
  const std::array<const Mat*, 4> src = {&ch.H(0, 1), &ch.H(0, 0),
                                         &ch.H(1, 1), &ch.H(1, 0)};
  for (int k = 0; k < 4; ++k) {
    const Mat inv = src[k]->partialPivLu().inverse();
    const double n = 1.0 / inv.norm();  // 1/sqrt(tr(inv inv^H))
    p.v[k] = n * inv;
    p.normalization[k] = n;
  }
  return p;
}

// Interference-alignment precoders over a 3-slot extension for m = 4.
// F = H11^{-1} H21 H22^{-1} H12; eigvecs is the block-diagonal 3-slot lift of
// the eigenvector matrix of F (slot-major stacking), and the four 12x4
// precoders select and mix its columns per the two slot patterns (1,1,0) and
// (1,0,1).  V21/V22 are then forced by the two alignment conditions.
struct JsPrecoderSet {
  Mat v11, v12, v21, v22;  // 12 x 4
  Mat eigvecs;             // 12 x 12
  Eigen::Vector4cd eigvals;
  // tr(V_ik V_ik^H) for {11, 12, 21, 22}; the transmitter divides by these.
  std::array<double, 4> trace_norm;
};

namespace detail {

// Applies I3 (x) A to a 12 x n slot-major stacked matrix.
inline Mat slotwise(const Mat& a, const Mat& x) {
  const int m = static_cast<int>(a.rows());
  Mat out(3 * m, x.cols());
  for (int s = 0; s < 3; ++s)
    out.middleRows(s * m, m) = a * x.middleRows(s * m, m);
  return out;
}

}  // namespace detail

inline JsPrecoderSet js_precoders(const ChannelRealization& ch) {
  if (ch.m != 4)
    throw ConfigError("js_precoders: scheme is defined for m = 4");
  const Mat h11i = ch.H(0, 0).partialPivLu().inverse();
  const Mat h22i = ch.H(1, 1).partialPivLu().inverse();
  const Mat h21i = ch.H(1, 0).partialPivLu().inverse();
  const Mat f = h11i * ch.H(1, 0) * h22i * ch.H(0, 1);

  Eigen::ComplexEigenSolver<Mat> es(f);
  if (es.info() != Eigen::Success)
    throw DegenerateDrawError("js_precoders: eigensolver failed");
  Vec lam = es.eigenvalues();
  Mat vecs = es.eigenvectors();

  // Order: |lambda| descending, ties by complex argument ascending.
  std::array<int, 4> ord = {0, 1, 2, 3};
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    const double ma = std::abs(lam(a)), mb = std::abs(lam(b));
    if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb)) return ma > mb;
    return std::arg(lam(a)) < std::arg(lam(b));
  });
  Mat e(4, 4);
  Eigen::Vector4cd ls;
  for (int k = 0; k < 4; ++k) {
    Vec col = vecs.col(ord[k]);
    // Canonical phase: largest-magnitude entry made real positive.
    int imax = 0;
    for (int r = 1; r < 4; ++r)
      if (std::abs(col(r)) > std::abs(col(imax))) imax = r;
    col *= std::abs(col(imax)) / col(imax);
    col.normalize();
    e.col(k) = col;
    ls(k) = lam(ord[k]);
  }

  // Near-repeated eigenvalues or a near-defective eigenbasis make the
  // construction unstable; report the draw as degenerate.
  const double lmax = ls.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(ls(i) - ls(j)) <= 1e-9 * std::max(lmax, 1.0))
        throw DegenerateDrawError("js_precoders: near-repeated eigenvalues");
  if (Eigen::PartialPivLU<Mat>(e).rcond() < 1e-9)
    throw DegenerateDrawError("js_precoders: near-defective eigenbasis");

  JsPrecoderSet js;
  js.eigvals = ls;
  js.eigvecs = Mat::Zero(12, 12);
  for (int s = 0; s < 3; ++s) js.eigvecs.block(4 * s, 4 * s, 4, 4) = e;

  // Selection matrices I4 (x) pattern^T, rows direction-major.
  auto select = [&](const std::array<double, 3>& pattern) {
    Mat s = Mat::Zero(12, 4);
    for (int k = 0; k < 4; ++k)
      for (int t = 0; t < 3; ++t) s(3 * k + t, k) = pattern[t];
    return s;
  };
  js.v11 = js.eigvecs * select({1, 1, 0});
  js.v12 = js.eigvecs * select({1, 0, 1});
  js.v21 = detail::slotwise(h22i * ch.H(0, 1), js.v11);
  js.v22 = detail::slotwise(h21i * ch.H(0, 0), js.v12);

  js.trace_norm = {js.v11.squaredNorm(), js.v12.squaredNorm(),
                   js.v21.squaredNorm(), js.v22.squaredNorm()};
  return js;
}

// Per-receiver effective matrices after precoding.  hhat/ghat carry the two
// desired messages; htilde/gtilde are their unnormalized forms
// H_desired * H_cross^{-1} (hhat = htilde * normalization).
struct EffectiveChannels {
  Mat hhat, ghat, htilde, gtilde;
};

inline EffectiveChannels effective_channels(const ChannelRealization& ch,
                                            const PrecoderSet& p, int rx = 0) {
  EffectiveChannels e;
  if (rx == 0) {
    e.hhat = ch.H(0, 0) * p.v[0];
    e.ghat = ch.H(1, 0) * p.v[2];
    e.htilde = ch.H(0, 0) * ch.H(0, 1).partialPivLu().inverse();
    e.gtilde = ch.H(1, 0) * ch.H(1, 1).partialPivLu().inverse();
  } else {
    e.hhat = ch.H(0, 1) * p.v[1];
    e.ghat = ch.H(1, 1) * p.v[3];
    e.htilde = ch.H(0, 1) * ch.H(0, 0).partialPivLu().inverse();
    e.gtilde = ch.H(1, 1) * ch.H(1, 0).partialPivLu().inverse();
  }
  return e;
}

}  // namespace xmimo
