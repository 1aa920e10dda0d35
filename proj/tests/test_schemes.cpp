#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "xmimo/channel.hpp"
#include "xmimo/receiver.hpp"
#include "xmimo/rng.hpp"
#include "xmimo/schemes.hpp"

namespace {

using namespace xmimo;
using cd = std::complex<double>;

ChannelRealization random_channels(int m, std::uint64_t seed) {
  Rng rng(seed);
  return sample_channel_set(m, ChannelDistSpec{}, rng);
}

Mat draw_square(Rng& rng, int m) {
  Mat h(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < m; ++r) h(r, c) = rng.cgauss();
  return h;
}

TEST(Schemes, ParseAndNameRoundTrip) {
  for (auto s : {Scheme::ljj, Scheme::msr, Scheme::js,
                 Scheme::trivial_repetition, Scheme::tdma_srp}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_THROW(parse_scheme("mrc"), ConfigError);
}

TEST(Schemes, ConfigValidation) {
  SchemeConfig c;
  c.scheme = Scheme::ljj;
  c.m = 2;
  EXPECT_NO_THROW(c.validate());
  c.m = 4;
  EXPECT_THROW(c.validate(), ConfigError);

  for (auto s : {Scheme::msr, Scheme::js, Scheme::trivial_repetition}) {
    c.scheme = s;
    c.m = 4;
    EXPECT_NO_THROW(c.validate());
    c.m = 2;
    EXPECT_THROW(c.validate(), ConfigError);
  }

  c.scheme = Scheme::tdma_srp;
  for (int m : {2, 4}) {
    c.m = m;
    EXPECT_NO_THROW(c.validate());
  }
  c.m = 3;
  EXPECT_THROW(c.validate(), ConfigError);
}

// Average transmit power of the 2-antenna scheme over the full 4-QAM message
// ensemble is exactly P per channel use (3 channel uses per block).
TEST(Schemes, PairSchemePowerBudgetExact) {
  const auto ch = random_channels(2, 101);
  const auto pr = ljj_precoders(ch);
  const auto c = make_constellation(ConstKind::qam4);
  const double P = 2.7;
  for (int tx = 0; tx < 2; ++tx) {
    double acc = 0;
    long n = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int e = 0; e < 4; ++e)
          for (int f = 0; f < 4; ++f) {
            const Vec2 sf(c.points[a], c.points[b]);
            const Vec2 ss(c.points[e], c.points[f]);
            acc += ljj_transmit(pr, tx, sf, ss, P).squaredNorm();
            ++n;
          }
    EXPECT_NEAR(acc / n / 3.0, P, 1e-9);
  }
}

// Same budget identity for the 4-antenna codeword scheme over the full BPSK
// ensemble (6 channel uses per block).
TEST(Schemes, QuadSchemePowerBudgetExact) {
  const auto ch = random_channels(4, 102);
  const auto pr = ljj_precoders(ch);
  const auto c = make_constellation(ConstKind::bpsk);
  const double P = 1.9;
  const double theta = M_PI / 4;
  double acc = 0;
  long n = 0;
  for (int mf = 0; mf < 256; ++mf)
    for (int ms = 0; ms < 256; ++ms) {
      Sym8 xf, xs;
      for (int k = 0; k < 8; ++k) {
        xf[k] = c.points[(mf >> k) & 1];
        xs[k] = c.points[(ms >> k) & 1];
      }
      acc += msr_transmit(pr, 0, xf, xs, theta, P).squaredNorm();
      ++n;
    }
  EXPECT_NEAR(acc / n / 6.0, P, 1e-9);
}

// The aligned scheme's budget: E||X||^2 = (3P/2)(1/t_a + 1/t_b) over the
// block, with t_k the precoder trace norms.
TEST(Schemes, AlignedSchemePowerIdentityExact) {
  const auto ch = random_channels(4, 103);
  const auto js = js_precoders(ch);
  const auto c = make_constellation(ConstKind::bpsk);
  const double P = 3.3;
  for (int tx = 0; tx < 2; ++tx) {
    double acc = 0;
    long n = 0;
    for (int mf = 0; mf < 16; ++mf)
      for (int ms = 0; ms < 16; ++ms) {
        Vec4 xf, xs;
        for (int k = 0; k < 4; ++k) {
          xf(k) = c.points[(mf >> k) & 1];
          xs(k) = c.points[(ms >> k) & 1];
        }
        acc += js_transmit(js, tx, xf, xs, P).squaredNorm();
        ++n;
      }
    const double ta = js.trace_norm[tx * 2 + 0];
    const double tb = js.trace_norm[tx * 2 + 1];
    EXPECT_NEAR(acc / n, 1.5 * P * (1.0 / ta + 1.0 / tb), 1e-9);
  }
}

TEST(Schemes, AlignedTransmitShape) {
  const auto ch = random_channels(4, 104);
  const auto js = js_precoders(ch);
  Vec4 xf = Vec4::Zero(), xs = Vec4::Zero();
  xf(0) = cd(1, 0);
  const Mat x = js_transmit(js, 0, xf, xs, 2.0);
  EXPECT_EQ(x.rows(), 4);
  EXPECT_EQ(x.cols(), 3);
  // Column s holds slots 4s..4s+3 of the stacked precoder output.
  const Vec stacked = std::sqrt(3.0) * (js.v11 / js.trace_norm[0]) * xf;
  for (int s = 0; s < 3; ++s)
    EXPECT_NEAR((x.col(s) - stacked.segment(4 * s, 4)).norm(), 0.0, 1e-12);
}

// Processed noiseless observation at receiver 1 equals the effective-channel
// model applied to that receiver's four desired symbols.
TEST(Schemes, PairSchemeNoiselessModelIdentity) {
  Rng rng(105);
  const auto ch = random_channels(2, 106);
  const auto pr = ljj_precoders(ch);
  const auto c = make_constellation(ConstKind::qam4);
  const double P = 4.0;
  Rng sym(107);
  for (int rx = 0; rx < 2; ++rx) {
    Vec2 sf0(c.points[sym.index(4)], c.points[sym.index(4)]);
    Vec2 ss0(c.points[sym.index(4)], c.points[sym.index(4)]);
    Vec2 sf1(c.points[sym.index(4)], c.points[sym.index(4)]);
    Vec2 ss1(c.points[sym.index(4)], c.points[sym.index(4)]);
    const Mat x0 = ljj_transmit(pr, 0, sf0, ss0, P);
    const Mat x1 = ljj_transmit(pr, 1, sf1, ss1, P);
    const Mat y = apply_channel(ch, rx, x0, x1, false, rng);
    const auto eff = effective_channels(ch, pr, rx);
    const auto obs = ljj_process(y, eff, rx, P);
    Vec4 want;
    if (rx == 0)
      want << sf0(0), sf0(1), sf1(0), sf1(1);
    else
      want << ss0(0), ss0(1), ss1(0), ss1(1);
    const Vec model = obs.signal_scale * obs.model_matrix * want;
    EXPECT_NEAR((obs.y.col(0) - model).norm() / model.norm(), 0.0, 1e-10);
  }
}

// Processed noiseless observation of the 4-antenna scheme equals
// scale * (Hhat C(first') + Ghat C(second')) with the desired codewords.
TEST(Schemes, QuadSchemeNoiselessModelIdentity) {
  Rng rng(108);
  const auto ch = random_channels(4, 109);
  const auto pr = ljj_precoders(ch);
  const auto c = make_constellation(ConstKind::qam4);
  const double P = 2.0;
  const double theta = M_PI / 4;
  Rng sym(110);
  auto draw8 = [&] {
    Sym8 x;
    for (auto& s : x) s = c.points[sym.index(4)];
    return x;
  };
  for (int rx = 0; rx < 2; ++rx) {
    const Sym8 xf0 = draw8(), xs0 = draw8(), xf1 = draw8(), xs1 = draw8();
    const Mat x0 = msr_transmit(pr, 0, xf0, xs0, theta, P);
    const Mat x1 = msr_transmit(pr, 1, xf1, xs1, theta, P);
    const Mat y = apply_channel(ch, rx, x0, x1, false, rng);
    const auto obs = msr_process(y, theta, rx, P);
    const auto eff = effective_channels(ch, pr, rx);
    const Sym8& a = (rx == 0) ? xf0 : xs0;
    const Sym8& b = (rx == 0) ? xf1 : xs1;
    const Mat model =
        obs.signal_scale *
        (eff.hhat * compact_codeword(xprime_map(a), theta) +
         eff.ghat * compact_codeword(xprime_map(b), theta));
    EXPECT_NEAR((obs.y - model).norm() / model.norm(), 0.0, 1e-10);
  }
}

TEST(Schemes, SingleUserPrecodedPowerIdentity) {
  const auto c = make_constellation(ConstKind::qam4);
  Rng rng(111);
  // m = 2 with one parameter triple.
  {
    const Mat h = draw_square(rng, 2);
    SrpParams params;
    params.blocks = {{0.8, 0.4, 1.1}};
    const double snr = 5.0;
    double acc = 0;
    long n = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Vec x(2);
        x << c.points[a], c.points[b];
        acc += tdma_srp_transmit(h, x, params, snr).squaredNorm();
        ++n;
      }
    const double tau = params.blocks[0][0];
    EXPECT_NEAR(acc / n, snr / 2.0 * 2.0 * tau * tau, 1e-9);
  }
  // m = 4 with two triples.
  {
    const Mat h = draw_square(rng, 4);
    SrpParams params;
    params.blocks = {{0.7, 0.3, 0.9}, {0.5, 1.2, 0.2}};
    const double snr = 3.0;
    double acc = 0;
    long n = 0;
    for (int mask = 0; mask < 256; ++mask) {
      Vec x(4);
      for (int k = 0; k < 4; ++k) x(k) = c.points[(mask >> (2 * k)) & 3];
      acc += tdma_srp_transmit(h, x, params, snr).squaredNorm();
      ++n;
    }
    const double t1 = params.blocks[0][0], t2 = params.blocks[1][0];
    EXPECT_NEAR(acc / n, snr / 4.0 * (2 * t1 * t1 + 2 * t2 * t2), 1e-9);
  }
}

TEST(Schemes, SingleUserPrecodedArgumentErrors) {
  Rng rng(112);
  const Mat h2 = draw_square(rng, 2);
  const Mat h3 = draw_square(rng, 3);
  SrpParams one;
  one.blocks = {{1, 0, 0}};
  SrpParams two;
  two.blocks = {{1, 0, 0}, {1, 0, 0}};
  Vec x2 = Vec::Ones(2), x3 = Vec::Ones(3), x4 = Vec::Ones(4);
  EXPECT_THROW(tdma_srp_transmit(h3, x3, one, 1.0), ConfigError);
  EXPECT_THROW(tdma_srp_transmit(h2, x2, two, 1.0), ConfigError);
  EXPECT_THROW(tdma_srp_transmit(h2, x4, one, 1.0), ConfigError);
}

TEST(Schemes, ApplyChannelNoiselessAndNoiseLayout) {
  const auto ch = random_channels(2, 113);
  Rng rng(114);
  const Mat x1 = Mat::Random(2, 3), x2 = Mat::Random(2, 3);
  Rng quiet(1);
  const Mat y0 = apply_channel(ch, 0, x1, x2, false, quiet);
  EXPECT_NEAR((y0 - (ch.H(0, 0) * x1 + ch.H(1, 0) * x2)).norm(), 0.0, 1e-13);

  // Column-major noise: entry (r, c) consumes draw index c*rows + r.
  Rng noisy(55);
  const Mat z1 = Mat::Zero(2, 3), z2 = Mat::Zero(2, 3);
  const Mat yn = apply_channel(ch, 0, z1, z2, true, noisy);
  Rng ref(55);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 2; ++r)
      EXPECT_EQ(yn(r, c), ref.cgauss()) << "entry " << r << "," << c;
}

}  // namespace
