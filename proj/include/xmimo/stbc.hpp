#pragma once

// Space-time block layouts: the 2x2 Alamouti block, the staggered 2x3 block
// pair of the 2-antenna scheme, the 4x4 stacked-Alamouti codeword with
// coordinate interleaving and internal rotation theta, its staggered 4x6
// block pair, and scans over codeword-difference determinants.

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

#include "xmimo/common.hpp"
#include "xmimo/constellation.hpp"
#include "xmimo/rng.hpp"

namespace xmimo {

using Sym8 = std::array<cplx, 8>;

// Column-form Alamouti block.
inline Mat2 alamouti(cplx s1, cplx s2) {
  Mat2 a;
  a << s1, -std::conj(s2), s2, std::conj(s1);
  return a;
}

// The two 2x3 transmit blocks of one 2-antenna transmitter: the first
// message occupies slots {1,2}, the second slots {2,3}.
inline std::pair<Mat, Mat> ljj_blocks(const Vec2& s_first,
                                      const Vec2& s_second) {
  Mat x1 = Mat::Zero(2, 3), x2 = Mat::Zero(2, 3);
  x1.leftCols(2) = alamouti(s_first(0), s_first(1));
  x2.rightCols(2) = alamouti(s_second(0), s_second(1));
  return {x1, x2};
}

// Coordinate interleaving: mixes the real/imaginary parts of symbol pairs
// (1,3), (2,4), (5,7), (6,8) into the code-domain symbols x'.
inline Sym8 xprime_map(const Sym8& x) {
  auto re = [&](int k) { return x[k - 1].real(); };
  auto im = [&](int k) { return x[k - 1].imag(); };
  return {cplx(re(1), im(3)), cplx(re(2), im(4)),
          cplx(re(3), im(1)), cplx(-re(4), im(2)),
          cplx(re(7), im(5)), cplx(-re(8), im(6)),
          cplx(re(5), im(7)), cplx(-re(6), im(8))};
}

// Inverse of xprime_map.
inline Sym8 xprime_unmap(const Sym8& xp) {
  auto re = [&](int k) { return xp[k - 1].real(); };
  auto im = [&](int k) { return xp[k - 1].imag(); };
  return {cplx(re(1), im(3)), cplx(re(2), im(4)),
          cplx(re(3), im(1)), cplx(-re(4), im(2)),
          cplx(re(7), im(5)), cplx(-re(8), im(6)),
          cplx(re(5), im(7)), cplx(-re(6), im(8))};
}

// 4x4 codeword as an explicit entry-by-entry fill in code-domain symbols.
inline Mat4 compact_codeword(const Sym8& xp, double theta) {
  const cplx e = std::polar(1.0, theta);
  auto c = [](cplx v) { return std::conj(v); };
  Mat4 w;
  w << xp[0], -c(xp[1]), e * xp[6], e * xp[7],
       xp[1], c(xp[0]), -e * c(xp[7]), e * c(xp[6]),
       e * xp[4], e * xp[5], xp[2], xp[3],
       -e * c(xp[5]), e * c(xp[4]), -c(xp[3]), c(xp[2]);
  return w;
}

// Same codeword assembled from constellation-domain symbols via the
// interleaving map and the four 2x2 sub-blocks; cross-checked against
// compact_codeword in the tests.
inline Mat4 sr_codeword(const Sym8& x, double theta) {
  const Sym8 xp = xprime_map(x);
  const cplx e = std::polar(1.0, theta);
  auto rowblk = [](cplx a, cplx b) {  // [[a, b], [-conj(b), conj(a)]]
    Mat2 m;
    m << a, b, -std::conj(b), std::conj(a);
    return m;
  };
  Mat4 w;
  w.topLeftCorner<2, 2>() = alamouti(xp[0], xp[1]);
  w.topRightCorner<2, 2>() = e * rowblk(xp[6], xp[7]);
  w.bottomLeftCorner<2, 2>() = e * rowblk(xp[4], xp[5]);
  w.bottomRightCorner<2, 2>() = rowblk(xp[2], xp[3]);
  return w;
}

// The two staggered 4x6 transmit blocks of one 4-antenna transmitter:
// the first message's codeword columns occupy slots {1,2,4,5}, the second's
// occupy slots {2,3,5,6}.
inline std::pair<Mat, Mat> msr_blocks(const Mat4& c_first,
                                      const Mat4& c_second) {
  Mat x1 = Mat::Zero(4, 6), x2 = Mat::Zero(4, 6);
  x1.col(0) = c_first.col(0);
  x1.col(1) = c_first.col(1);
  x1.col(3) = c_first.col(2);
  x1.col(4) = c_first.col(3);
  x2.col(1) = c_second.col(0);
  x2.col(2) = c_second.col(1);
  x2.col(4) = c_second.col(2);
  x2.col(5) = c_second.col(3);
  return {x1, x2};
}

// --- Codeword-difference rank scan -----------------------------------------
//
// The codeword map is real-linear in the constellation symbols, so a
// difference of two codewords equals the codeword of the symbol differences.
// The exhaustive scan therefore walks difference tuples d in D^8 (D the
// constellation's difference set) rather than codeword pairs.

enum class ScanMode { exhaustive, sampled };

struct RankScanReport {
  double min_abs_det = std::numeric_limits<double>::infinity();
  std::uint64_t tuples_scanned = 0;
  Sym8 witness{};  // symbol-difference tuple attaining the minimum
  bool exhaustive = false;
};

inline RankScanReport diff_rank_scan(const ConstellationSpec& c, double theta,
                                     ScanMode mode, std::uint64_t n_samples = 0,
                                     Rng* rng = nullptr) {
  RankScanReport rep;
  auto consider = [&](const Sym8& d) {
    const double det = std::abs(compact_codeword(xprime_map(d), theta)
                                    .determinant());
    ++rep.tuples_scanned;
    if (det < rep.min_abs_det) {
      rep.min_abs_det = det;
      rep.witness = d;
    }
  };

  if (mode == ScanMode::exhaustive) {
    const std::vector<cplx> diffs = difference_set(c);
    const std::size_t nd = diffs.size();
    double total = 1.0;
    for (int k = 0; k < 8; ++k) total *= static_cast<double>(nd);
    if (total > 1e8)
      throw ConfigError("diff_rank_scan: exhaustive scan over " +
                        std::to_string(static_cast<std::uint64_t>(total)) +
                        " tuples exceeds the 1e8 budget");
    std::array<std::size_t, 8> idx{};
    Sym8 d{};
    for (int k = 0; k < 8; ++k) d[k] = diffs[0];
    // Odometer walk over D^8, skipping the all-zero tuple (index 0 of the
    // difference set is not necessarily zero, so test the tuple itself).
    while (true) {
      bool all_zero = true;
      for (int k = 0; k < 8; ++k)
        if (std::abs(d[k]) > 0) {
          all_zero = false;
          break;
        }
      if (!all_zero) consider(d);
      int pos = 0;
      while (pos < 8) {
        if (++idx[pos] < nd) {
          d[pos] = diffs[idx[pos]];
          break;
        }
        idx[pos] = 0;
        d[pos] = diffs[0];
        ++pos;
      }
      if (pos == 8) break;
    }
    rep.exhaustive = true;
  } else {
    if (!rng) throw ConfigError("diff_rank_scan: sampled mode needs an rng");
    const std::size_t np = c.points.size();
    for (std::uint64_t s = 0; s < n_samples; ++s) {
      Sym8 d{};
      bool nonzero = false;
      for (int k = 0; k < 8; ++k) {
        const cplx a = c.points[rng->index(np)];
        const cplx b = c.points[rng->index(np)];
        d[k] = a - b;
        if (std::abs(d[k]) > 0) nonzero = true;
      }
      if (!nonzero) {
        --s;  // resample identical pairs; they carry no rank information
        continue;
      }
      consider(d);
    }
  }
  return rep;
}

}  // namespace xmimo
