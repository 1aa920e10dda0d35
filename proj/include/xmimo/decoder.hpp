#pragma once

// Generic maximum-likelihood decoder over real-linear observation models.
//
// Each symbol slot k holds a finite complex alphabet and contributes
// coeff_re.col(k)*Re(s_k) + coeff_im.col(k)*Im(s_k) to the noiseless
// observation.  The metric is the noise-whitened distance
// sum_i |y_i - yhat_i|^2 / noise_var_i.  Two modes:
//  - exhaustive: full enumeration in slot-index order (first minimum kept,
//    so exact ties resolve to the lowest candidate-index tuple);
//  - sphere: realified QR + depth-first Schnorr-Euchner enumeration with
//    pruning.  Identical argmin up to floating-point ties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "xmimo/common.hpp"

namespace xmimo {

struct MlModel {
  Mat coeff_re, coeff_im;                    // n x K
  Eigen::VectorXd noise_var;                 // n, complex variance per entry
  std::vector<std::vector<cplx>> alphabets;  // K candidate sets
  double leaves() const {
    double t = 1.0;
    for (const auto& a : alphabets) t *= static_cast<double>(a.size());
    return t;
  }
};

enum class DecodeMode { exhaustive, sphere };

struct MlDecision {
  std::vector<int> idx;  // chosen candidate index per slot
  double metric = 0.0;
  std::uint64_t nodes = 0;  // nodes visited during the search
};

namespace detail {

inline void exhaustive_walk(const MlModel& m, int k, Vec& resid,
                            std::vector<int>& cur, MlDecision& best) {
  const int K = static_cast<int>(m.alphabets.size());
  if (k == K) {
    double metric = 0.0;
    for (int i = 0; i < resid.size(); ++i)
      metric += std::norm(resid(i)) / m.noise_var(i);
    ++best.nodes;
    if (metric < best.metric) {
      best.metric = metric;
      best.idx = cur;
    }
    return;
  }
  for (int t = 0; t < static_cast<int>(m.alphabets[k].size()); ++t) {
    const cplx s = m.alphabets[k][t];
    cur[k] = t;
    resid -= m.coeff_re.col(k) * s.real() + m.coeff_im.col(k) * s.imag();
    exhaustive_walk(m, k + 1, resid, cur, best);
    resid += m.coeff_re.col(k) * s.real() + m.coeff_im.col(k) * s.imag();
  }
}

}  // namespace detail

inline MlDecision ml_decode_exhaustive(const MlModel& m, const Vec& y) {
  if (m.leaves() > 1e7)
    throw ConfigError("ml_decode: candidate-set overflow (exhaustive > 1e7)");
  MlDecision best;
  best.metric = std::numeric_limits<double>::infinity();
  best.idx.assign(m.alphabets.size(), 0);
  std::vector<int> cur(m.alphabets.size(), 0);
  Vec resid = y;
  detail::exhaustive_walk(m, 0, resid, cur, best);
  return best;
}

inline MlDecision ml_decode_sphere(const MlModel& m, const Vec& y) {
  const int K = static_cast<int>(m.alphabets.size());
  const int n = static_cast<int>(y.size());

  // Realify and whiten.  A slot whose candidates all lie on one real line
  // through the origin (BPSK-like alphabets, PAM-like sumsets) collapses to
  // a single real column.
  struct Slot {
    int col0 = 0, width = 2;
    std::vector<double> a;        // width-1 coordinate per candidate
    std::vector<double> re, im;   // width-2 coordinates per candidate
    cplx pivot = 0.0;
  };
  std::vector<Slot> slots(K);
  int L = 0;
  for (int k = 0; k < K; ++k) {
    Slot& sl = slots[k];
    const auto& alpha = m.alphabets[k];
    for (const cplx& c : alpha)
      if (std::abs(c) > std::abs(sl.pivot)) sl.pivot = c;
    bool colinear = std::abs(sl.pivot) > 0;
    if (colinear)
      for (const cplx& c : alpha)
        if (std::abs(std::imag(c / sl.pivot)) > 1e-12) {
          colinear = false;
          break;
        }
    sl.width = colinear ? 1 : 2;
    sl.col0 = L;
    L += sl.width;
    for (const cplx& c : alpha) {
      if (colinear) {
        sl.a.push_back((c / sl.pivot).real());
      } else {
        sl.re.push_back(c.real());
        sl.im.push_back(c.imag());
      }
    }
  }

  Eigen::MatrixXd b(2 * n, L);
  Eigen::VectorXd yr(2 * n);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / std::sqrt(m.noise_var(i));
    yr(2 * i) = y(i).real() * w;
    yr(2 * i + 1) = y(i).imag() * w;
    for (int k = 0; k < K; ++k) {
      const Slot& sl = slots[k];
      const cplx cre = m.coeff_re(i, k), cim = m.coeff_im(i, k);
      if (sl.width == 1) {
        const cplx col = cre * sl.pivot.real() + cim * sl.pivot.imag();
        b(2 * i, sl.col0) = col.real() * w;
        b(2 * i + 1, sl.col0) = col.imag() * w;
      } else {
        b(2 * i, sl.col0) = cre.real() * w;
        b(2 * i + 1, sl.col0) = cre.imag() * w;
        b(2 * i, sl.col0 + 1) = cim.real() * w;
        b(2 * i + 1, sl.col0 + 1) = cim.imag() * w;
      }
    }
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(L).triangularView<Eigen::Upper>();
  const Eigen::VectorXd yt = (qr.householderQ().adjoint() * yr).head(L);
  const double off_metric = yr.squaredNorm() - yt.squaredNorm();

  MlDecision best;
  best.metric = std::numeric_limits<double>::infinity();
  best.idx.assign(K, 0);

  struct Cand {
    double inc;
    int t;
    double c0, c1;
  };
  std::vector<int> cur(K, 0);
  std::vector<double> coord(L, 0.0);
  std::vector<std::vector<Cand>> cands(K);
  std::vector<std::size_t> pos(K, 0);
  std::vector<double> acc(K, 0.0);  // cost of slots above level k
  std::uint64_t nodes = 0;

  auto enter_level = [&](int k) {
    ++nodes;
    const Slot& sl = slots[k];
    auto& cs = cands[k];
    cs.clear();
    if (sl.width == 1) {
      double r0 = yt(sl.col0);
      for (int j = sl.col0 + 1; j < L; ++j) r0 -= r(sl.col0, j) * coord[j];
      const double d = r(sl.col0, sl.col0);
      for (int t = 0; t < static_cast<int>(sl.a.size()); ++t) {
        const double e = r0 - d * sl.a[t];
        cs.push_back({e * e, t, sl.a[t], 0.0});
      }
    } else {
      double r0 = yt(sl.col0), r1 = yt(sl.col0 + 1);
      for (int j = sl.col0 + 2; j < L; ++j) {
        r0 -= r(sl.col0, j) * coord[j];
        r1 -= r(sl.col0 + 1, j) * coord[j];
      }
      const double d00 = r(sl.col0, sl.col0);
      const double d01 = r(sl.col0, sl.col0 + 1);
      const double d11 = r(sl.col0 + 1, sl.col0 + 1);
      for (int t = 0; t < static_cast<int>(sl.re.size()); ++t) {
        const double e0 = r0 - d00 * sl.re[t] - d01 * sl.im[t];
        const double e1 = r1 - d11 * sl.im[t];
        cs.push_back({e0 * e0 + e1 * e1, t, sl.re[t], sl.im[t]});
      }
    }
    std::sort(cs.begin(), cs.end(), [](const Cand& a, const Cand& b) {
      return a.inc != b.inc ? a.inc < b.inc : a.t < b.t;
    });
    pos[k] = 0;
  };

  int k = K - 1;
  acc[k] = 0.0;
  enter_level(k);
  while (true) {
    bool descended = false;
    while (pos[k] < cands[k].size()) {
      const Cand& cd = cands[k][pos[k]];
      if (acc[k] + cd.inc >= best.metric) {
        pos[k] = cands[k].size();  // sorted: the rest only grow
        break;
      }
      cur[k] = cd.t;
      coord[slots[k].col0] = cd.c0;
      if (slots[k].width == 2) coord[slots[k].col0 + 1] = cd.c1;
      ++pos[k];
      if (k == 0) {
        best.metric = acc[0] + cd.inc;
        best.idx = cur;
      } else {
        acc[k - 1] = acc[k] + cd.inc;
        --k;
        enter_level(k);
        descended = true;
        break;
      }
    }
    if (!descended && pos[k] >= cands[k].size()) {
      if (k == K - 1) break;
      ++k;
    }
  }

  best.metric += off_metric;
  best.nodes = nodes;
  return best;
}

inline MlDecision ml_decode(const MlModel& m, const Vec& y, DecodeMode mode) {
  if (m.coeff_re.cols() != static_cast<Eigen::Index>(m.alphabets.size()) ||
      m.coeff_im.cols() != m.coeff_re.cols() ||
      m.noise_var.size() != m.coeff_re.rows() || y.size() != m.coeff_re.rows())
    throw ConfigError("ml_decode: inconsistent model dimensions");
  for (const auto& a : m.alphabets)
    if (a.empty()) throw ConfigError("ml_decode: empty alphabet");
  return mode == DecodeMode::exhaustive ? ml_decode_exhaustive(m, y)
                                        : ml_decode_sphere(m, y);
}

}  // namespace xmimo
