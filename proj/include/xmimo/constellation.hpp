#pragma once

// Unit-power QAM/BPSK constellations, rotation, coordinate product difference
// (CPD), and sumset construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "xmimo/common.hpp"

namespace xmimo {

enum class ConstKind { bpsk, qam4, qam8, qam16 };

inline ConstKind parse_const_kind(const std::string& s) {
  if (s == "bpsk") return ConstKind::bpsk;
  if (s == "qam4") return ConstKind::qam4;
  if (s == "qam8") return ConstKind::qam8;
  if (s == "qam16") return ConstKind::qam16;
  throw ConfigError("unknown constellation: " + s);
}

inline const char* const_kind_name(ConstKind k) {
  switch (k) {
    case ConstKind::bpsk: return "bpsk";
    case ConstKind::qam4: return "qam4";
    case ConstKind::qam8: return "qam8";
    case ConstKind::qam16: return "qam16";
  }
  return "?";
}

struct ConstellationSpec {
  std::vector<cplx> points;
  std::vector<std::uint32_t> label_bits;  // per-axis Gray labels (cosmetic)
  double rotation = 0.0;                  // radians applied to every point
  double avg_power = 1.0;                 // mean |x|^2 after normalization
};

namespace detail {

inline std::uint32_t gray(std::uint32_t p) { return p ^ (p >> 1); }

// Cartesian product of two PAM axes with levels {±1, ±3, ...}, normalized to
// unit average power.
inline ConstellationSpec pam_product(int n_re, int n_im) {
  ConstellationSpec spec;
  double energy = 0.0;
  for (int a = 0; a < n_re; ++a) {
    const double re = static_cast<double>(2 * a - (n_re - 1));
    for (int b = 0; b < n_im; ++b) {
      const double im = static_cast<double>(2 * b - (n_im - 1));
      spec.points.emplace_back(re, im);
      spec.label_bits.push_back((gray(static_cast<std::uint32_t>(a))
                                 << (n_im > 1 ? (n_im > 2 ? 2 : 1) : 0)) |
                                gray(static_cast<std::uint32_t>(b)));
      energy += re * re + im * im;
    }
  }
  const double scale = 1.0 / std::sqrt(energy / spec.points.size());
  for (auto& p : spec.points) p *= scale;
  return spec;
}

}  // namespace detail

// Builds the constellation, normalizes it to unit average power, then rotates
// every point by `rotation` radians.
inline ConstellationSpec make_constellation(ConstKind kind,
                                            double rotation = 0.0) {
  ConstellationSpec spec;
  switch (kind) {
    case ConstKind::bpsk:
      spec.points = {cplx(-1.0, 0.0), cplx(1.0, 0.0)};
      spec.label_bits = {0, 1};
      break;
    case ConstKind::qam4:
      spec = detail::pam_product(2, 2);
      break;
    case ConstKind::qam8:
      // 4-PAM real axis times 2-PAM imaginary axis, scaled by 1/sqrt(6).
      spec = detail::pam_product(4, 2);
      break;
    case ConstKind::qam16:
      spec = detail::pam_product(4, 4);
      break;
  }
  spec.rotation = rotation;
  const cplx r = std::polar(1.0, rotation);
  double energy = 0.0;
  for (auto& p : spec.points) {
    p *= r;
    energy += std::norm(p);
  }
  spec.avg_power = energy / static_cast<double>(spec.points.size());
  return spec;
}

// Coordinate product distance: min over distinct point pairs of
// |Re(a-b)| * |Im(a-b)|.  Zero whenever two points share a coordinate.
inline double cpd(const ConstellationSpec& spec) {
  double best = std::numeric_limits<double>::infinity();
  const auto& pts = spec.points;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const cplx d = pts[i] - pts[j];
      best = std::min(best, std::abs(d.real()) * std::abs(d.imag()));
    }
  return best;
}

// All pairwise sums a+b, deduplicated within `tol` (max-norm on the
// components).  Quadratic-cost dedup; candidate sets here stay small.
inline std::vector<cplx> sumset(const std::vector<cplx>& a,
                                const std::vector<cplx>& b,
                                double tol = 1e-9) {
  std::vector<cplx> out;
  out.reserve(a.size() * b.size());
  for (const cplx& x : a)
    for (const cplx& y : b) {
      const cplx s = x + y;
      bool dup = false;
      for (const cplx& z : out) {
        if (std::abs(z.real() - s.real()) <= tol &&
            std::abs(z.imag() - s.imag()) <= tol) {
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(s);
    }
  return out;
}

// Per-point difference set {p_i - p_j} including zero, deduplicated.
inline std::vector<cplx> difference_set(const ConstellationSpec& spec,
                                        double tol = 1e-9) {
  std::vector<cplx> neg(spec.points.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -spec.points[i];
  return sumset(spec.points, neg, tol);
}

// Real/imaginary coordinate alphabets.  `separable` is true when the
// constellation is exactly the Cartesian product re x im, which is what the
// per-half decoding path requires.
struct CoordSets {
  std::vector<double> re, im;
  bool separable = false;
};

inline CoordSets coordinate_sets(const ConstellationSpec& spec,
                                 double tol = 1e-9) {
  CoordSets cs;
  auto insert_unique = [tol](std::vector<double>& v, double x) {
    for (double y : v)
      if (std::abs(x - y) <= tol) return;
    v.push_back(x);
  };
  for (const cplx& p : spec.points) {
    insert_unique(cs.re, p.real());
    insert_unique(cs.im, p.imag());
  }
  std::sort(cs.re.begin(), cs.re.end());
  std::sort(cs.im.begin(), cs.im.end());
  if (cs.re.size() * cs.im.size() == spec.points.size()) {
    cs.separable = true;
    for (double r : cs.re)
      for (double i : cs.im) {
        bool found = false;
        for (const cplx& p : spec.points)
          if (std::abs(p.real() - r) <= tol && std::abs(p.imag() - i) <= tol) {
            found = true;
            break;
          }
        if (!found) {
          cs.separable = false;
          return cs;
        }
      }
  }
  return cs;
}

// Index of the constellation point nearest to `v`.
inline int nearest_point(const ConstellationSpec& spec, cplx v) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    const double d = std::norm(v - spec.points[i]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace xmimo
