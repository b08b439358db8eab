#pragma once

#include <random>

#include "qpnls/field.hpp"
#include "qpnls/op_matrix.hpp"

namespace qpnls::testing {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline SpectralField random_field(const Truncation& tr, std::mt19937_64& gen,
                                  double amplitude = 1.0, double decay = 0.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField f(tr);
  LVec ell;
  int k;
  for (long i = 0; i < f.size(); ++i) {
    f.decode(i, ell, k);
    const double w = std::pow(static_cast<double>(angle_bracket(ell, tr.d, k)), -decay);
    f[i] = amplitude * w * cplx(n(gen), n(gen));
  }
  return f;
}

// Random field with exactly n nonzero modes.
inline SpectralField sparse_field(const Truncation& tr, std::mt19937_64& gen, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<long> pick(0, tr.mode_count() - 1);
  SpectralField f(tr);
  for (int i = 0; i < n; ++i) f[pick(gen)] = cplx(nd(gen), nd(gen));
  return f;
}

inline SpectralField random_parity_field(const Truncation& tr, Parity p,
                                         std::mt19937_64& gen, double amplitude = 1.0,
                                         double decay = 0.0) {
  SpectralField f = project_parity(random_field(tr, gen, amplitude, decay), p);
  f.set_parity(p);
  return f;
}

// Random Töplitz matrix with polynomial off-diagonal decay of the entries.
// slab_limit >= 0 restricts the nonzero slabs to |l|_inf <= slab_limit.
inline OpMatrix random_toeplitz(const Truncation& tr, int ell_max,
                                std::mt19937_64& gen, double amplitude = 1.0,
                                double decay = 2.0, int slab_limit = -1) {
  OpMatrix m = OpMatrix::zero_toeplitz(tr, ell_max);
  std::normal_distribution<double> n(0.0, 1.0);
  LVec ell;
  for (long s = 0; s < m.slab_count(); ++s) {
    m.decode_slab(s, ell);
    const int li = ell_inf(ell, tr.d);
    if (slab_limit >= 0 && li > slab_limit) continue;
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) {
        auto& blk = m.slab(so, si, ell);
        for (int j = 1; j < m.nj(); ++j)
          for (int jp = 1; jp < m.nj(); ++jp) {
            const double w = std::pow(
                static_cast<double>(std::max({std::abs(j - jp), li, 1})), -decay);
            blk(j, jp) = amplitude * w * cplx(n(gen), n(gen));
          }
      }
  }
  return m;
}

// Random reversible Töplitz matrix: purely imaginary entries in the basis
// convention plus the cross-component conjugation symmetry.
inline OpMatrix random_reversible(const Truncation& tr, int ell_max,
                                  std::mt19937_64& gen, double amplitude = 1.0,
                                  double decay = 2.0, bool sigma_offdiag_only = false) {
  OpMatrix m = OpMatrix::zero_toeplitz(tr, ell_max);
  std::normal_distribution<double> n(0.0, 1.0);
  LVec ell, nell;
  for (long s = 0; s < m.slab_count(); ++s) {
    m.decode_slab(s, ell);
    const int li = ell_inf(ell, tr.d);
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) {
        if (sigma_offdiag_only && so == si) continue;
        auto& blk = m.slab(so, si, ell);
        for (int j = 1; j < m.nj(); ++j)
          for (int jp = 1; jp < m.nj(); ++jp) {
            const double w = std::pow(
                static_cast<double>(std::max({std::abs(j - jp), li, 1})), -decay);
            blk(j, jp) = amplitude * w * cplx(0, n(gen));
          }
      }
  }
  // symmetrize onto the fixed space of rev(B)_{s,j}^{s',j'}(l) :=
  // conj(B_{-s,j}^{-s',j'}(-l)); preserves purely imaginary entries
  OpMatrix sym = OpMatrix::zero_toeplitz(tr, ell_max);
  for (long s = 0; s < m.slab_count(); ++s) {
    m.decode_slab(s, ell);
    nell = lzero();
    for (int i = 0; i < tr.d; ++i) nell[i] = -ell[i];
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si)
        sym.slab(so, si, ell) =
            0.5 * (m.slab(so, si, ell) + m.slab(1 - so, 1 - si, nell).conjugate());
  }
  return sym;
}

// Random reversibility-preserving Töplitz matrix: real entries plus the
// cross-component conjugation symmetry.
inline OpMatrix random_preserving(const Truncation& tr, int ell_max,
                                  std::mt19937_64& gen, double amplitude = 1.0,
                                  double decay = 2.0) {
  OpMatrix m = OpMatrix::zero_toeplitz(tr, ell_max);
  std::normal_distribution<double> n(0.0, 1.0);
  LVec ell, nell;
  for (long s = 0; s < m.slab_count(); ++s) {
    m.decode_slab(s, ell);
    const int li = ell_inf(ell, tr.d);
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) {
        auto& blk = m.slab(so, si, ell);
        for (int j = 1; j < m.nj(); ++j)
          for (int jp = 1; jp < m.nj(); ++jp) {
            const double w = std::pow(
                static_cast<double>(std::max({std::abs(j - jp), li, 1})), -decay);
            blk(j, jp) = amplitude * w * n(gen);
          }
      }
  }
  OpMatrix sym = OpMatrix::zero_toeplitz(tr, ell_max);
  for (long s = 0; s < m.slab_count(); ++s) {
    m.decode_slab(s, ell);
    nell = lzero();
    for (int i = 0; i < tr.d; ++i) nell[i] = -ell[i];
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si)
        sym.slab(so, si, ell) =
            0.5 * (m.slab(so, si, ell) + m.slab(1 - so, 1 - si, nell).conjugate());
  }
  return sym;
}

// Real-valued Y-parity field: real cosine coefficients, even in l.
inline SpectralField real_Y_field(const Truncation& tr, std::mt19937_64& gen,
                                  double amplitude = 1.0, double decay = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField draw = random_field(tr, gen, amplitude, decay);
  auto coeff = [&](const LVec& ell, int j) -> cplx {
    LVec nell = lzero();
    for (int i = 0; i < tr.d; ++i) nell[i] = -ell[i];
    const double v = 0.5 * (draw.at(ell, j).real() + draw.at(nell, j).real());
    return cplx(v, 0);
  };
  SpectralField f = SpectralField::from_cos_coeffs(tr, coeff, Parity::Y);
  return f;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
}

}  // namespace qpnls::testing
