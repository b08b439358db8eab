#include "qpnls/op_matrix.hpp"

#include <cmath>

namespace qpnls {

namespace {

long pow_long(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// flat index of l within [-ell_max, ell_max]^d
long lflat(const LVec& ell, int d, int ell_max) {
  long idx = 0;
  const int n = 2 * ell_max + 1;
  for (int i = 0; i < d; ++i) idx = idx * n + (ell[i] + ell_max);
  return idx;
}

void ldecode(long idx, int d, int ell_max, LVec& ell) {
  const int n = 2 * ell_max + 1;
  ell = lzero();
  for (int i = d - 1; i >= 0; --i) {
    ell[i] = static_cast<int>(idx % n) - ell_max;
    idx /= n;
  }
}

bool lwithin(const LVec& ell, int d, int ell_max) {
  for (int i = 0; i < d; ++i)
    if (std::abs(ell[i]) > ell_max) return false;
  return true;
}

template <class F>
void for_each_l(int d, int ell_max, F&& fn) {
  const long n = pow_long(2 * ell_max + 1, d);
  LVec ell;
  for (long i = 0; i < n; ++i) {
    ldecode(i, d, ell_max, ell);
    fn(i, ell);
  }
}

}  // namespace

std::string to_string(ReversibilityClass::Tag t) {
  switch (t) {
    case ReversibilityClass::Tag::reversible: return "reversible";
    case ReversibilityClass::Tag::reversibility_preserving:
      return "reversibility_preserving";
    default: return "neither";
  }
}

DoubledCoeffs DoubledCoeffs::zero(const Truncation& tr, Sector sector) {
  DoubledCoeffs c;
  c.tr = tr;
  c.sector = sector;
  c.comp[0] = Eigen::MatrixXcd::Zero(tr.phi_count(), tr.n_x + 1);
  c.comp[1] = c.comp[0];
  return c;
}

DoubledCoeffs to_coeffs(const DoubledField& u, Sector sector) {
  DoubledCoeffs c = DoubledCoeffs::zero(u.plus.trunc(), sector);
  const Truncation& tr = u.plus.trunc();
  for (int s = 0; s < 2; ++s) {
    const SpectralField& f = u.comp(s);
    for_each_l(tr.d, tr.n_phi, [&](long li, const LVec& ell) {
      for (int j = 0; j <= tr.n_x; ++j) {
        if (sector == Sector::sine)
          c.comp[s](li, j) = (j == 0) ? cplx(0, 0) : f.sine_coeff(ell, j);
        else
          c.comp[s](li, j) = f.cos_coeff(ell, j);
      }
    });
  }
  return c;
}

DoubledField from_coeffs(const DoubledCoeffs& c) {
  DoubledField u;
  for (int s = 0; s < 2; ++s) {
    auto fetch = [&](const LVec& ell, int j) -> cplx {
      return c.comp[s](lflat(ell, c.tr.d, c.tr.n_phi), j);
    };
    u.comp(s) = (c.sector == Sector::sine)
                    ? SpectralField::from_sine_coeffs(c.tr, fetch)
                    : SpectralField::from_cos_coeffs(c.tr, fetch);
  }
  return u;
}

OpMatrix OpMatrix::zero_toeplitz(const Truncation& tr, int ell_max, Sector sector) {
  OpMatrix m;
  m.tr_ = tr;
  m.ell_max_ = ell_max;
  m.toeplitz_ = true;
  m.sector_ = sector;
  m.nj_ = tr.n_x + 1;
  m.blocks_.assign(4 * pow_long(2 * ell_max + 1, tr.d),
                   Eigen::MatrixXcd::Zero(m.nj_, m.nj_));
  return m;
}

OpMatrix OpMatrix::zero_dense(const Truncation& tr, Sector sector) {
  OpMatrix m;
  m.tr_ = tr;
  m.ell_max_ = tr.n_phi;
  m.toeplitz_ = false;
  m.sector_ = sector;
  m.nj_ = tr.n_x + 1;
  const long dim = tr.phi_count() * m.nj_;
  m.blocks_.assign(4, Eigen::MatrixXcd::Zero(dim, dim));
  return m;
}

OpMatrix OpMatrix::identity(const Truncation& tr, int ell_max, Sector sector) {
  OpMatrix m = zero_toeplitz(tr, ell_max, sector);
  for (int s = 0; s < 2; ++s) {
    auto& b = m.slab(s, s, lzero());
    for (int j = m.jmin(); j < m.nj_; ++j) b(j, j) = 1.0;
  }
  return m;
}

OpMatrix OpMatrix::diagonal(const Truncation& tr, int ell_max,
                            const std::function<cplx(int, int)>& mu, Sector sector) {
  OpMatrix m = zero_toeplitz(tr, ell_max, sector);
  for (int s = 0; s < 2; ++s) {
    auto& b = m.slab(s, s, lzero());
    for (int j = m.jmin(); j < m.nj_; ++j) b(j, j) = mu(s, j);
  }
  return m;
}

long OpMatrix::slab_count() const {
  return toeplitz_ ? pow_long(2 * ell_max_ + 1, tr_.d) : tr_.phi_count();
}

long OpMatrix::slab_index(const LVec& ell) const {
  return lflat(ell, tr_.d, ell_max_);
}

void OpMatrix::decode_slab(long idx, LVec& ell) const {
  ldecode(idx, tr_.d, ell_max_, ell);
}

Eigen::MatrixXcd& OpMatrix::slab(int so, int si, const LVec& ell) {
  return blocks_[(so * 2 + si) * slab_count() + slab_index(ell)];
}

const Eigen::MatrixXcd& OpMatrix::slab(int so, int si, const LVec& ell) const {
  return blocks_[(so * 2 + si) * slab_count() + slab_index(ell)];
}

cplx OpMatrix::entry(int so, int j, const LVec& lo, int si, int jp,
                     const LVec& li) const {
  if (toeplitz_) {
    LVec diff = lzero();
    for (int i = 0; i < tr_.d; ++i) diff[i] = lo[i] - li[i];
    if (!lwithin(diff, tr_.d, ell_max_)) return 0;
    return slab(so, si, diff)(j, jp);
  }
  const long r = lflat(lo, tr_.d, tr_.n_phi) * nj_ + j;
  const long c = lflat(li, tr_.d, tr_.n_phi) * nj_ + jp;
  return blocks_[so * 2 + si](r, c);
}

OpMatrix& OpMatrix::operator+=(const OpMatrix& o) {
  if (toeplitz_ != o.toeplitz_ || ell_max_ != o.ell_max_ || !(tr_ == o.tr_))
    throw error("OpMatrix sum: shape mismatch");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  return *this;
}

OpMatrix& OpMatrix::operator-=(const OpMatrix& o) {
  if (toeplitz_ != o.toeplitz_ || ell_max_ != o.ell_max_ || !(tr_ == o.tr_))
    throw error("OpMatrix difference: shape mismatch");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
  return *this;
}

OpMatrix& OpMatrix::operator*=(cplx a) {
  for (auto& b : blocks_) b *= a;
  return *this;
}

OpMatrix OpMatrix::sigma_diagonal_part() const {
  OpMatrix m = *this;
  const long n = slab_count();
  for (long i = 0; i < n; ++i) {
    m.blocks_[1 * n + i].setZero();  // (+,-)
    m.blocks_[2 * n + i].setZero();  // (-,+)
  }
  return m;
}

OpMatrix OpMatrix::sigma_offdiagonal_part() const {
  OpMatrix m = *this;
  const long n = slab_count();
  for (long i = 0; i < n; ++i) {
    m.blocks_[0 * n + i].setZero();
    m.blocks_[3 * n + i].setZero();
  }
  return m;
}

OpMatrix OpMatrix::sj_diagonal_part() const {
  if (!toeplitz_) throw error("sj_diagonal_part needs a Töplitz matrix");
  OpMatrix m = zero_toeplitz(tr_, ell_max_, sector_);
  for (int s = 0; s < 2; ++s)
    for_each_l(tr_.d, ell_max_, [&](long, const LVec& ell) {
      auto& dst = m.slab(s, s, ell);
      const auto& src = slab(s, s, ell);
      for (int j = 0; j < nj_; ++j) dst(j, j) = src(j, j);
    });
  return m;
}

OpMatrix OpMatrix::sj_offdiagonal_part() const {
  OpMatrix m = *this;
  OpMatrix d = sj_diagonal_part();
  m -= d;
  return m;
}

OpMatrix OpMatrix::scaled_columns_by_j() const {
  OpMatrix m = *this;
  for (auto& b : m.blocks_)
    for (int jp = 0; jp < m.nj_; ++jp) b.col(jp) *= static_cast<double>(jp);
  return m;
}

OpMatrix OpMatrix::omega_dphi_commutator(double lambda,
                                         const std::vector<double>& omega_bar) const {
  if (!toeplitz_) throw error("omega_dphi_commutator needs a Töplitz matrix");
  OpMatrix m = *this;
  const long n = slab_count();
  for_each_l(tr_.d, ell_max_, [&](long i, const LVec& ell) {
    const cplx f = cplx(0, lambda * dot(omega_bar, ell, tr_.d));
    for (int sb = 0; sb < 4; ++sb) m.blocks_[sb * n + i] *= f;
  });
  return m;
}

OpMatrix OpMatrix::conjugate_transpose() const {
  OpMatrix m = *this;
  if (toeplitz_) {
    const long n = slab_count();
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si)
        for_each_l(tr_.d, ell_max_, [&](long, const LVec& ell) {
          LVec nell = lzero();
          for (int i = 0; i < tr_.d; ++i) nell[i] = -ell[i];
          m.blocks_[(si * 2 + so) * n + slab_index(nell)] =
              slab(so, si, ell).adjoint();
        });
  } else {
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si)
        m.blocks_[si * 2 + so] = blocks_[so * 2 + si].adjoint();
  }
  return m;
}

double OpMatrix::max_abs() const {
  double v = 0;
  for (const auto& b : blocks_) v = std::max(v, b.cwiseAbs().maxCoeff());
  return v;
}

double OpMatrix::frobenius() const {
  double v = 0;
  for (const auto& b : blocks_) v += b.squaredNorm();
  return std::sqrt(v);
}

bool OpMatrix::is_zero(double tol) const { return max_abs() <= tol; }

OpMatrix mul(const OpMatrix& a, const OpMatrix& b, double* defect_s0) {
  if (!(a.trunc() == b.trunc())) throw error("OpMatrix product: truncation mismatch");
  const Truncation& tr = a.trunc();
  const int d = tr.d;
  if (a.toeplitz() && b.toeplitz()) {
    const int lm = std::max(a.ell_max(), b.ell_max());
    OpMatrix c = OpMatrix::zero_toeplitz(tr, lm, b.sector());
    const int full = a.ell_max() + b.ell_max();
    // accumulated s=0 decay norm of the dropped |l| > lm tail, per (so,si)
    double defect_sq[4] = {0, 0, 0, 0};
    LVec l2 = lzero();
    for_each_l(d, full, [&](long, const LVec& lo) {
      const bool kept = lwithin(lo, d, lm);
      if (!kept && !defect_s0) return;
      Eigen::MatrixXcd acc[4];
      for (int i = 0; i < 4; ++i)
        acc[i] = Eigen::MatrixXcd::Zero(a.nj(), a.nj());
      bool any = false;
      for_each_l(d, a.ell_max(), [&](long, const LVec& l1) {
        for (int i = 0; i < d; ++i) l2[i] = lo[i] - l1[i];
        if (!lwithin(l2, d, b.ell_max())) return;
        for (int so = 0; so < 2; ++so)
          for (int si = 0; si < 2; ++si)
            for (int sm = 0; sm < 2; ++sm) {
              const auto& ab = a.slab(so, sm, l1);
              const auto& bb = b.slab(sm, si, l2);
              if (ab.isZero(0) || bb.isZero(0)) continue;
              acc[so * 2 + si].noalias() += ab * bb;
              any = true;
            }
      });
      if (!any) return;
      if (kept) {
        for (int so = 0; so < 2; ++so)
          for (int si = 0; si < 2; ++si) c.slab(so, si, lo) = acc[so * 2 + si];
      } else {
        for (int sb = 0; sb < 4; ++sb) {
          for (int dj = 0; dj < a.nj(); ++dj) {
            double sup = 0;
            for (int j = 0; j < a.nj(); ++j) {
              if (j - dj >= 0) sup = std::max(sup, std::abs(acc[sb](j, j - dj)));
              if (j + dj < a.nj()) sup = std::max(sup, std::abs(acc[sb](j, j + dj)));
            }
            defect_sq[sb] += sup * sup;
          }
        }
      }
    });
    if (defect_s0) {
      double m = 0;
      for (int sb = 0; sb < 4; ++sb) m = std::max(m, defect_sq[sb]);
      *defect_s0 = std::sqrt(m);
    }
    return c;
  }
  // dense path (any dense factor)
  auto densify = [&](const OpMatrix& m) {
    if (!m.toeplitz()) return m;
    OpMatrix dm = OpMatrix::zero_dense(tr, m.sector());
    const int nj = m.nj();
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si)
        for_each_l(d, tr.n_phi, [&](long ro, const LVec& lo) {
          for_each_l(d, tr.n_phi, [&](long ci, const LVec& li) {
            LVec diff = lzero();
            for (int i = 0; i < d; ++i) diff[i] = lo[i] - li[i];
            if (!lwithin(diff, d, m.ell_max())) return;
            dm.blocks_[so * 2 + si].block(ro * nj, ci * nj, nj, nj) =
                m.slab(so, si, diff);
          });
        });
    return dm;
  };
  OpMatrix da = densify(a);
  OpMatrix db = densify(b);
  OpMatrix c = OpMatrix::zero_dense(tr, b.sector());
  for (int so = 0; so < 2; ++so)
    for (int si = 0; si < 2; ++si)
      for (int sm = 0; sm < 2; ++sm)
        c.blocks_[so * 2 + si].noalias() +=
            da.blocks_[so * 2 + sm] * db.blocks_[sm * 2 + si];
  if (defect_s0) *defect_s0 = 0;
  return c;
}

DecayProfile decay_norm(const OpMatrix& a, double s) {
  const Truncation& tr = a.trunc();
  const int nj = a.nj();
  DecayProfile prof;
  prof.s = s;
  long double best = 0;
  if (a.toeplitz()) {
    for (int sb = 0; sb < 4; ++sb) {
      const int so = sb / 2, si = sb % 2;
      long double sum = 0;
      for_each_l(tr.d, a.ell_max(), [&](long, const LVec& ell) {
        const auto& blk = a.slab(so, si, ell);
        if (blk.isZero(0)) return;
        const int li = ell_inf(ell, tr.d);
        for (int dj = 0; dj < nj; ++dj) {
          double sup = 0;
          for (int j = 0; j < nj; ++j) {
            if (j - dj >= 0) sup = std::max(sup, std::abs(blk(j, j - dj)));
            if (j + dj < nj) sup = std::max(sup, std::abs(blk(j, j + dj)));
          }
          if (sup == 0) continue;
          const long double w = std::pow(
              static_cast<long double>(std::max({dj, li, 1})),
              static_cast<long double>(2 * s));
          sum += static_cast<long double>(sup) * sup * w;
        }
      });
      best = std::max(best, sum);
    }
  } else {
    // group dense entries by (|j-j'|, l - l')
    const int diff_max = 2 * tr.n_phi;
    const long ndiff = pow_long(2 * diff_max + 1, tr.d);
    for (int sb = 0; sb < 4; ++sb) {
      std::vector<double> sup(static_cast<size_t>(ndiff) * nj, 0.0);
      for_each_l(tr.d, tr.n_phi, [&](long ro, const LVec& lo) {
        for_each_l(tr.d, tr.n_phi, [&](long ci, const LVec& li) {
          LVec diff = lzero();
          for (int i = 0; i < tr.d; ++i) diff[i] = lo[i] - li[i];
          const long df = lflat(diff, tr.d, diff_max);
          for (int j = 0; j < nj; ++j)
            for (int jp = 0; jp < nj; ++jp) {
              const double v =
                  std::abs(a.blocks_internal(sb)(ro * nj + j, ci * nj + jp));
              auto& slot = sup[static_cast<size_t>(df) * nj + std::abs(j - jp)];
              slot = std::max(slot, v);
            }
        });
      });
      long double sum = 0;
      for (long df = 0; df < ndiff; ++df) {
        LVec diff;
        ldecode(df, tr.d, diff_max, diff);
        const int li = ell_inf(diff, tr.d);
        for (int dj = 0; dj < nj; ++dj) {
          const double v = sup[static_cast<size_t>(df) * nj + dj];
          if (v == 0) continue;
          const long double w = std::pow(
              static_cast<long double>(std::max({dj, li, 1})),
              static_cast<long double>(2 * s));
          sum += static_cast<long double>(v) * v * w;
        }
      }
      best = std::max(best, sum);
    }
  }
  prof.value = static_cast<double>(std::sqrt(best));
  return prof;
}

DecayProfile decay_norm_family(const std::vector<OpMatrix>& fam,
                               const ParamGrid& grid, double s, double gamma) {
  if (fam.empty()) throw error("decay_norm_family: empty family");
  DecayProfile prof;
  prof.s = s;
  double sup = 0;
  for (const auto& m : fam) sup = std::max(sup, decay_norm(m, s).value);
  double lip = 0;
  for (size_t i = 0; i < fam.size(); ++i)
    for (size_t j = i + 1; j < fam.size(); ++j) {
      OpMatrix diff = fam[i];
      diff -= fam[j];
      lip = std::max(lip, decay_norm(diff, s).value /
                              std::abs(grid.samples[i] - grid.samples[j]));
    }
  prof.value = sup;
  prof.lip_value = lip;
  (void)gamma;
  return prof;
}

OpMatrix smooth_truncate(const OpMatrix& a, int N) {
  OpMatrix m = a;
  if (a.toeplitz()) {
    const long n = a.slab_count();
    for_each_l(a.trunc().d, a.ell_max(), [&](long i, const LVec& ell) {
      if (ell_inf(ell, a.trunc().d) > N)
        for (int sb = 0; sb < 4; ++sb) m.blocks_internal(sb * n + i).setZero();
    });
  } else {
    const int nj = a.nj();
    for_each_l(a.trunc().d, a.trunc().n_phi, [&](long ro, const LVec& lo) {
      for_each_l(a.trunc().d, a.trunc().n_phi, [&](long ci, const LVec& li) {
        LVec diff = lzero();
        for (int i = 0; i < a.trunc().d; ++i) diff[i] = lo[i] - li[i];
        if (ell_inf(diff, a.trunc().d) > N)
          for (int sb = 0; sb < 4; ++sb)
            m.blocks_internal(sb).block(ro * nj, ci * nj, nj, nj).setZero();
      });
    });
  }
  return m;
}

OpMatrix smooth_truncate_complement(const OpMatrix& a, int N) {
  OpMatrix m = a;
  OpMatrix t = smooth_truncate(a, N);
  m -= t;
  return m;
}

OpMatrix multiplication_matrix(const SpectralField& a, Sector source,
                               const Truncation* op_tr) {
  if (a.parity() == Parity::none)
    throw error("multiplication_matrix requires a parity-tagged field");
  const Truncation tr = op_tr ? *op_tr : a.trunc();
  const int lm = 2 * tr.n_phi;
  OpMatrix m = OpMatrix::zero_toeplitz(
      tr, lm, a.parity() == Parity::Y ? source
                                      : (source == Sector::sine ? Sector::cosine
                                                                : Sector::sine));
  // columns: multiply each source basis function and read target coefficients
  Truncation btr{tr.d, 0, tr.n_x};
  const int j0 = source == Sector::sine ? 1 : 0;
  for (int jp = j0; jp <= tr.n_x; ++jp) {
    SpectralField basis(btr);
    if (source == Sector::sine) {
      basis.at(lzero(), jp) = cplx(0, -0.5);   // sin(jp x)
      basis.at(lzero(), -jp) = cplx(0, 0.5);
    } else if (jp == 0) {
      basis.at(lzero(), 0) = 1.0;              // cos(0 x) = 1
    } else {
      basis.at(lzero(), jp) = 0.5;             // cos(jp x)
      basis.at(lzero(), -jp) = 0.5;
    }
    SpectralField prod = mul(a, basis);
    const bool target_sine =
        (a.parity() == Parity::Y) ? (source == Sector::sine)
                                  : (source == Sector::cosine);
    for_each_l(tr.d, lm, [&](long, const LVec& ell) {
      for (int j = target_sine ? 1 : 0; j <= tr.n_x; ++j) {
        const cplx v = target_sine ? prod.sine_coeff(ell, j)
                                   : prod.cos_coeff(ell, j);
        if (v != cplx(0, 0))
          for (int s = 0; s < 2; ++s) m.slab(s, s, ell)(j, jp) = v;
      }
    });
  }
  return m;
}

Eigen::MatrixXcd phase_slice(const OpMatrix& a, const std::vector<double>& phi) {
  if (!a.toeplitz()) throw error("phase_slice requires a Töplitz-in-time matrix");
  const int nj = a.nj();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * nj, 2 * nj);
  for_each_l(a.trunc().d, a.ell_max(), [&](long, const LVec& ell) {
    double arg = 0;
    for (int i = 0; i < a.trunc().d; ++i) arg += ell[i] * phi[i];
    const cplx ph = std::polar(1.0, arg);
    for (int so = 0; so < 2; ++so)
      for (int si = 0; si < 2; ++si) {
        const auto& blk = a.slab(so, si, ell);
        if (!blk.isZero(0)) out.block(so * nj, si * nj, nj, nj) += ph * blk;
      }
  });
  return out;
}

double phase_decay_norm(const Eigen::MatrixXcd& m, int nj, double s) {
  long double best = 0;
  for (int so = 0; so < 2; ++so)
    for (int si = 0; si < 2; ++si) {
      long double sum = 0;
      for (int dj = 0; dj < nj; ++dj) {
        double sup = 0;
        for (int j = 0; j < nj; ++j) {
          if (j - dj >= 0) sup = std::max(sup, std::abs(m(so * nj + j, si * nj + j - dj)));
          if (j + dj < nj) sup = std::max(sup, std::abs(m(so * nj + j, si * nj + j + dj)));
        }
        if (sup == 0) continue;
        sum += static_cast<long double>(sup) * sup *
               std::pow(static_cast<long double>(std::max(dj, 1)),
                        static_cast<long double>(2 * s));
      }
      best = std::max(best, sum);
    }
  return static_cast<double>(std::sqrt(best));
}

OpMatrix neumann_invert(const OpMatrix& psi, double s0, double c_s0, double tol,
                        int max_terms, double* residual_s0) {
  const double psi_norm = decay_norm(psi, s0).value;
  if (c_s0 * psi_norm > 0.5)
    throw convergence_error(
        "neumann_invert: C(s0)|Psi|_{s0} = " + std::to_string(c_s0 * psi_norm) +
        " exceeds 1/2, operator not diagonally dominated");
  OpMatrix id = OpMatrix::identity(psi.trunc(), psi.ell_max(), psi.sector());
  OpMatrix sum = id;
  OpMatrix term = psi;
  term *= cplx(-1, 0);
  int k = 1;
  for (; k <= max_terms; ++k) {
    sum += term;
    const double tn = decay_norm(term, s0).value;
    if (tn < tol) break;
    term = mul(term, psi);
    term *= cplx(-1, 0);
  }
  if (k > max_terms)
    throw convergence_error("neumann_invert: series not converged within " +
                            std::to_string(max_terms) + " terms");
  if (residual_s0) {
    OpMatrix phi = id;
    phi += psi;
    OpMatrix res = mul(phi, sum);
    res -= id;
    *residual_s0 = decay_norm(res, s0).value;
  }
  return sum;
}

ReversibilityClass classify_reversibility(const OpMatrix& a, double tol) {
  const double scale = std::max(1.0, a.max_abs());
  const double atol = tol * scale;
  const Truncation& tr = a.trunc();
  const int nj = a.nj();

  bool all_real = true, all_imag = true;
  std::optional<ReversibilityWitness> wit_real, wit_imag, wit_cross;

  auto note = [&](std::optional<ReversibilityWitness>& w, int so, int si, int j,
                  int jp, const LVec& ell, cplx v, const char* cond) {
    if (!w) w = ReversibilityWitness{so, si, j, jp, ell, v, cond};
  };

  auto scan_entry = [&](int so, int si, int j, int jp, const LVec& ell, cplx v,
                        cplx cross) {
    if (std::abs(v.imag()) > atol) {
      all_real = false;
      note(wit_real, so, si, j, jp, ell, v, "entry not real");
    }
    if (std::abs(v.real()) > atol) {
      all_imag = false;
      note(wit_imag, so, si, j, jp, ell, v, "entry not purely imaginary");
    }
    if (std::abs(std::conj(cross) - v) > atol)
      note(wit_cross, so, si, j, jp, ell, v,
           "conj(A_{sigma}^{sigma'}(-l)) != A_{-sigma}^{-sigma'}(l)");
  };

  if (a.toeplitz()) {
    for_each_l(tr.d, a.ell_max(), [&](long, const LVec& ell) {
      LVec nell = lzero();
      for (int i = 0; i < tr.d; ++i) nell[i] = -ell[i];
      for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si)
          for (int j = 0; j < nj; ++j)
            for (int jp = 0; jp < nj; ++jp)
              scan_entry(so, si, j, jp, ell,
                         a.slab(so, si, ell)(j, jp),
                         a.slab(1 - so, 1 - si, nell)(j, jp));
    });
  } else {
    for_each_l(tr.d, tr.n_phi, [&](long, const LVec& lo) {
      for_each_l(tr.d, tr.n_phi, [&](long, const LVec& li) {
        LVec nlo = lzero(), nli = lzero();
        for (int i = 0; i < tr.d; ++i) { nlo[i] = -lo[i]; nli[i] = -li[i]; }
        LVec diff = lzero();
        for (int i = 0; i < tr.d; ++i) diff[i] = lo[i] - li[i];
        for (int so = 0; so < 2; ++so)
          for (int si = 0; si < 2; ++si)
            for (int j = 0; j < nj; ++j)
              for (int jp = 0; jp < nj; ++jp)
                scan_entry(so, si, j, jp, diff,
                           a.entry(so, j, lo, si, jp, li),
                           a.entry(1 - so, j, nlo, 1 - si, jp, nli));
      });
    });
  }

  ReversibilityClass rc;
  if (!wit_cross && all_real) {
    rc.tag = ReversibilityClass::Tag::reversibility_preserving;
  } else if (!wit_cross && all_imag) {
    rc.tag = ReversibilityClass::Tag::reversible;
  } else {
    rc.tag = ReversibilityClass::Tag::neither;
    rc.witness = wit_cross ? wit_cross : (all_real ? wit_imag : wit_real);
    if (!rc.witness) rc.witness = wit_real ? wit_real : wit_imag;
  }
  return rc;
}

DoubledCoeffs apply(const OpMatrix& a, const DoubledCoeffs& u) {
  const Truncation& tr = a.trunc();
  DoubledCoeffs out = DoubledCoeffs::zero(tr, a.sector());
  const int nj = a.nj();
  if (a.toeplitz()) {
    LVec diff = lzero();
    for_each_l(tr.d, tr.n_phi, [&](long ro, const LVec& lo) {
      for_each_l(tr.d, tr.n_phi, [&](long ci, const LVec& li) {
        for (int i = 0; i < tr.d; ++i) diff[i] = lo[i] - li[i];
        if (!lwithin(diff, tr.d, a.ell_max())) return;
        for (int so = 0; so < 2; ++so)
          for (int si = 0; si < 2; ++si) {
            const auto& blk = a.slab(so, si, diff);
            if (blk.isZero(0)) continue;
            out.comp[so].row(ro).noalias() +=
                (blk * u.comp[si].row(ci).transpose()).transpose();
          }
      });
    });
  } else {
    for (int so = 0; so < 2; ++so) {
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(tr.phi_count() * nj);
      for (int si = 0; si < 2; ++si) {
        Eigen::VectorXcd vin(tr.phi_count() * nj);
        for (long r = 0; r < tr.phi_count(); ++r)
          vin.segment(r * nj, nj) = u.comp[si].row(r).transpose();
        acc.noalias() += a.blocks_internal(so * 2 + si) * vin;
      }
      for (long r = 0; r < tr.phi_count(); ++r)
        out.comp[so].row(r) = acc.segment(r * nj, nj).transpose();
    }
  }
  return out;
}

DoubledField apply_to_field(const OpMatrix& a, const DoubledField& u, Sector source) {
  return from_coeffs(apply(a, to_coeffs(u, source)));
}

Eigen::VectorXcd apply_phase(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v) {
  return m * v;
}

}  // namespace qpnls
