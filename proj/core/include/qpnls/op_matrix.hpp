#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qpnls/family.hpp"

namespace qpnls {

// Doubled coefficient planes: per component sigma, a matrix of basis
// coefficients indexed [l_flat x j] with j = 0..n_x (row j = 0 is zero in the
// sine sector). This is the vector format operators act on.
struct DoubledCoeffs {
  Truncation tr;
  Sector sector = Sector::sine;
  Eigen::MatrixXcd comp[2];  // (phi_count x (n_x+1))

  static DoubledCoeffs zero(const Truncation& tr, Sector sector);
};

DoubledCoeffs to_coeffs(const DoubledField& u, Sector sector);
DoubledField from_coeffs(const DoubledCoeffs& c);

// Decay-norm report for an operator matrix.
struct DecayProfile {
  double s = 0;
  double value = 0;
  std::optional<double> lip_value;  // parameter families only
  double total(double gamma) const { return value + (lip_value ? gamma * *lip_value : 0.0); }
};

struct ReversibilityWitness {
  int sigma, sigma_p, j, j_p;
  LVec ell;
  cplx value;
  std::string condition;
};

struct ReversibilityClass {
  enum class Tag { reversible, reversibility_preserving, neither } tag;
  std::optional<ReversibilityWitness> witness;  // first violation when neither
  bool is_reversible() const { return tag == Tag::reversible; }
  bool is_preserving() const { return tag == Tag::reversibility_preserving; }
};

std::string to_string(ReversibilityClass::Tag t);

// Finite block matrix over the doubled mode set (sigma, j, l). Töplitz-in-time
// storage keeps one (n_x+1)^2 block per (sigma, sigma', l) with
// |l|_inf <= ell_max; entries depend on time indices only through their
// difference. The dense fallback stores per (l_out, l_in) blocks and covers
// operators that are not Töplitz.
class OpMatrix {
 public:
  OpMatrix() = default;

  static OpMatrix zero_toeplitz(const Truncation& tr, int ell_max,
                                Sector sector = Sector::sine);
  static OpMatrix zero_dense(const Truncation& tr, Sector sector = Sector::sine);
  static OpMatrix identity(const Truncation& tr, int ell_max,
                           Sector sector = Sector::sine);
  // Töplitz diagonal operator: entry (sigma, j) on the l = 0 slab.
  static OpMatrix diagonal(const Truncation& tr, int ell_max,
                           const std::function<cplx(int, int)>& mu,
                           Sector sector = Sector::sine);

  const Truncation& trunc() const { return tr_; }
  bool toeplitz() const { return toeplitz_; }
  int ell_max() const { return ell_max_; }
  Sector sector() const { return sector_; }
  int nj() const { return nj_; }
  int jmin() const { return sector_ == Sector::sine ? 1 : 0; }
  long slab_count() const;

  // Töplitz access: block (sigma_out, sigma_in) at slab l.
  Eigen::MatrixXcd& slab(int so, int si, const LVec& ell);
  const Eigen::MatrixXcd& slab(int so, int si, const LVec& ell) const;
  long slab_index(const LVec& ell) const;
  void decode_slab(long idx, LVec& ell) const;

  // Raw block storage access. Töplitz: 4 * slab_count() small blocks in
  // (sigma_out*2 + sigma_in)-major order; dense: 4 big matrices indexed
  // (l_flat*nj + j).
  Eigen::MatrixXcd& blocks_internal(long i) { return blocks_[i]; }
  const Eigen::MatrixXcd& blocks_internal(long i) const { return blocks_[i]; }

  // General entry A_{(so,j,lo)}^{(si,j',li)}; for Töplitz matrices this reads
  // the slab at lo - li (zero outside support).
  cplx entry(int so, int j, const LVec& lo, int si, int jp, const LVec& li) const;

  OpMatrix& operator+=(const OpMatrix& o);
  OpMatrix& operator-=(const OpMatrix& o);
  OpMatrix& operator*=(cplx a);
  friend OpMatrix operator+(OpMatrix a, const OpMatrix& b) { a += b; return a; }
  friend OpMatrix operator-(OpMatrix a, const OpMatrix& b) { a -= b; return a; }
  friend OpMatrix operator*(cplx a, OpMatrix m) { m *= a; return m; }

  // Structural projections.
  OpMatrix sigma_diagonal_part() const;    // keep (sigma, sigma) blocks
  OpMatrix sigma_offdiagonal_part() const; // keep (sigma, -sigma) blocks
  // The (sigma,j)-diagonal part over all l (operator A of the KAM step).
  OpMatrix sj_diagonal_part() const;
  OpMatrix sj_offdiagonal_part() const;
  // Right multiplication by D = diag_j{j}.
  OpMatrix scaled_columns_by_j() const;
  // Slab-wise multiplication by i*lambda*(omega_bar . l): the matrix of the
  // commutator [omega.d_phi, A] for Töplitz A.
  OpMatrix omega_dphi_commutator(double lambda,
                                 const std::vector<double>& omega_bar) const;

  OpMatrix conjugate_transpose() const;
  double max_abs() const;
  double frobenius() const;

  bool is_zero(double tol) const;

 private:
  Truncation tr_;
  int ell_max_ = 0;
  bool toeplitz_ = true;
  Sector sector_ = Sector::sine;
  int nj_ = 0;
  // Töplitz: blocks_[(so*2+si)*n_slabs + slab]; dense: per (so,si) big matrix
  // indexed (l_out*nj + j) x (l_in*nj + j').
  std::vector<Eigen::MatrixXcd> blocks_;
  friend OpMatrix mul(const OpMatrix&, const OpMatrix&, double*);
};

// Matrix product. Töplitz x Töplitz convolves slabs and re-truncates to
// max(ell_max) of the factors; the dropped convolution tail is reported as an
// s = 0 decay norm through *defect when requested. Any dense factor yields a
// dense product.
OpMatrix mul(const OpMatrix& a, const OpMatrix& b, double* defect_s0 = nullptr);

// s-decay norm: sup over (sigma,sigma') of
//   ( sum_h <h>^{2s} sup_{k-k'=h} |A_{sigma,k}^{sigma',k'}|^2 )^{1/2}
// with h = (|j-j'|, l-l') and <h> = max(|j-j'|, |l-l'|_inf, 1).
DecayProfile decay_norm(const OpMatrix& a, double s);
// Weighted Lipschitz decay norm over a parameter family.
DecayProfile decay_norm_family(const std::vector<OpMatrix>& fam,
                               const ParamGrid& grid, double s, double gamma);

// Smoothing operator Pi_N: zeroes entries with |l - l'|_inf > N.
OpMatrix smooth_truncate(const OpMatrix& a, int N);
OpMatrix smooth_truncate_complement(const OpMatrix& a, int N);  // Pi_N^perp

// Multiplication operator by a parity-tagged field, acting on the given
// source sector. The target sector is source for Y fields and the flipped
// sector for X / Z fields. Töplitz by construction. op_tr fixes the field
// truncation the operator acts on; the symbol may carry a larger support
// (up to (2 n_phi, 2 n_x)), which is exactly the range the finite operator
// window can see. Defaults to the symbol's own truncation.
OpMatrix multiplication_matrix(const SpectralField& a, Sector source,
                               const Truncation* op_tr = nullptr);

// Phase-space slice A(phi) = sum_l A(l) e^{i l.phi} of a Töplitz matrix:
// a (2 nj) x (2 nj) matrix over (sigma, j). Throws for non-Töplitz input.
Eigen::MatrixXcd phase_slice(const OpMatrix& a, const std::vector<double>& phi);

// Decay norm of a phase-space matrix (h = |j - j'| only).
double phase_decay_norm(const Eigen::MatrixXcd& m, int nj, double s);

// Neumann inversion of 1 + Psi. Requires c_s0 * |Psi|_{s0} <= 1/2 where c_s0
// is the calibrated submultiplicativity constant of the decay norm at s0.
// The series is summed until the term norm falls below tol (relative to the
// accumulated inverse) or max_terms is hit.
OpMatrix neumann_invert(const OpMatrix& psi, double s0, double c_s0, double tol,
                        int max_terms, double* residual_s0 = nullptr);

// Entrywise reversibility classification per the sine/cosine-basis
// conditions: reversibility-preserving blocks are real with
// conj(A_{sigma}^{sigma'}(-l)) = A_{-sigma}^{-sigma'}(l); reversible blocks are
// purely imaginary with the same cross-component condition.
ReversibilityClass classify_reversibility(const OpMatrix& a, double tol = 1e-9);

// Apply an operator to doubled coefficient planes (and the field wrapper).
DoubledCoeffs apply(const OpMatrix& a, const DoubledCoeffs& u);
DoubledField apply_to_field(const OpMatrix& a, const DoubledField& u,
                            Sector source);

// Apply a phase-space matrix to a doubled x-coefficient vector (2 nj).
Eigen::VectorXcd apply_phase(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v);

}  // namespace qpnls
