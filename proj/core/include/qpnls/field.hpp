#pragma once

#include <functional>
#include <optional>

#include "qpnls/types.hpp"

namespace qpnls {

// Truncated Fourier representation of a function on T^d x T, stored in the
// exponential basis: u(phi,x) = sum c_{l,k} e^{i(l.phi + k x)} over
// |l|_inf <= n_phi, |k| <= n_x. A Parity tag asserts membership in one of the
// subspaces X/Y/Z; storage is the same either way.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(Truncation tr, Parity tag = Parity::none);

  const Truncation& trunc() const { return tr_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  long size() const { return static_cast<long>(coeff_.size()); }
  bool empty() const { return coeff_.empty(); }

  // Flat-index <-> mode decoding. Flat order: (l_1,...,l_d,k) row-major.
  long flat(const LVec& ell, int k) const;
  void decode(long idx, LVec& ell, int& k) const;

  cplx& at(const LVec& ell, int k) { return coeff_[flat(ell, k)]; }
  cplx at(const LVec& ell, int k) const;  // zero outside support
  cplx& operator[](long idx) { return coeff_[idx]; }
  cplx operator[](long idx) const { return coeff_[idx]; }

  std::vector<cplx>& data() { return coeff_; }
  const std::vector<cplx>& data() const { return coeff_; }

  // Pointwise evaluation by direct mode summation.
  cplx eval(const double* phi, double x) const;

  // --- algebra -------------------------------------------------------------
  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { a += b; return a; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { a -= b; return a; }
  friend SpectralField operator*(cplx a, SpectralField f) { f *= a; return f; }

  // --- calculus ------------------------------------------------------------
  SpectralField dx() const;
  SpectralField dxx() const;
  SpectralField dphi(int axis) const;
  // omega . d/dphi with omega = lambda * omega_bar
  SpectralField omega_dphi(double lambda, const std::vector<double>& omega_bar) const;
  SpectralField conjugated() const;  // coefficients of conj(u)
  cplx x_average_at(const LVec& ell) const { return at(ell, 0); }
  SpectralField x_average() const;    // k = 0 part only
  cplx mean() const { return at(lzero(), 0); }

  // --- norms ---------------------------------------------------------------
  double sobolev_norm(double s) const;
  long double sobolev_norm_ld(double s) const;
  // |u|_{s,infty} = sum_{|alpha|<=s} sup |D^alpha u| sampled on a collocation
  // grid with the given oversampling.
  double wsinf_norm(int s, int oversampling = 4) const;

  // --- parity --------------------------------------------------------------
  bool is_odd_x(double tol) const;
  bool is_even_x(double tol) const;
  double parity_defect(Parity p) const;  // || f - P f ||_0

  // --- sine / cosine views (paper bases for odd/even functions) -------------
  // odd part:  u = sum_{j>=1} us_j(l) e^{i l.phi} sin(j x), us_j = i(c_{l,j}-c_{l,-j})
  // even part: u = uc_0(l) + sum_{j>=1} uc_j(l) e^{i l.phi} cos(j x), uc_j = c_{l,j}+c_{l,-j}
  cplx sine_coeff(const LVec& ell, int j) const;
  cplx cos_coeff(const LVec& ell, int j) const;
  static SpectralField from_sine_coeffs(const Truncation& tr,
                                        const std::function<cplx(const LVec&, int)>& us,
                                        Parity tag = Parity::none);
  static SpectralField from_cos_coeffs(const Truncation& tr,
                                       const std::function<cplx(const LVec&, int)>& uc,
                                       Parity tag = Parity::none);
  // Sobolev norm computed on the sine/cosine coefficients (the convention used
  // for operator inequalities; sqrt(2) times the exponential-basis norm on
  // parity fields).
  double basis_norm(double s) const;

  // --- truncation ----------------------------------------------------------
  // Projector Pi^(N): zero all modes with max(|l|_inf, |k|) > N.
  SpectralField truncated(int N) const;
  // Re-project onto a different rectangular support (coefficients are copied
  // where the supports overlap, dropped outside).
  SpectralField projected(const Truncation& tr) const;
  double tail_norm_outside(const Truncation& tr, double s) const;

  double max_abs() const;

 private:
  Truncation tr_;
  Parity parity_ = Parity::none;
  std::vector<cplx> coeff_;
};

// Orthogonal projection onto a parity subspace.
SpectralField project_parity(const SpectralField& f, Parity target);

// Exact convolution product. The result support is the sum of the factier
// supports, optionally capped at cap_phi/cap_x (negative = no cap).
SpectralField mul(const SpectralField& a, const SpectralField& b,
                  int cap_phi = -1, int cap_x = -1);

// Primitive with zero x-average: divides mode (l,k) by ik, zeroes k = 0.
SpectralField dx_inverse(const SpectralField& f);

// (omega . d_phi)^{-1}: divides mode l != 0 by i lambda (omega_bar . l) and
// zeroes l = 0. Throws small_divisor_error when a divisor falls below
// divisor_floor. Reports the smallest divisor magnitude met via min_divisor.
SpectralField omega_dphi_inverse(const SpectralField& f, double lambda,
                                 const std::vector<double>& omega_bar,
                                 double divisor_floor,
                                 double* min_divisor = nullptr);

// Doubled field u = (u^+, u^-). On the real subspace the components are
// conjugate: u^- = conj(u^+).
struct DoubledField {
  SpectralField plus;
  SpectralField minus;

  DoubledField() = default;
  DoubledField(SpectralField p, SpectralField m)
      : plus(std::move(p)), minus(std::move(m)) {}
  // Lift a single function to the real subspace.
  static DoubledField on_U(const SpectralField& u) {
    return DoubledField(u, u.conjugated());
  }
  const SpectralField& comp(int sigma) const { return sigma == sigma_plus ? plus : minus; }
  SpectralField& comp(int sigma) { return sigma == sigma_plus ? plus : minus; }

  double sobolev_norm(double s) const {
    return std::max(plus.sobolev_norm(s), minus.sobolev_norm(s));
  }
  long double sobolev_norm_ld(double s) const {
    return std::max(plus.sobolev_norm_ld(s), minus.sobolev_norm_ld(s));
  }
  // || u^- - conj(u^+) ||_0
  double real_subspace_defect() const;
  DoubledField& operator+=(const DoubledField& o) { plus += o.plus; minus += o.minus; return *this; }
  DoubledField& operator-=(const DoubledField& o) { plus -= o.plus; minus -= o.minus; return *this; }
};

// X-parity doubled field in its structural storage: real sine coefficients
// us_j(l) over (|l|_inf <= n_phi, 1 <= j <= n_x). The parity defect of a field
// held in this form is zero by construction.
class XField {
 public:
  XField() = default;
  explicit XField(Truncation tr);

  const Truncation& trunc() const { return tr_; }
  long size() const { return static_cast<long>(coef_.size()); }
  double& at(const LVec& ell, int j) { return coef_[flat(ell, j)]; }
  double at(const LVec& ell, int j) const { return coef_[flat(ell, j)]; }
  std::vector<double>& data() { return coef_; }
  const std::vector<double>& data() const { return coef_; }

  SpectralField to_field() const;            // X-tagged SpectralField
  DoubledField to_doubled() const;           // (u, conj u)
  // Extract from a sine-coefficient array, asserting the imaginary residue is
  // below tol; the residue is returned if requested.
  static XField from_field(const SpectralField& u, double tol,
                           double* imag_residue = nullptr);

  double sobolev_norm(double s) const;  // paper basis norm on sine coeffs
  XField truncated(int N) const;
  XField& axpy(double a, const XField& o);

 private:
  long flat(const LVec& ell, int j) const;
  Truncation tr_;
  std::vector<double> coef_;
};

}  // namespace qpnls
