#pragma once

#include "qpnls/op_matrix.hpp"

namespace qpnls {

// One monomial c(phi,x) * prod_i (z_i^+)^{p_{i,+}} (z_i^-)^{p_{i,-}} of the
// doubled nonlinearity f_1. Argument slots: z0 = u, z1 = u_x, z2 = u_xx, with
// + and - the two components of the doubled variable. Coefficients are
// trigonometric polynomials, so all derivatives are exact.
struct Monomial {
  SpectralField coefficient;
  std::array<int, 6> powers{0, 0, 0, 0, 0, 0};  // z0+, z0-, z1+, z1-, z2+, z2-

  int degree() const {
    int s = 0;
    for (int p : powers) s += p;
    return s;
  }
};

class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<Monomial> terms) : terms_(std::move(terms)) {}

  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_degree() const;

  // Partial derivative with respect to argument slot a in 0..5.
  Nonlinearity derivative(int arg) const;

  // Exact evaluation at the six argument fields (convolution products),
  // projected onto out_tr. tail_norm reports the dropped coefficient mass.
  SpectralField evaluate(const std::array<const SpectralField*, 6>& args,
                         const Truncation& out_tr,
                         double* tail_norm = nullptr) const;

  // The companion component f_2 fixed by the conjugation symmetry:
  // coefficients conjugated as fields, same powers. eval_F feeds it the
  // component-swapped arguments.
  Nonlinearity conjugate_companion() const;

 private:
  std::vector<Monomial> terms_;
};

struct HypothesisReport {
  bool parity_ok = true;          // (i) spatial reversibility
  bool time_reversal_ok = true;   // (ii) conjugation symmetry in phi
  bool forcing_nonzero = false;   // (iii) f(phi,x,0) != 0
  bool dz2_real_nonzero = false;  // (iii) d_{z2} f real and nonvanishing at 0
  bool dz2_sign_varies = false;   // flagged: real but changes sign over the torus
  std::vector<std::string> violations;
  bool ok() const {
    return parity_ok && time_reversal_ok && forcing_nonzero && dz2_real_nonzero;
  }
};

// Checks the reversibility hypotheses monomial by monomial (symbolic parity
// bookkeeping) and cross-checks clause (i) numerically on a collocation grid.
HypothesisReport validate_hypothesis(const Nonlinearity& f, double tol = 1e-10);

// F(u) = omega.dphi u + i(dxx u + eps f(phi,x,u)) componentwise; the minus
// component uses the companion f_2 with swapped arguments, so on the real
// subspace F(u)^- = conj(F(u)^+) exactly. The result is projected onto the
// truncation of u; tail_norm reports the dropped product tail at s = 0.
DoubledField eval_F(const DoubledField& u, const Nonlinearity& f, double eps,
                    double lambda, const std::vector<double>& omega_bar,
                    double* tail_norm = nullptr);

// Linearization coefficients a_i = eps d_{z_i^+} f_1(args),
// b_i = eps d_{z_i^-} f_1(args). The raw derivative fields are stored
// unscaled so that sweeps over eps reuse the assembled symbols.
struct LinearizedCoefficients {
  double eps = 0;
  Truncation tr;
  SpectralField a_raw[3], b_raw[3];

  SpectralField a(int i) const;  // eps-scaled, Y-tagged for i = 0,2, X for i = 1
  SpectralField b(int i) const;
  // max parity defect of the expected classes of (eq. coefficients):
  // a0,a2,b0,b2 in Y; a1,b1 in X
  double parity_defect() const;
};

LinearizedCoefficients linearize(const DoubledField& u, const Nonlinearity& f,
                                 double eps);

// The linearized operator L(u) = omega.dphi 1 + M with
// M = i(E+A2) dxx + i A1 dx + i A0 assembled as a Töplitz matrix on the
// doubled sine-coefficient planes.
struct LinearOperator {
  double lambda = 1.0;
  std::vector<double> omega_bar;
  Truncation tr;
  OpMatrix matrix;  // everything except omega.dphi

  DoubledField apply(const DoubledField& h) const;
};

LinearOperator assemble_linearized(const LinearizedCoefficients& c, double lambda,
                                   const std::vector<double>& omega_bar);

// Builds the Töplitz operator of a 2x2 multiplication-matrix block
// (pp, pm; mp, mm) acting on the given source sector; null entries are zero.
// The symbols may carry support up to (2 n_phi, 2 n_x) of op_tr.
OpMatrix block_multiplication(const SpectralField* pp, const SpectralField* pm,
                              const SpectralField* mp, const SpectralField* mm,
                              Sector source, const Truncation& op_tr);

// Compares L(u) h against the centered finite-difference quotient of F and
// returns the defect norm at s = 0.
double directional_derivative_check(const DoubledField& u, const DoubledField& h,
                                    const Nonlinearity& f, double eps,
                                    double lambda,
                                    const std::vector<double>& omega_bar,
                                    double delta);

}  // namespace qpnls
