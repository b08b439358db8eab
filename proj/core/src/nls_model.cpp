#include "qpnls/nls_model.hpp"

#include <cmath>

#include "qpnls/grid.hpp"

namespace qpnls {

int Nonlinearity::max_degree() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.degree());
  return m;
}

Nonlinearity Nonlinearity::derivative(int arg) const {
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.powers[arg] == 0) continue;
    Monomial d = t;
    d.coefficient *= cplx(t.powers[arg], 0);
    d.powers[arg] -= 1;
    out.push_back(std::move(d));
  }
  return Nonlinearity(std::move(out));
}

SpectralField Nonlinearity::evaluate(const std::array<const SpectralField*, 6>& args,
                                     const Truncation& out_tr,
                                     double* tail_norm) const {
  SpectralField acc(out_tr);
  double tail_sq = 0;
  for (const auto& t : terms_) {
    SpectralField prod = t.coefficient;
    for (int a = 0; a < 6; ++a)
      for (int p = 0; p < t.powers[a]; ++p) prod = mul(prod, *args[a]);
    const double tail = prod.tail_norm_outside(out_tr, 0.0);
    tail_sq += tail * tail;
    acc += prod.projected(out_tr);
  }
  if (tail_norm) *tail_norm = std::sqrt(tail_sq);
  return acc;
}

Nonlinearity Nonlinearity::conjugate_companion() const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m = t;
    m.coefficient = t.coefficient.conjugated();
    out.push_back(std::move(m));
  }
  return Nonlinearity(std::move(out));
}

HypothesisReport validate_hypothesis(const Nonlinearity& f, double tol) {
  HypothesisReport rep;
  if (f.empty()) {
    rep.violations.push_back("empty nonlinearity");
    rep.parity_ok = false;
    return rep;
  }
  const Truncation tr = f.terms().front().coefficient.trunc();

  // (i): c(phi,-x) = (-1)^{p0+p2+1} c(phi,x) per monomial
  int idx = 0;
  for (const auto& t : f.terms()) {
    const int flips = t.powers[0] + t.powers[1] + t.powers[4] + t.powers[5];
    const bool needs_odd = (flips % 2 == 0);
    const SpectralField& c = t.coefficient;
    const double scale = std::max(1.0, c.max_abs());
    const bool ok = needs_odd ? c.is_odd_x(tol * scale) : c.is_even_x(tol * scale);
    if (!ok) {
      rep.parity_ok = false;
      rep.violations.push_back(
          "clause (i): monomial " + std::to_string(idx) + " coefficient must be " +
          (needs_odd ? "odd" : "even") + " in x");
    }
    ++idx;
  }

  // (ii): c_{l,k} = conj(c_{l,-k}) per monomial (reality involution fixed)
  idx = 0;
  for (const auto& t : f.terms()) {
    const SpectralField& c = t.coefficient;
    double defect = 0;
    LVec ell;
    int k;
    for (long i = 0; i < c.size(); ++i) {
      c.decode(i, ell, k);
      defect = std::max(defect, std::abs(c[i] - std::conj(c.at(ell, -k))));
    }
    if (defect > tol * std::max(1.0, c.max_abs())) {
      rep.time_reversal_ok = false;
      rep.violations.push_back("clause (ii): monomial " + std::to_string(idx) +
                               " coefficient breaks the conjugation symmetry");
    }
    ++idx;
  }

  // (iii) part 1: f(phi,x,0) != 0
  SpectralField forcing(tr);
  for (const auto& t : f.terms())
    if (t.degree() == 0) forcing += t.coefficient.projected(tr);
  rep.forcing_nonzero = forcing.sobolev_norm(0.0) > tol;
  if (!rep.forcing_nonzero)
    rep.violations.push_back("clause (iii): f(phi,x,0) vanishes identically");

  // (iii) part 2: d_{z2^+} f at z = 0 real and nonvanishing
  SpectralField dz2(tr);
  for (const auto& t : f.terms()) {
    auto p = t.powers;
    if (p[4] == 1) {
      p[4] = 0;
      if (p == std::array<int, 6>{0, 0, 0, 0, 0, 0}) dz2 += t.coefficient.projected(tr);
    }
  }
  if (dz2.sobolev_norm(0.0) <= tol) {
    rep.dz2_real_nonzero = false;
    rep.violations.push_back("clause (iii): d_{z2} f vanishes at z = 0");
  } else {
    CollocationGrid grid(tr, 4);
    auto vals = grid.to_grid(dz2);
    double imax = 0, remin = std::numeric_limits<double>::infinity(), remax = 0;
    double reabsmin = std::numeric_limits<double>::infinity();
    remax = -remin;
    for (const auto& v : vals) {
      imax = std::max(imax, std::abs(v.imag()));
      remin = std::min(remin, v.real());
      remax = std::max(remax, v.real());
      reabsmin = std::min(reabsmin, std::abs(v.real()));
    }
    const double scale = std::max(1.0, dz2.max_abs());
    if (imax > tol * scale) {
      rep.dz2_real_nonzero = false;
      rep.violations.push_back("clause (iii): d_{z2} f not real-valued at z = 0");
    } else if (reabsmin <= tol * scale) {
      rep.dz2_real_nonzero = false;
      rep.dz2_sign_varies = remin < 0 && remax > 0;
      rep.violations.push_back(
          "clause (iii): d_{z2} f vanishes somewhere on the torus" +
          std::string(rep.dz2_sign_varies ? " (changes sign)" : ""));
    } else {
      rep.dz2_real_nonzero = true;
      rep.dz2_sign_varies = remin < 0 && remax > 0;
    }
  }

  // numerical spot check of clause (i): evaluate f1 at reflected samples
  if (rep.parity_ok) {
    std::array<cplx, 6> z{cplx(0.13, 0.02), cplx(0.13, -0.02), cplx(-0.07, 0.05),
                          cplx(-0.07, -0.05), cplx(0.21, 0.0), cplx(0.21, 0.0)};
    std::array<cplx, 6> zflip{-z[0], -z[1], z[2], z[3], -z[4], -z[5]};
    double worst = 0;
    const double phi[max_dim] = {0.7, 0.3, 0.0, 0.0};
    for (double x : {0.4, 1.3, 2.2}) {
      cplx v = 0, vf = 0;
      for (const auto& t : f.terms()) {
        cplx mv = t.coefficient.eval(phi, x);
        cplx mf = t.coefficient.eval(phi, -x);
        for (int a = 0; a < 6; ++a)
          for (int p = 0; p < t.powers[a]; ++p) {
            mv *= z[a];
            mf *= zflip[a];
          }
        v += mv;
        vf += mf;
      }
      worst = std::max(worst, std::abs(vf + v));
    }
    if (worst > 1e-8) {
      rep.parity_ok = false;
      rep.violations.push_back("clause (i): numerical grid check failed");
    }
  }
  return rep;
}

namespace {
std::array<const SpectralField*, 6> make_args(const SpectralField& p,
                                              const SpectralField& m,
                                              const SpectralField& px,
                                              const SpectralField& mx,
                                              const SpectralField& pxx,
                                              const SpectralField& mxx) {
  return {&p, &m, &px, &mx, &pxx, &mxx};
}
}  // namespace

DoubledField eval_F(const DoubledField& u, const Nonlinearity& f, double eps,
                    double lambda, const std::vector<double>& omega_bar,
                    double* tail_norm) {
  const Truncation tr = u.plus.trunc();
  const SpectralField up = u.plus, um = u.minus;
  const SpectralField upx = up.dx(), umx = um.dx();
  const SpectralField upxx = up.dxx(), umxx = um.dxx();

  DoubledField out;
  out.plus = up.omega_dphi(lambda, omega_bar);
  out.plus += cplx(0, 1) * up.dxx();
  out.minus = um.omega_dphi(lambda, omega_bar);
  out.minus += cplx(0, -1) * um.dxx();

  double t1 = 0, t2 = 0;
  if (eps != 0 && !f.empty()) {
    SpectralField f1 =
        f.evaluate(make_args(up, um, upx, umx, upxx, umxx), tr, &t1);
    Nonlinearity f2 = f.conjugate_companion();
    SpectralField f2v =
        f2.evaluate(make_args(um, up, umx, upx, umxx, upxx), tr, &t2);
    out.plus += cplx(0, eps) * f1;
    out.minus += cplx(0, -eps) * f2v;
  }
  if (tail_norm) *tail_norm = eps * std::hypot(t1, t2);
  return out;
}

SpectralField LinearizedCoefficients::a(int i) const {
  SpectralField g = a_raw[i];
  g *= cplx(eps, 0);
  g.set_parity(i == 1 ? Parity::X : Parity::Y);
  return g;
}

SpectralField LinearizedCoefficients::b(int i) const {
  SpectralField g = b_raw[i];
  g *= cplx(eps, 0);
  g.set_parity(i == 1 ? Parity::X : Parity::Y);
  return g;
}

double LinearizedCoefficients::parity_defect() const {
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    const Parity p = (i == 1) ? Parity::X : Parity::Y;
    worst = std::max(worst, a_raw[i].parity_defect(p));
    worst = std::max(worst, b_raw[i].parity_defect(p));
  }
  return worst;
}

LinearizedCoefficients linearize(const DoubledField& u, const Nonlinearity& f,
                                 double eps) {
  const Truncation tr = u.plus.trunc();
  // Coefficient fields are kept on the doubled support (2 n_phi, 2 n_x):
  // exactly the range the finite operator window can couple through, so the
  // assembled matrix is the exact derivative of the truncated F.
  const Truncation ext{tr.d, 2 * tr.n_phi, 2 * tr.n_x};
  LinearizedCoefficients c;
  c.eps = eps;
  c.tr = tr;
  const SpectralField up = u.plus, um = u.minus;
  const SpectralField upx = up.dx(), umx = um.dx();
  const SpectralField upxx = up.dxx(), umxx = um.dxx();
  const auto args = make_args(up, um, upx, umx, upxx, umxx);
  for (int i = 0; i < 3; ++i) {
    c.a_raw[i] = f.empty() ? SpectralField(ext) : f.derivative(2 * i).evaluate(args, ext);
    c.b_raw[i] = f.empty() ? SpectralField(ext) : f.derivative(2 * i + 1).evaluate(args, ext);
  }
  return c;
}

OpMatrix block_multiplication(const SpectralField* pp, const SpectralField* pm,
                              const SpectralField* mp, const SpectralField* mm,
                              Sector source, const Truncation& op_tr) {
  OpMatrix out = OpMatrix::zero_toeplitz(op_tr, 2 * op_tr.n_phi, source);
  const std::array<const SpectralField*, 4> blocks{pp, pm, mp, mm};
  for (int sb = 0; sb < 4; ++sb) {
    if (!blocks[sb]) continue;
    OpMatrix m = multiplication_matrix(*blocks[sb], source, &op_tr);
    for (long sl = 0; sl < out.slab_count(); ++sl) {
      LVec ell;
      out.decode_slab(sl, ell);
      out.slab(sb / 2, sb % 2, ell) = m.slab(0, 0, ell);
    }
  }
  return out;
}

LinearOperator assemble_linearized(const LinearizedCoefficients& c, double lambda,
                                   const std::vector<double>& omega_bar) {
  const Truncation& tr = c.tr;
  const Truncation ext{tr.d, 2 * tr.n_phi, 2 * tr.n_x};
  // E + A2 block fields (Y parity): (1 + a2, b2; -conj b2, -1 - a2)
  SpectralField one(ext, Parity::Y);
  one.at(lzero(), 0) = 1.0;
  SpectralField a2 = c.a(2), b2 = c.b(2);
  SpectralField pp2 = one + a2;
  pp2.set_parity(Parity::Y);
  SpectralField mm2 = one + a2;
  mm2 *= cplx(-1, 0);
  mm2.set_parity(Parity::Y);
  SpectralField mp2 = b2.conjugated();
  mp2 *= cplx(-1, 0);
  mp2.set_parity(Parity::Y);

  SpectralField a1 = c.a(1), b1 = c.b(1);
  SpectralField mp1 = b1.conjugated();
  mp1 *= cplx(-1, 0);
  mp1.set_parity(Parity::X);
  SpectralField mm1 = a1.conjugated();
  mm1 *= cplx(-1, 0);
  mm1.set_parity(Parity::X);

  SpectralField a0 = c.a(0), b0 = c.b(0);
  SpectralField mp0 = b0.conjugated();
  mp0 *= cplx(-1, 0);
  mp0.set_parity(Parity::Y);
  SpectralField mm0 = a0.conjugated();
  mm0 *= cplx(-1, 0);
  mm0.set_parity(Parity::Y);

  OpMatrix m2 = block_multiplication(&pp2, &b2, &mp2, &mm2, Sector::sine, tr);
  OpMatrix m1 = block_multiplication(&a1, &b1, &mp1, &mm1, Sector::cosine, tr);
  OpMatrix m0 = block_multiplication(&a0, &b0, &mp0, &mm0, Sector::sine, tr);

  // i (E+A2) dxx: columns scaled by -j^2; i A1 dx: columns scaled by j
  OpMatrix mat = m2;
  for (long sl = 0; sl < mat.slab_count(); ++sl)
    for (int sb = 0; sb < 4; ++sb) {
      auto& blk = mat.blocks_internal(sb * mat.slab_count() + sl);
      for (int jp = 0; jp < mat.nj(); ++jp)
        blk.col(jp) *= static_cast<double>(-jp * jp);
    }
  OpMatrix mat1 = m1.scaled_columns_by_j();
  mat += mat1;
  mat += m0;
  mat *= cplx(0, 1);

  LinearOperator L;
  L.lambda = lambda;
  L.omega_bar = omega_bar;
  L.tr = tr;
  L.matrix = std::move(mat);
  return L;
}

DoubledField LinearOperator::apply(const DoubledField& h) const {
  DoubledField out = apply_to_field(matrix, h, Sector::sine);
  out.plus += h.plus.omega_dphi(lambda, omega_bar);
  out.minus += h.minus.omega_dphi(lambda, omega_bar);
  return out;
}

double directional_derivative_check(const DoubledField& u, const DoubledField& h,
                                    const Nonlinearity& f, double eps,
                                    double lambda,
                                    const std::vector<double>& omega_bar,
                                    double delta) {
  LinearOperator L = assemble_linearized(linearize(u, f, eps), lambda, omega_bar);
  DoubledField lh = L.apply(h);

  DoubledField up = u, um = u;
  SpectralField hp = h.plus, hm = h.minus;
  hp *= cplx(delta, 0);
  hm *= cplx(delta, 0);
  up.plus += hp;
  up.minus += hm;
  um.plus -= hp;
  um.minus -= hm;
  DoubledField fp = eval_F(up, f, eps, lambda, omega_bar);
  DoubledField fm = eval_F(um, f, eps, lambda, omega_bar);
  fp -= fm;
  fp.plus *= cplx(1.0 / (2 * delta), 0);
  fp.minus *= cplx(1.0 / (2 * delta), 0);

  fp -= lh;
  return std::max(fp.plus.sobolev_norm(0.0), fp.minus.sobolev_norm(0.0));
}

}  // namespace qpnls
