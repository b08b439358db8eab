#include "qpnls/field.hpp"

#include <algorithm>
#include <cmath>

#include "qpnls/grid.hpp"

namespace qpnls {

std::string to_string(Parity p) {
  switch (p) {
    case Parity::none: return "none";
    case Parity::X: return "X";
    case Parity::Y: return "Y";
    case Parity::Z: return "Z";
  }
  return "none";
}

Parity parity_from_string(const std::string& s) {
  if (s == "none") return Parity::none;
  if (s == "X") return Parity::X;
  if (s == "Y") return Parity::Y;
  if (s == "Z") return Parity::Z;
  throw schema_error("unknown parity tag '" + s + "'");
}

std::string to_string(Sector s) {
  return s == Sector::sine ? "sine" : "cosine";
}

int ell_inf(const LVec& ell, int d) {
  int m = 0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(ell[i]));
  return m;
}

double dot(const std::vector<double>& omega_bar, const LVec& ell, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += omega_bar[i] * ell[i];
  return s;
}

SpectralField::SpectralField(Truncation tr, Parity tag)
    : tr_(tr), parity_(tag), coeff_(tr.mode_count(), cplx(0, 0)) {}

long SpectralField::flat(const LVec& ell, int k) const {
  long idx = 0;
  const int np = tr_.phi_points_per_dim();
  for (int i = 0; i < tr_.d; ++i) idx = idx * np + (ell[i] + tr_.n_phi);
  return idx * tr_.x_count() + (k + tr_.n_x);
}

void SpectralField::decode(long idx, LVec& ell, int& k) const {
  const int np = tr_.phi_points_per_dim();
  k = static_cast<int>(idx % tr_.x_count()) - tr_.n_x;
  idx /= tr_.x_count();
  ell = lzero();
  for (int i = tr_.d - 1; i >= 0; --i) {
    ell[i] = static_cast<int>(idx % np) - tr_.n_phi;
    idx /= np;
  }
}

cplx SpectralField::at(const LVec& ell, int k) const {
  if (std::abs(k) > tr_.n_x) return 0;
  for (int i = 0; i < tr_.d; ++i)
    if (std::abs(ell[i]) > tr_.n_phi) return 0;
  return coeff_[flat(ell, k)];
}

cplx SpectralField::eval(const double* phi, double x) const {
  cplx s = 0;
  LVec ell;
  int k;
  for (long idx = 0; idx < size(); ++idx) {
    if (coeff_[idx] == cplx(0, 0)) continue;
    decode(idx, ell, k);
    double arg = k * x;
    for (int i = 0; i < tr_.d; ++i) arg += ell[i] * phi[i];
    s += coeff_[idx] * std::polar(1.0, arg);
  }
  return s;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.tr_ == tr_) {
    for (long i = 0; i < size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
  }
  LVec ell;
  int k;
  for (long i = 0; i < o.size(); ++i) {
    if (o.coeff_[i] == cplx(0, 0)) continue;
    o.decode(i, ell, k);
    if (std::abs(k) > tr_.n_x || ell_inf(ell, tr_.d) > tr_.n_phi)
      throw error("field sum would drop modes outside the left operand support");
    coeff_[flat(ell, k)] += o.coeff_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  SpectralField n = o;
  n *= cplx(-1, 0);
  return (*this += n);
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& c : coeff_) c *= a;
  return *this;
}

SpectralField SpectralField::dx() const {
  SpectralField g(tr_, Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    g.coeff_[i] = coeff_[i] * cplx(0, k);
  }
  return g;
}

SpectralField SpectralField::dxx() const {
  SpectralField g(tr_, Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    g.coeff_[i] = coeff_[i] * static_cast<double>(-k * k);
  }
  return g;
}

SpectralField SpectralField::dphi(int axis) const {
  SpectralField g(tr_, Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    g.coeff_[i] = coeff_[i] * cplx(0, ell[axis]);
  }
  return g;
}

SpectralField SpectralField::omega_dphi(double lambda,
                                        const std::vector<double>& omega_bar) const {
  SpectralField g(tr_, Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    g.coeff_[i] = coeff_[i] * cplx(0, lambda * dot(omega_bar, ell, tr_.d));
  }
  return g;
}

SpectralField SpectralField::conjugated() const {
  SpectralField g(tr_, Parity::none);
  LVec ell, nell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    nell = lzero();
    for (int a = 0; a < tr_.d; ++a) nell[a] = -ell[a];
    g.coeff_[g.flat(nell, -k)] = std::conj(coeff_[i]);
  }
  return g;
}

SpectralField SpectralField::x_average() const {
  SpectralField g(tr_, Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    if (k == 0) g.coeff_[i] = coeff_[i];
  }
  return g;
}

double SpectralField::sobolev_norm(double s) const {
  return static_cast<double>(sobolev_norm_ld(s));
}

long double SpectralField::sobolev_norm_ld(double s) const {
  if (s < 0) throw error("sobolev_norm: negative regularity index");
  long double acc = 0;
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    if (coeff_[i] == cplx(0, 0)) continue;
    decode(i, ell, k);
    const long double w =
        std::pow(static_cast<long double>(angle_bracket(ell, tr_.d, k)),
                 static_cast<long double>(2 * s));
    acc += static_cast<long double>(std::norm(coeff_[i])) * w;
  }
  return std::sqrt(acc);
}

double SpectralField::wsinf_norm(int s, int oversampling) const {
  CollocationGrid grid(tr_, oversampling);
  double total = 0;
  // enumerate multi-indices alpha over the d+1 coordinates with |alpha| <= s
  std::vector<int> alpha(tr_.d + 1, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == tr_.d + 1) {
      SpectralField g = *this;
      for (int a = 0; a < tr_.d; ++a)
        for (int r = 0; r < alpha[a]; ++r) g = g.dphi(a);
      for (int r = 0; r < alpha[tr_.d]; ++r) g = g.dx();
      auto vals = grid.to_grid(g);
      double m = 0;
      for (const auto& v : vals) m = std::max(m, std::abs(v));
      total += m;
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      alpha[pos] = v;
      rec(pos + 1, remaining - v);
    }
    alpha[pos] = 0;
  };
  rec(0, s);
  return total;
}

bool SpectralField::is_odd_x(double tol) const {
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    if (std::abs(coeff_[i] + at(ell, -k)) > tol) return false;
  }
  return true;
}

bool SpectralField::is_even_x(double tol) const {
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    if (std::abs(coeff_[i] - at(ell, -k)) > tol) return false;
  }
  return true;
}

double SpectralField::parity_defect(Parity p) const {
  SpectralField proj = project_parity(*this, p);
  proj -= *this;
  return proj.sobolev_norm(0.0);
}

cplx SpectralField::sine_coeff(const LVec& ell, int j) const {
  return cplx(0, 1) * (at(ell, j) - at(ell, -j));
}

cplx SpectralField::cos_coeff(const LVec& ell, int j) const {
  if (j == 0) return at(ell, 0);
  return at(ell, j) + at(ell, -j);
}

namespace {
template <class F>
void for_each_ell(const Truncation& tr, F&& fn) {
  LVec ell = lzero();
  for (int i = 0; i < tr.d; ++i) ell[i] = -tr.n_phi;
  while (true) {
    fn(ell);
    int a = tr.d - 1;
    while (a >= 0) {
      if (++ell[a] <= tr.n_phi) break;
      ell[a] = -tr.n_phi;
      --a;
    }
    if (a < 0) break;
  }
}
}  // namespace

SpectralField SpectralField::from_sine_coeffs(
    const Truncation& tr, const std::function<cplx(const LVec&, int)>& us, Parity tag) {
  SpectralField f(tr, tag);
  for_each_ell(tr, [&](const LVec& ell) {
    for (int j = 1; j <= tr.n_x; ++j) {
      const cplx v = us(ell, j);
      // us = i (c_+ - c_-), odd: c_- = -c_+  =>  c_+ = us / (2i)
      f.at(ell, j) += v / cplx(0, 2);
      f.at(ell, -j) -= v / cplx(0, 2);
    }
  });
  return f;
}

SpectralField SpectralField::from_cos_coeffs(
    const Truncation& tr, const std::function<cplx(const LVec&, int)>& uc, Parity tag) {
  SpectralField f(tr, tag);
  for_each_ell(tr, [&](const LVec& ell) {
    f.at(ell, 0) = uc(ell, 0);
    for (int j = 1; j <= tr.n_x; ++j) {
      const cplx v = uc(ell, j) * 0.5;
      f.at(ell, j) += v;
      f.at(ell, -j) += v;
    }
  });
  return f;
}

double SpectralField::basis_norm(double s) const {
  long double acc = 0;
  for_each_ell(tr_, [&](const LVec& ell) {
    for (int j = 0; j <= tr_.n_x; ++j) {
      const long double w =
          std::pow(static_cast<long double>(angle_bracket(ell, tr_.d, j)),
                   static_cast<long double>(2 * s));
      if (j > 0) acc += static_cast<long double>(std::norm(sine_coeff(ell, j))) * w;
      acc += static_cast<long double>(std::norm(cos_coeff(ell, j))) * w;
    }
  });
  return static_cast<double>(std::sqrt(acc));
}

SpectralField SpectralField::truncated(int N) const {
  SpectralField g(tr_, parity_);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    decode(i, ell, k);
    if (std::max(ell_inf(ell, tr_.d), std::abs(k)) <= N) g.coeff_[i] = coeff_[i];
  }
  return g;
}

SpectralField SpectralField::projected(const Truncation& t) const {
  SpectralField g(t, parity_);
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    if (coeff_[i] == cplx(0, 0)) continue;
    decode(i, ell, k);
    if (std::abs(k) <= t.n_x && ell_inf(ell, t.d) <= t.n_phi)
      g.at(ell, k) = coeff_[i];
  }
  return g;
}

double SpectralField::tail_norm_outside(const Truncation& t, double s) const {
  long double acc = 0;
  LVec ell;
  int k;
  for (long i = 0; i < size(); ++i) {
    if (coeff_[i] == cplx(0, 0)) continue;
    decode(i, ell, k);
    if (std::abs(k) <= t.n_x && ell_inf(ell, t.d) <= t.n_phi) continue;
    const long double w =
        std::pow(static_cast<long double>(angle_bracket(ell, tr_.d, k)),
                 static_cast<long double>(2 * s));
    acc += static_cast<long double>(std::norm(coeff_[i])) * w;
  }
  return static_cast<double>(std::sqrt(acc));
}

double SpectralField::max_abs() const {
  double m = 0;
  for (const auto& c : coeff_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField project_parity(const SpectralField& f, Parity target) {
  if (target == Parity::none) return f;
  const Truncation& tr = f.trunc();
  SpectralField g(tr, target);
  // x-projection sign: odd (X, Z) keeps (c_k - c_{-k})/2, even (Y) the sum.
  const double xsign = (target == Parity::Y) ? 1.0 : -1.0;
  // Reality involution (S f)(phi,x) = conj(f(-phi,x)): coefficients
  // (S f)_{l,k} = conj(c_{l,-k}). X and Y are the fixed subspaces of S within
  // their x-parity class, Z the anti-fixed one.
  const double psign = (target == Parity::Z) ? -1.0 : 1.0;
  LVec ell;
  int k;
  for (long i = 0; i < f.size(); ++i) {
    f.decode(i, ell, k);
    const cplx h_pk = 0.5 * (f[i] + xsign * f.at(ell, -k));
    const cplx h_mk = 0.5 * (f.at(ell, -k) + xsign * f[i]);
    g[i] = 0.5 * (h_pk + psign * std::conj(h_mk));
  }
  return g;
}

SpectralField mul(const SpectralField& a, const SpectralField& b, int cap_phi,
                  int cap_x) {
  const int d = a.trunc().d;
  if (b.trunc().d != d) throw error("field product: dimension mismatch");
  Truncation tr;
  tr.d = d;
  tr.n_phi = a.trunc().n_phi + b.trunc().n_phi;
  tr.n_x = a.trunc().n_x + b.trunc().n_x;
  if (cap_phi >= 0) tr.n_phi = std::min(tr.n_phi, cap_phi);
  if (cap_x >= 0) tr.n_x = std::min(tr.n_x, cap_x);
  SpectralField g(tr, Parity::none);
  LVec la, lb, lc;
  int ka, kb;
  for (long ia = 0; ia < a.size(); ++ia) {
    if (a[ia] == cplx(0, 0)) continue;
    a.decode(ia, la, ka);
    for (long ib = 0; ib < b.size(); ++ib) {
      if (b[ib] == cplx(0, 0)) continue;
      b.decode(ib, lb, kb);
      const int kc = ka + kb;
      if (std::abs(kc) > tr.n_x) continue;
      lc = lzero();
      bool ok = true;
      for (int i = 0; i < d; ++i) {
        lc[i] = la[i] + lb[i];
        if (std::abs(lc[i]) > tr.n_phi) { ok = false; break; }
      }
      if (!ok) continue;
      g.at(lc, kc) += a[ia] * b[ib];
    }
  }
  return g;
}

SpectralField dx_inverse(const SpectralField& f) {
  SpectralField g(f.trunc(), Parity::none);
  LVec ell;
  int k;
  for (long i = 0; i < f.size(); ++i) {
    f.decode(i, ell, k);
    if (k != 0) g[i] = f[i] / cplx(0, k);
  }
  return g;
}

SpectralField omega_dphi_inverse(const SpectralField& f, double lambda,
                                 const std::vector<double>& omega_bar,
                                 double divisor_floor, double* min_divisor) {
  SpectralField g(f.trunc(), Parity::none);
  double smallest = std::numeric_limits<double>::infinity();
  LVec ell;
  int k;
  for (long i = 0; i < f.size(); ++i) {
    f.decode(i, ell, k);
    if (ell_inf(ell, f.trunc().d) == 0) continue;  // l = 0 -> 0
    const double div = lambda * dot(omega_bar, ell, f.trunc().d);
    if (f[i] != cplx(0, 0)) {
      smallest = std::min(smallest, std::abs(div));
      if (std::abs(div) < divisor_floor) {
        std::string msg = "small divisor |lambda omega.l| = " + std::to_string(std::abs(div)) +
                          " below floor at l = (";
        for (int a = 0; a < f.trunc().d; ++a)
          msg += std::to_string(ell[a]) + (a + 1 < f.trunc().d ? "," : ")");
        throw small_divisor_error(msg, ell, div);
      }
    }
    g[i] = f[i] / cplx(0, div);
  }
  if (min_divisor) *min_divisor = smallest;
  return g;
}

double DoubledField::real_subspace_defect() const {
  SpectralField diff = minus;
  diff -= plus.conjugated();
  return diff.sobolev_norm(0.0);
}

XField::XField(Truncation tr)
    : tr_(tr), coef_(tr.phi_count() * tr.n_x, 0.0) {}

long XField::flat(const LVec& ell, int j) const {
  long idx = 0;
  const int np = tr_.phi_points_per_dim();
  for (int i = 0; i < tr_.d; ++i) idx = idx * np + (ell[i] + tr_.n_phi);
  return idx * tr_.n_x + (j - 1);
}

SpectralField XField::to_field() const {
  return SpectralField::from_sine_coeffs(
      tr_, [&](const LVec& ell, int j) { return cplx(at(ell, j), 0.0); },
      Parity::X);
}

DoubledField XField::to_doubled() const {
  return DoubledField::on_U(to_field());
}

XField XField::from_field(const SpectralField& u, double tol, double* imag_residue) {
  XField x(u.trunc());
  double resid = 0;
  for_each_ell(u.trunc(), [&](const LVec& ell) {
    for (int j = 1; j <= u.trunc().n_x; ++j) {
      const cplx c = u.sine_coeff(ell, j);
      resid = std::max(resid, std::abs(c.imag()));
      x.at(ell, j) = c.real();
    }
  });
  if (imag_residue) *imag_residue = resid;
  if (resid > tol)
    throw error("XField::from_field: imaginary sine-coefficient residue " +
                std::to_string(resid) + " exceeds tolerance");
  return x;
}

double XField::sobolev_norm(double s) const {
  long double acc = 0;
  for_each_ell(tr_, [&](const LVec& ell) {
    for (int j = 1; j <= tr_.n_x; ++j) {
      const long double w =
          std::pow(static_cast<long double>(angle_bracket(ell, tr_.d, j)),
                   static_cast<long double>(2 * s));
      acc += static_cast<long double>(at(ell, j)) * at(ell, j) * w;
    }
  });
  return static_cast<double>(std::sqrt(acc));
}

XField XField::truncated(int N) const {
  XField g(tr_);
  for_each_ell(tr_, [&](const LVec& ell) {
    for (int j = 1; j <= tr_.n_x; ++j)
      if (std::max(ell_inf(ell, tr_.d), j) <= N) g.at(ell, j) = at(ell, j);
  });
  return g;
}

XField& XField::axpy(double a, const XField& o) {
  for (size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * o.coef_[i];
  return *this;
}

}  // namespace qpnls
