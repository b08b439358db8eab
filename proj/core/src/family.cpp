#include "qpnls/family.hpp"

#include <cmath>

namespace qpnls {

namespace {
void check_diophantine(const std::vector<double>& omega_bar, double gamma0,
                       int n_phi) {
  const int d = static_cast<int>(omega_bar.size());
  Truncation tr{d, n_phi, 0};
  LVec ell = lzero();
  for (int i = 0; i < d; ++i) ell[i] = -n_phi;
  while (true) {
    const int linf = ell_inf(ell, d);
    if (linf > 0) {
      const double div = std::abs(dot(omega_bar, ell, d));
      const double bound = gamma0 / std::pow(static_cast<double>(linf), d);
      if (div < bound) {
        std::string msg = "omega_bar fails the diophantine condition at l = (";
        for (int a = 0; a < d; ++a)
          msg += std::to_string(ell[a]) + (a + 1 < d ? "," : ")");
        msg += ": |omega.l| = " + std::to_string(div) + " < " + std::to_string(bound);
        throw error(msg);
      }
    }
    int a = d - 1;
    while (a >= 0) {
      if (++ell[a] <= n_phi) break;
      ell[a] = -n_phi;
      --a;
    }
    if (a < 0) break;
  }
  (void)tr;
}
}  // namespace

ParamGrid::ParamGrid(std::vector<double> samples_, std::vector<double> omega_bar_,
                     double gamma0_, double tau_, int n_phi)
    : samples(std::move(samples_)),
      omega_bar(std::move(omega_bar_)),
      gamma0(gamma0_),
      tau(tau_) {
  if (samples.empty()) throw error("ParamGrid: needs at least one sample");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < 0.5 - 1e-12 || samples[i] > 1.5 + 1e-12)
      throw error("ParamGrid: sample outside Lambda = [1/2, 3/2]");
    if (i > 0 && samples[i] <= samples[i - 1])
      throw error("ParamGrid: samples must be strictly increasing");
  }
  if (tau <= static_cast<double>(d()))
    throw error("ParamGrid: tau must exceed the number of frequencies d");
  check_diophantine(omega_bar, gamma0, n_phi);
  mask.assign(samples.size(), 1);
}

ParamGrid ParamGrid::uniform(int n, double lo, double hi,
                             std::vector<double> omega_bar, double gamma0,
                             double tau, int n_phi) {
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i)
    s[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1.0);
  return ParamGrid(std::move(s), std::move(omega_bar), gamma0, tau, n_phi);
}

int ParamGrid::surviving() const {
  int n = 0;
  for (char m : mask) n += (m != 0);
  return n;
}

double lipschitz_norm(const FieldFamily& fam, double s, double gamma) {
  if (!fam.grid || fam.values.empty())
    throw error("lipschitz_norm: family needs at least one sample");
  double sup = 0;
  for (const auto& f : fam.values) sup = std::max(sup, f.sobolev_norm(s));
  double lip = 0;
  const auto& lam = fam.grid->samples;
  for (size_t i = 0; i < fam.values.size(); ++i)
    for (size_t j = i + 1; j < fam.values.size(); ++j) {
      SpectralField diff = fam.values[i];
      diff -= fam.values[j];
      lip = std::max(lip, diff.sobolev_norm(s) / std::abs(lam[i] - lam[j]));
    }
  return sup + gamma * lip;
}

double lipschitz_norm_scalar(const ParamGrid& grid, const std::vector<cplx>& v,
                             double gamma) {
  if (v.empty()) throw error("lipschitz_norm_scalar: empty family");
  double sup = 0;
  for (const auto& x : v) sup = std::max(sup, std::abs(x));
  double lip = 0;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j)
      lip = std::max(lip, std::abs(v[i] - v[j]) /
                              std::abs(grid.samples[i] - grid.samples[j]));
  return sup + gamma * lip;
}

}  // namespace qpnls
