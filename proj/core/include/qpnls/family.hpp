#pragma once

#include "qpnls/field.hpp"

namespace qpnls {

// Finite sample set for the frequency-scaling parameter lambda in
// Lambda = [1/2, 3/2], together with the forcing frequency direction.
// Construction verifies the diophantine condition on omega_bar over the
// truncated l range: |omega_bar . l| >= gamma0 / |l|^d for 0 < |l| <= n_phi.
struct ParamGrid {
  std::vector<double> samples;  // strictly increasing, within [1/2, 3/2]
  std::vector<double> omega_bar;
  double gamma0 = 0.5;
  double tau = 1.5;
  std::vector<char> mask;  // admissibility per sample

  ParamGrid() = default;
  ParamGrid(std::vector<double> samples_, std::vector<double> omega_bar_,
            double gamma0_, double tau_, int n_phi);

  static ParamGrid uniform(int n, double lo, double hi,
                           std::vector<double> omega_bar, double gamma0,
                           double tau, int n_phi);

  int d() const { return static_cast<int>(omega_bar.size()); }
  int size() const { return static_cast<int>(samples.size()); }
  int surviving() const;
};

// Lipschitz family of values over the grid samples.
template <class T>
struct Family {
  const ParamGrid* grid = nullptr;
  std::vector<T> values;

  Family() = default;
  explicit Family(const ParamGrid& g) : grid(&g), values(g.size()) {}
  T& operator[](int i) { return values[i]; }
  const T& operator[](int i) const { return values[i]; }
};

using FieldFamily = Family<SpectralField>;

// Weighted Lipschitz norm on the grid: sup over samples plus gamma times the
// maximal difference quotient over all sample pairs.
double lipschitz_norm(const FieldFamily& fam, double s, double gamma);

// Same for scalar families (used for eigenvalues and m).
double lipschitz_norm_scalar(const ParamGrid& grid, const std::vector<cplx>& v,
                             double gamma);

}  // namespace qpnls
