#pragma once

#include "qpnls/field.hpp"

namespace qpnls {

// Uniform collocation grid on T^d x T with oversampling relative to a mode
// truncation. Transforms are plain factorized DFTs (no FFT; O(M^2) per axis
// is fine at desk scale). The round trip field -> grid -> field is exact for
// band-limited data; products of fields evaluated on the grid are alias-free
// onto the target modes when os >= 4.
class CollocationGrid {
 public:
  CollocationGrid(Truncation tr, int oversampling = 4);

  const Truncation& trunc() const { return tr_; }
  int oversampling() const { return os_; }
  int points_phi() const { return g_phi_; }   // per phi dimension
  int points_x() const { return g_x_; }
  long total_points() const;
  long phi_points() const;                     // product over phi dims

  double phi_coord(int p) const { return 2.0 * pi * p / g_phi_; }
  double x_coord(int q) const { return 2.0 * pi * q / g_x_; }

  // Values over the grid, row-major (phi_1,...,phi_d, x).
  std::vector<cplx> to_grid(const SpectralField& f) const;
  // L^2 projection of grid values onto the modes of tr (optionally re-tagged).
  SpectralField to_field(const std::vector<cplx>& values,
                         Parity tag = Parity::none) const;

  // Pointwise composition helper: evaluates f at (phi_p, x_q + shift(p,q))
  // where shift is given on this grid. Used by the space diffeomorphisms.
  std::vector<cplx> to_grid_x_shifted(const SpectralField& f,
                                      const std::vector<double>& shift) const;
  // Evaluates f at (phi_p + omega * alpha_shift(p), x_q) with alpha given per
  // phi grid point (time reparametrization).
  std::vector<cplx> to_grid_phi_shifted(const SpectralField& f,
                                        const std::vector<double>& alpha_shift,
                                        double lambda,
                                        const std::vector<double>& omega_bar) const;

  // Apply a scalar function pointwise on the grid and re-project.
  SpectralField map_pointwise(const SpectralField& f,
                              const std::function<cplx(cplx)>& fn,
                              Parity tag = Parity::none) const;

  long flat_point(const int* p_phi, int q) const;

 private:
  Truncation tr_;
  int os_;
  int g_phi_;
  int g_x_;
};

}  // namespace qpnls
