#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpnls {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Maximum number of forcing frequencies supported by the fixed-size
// multi-index. Desk cases use d = 1 or 2.
inline constexpr int max_dim = 4;

// Time-frequency multi-index; only the first d entries are meaningful.
using LVec = std::array<int, max_dim>;

inline LVec lzero() { return LVec{0, 0, 0, 0}; }

// Parity subspaces of functions on T^d x T:
//   X: odd in x,  u(-phi,x) =  conj(u(phi,x))   (real coefficients, sine basis)
//   Y: even in x, u(-phi,x) =  conj(u(phi,x))   (real coefficients, cosine basis)
//   Z: odd in x,  u(-phi,x) = -conj(u(phi,x))   (imaginary coefficients, sine basis)
enum class Parity : std::uint8_t { none, X, Y, Z };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

// Basis of the spatial index of an operator block: sine (odd sector, j >= 1)
// or cosine (even sector, j >= 0).
enum class Sector : std::uint8_t { sine, cosine };

std::string to_string(Sector s);

// Component tag of doubled variables.
inline constexpr int sigma_plus = 0;   // sigma = +1
inline constexpr int sigma_minus = 1;  // sigma = -1
inline int sigma_sign(int s) { return s == sigma_plus ? +1 : -1; }
inline int sigma_flip(int s) { return 1 - s; }

// Rectangular truncation: |l|_inf <= n_phi (each of the d components),
// |k| <= n_x (exponential basis) or 0 <= j <= n_x (sine/cosine bases).
struct Truncation {
  int d = 1;
  int n_phi = 8;
  int n_x = 8;

  bool operator==(const Truncation&) const = default;

  int phi_points_per_dim() const { return 2 * n_phi + 1; }
  long phi_count() const {
    long n = 1;
    for (int i = 0; i < d; ++i) n *= phi_points_per_dim();
    return n;
  }
  long x_count() const { return 2 * n_x + 1; }
  long mode_count() const { return phi_count() * x_count(); }
};

// Single exponential-basis mode (l, k); sigma tags the component for
// doubled fields (-1 when untagged).
struct ModeIndex {
  LVec ell = lzero();
  int k = 0;
  int sigma = -1;
};

// <i> = max(|l|_inf, |k|, 1), the Sobolev weight base.
int ell_inf(const LVec& ell, int d);
inline int angle_bracket(const LVec& ell, int d, int k) {
  return std::max(std::max(ell_inf(ell, d), std::abs(k)), 1);
}

double dot(const std::vector<double>& omega_bar, const LVec& ell, int d);

// Base error type; subtypes attribute failures to the stage that raised them.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct small_divisor_error : error {
  LVec ell;
  double divisor;
  small_divisor_error(const std::string& msg, const LVec& l, double div)
      : error(msg), ell(l), divisor(div) {}
};

struct diffeo_error : error {
  using error::error;
};

struct convergence_error : error {
  using error::error;
};

struct schema_error : error {
  using error::error;
};

struct divergence_error : error {
  using error::error;
};

}  // namespace qpnls
