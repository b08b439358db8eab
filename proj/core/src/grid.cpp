#include "qpnls/grid.hpp"

#include <cmath>

namespace qpnls {

namespace {

// Apply M (len_out x len_in, row-major) along the middle axis of a tensor
// viewed as [outer][len_in][inner].
std::vector<cplx> apply_axis(const std::vector<cplx>& in, long outer, int len_in,
                             long inner, const std::vector<cplx>& M, int len_out) {
  std::vector<cplx> out(outer * static_cast<long>(len_out) * inner, cplx(0, 0));
  for (long o = 0; o < outer; ++o) {
    const cplx* src = in.data() + o * len_in * inner;
    cplx* dst = out.data() + o * static_cast<long>(len_out) * inner;
    for (int r = 0; r < len_out; ++r) {
      const cplx* row = M.data() + static_cast<long>(r) * len_in;
      cplx* drow = dst + static_cast<long>(r) * inner;
      for (int c = 0; c < len_in; ++c) {
        const cplx m = row[c];
        if (m == cplx(0, 0)) continue;
        const cplx* srow = src + static_cast<long>(c) * inner;
        for (long i = 0; i < inner; ++i) drow[i] += m * srow[i];
      }
    }
  }
  return out;
}

std::vector<cplx> eval_matrix(int modes_half, int grid_n) {
  // rows: grid points, cols: mode index m - modes_half in [-half, half]
  const int len_in = 2 * modes_half + 1;
  std::vector<cplx> M(static_cast<long>(grid_n) * len_in);
  for (int g = 0; g < grid_n; ++g) {
    const double t = 2.0 * pi * g / grid_n;
    for (int c = 0; c < len_in; ++c)
      M[static_cast<long>(g) * len_in + c] = std::polar(1.0, (c - modes_half) * t);
  }
  return M;
}

std::vector<cplx> proj_matrix(int modes_half, int grid_n) {
  const int len_out = 2 * modes_half + 1;
  std::vector<cplx> M(static_cast<long>(len_out) * grid_n);
  for (int r = 0; r < len_out; ++r) {
    for (int g = 0; g < grid_n; ++g) {
      const double t = 2.0 * pi * g / grid_n;
      M[static_cast<long>(r) * grid_n + g] =
          std::polar(1.0 / grid_n, -(r - modes_half) * t);
    }
  }
  return M;
}

}  // namespace

CollocationGrid::CollocationGrid(Truncation tr, int oversampling)
    : tr_(tr), os_(oversampling) {
  if (os_ < 2) throw error("collocation grid needs oversampling >= 2");
  g_phi_ = os_ * (2 * tr_.n_phi + 1);
  g_x_ = os_ * (2 * tr_.n_x + 1);
}

long CollocationGrid::total_points() const { return phi_points() * g_x_; }

long CollocationGrid::phi_points() const {
  long n = 1;
  for (int i = 0; i < tr_.d; ++i) n *= g_phi_;
  return n;
}

long CollocationGrid::flat_point(const int* p_phi, int q) const {
  long idx = 0;
  for (int i = 0; i < tr_.d; ++i) idx = idx * g_phi_ + p_phi[i];
  return idx * g_x_ + q;
}

std::vector<cplx> CollocationGrid::to_grid(const SpectralField& f) const {
  if (!(f.trunc() == tr_)) return to_grid(f.projected(tr_));
  const int P = tr_.phi_points_per_dim();
  const int X = static_cast<int>(tr_.x_count());
  std::vector<cplx> cur = f.data();
  const auto Mphi = eval_matrix(tr_.n_phi, g_phi_);
  long outer = 1;
  long inner = X;
  for (int a = tr_.d - 1; a >= 1; --a) inner *= P;
  for (int a = 0; a < tr_.d; ++a) {
    cur = apply_axis(cur, outer, P, inner, Mphi, g_phi_);
    outer *= g_phi_;
    if (a + 1 < tr_.d) inner /= P;
  }
  // x axis: inner should now be X with outer = g_phi^d
  const auto Mx = eval_matrix(tr_.n_x, g_x_);
  cur = apply_axis(cur, phi_points(), X, 1, Mx, g_x_);
  return cur;
}

SpectralField CollocationGrid::to_field(const std::vector<cplx>& values,
                                        Parity tag) const {
  const int P = tr_.phi_points_per_dim();
  const int X = static_cast<int>(tr_.x_count());
  std::vector<cplx> cur = values;
  // x axis first
  const auto Mx = proj_matrix(tr_.n_x, g_x_);
  cur = apply_axis(cur, phi_points(), g_x_, 1, Mx, X);
  // then the phi axes from the innermost outwards
  const auto Mphi = proj_matrix(tr_.n_phi, g_phi_);
  long inner = X;
  long outer = phi_points() / g_phi_;
  for (int a = tr_.d - 1; a >= 0; --a) {
    cur = apply_axis(cur, outer, g_phi_, inner, Mphi, P);
    inner *= P;
    if (a > 0) outer /= g_phi_;
  }
  SpectralField f(tr_, tag);
  f.data() = cur;
  return f;
}

std::vector<cplx> CollocationGrid::to_grid_x_shifted(
    const SpectralField& f, const std::vector<double>& shift) const {
  const SpectralField g = (f.trunc() == tr_) ? f : f.projected(tr_);
  const int P = tr_.phi_points_per_dim();
  const int X = static_cast<int>(tr_.x_count());
  // partial transform: phi axes only -> h_k(phi_p)
  std::vector<cplx> cur = g.data();
  const auto Mphi = eval_matrix(tr_.n_phi, g_phi_);
  long outer = 1;
  long inner = X;
  for (int a = tr_.d - 1; a >= 1; --a) inner *= P;
  for (int a = 0; a < tr_.d; ++a) {
    cur = apply_axis(cur, outer, P, inner, Mphi, g_phi_);
    outer *= g_phi_;
    if (a + 1 < tr_.d) inner /= P;
  }
  // now cur is [g_phi^d][X]; evaluate the x series at shifted arguments
  std::vector<cplx> out(total_points());
  const long np = phi_points();
  for (long p = 0; p < np; ++p) {
    const cplx* hk = cur.data() + p * X;
    for (int q = 0; q < g_x_; ++q) {
      const long idx = p * g_x_ + q;
      const double x = x_coord(q) + shift[idx];
      cplx s = 0;
      for (int c = 0; c < X; ++c) s += hk[c] * std::polar(1.0, (c - tr_.n_x) * x);
      out[idx] = s;
    }
  }
  return out;
}

std::vector<cplx> CollocationGrid::to_grid_phi_shifted(
    const SpectralField& f, const std::vector<double>& alpha_shift, double lambda,
    const std::vector<double>& omega_bar) const {
  const SpectralField g = (f.trunc() == tr_) ? f : f.projected(tr_);
  const int X = static_cast<int>(tr_.x_count());
  // partial transform: x axis only -> H_l(x_q), laid out [l-cube][g_x]
  const auto Mx = eval_matrix(tr_.n_x, g_x_);
  std::vector<cplx> cur = apply_axis(g.data(), tr_.phi_count(), X, 1, Mx, g_x_);
  // evaluate the phi series at phi_p + lambda*omega_bar*alpha(p) per point
  std::vector<cplx> out(total_points());
  const long np = phi_points();
  std::vector<int> pidx(tr_.d, 0);
  std::vector<double> phi(tr_.d, 0.0);
  for (long p = 0; p < np; ++p) {
    // decode p into per-dim grid indices
    long rem = p;
    for (int a = tr_.d - 1; a >= 0; --a) {
      pidx[a] = static_cast<int>(rem % g_phi_);
      rem /= g_phi_;
    }
    for (int a = 0; a < tr_.d; ++a)
      phi[a] = phi_coord(pidx[a]) + lambda * omega_bar[a] * alpha_shift[p];
    // accumulate over the l-cube
    for (int q = 0; q < g_x_; ++q) out[p * g_x_ + q] = 0;
    LVec ell;
    long lc = tr_.phi_count();
    for (long li = 0; li < lc; ++li) {
      long r = li;
      double arg = 0;
      ell = lzero();
      for (int a = tr_.d - 1; a >= 0; --a) {
        ell[a] = static_cast<int>(r % tr_.phi_points_per_dim()) - tr_.n_phi;
        r /= tr_.phi_points_per_dim();
      }
      for (int a = 0; a < tr_.d; ++a) arg += ell[a] * phi[a];
      const cplx ph = std::polar(1.0, arg);
      const cplx* row = cur.data() + li * g_x_;
      cplx* orow = out.data() + p * g_x_;
      for (int q = 0; q < g_x_; ++q) orow[q] += ph * row[q];
    }
  }
  return out;
}

SpectralField CollocationGrid::map_pointwise(const SpectralField& f,
                                             const std::function<cplx(cplx)>& fn,
                                             Parity tag) const {
  auto vals = to_grid(f);
  for (auto& v : vals) v = fn(v);
  return to_field(vals, tag);
}

}  // namespace qpnls
