#include <doctest.h>

#include "qpnls/grid.hpp"
#include "qpnls/nls_model.hpp"
#include "test_helpers.hpp"

using namespace qpnls;
using namespace qpnls::testing;

namespace {
const Truncation tr{1, 4, 4};
const std::vector<double> omega_bar{1.0};

SpectralField sin_x(const Truncation& t) {
  SpectralField f(t);
  f.at(lzero(), 1) = cplx(0, -0.5);
  f.at(lzero(), -1) = cplx(0, 0.5);
  return f;
}

SpectralField cos_x(const Truncation& t) {
  SpectralField f(t);
  f.at(lzero(), 1) = 0.5;
  f.at(lzero(), -1) = 0.5;
  return f;
}

SpectralField unit(const Truncation& t) {
  SpectralField f(t);
  f.at(lzero(), 0) = 1.0;
  return f;
}

Monomial forcing_sin_x(const Truncation& t) { return Monomial{sin_x(t), {0, 0, 0, 0, 0, 0}}; }
Monomial uxx_term(const Truncation& t, const SpectralField& c) {
  (void)t;
  return Monomial{c, {0, 0, 0, 0, 1, 0}};
}
}  // namespace

TEST_CASE("hypothesis validation") {
  SUBCASE("f = u_xx cos(x) fails (d_{z2} f vanishes on the torus, no forcing)") {
    Nonlinearity f({uxx_term(tr, cos_x(tr))});
    auto rep = validate_hypothesis(f);
    CHECK(!rep.ok());
    CHECK(!rep.forcing_nonzero);
    CHECK(!rep.dz2_real_nonzero);
    CHECK(rep.dz2_sign_varies);
    CHECK(rep.parity_ok);  // the spatial-reversibility clause itself holds
  }

  SUBCASE("f = sin x + u^2 sin x passes (i),(ii) but d_{z2} f = 0 fails (iii)") {
    Nonlinearity f({forcing_sin_x(tr), Monomial{sin_x(tr), {2, 0, 0, 0, 0, 0}}});
    auto rep = validate_hypothesis(f);
    CHECK(rep.parity_ok);
    CHECK(rep.time_reversal_ok);
    CHECK(rep.forcing_nonzero);
    CHECK(!rep.dz2_real_nonzero);
    CHECK(!rep.ok());
  }

  SUBCASE("f = sin x + u_xx passes all three") {
    Nonlinearity f({forcing_sin_x(tr), uxx_term(tr, unit(tr))});
    auto rep = validate_hypothesis(f);
    CHECK(rep.ok());
    CHECK(!rep.dz2_sign_varies);
  }

  SUBCASE("offending monomial is reported") {
    // even coefficient on a z-free term violates (i)
    Nonlinearity f({Monomial{cos_x(tr), {0, 0, 0, 0, 0, 0}}});
    auto rep = validate_hypothesis(f);
    CHECK(!rep.parity_ok);
    REQUIRE(!rep.violations.empty());
    CHECK(rep.violations.front().find("monomial 0") != std::string::npos);
  }
}

TEST_CASE("eval_F") {
  const double lambda = 0.9;

  SUBCASE("eps = 0, u = 0 gives 0") {
    DoubledField u = DoubledField::on_U(SpectralField(tr));
    DoubledField F = eval_F(u, Nonlinearity(), 0.0, lambda, omega_bar);
    CHECK(F.plus.sobolev_norm(0) == 0.0);
    CHECK(F.minus.sobolev_norm(0) == 0.0);
  }

  SUBCASE("eps = 0 single sine mode is multiplied by i(lambda omega.l - j^2)") {
    SpectralField u(tr);
    LVec ell = lzero();
    ell[0] = 2;
    const int j = 3;
    u.at(ell, j) = cplx(0, -0.5);
    u.at(ell, -j) = cplx(0, 0.5);
    DoubledField du = DoubledField::on_U(u);
    DoubledField F = eval_F(du, Nonlinearity(), 0.0, lambda, omega_bar);
    const cplx factor_plus = cplx(0, lambda * 2.0 - j * j);
    SpectralField expect = u;
    expect *= factor_plus;
    SpectralField diff = F.plus;
    diff -= expect;
    CHECK(diff.sobolev_norm(0) < 1e-14);
    // minus component gets the conjugate action on conj(u)
    SpectralField em = u.conjugated();
    em *= std::conj(factor_plus);
    SpectralField dm = F.minus;
    dm -= em;
    CHECK(dm.sobolev_norm(0) < 1e-14);
  }

  SUBCASE("polynomial f matches collocation-grid oracle, F maps X to Z") {
    auto gen = rng(301);
    // f = sin x + u_xx + 0.2 cos(phi) cos(x) u_xx + 0.1 u^2 sin x
    SpectralField c2(tr);
    {
      LVec e1 = lzero();
      e1[0] = 1;
      LVec em = lzero();
      em[0] = -1;
      for (const LVec& l : {e1, em})
        for (int k : {1, -1}) c2.at(l, k) = 0.05;
    }
    Nonlinearity f({forcing_sin_x(tr), uxx_term(tr, unit(tr)), uxx_term(tr, c2),
                    Monomial{0.1 * sin_x(tr), {2, 0, 0, 0, 0, 0}}});
    CHECK(validate_hypothesis(f).parity_ok);

    SpectralField u = random_parity_field(tr, Parity::X, gen, 0.01, 2.0);
    DoubledField du = DoubledField::on_U(u);
    const double eps = 1e-2;
    DoubledField F = eval_F(du, f, eps, lambda, omega_bar);

    // oracle: evaluate the nonlinearity pointwise on an oversampled grid
    CollocationGrid grid(tr, 6);
    auto gu = grid.to_grid(u);
    auto guxx = grid.to_grid(u.dxx());
    std::vector<cplx> gf(gu.size());
    for (size_t i = 0; i < gu.size(); ++i) {
      const long pidx = static_cast<long>(i) / grid.points_x();
      const int q = static_cast<int>(i % grid.points_x());
      const double phi = grid.phi_coord(static_cast<int>(pidx));
      const double x = grid.x_coord(q);
      const cplx z0 = gu[i];
      const cplx z2 = guxx[i];
      gf[i] = std::sin(x) + z2 + 0.2 * std::cos(phi) * std::cos(x) * z2 +
              0.1 * z0 * z0 * std::sin(x);
    }
    SpectralField f1_grid = grid.to_field(gf);
    SpectralField expect = u.omega_dphi(lambda, omega_bar);
    expect += cplx(0, 1) * u.dxx();
    expect += cplx(0, eps) * f1_grid;
    SpectralField diff = F.plus;
    diff -= expect;
    CHECK(diff.sobolev_norm(0) < 1e-12);

    CHECK(F.plus.parity_defect(Parity::Z) < 1e-12);
    CHECK(F.real_subspace_defect() < 1e-13);
  }
}

TEST_CASE("linearize") {
  const double lambda = 1.1;
  auto gen = rng(302);

  SUBCASE("eps = 0 gives the diagonal constant-coefficient operator") {
    SpectralField u = random_parity_field(tr, Parity::X, gen, 0.1, 1.0);
    LinearOperator L =
        assemble_linearized(linearize(DoubledField::on_U(u), Nonlinearity(), 0.0),
                            lambda, omega_bar);
    SpectralField h(tr);
    LVec ell = lzero();
    ell[0] = -1;
    h.at(ell, 2) = cplx(0, -0.5);
    h.at(ell, -2) = cplx(0, 0.5);
    DoubledField dh = DoubledField::on_U(h);
    DoubledField out = L.apply(dh);
    SpectralField expect = h;
    expect *= cplx(0, lambda * (-1.0) - 4.0);
    SpectralField diff = out.plus;
    diff -= expect;
    CHECK(diff.sobolev_norm(0) < 1e-13);
  }

  SUBCASE("f = u_xx has a2_raw = 1, everything else zero") {
    Nonlinearity f({forcing_sin_x(tr), uxx_term(tr, unit(tr))});
    SpectralField u = random_parity_field(tr, Parity::X, gen, 0.1, 1.0);
    auto c = linearize(DoubledField::on_U(u), f, 1e-3);
    SpectralField d = c.a_raw[2];
    d -= unit(tr);
    CHECK(d.sobolev_norm(0) < 1e-14);
    CHECK(c.a_raw[0].sobolev_norm(0) == 0.0);
    CHECK(c.a_raw[1].sobolev_norm(0) == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(c.b_raw[i].sobolev_norm(0) == 0.0);
  }

  SUBCASE("f = u u_x matches the symbolic differentiation oracle") {
    Nonlinearity f({forcing_sin_x(tr), Monomial{unit(tr), {1, 0, 1, 0, 0, 0}}});
    SpectralField u = random_parity_field(tr, Parity::X, gen, 0.05, 2.0);
    auto c = linearize(DoubledField::on_U(u), f, 1.0);
    SpectralField d0 = c.a_raw[0];
    d0 -= u.dx().projected(tr);
    CHECK(d0.sobolev_norm(0) < 1e-14);
    SpectralField d1 = c.a_raw[1];
    d1 -= u;
    CHECK(d1.sobolev_norm(0) < 1e-14);
    CHECK(c.a_raw[2].sobolev_norm(0) == 0.0);
  }

  SUBCASE("coefficient parities and reversibility of the assembled operator") {
    SpectralField c2(tr);
    LVec e1 = lzero();
    e1[0] = 1;
    LVec em = lzero();
    em[0] = -1;
    for (const LVec& l : {e1, em})
      for (int k : {1, -1}) c2.at(l, k) = 0.05;
    Nonlinearity f({forcing_sin_x(tr), uxx_term(tr, unit(tr) + c2),
                    Monomial{0.1 * sin_x(tr), {2, 0, 0, 0, 0, 0}},
                    Monomial{0.05 * unit(tr), {1, 0, 1, 0, 0, 0}}});
    REQUIRE(validate_hypothesis(f).ok());
    SpectralField u = random_parity_field(tr, Parity::X, gen, 0.02, 2.0);
    auto c = linearize(DoubledField::on_U(u), f, 1e-2);
    CHECK(c.parity_defect() < 1e-12);
    LinearOperator L = assemble_linearized(c, lambda, omega_bar);
    CHECK(classify_reversibility(L.matrix, 1e-9).is_reversible());
  }
}

TEST_CASE("directional derivative check") {
  const double lambda = 0.8;
  auto gen = rng(303);
  SpectralField u = random_parity_field(tr, Parity::X, gen, 0.02, 2.0);
  SpectralField h = random_parity_field(tr, Parity::X, gen, 1.0, 2.0);
  DoubledField du = DoubledField::on_U(u), dh = DoubledField::on_U(h);

  SUBCASE("eps = 0 defect vanishes (machine rounding of the linear part)") {
    CHECK(directional_derivative_check(du, dh, Nonlinearity(), 0.0, lambda,
                                       omega_bar, 1e-3) < 1e-13);
  }

  SUBCASE("quadratic term is reproduced exactly, cubic gives O(delta^2) slope") {
    // central differences are exact on quadratics
    Nonlinearity fq({forcing_sin_x(tr), Monomial{0.3 * sin_x(tr), {2, 0, 0, 0, 0, 0}}});
    CHECK(directional_derivative_check(du, dh, fq, 0.5, lambda, omega_bar, 1e-3) < 1e-13);
    // the leading finite-difference error comes from the third derivative
    Nonlinearity fc({forcing_sin_x(tr), Monomial{0.3 * cos_x(tr), {3, 0, 0, 0, 0, 0}}});
    const double d1 = directional_derivative_check(du, dh, fc, 0.5, lambda, omega_bar, 1e-2);
    const double d2 = directional_derivative_check(du, dh, fc, 0.5, lambda, omega_bar, 1e-3);
    const double slope = std::log(d1 / d2) / std::log(10.0);
    CHECK(slope > 1.9);
    CHECK(slope < 2.1);
  }

  SUBCASE("generic polynomial f is below 1e-8 at delta = 1e-4") {
    Nonlinearity f({forcing_sin_x(tr), uxx_term(tr, unit(tr)),
                    Monomial{0.2 * sin_x(tr), {2, 0, 0, 0, 0, 0}},
                    Monomial{0.1 * sin_x(tr), {1, 1, 0, 0, 0, 0}},
                    Monomial{0.05 * unit(tr), {1, 0, 1, 0, 0, 0}}});
    const double d = directional_derivative_check(du, dh, f, 0.1, lambda, omega_bar, 1e-4);
    CHECK(d < 1e-8);
  }
}
