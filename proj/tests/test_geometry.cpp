#include "doctest.h"

#include "qcs/geometry.hpp"

#include <cmath>

using namespace qcs;

TEST_CASE("closed-form width bounds") {
  CHECK(width_bound_closed_form(StructureSpec::sparse(128, 5)) ==
        doctest::Approx(10.0 * std::log(25.6) + 7.5).epsilon(1e-12));
  CHECK(width_bound_closed_form(StructureSpec::sparse(128, 5)) ==
        doctest::Approx(39.93).epsilon(1e-3));
  CHECK(width_bound_closed_form(StructureSpec::low_rank(16, 1)) == doctest::Approx(93.0));
  CHECK(width_bound_closed_form(StructureSpec::sparse(64, 64)) ==
        doctest::Approx(1.5 * 64.0).epsilon(1e-12));
  CHECK(width_bound_closed_form(StructureSpec::sparse(64, 0)) == 0.0);
}

TEST_CASE("sparse width bound is increasing in s below n/e") {
  const int n = 256;
  double prev = width_bound_closed_form(StructureSpec::sparse(n, 1));
  for (int s = 2; s <= static_cast<int>(n / std::exp(1.0)); ++s) {
    const double cur = width_bound_closed_form(StructureSpec::sparse(n, s));
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("closed-form eta2 bounds and their validity thresholds") {
  const auto sparse = StructureSpec::sparse(128, 5);
  const double threshold = std::sqrt(2.0 * std::log(25.6));
  CHECK(eta2_bound_closed_form(sparse, threshold) ==
        doctest::Approx((threshold * threshold + 3.0) * 5.0).epsilon(1e-12));
  CHECK(eta2_bound_closed_form(sparse, threshold) == doctest::Approx(47.43).epsilon(1e-3));
  CHECK_THROWS_AS(eta2_bound_closed_form(sparse, threshold - 1e-6), ParameterError);
  CHECK_THROWS_WITH_AS(eta2_bound_closed_form(sparse, 0.1),
                       doctest::Contains("sqrt(2 log(n/s))"), ParameterError);

  const auto lowrank = StructureSpec::low_rank(16, 1);
  CHECK(eta2_bound_closed_form(lowrank, 8.0) == doctest::Approx(128.0).epsilon(1e-12));
  CHECK_THROWS_AS(eta2_bound_closed_form(lowrank, 7.9), ParameterError);
}

TEST_CASE("cone complexity bound") {
  CHECK(cone_gamma_bound(0.0, 0.0) == doctest::Approx(2.0));
  const double omega_f = std::sqrt(width_bound_closed_form(StructureSpec::sparse(256, 5)));
  const double omega_g = std::sqrt(width_bound_closed_form(StructureSpec::sparse(500, 5)));
  CHECK(cone_gamma_bound(omega_f, omega_g) == doctest::Approx(30.33).epsilon(2e-3));
  CHECK(cone_gamma_bound(omega_f + 0.5, omega_g) > cone_gamma_bound(omega_f, omega_g));
  CHECK(cone_gamma_bound(omega_f, omega_g + 0.5) > cone_gamma_bound(omega_f, omega_g));
}

TEST_CASE("subdifferential cone complexity bound") {
  CHECK(c2_gamma_bound(0, 0, 0, 0, 0, 0) == doctest::Approx(2.0));
  CHECK(c2_gamma_bound(1.0, 2.0, 0.3, 0.4, 2.0, 3.0) ==
        doctest::Approx(c2_gamma_bound(2.0, 1.0, 0.4, 0.3, 3.0, 2.0)).epsilon(1e-13));

  // Composed from the closed forms for the published sparse configuration.
  const auto signal = StructureSpec::sparse(256, 5);
  const auto corruption = StructureSpec::sparse(500, 5);
  const auto plan = plan_lambdas(signal, corruption, 500, 0.1, 0.0, 1.0, PlanMode::Fig2);
  const double kl1 = plan.kappa * plan.lambda1;
  const double kl2 = plan.kappa * plan.lambda2;
  const double value = c2_gamma_bound(eta2_bound_closed_form(signal, kl1),
                                      eta2_bound_closed_form(corruption, kl2), kl1, kl2,
                                      std::sqrt(5.0), std::sqrt(5.0));
  CHECK(std::isfinite(value));
  CHECK(value > 2.0);
}

TEST_CASE("fig2-mode c2 bound is invariant to delta, eps, and m") {
  const auto signal = StructureSpec::sparse(256, 5);
  double reference = 0.0;
  for (auto [m, delta, eps] :
       {std::tuple{400, 0.1, 0.0}, {900, 0.05, 0.1}, {1600, 1.0, 0.2}}) {
    const auto corruption = StructureSpec::sparse(m, 5);
    const auto plan = plan_lambdas(signal, corruption, m, delta, eps, 1.0, PlanMode::Fig2);
    const double kl1 = plan.kappa * plan.lambda1;
    CHECK(kl1 == doctest::Approx(2.0 * std::sqrt(std::log(256.0))).epsilon(1e-12));
    const double value = c2_gamma_bound(eta2_bound_closed_form(signal, kl1),
                                        0.0, kl1, 0.0, std::sqrt(5.0), 0.0);
    if (reference == 0.0)
      reference = value;
    else
      CHECK(value == doctest::Approx(reference).epsilon(1e-12));
  }
}

TEST_CASE("gaussian complexity of the l1 ball") {
  const L1Norm l1;
  const auto one_dim = mc_gaussian_complexity_ball(l1, 1, 20000, 51);
  CHECK(std::abs(one_dim.mean - std::sqrt(2.0 / M_PI)) <= 3.0 * one_dim.std_error);

  const auto big = mc_gaussian_complexity_ball(l1, 256, 10000, 52);
  const double reference = std::sqrt(2.0 * std::log(256.0));
  CHECK(big.mean >= 0.85 * reference);
  CHECK(big.mean <= 1.15 * reference);
}

TEST_CASE("gaussian complexity of the nuclear ball") {
  const NuclearNorm nuclear(16);
  const auto est = mc_gaussian_complexity_ball(nuclear, 256, 1000, 53);
  CHECK(std::abs(est.mean - 8.0) <= 0.1 * 8.0);
  CHECK(est.mean <= 2.0 * 4.0 * 1.05);
}

TEST_CASE("eta2 sample formula on a hand case") {
  Vector signs(2), g(2);
  signs << 1.0, 0.0;
  g << 0.3, 0.8;
  CHECK(eta2_l1_sample(g, signs, 0.5) == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("eta2 at lambda 0 reduces to the expected squared norm") {
  Vector signs = Vector::Zero(64);
  signs[3] = 1.0;
  signs[10] = -1.0;
  const auto est = mc_eta2_l1(signs, 0.0, 20000, 54);
  CHECK(std::abs(est.mean - 64.0) <= 4.0 * est.std_error);
}

TEST_CASE("monte carlo eta2 stays below the closed-form bound") {
  const int n = 128, s = 5;
  Vector signs = Vector::Zero(n);
  for (int i = 0; i < s; ++i) signs[i * 7] = (i % 2 == 0) ? 1.0 : -1.0;
  const double lambda = std::sqrt(2.0 * std::log(static_cast<double>(n) / s)) + 0.2;
  const auto est = mc_eta2_l1(signs, lambda, 10000, 55);
  CHECK(est.mean + 3.0 * est.std_error <=
        eta2_bound_closed_form(StructureSpec::sparse(n, s), lambda));
}

TEST_CASE("monte carlo descent-cone width stays below the closed-form bound") {
  for (auto [n, s] : {std::pair{256, 5}, {500, 5}}) {
    Vector signs = Vector::Zero(n);
    for (int i = 0; i < s; ++i) signs[i * 11] = (i % 2 == 0) ? 1.0 : -1.0;
    const auto est = mc_width_l1_descent_cone(signs, 10000, 56);
    const double bound = std::sqrt(width_bound_closed_form(StructureSpec::sparse(n, s)));
    CHECK(est.mean + 3.0 * est.std_error <= bound);
    CHECK(est.mean > 0.5 * bound);  // the bound is not wildly loose
  }
}

TEST_CASE("sphere width in dimension 2") {
  const auto est = mc_sphere_width(2, 10000, 57);
  CHECK(std::abs(est.mean - std::sqrt(M_PI / 2.0)) <= 3.0 * est.std_error);
}

TEST_CASE("theorem error bound shape") {
  CHECK(theorem1_rhs(1.0, 0.0, 0.0, 100, 30.0) == 0.0);
  const double base = theorem1_rhs(1.0, 0.1, 0.0, 400, 30.33);
  CHECK(base == doctest::Approx(0.1517).epsilon(1e-3));
  CHECK(theorem1_rhs(1.0, 0.1, 0.0, 800, 30.33) ==
        doctest::Approx(base / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("width-complexity sandwich") {
  // Symmetric set with witness 0: omega = gamma trivially passes.
  CHECK(sandwich_check(2.5, 2.5, 0.0));
  CHECK_FALSE(sandwich_check(3.0, 0.9, 0.0));          // below (omega+w)/3
  CHECK_FALSE(sandwich_check(1.0, 2.1, 0.0));          // above 2(omega+w)
  CHECK(sandwich_check(1.0, 2.1, 0.0, 0.2));           // slack admits it

  // l1 ball in dimension 32 with witness e1 (omega = gamma for symmetric sets).
  const L1Norm l1;
  const auto gamma = mc_gaussian_complexity_ball(l1, 32, 10000, 58);
  const auto omega = mc_gaussian_complexity_ball(l1, 32, 10000, 59);
  CHECK(sandwich_check(omega.mean, gamma.mean, 1.0,
                       3.0 * (omega.std_error + gamma.std_error)));
}

TEST_CASE("geometry report composes the pieces") {
  const auto signal = StructureSpec::sparse(256, 5);
  const auto corruption = StructureSpec::sparse(500, 5);
  const auto report = make_geometry_report(signal, corruption, 500, 0.1, 0.0, 1.0,
                                           PlanMode::Fig2, 1000, 60);
  CHECK(report.omega_f == doctest::Approx(6.845).epsilon(1e-3));
  CHECK(report.gamma_cone_bound == doctest::Approx(30.33).epsilon(2e-3));
  CHECK(report.eta2_f > 0.0);
  CHECK(report.gamma_c2_bound > 2.0);
  CHECK(report.gamma_unit_ball_f > 0.0);
  CHECK(report.theorem_error_bound ==
        doctest::Approx(0.1 * report.gamma_cone_bound / std::sqrt(500.0)).epsilon(1e-12));
  const auto text = to_text(report);
  CHECK(text.find("gamma_cone_bound") != std::string::npos);
  const auto csv = to_csv(report);
  CHECK(csv.find("omega_f,") == 0);
}
