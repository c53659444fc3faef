#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "fracou/errors.hpp"
#include "fracou/fracops.hpp"
#include "fracou/kernels.hpp"
#include "fracou/mlf.hpp"
#include "fracou/subord.hpp"
#include "oracles.hpp"

using namespace fracou;

namespace {

Eigen::VectorXd geomspace(double lo, double hi, int n) {
    Eigen::VectorXd v(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[i] = lo * std::exp(i * step);
    return v;
}

double ltilde_cpe_ref(double gamma, double t, double a) {
    return std::exp(-a * t * gamma / (gamma + 1.0)) / (gamma + 1.0);
}

GeneralizedKernelSpec make_spec(GeneralizedKernelSpec::Model m, BernsteinSpec b,
                                double gamma, double theta, TimeScale scale) {
    GeneralizedKernelSpec k;
    k.model = m;
    k.bernstein = b;
    k.gamma = gamma;
    k.theta = theta;
    k.scale = scale;
    return k;
}

}  // namespace

TEST_CASE("ltilde closed forms and pinned values") {
    const auto half = BernsteinSpec::stable_family(0.5);
    CHECK(ltilde(1.0, 1.0, half) ==
          doctest::Approx(0.42758357615580700441).epsilon(1e-14));
    CHECK(ltilde(1.0, 0.0, half) == 1.0);

    const auto one = BernsteinSpec::stable_family(1.0);
    for (double gamma : {0.4, 1.0, 2.3})
        for (double t : {0.0, 0.5, 1.0, 4.0})
            CHECK(ltilde(gamma, t, one) ==
                  doctest::Approx(std::exp(-gamma * t)).epsilon(1e-14));

    const auto cpe = BernsteinSpec::cpe_family(1.0);
    CHECK(ltilde(1.0, 0.0, cpe) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ltilde(1.0, 1.0, cpe) ==
          doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-15));
    CHECK(ltilde(2.0, 3.0, BernsteinSpec::cpe_family(0.7)) ==
          doctest::Approx(ltilde_cpe_ref(2.0, 3.0, 0.7)).epsilon(1e-15));
}

TEST_CASE("ltilde lies in (0,1] and decreases in t") {
    const auto grid = geomspace(0.2, 20.0, 12);
    const auto check_monotone = [&](const BernsteinSpec& spec, double gamma) {
        double prev = ltilde(gamma, 0.0, spec);
        CHECK(prev <= 1.0);
        for (int i = 0; i < grid.size(); ++i) {
            const double v = ltilde(gamma, grid[i], spec);
            CHECK(v > 0.0);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    };
    check_monotone(BernsteinSpec::stable_family(0.6), 1.0);
    check_monotone(BernsteinSpec::cpe_family(1.3), 0.8);
    check_monotone(BernsteinSpec::custom_family([](std::complex<double> s) {
                       return std::sqrt(s);
                   }),
                   1.5);
}

TEST_CASE("Laplace inversion reproduces the closed-form families") {
    const auto t_pts = geomspace(0.1, 10.0, 25);
    for (double alpha : {0.4, 0.5, 0.7}) {
        const auto custom =
            BernsteinSpec::custom_family([alpha](std::complex<double> s) {
                return std::pow(s, alpha);
            });
        for (int i = 0; i < t_pts.size(); ++i) {
            const double ref =
                mlf(alpha, 1.0, -std::pow(t_pts[i], alpha));
            CHECK(std::abs(ltilde(1.0, t_pts[i], custom) - ref) <= 1e-8);
        }
    }
    const double a = 1.0;
    const auto custom_cpe =
        BernsteinSpec::custom_family([a](std::complex<double> s) {
            return s / (s + a);
        });
    for (int i = 0; i < t_pts.size(); ++i) {
        CHECK(std::abs(ltilde(1.0, t_pts[i], custom_cpe) -
                       ltilde_cpe_ref(1.0, t_pts[i], a)) <= 1e-8);
        CHECK(std::abs(ltilde(2.5, t_pts[i], custom_cpe) -
                       ltilde_cpe_ref(2.5, t_pts[i], a)) <= 1e-8);
    }
}

TEST_CASE("Laplace inversion rejects a symbol it cannot resolve") {
    // not a Bernstein function; the transform pair has singularities the
    // contour cannot separate, so the node-doubling estimate must blow up
    const auto bad = BernsteinSpec::custom_family([](std::complex<double> s) {
        return std::exp(-s);
    });
    CHECK_THROWS_AS((void)ltilde(1.0, 1.0, bad), const accuracy_error&);
}

TEST_CASE("inverse subordinator density, closed form and Laplace check") {
    const double a = 1.0;
    CHECK(inverse_subordinator_density_cpe(0.0, 2.0, a) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(inverse_subordinator_density_cpe(1.3, 0.0, a) ==
          doctest::Approx(std::exp(-1.3)).epsilon(1e-14));
    for (double x : {0.0, 0.2, 1.0, 4.0, 9.0})
        for (double t : {0.0, 0.5, 2.0})
            CHECK(inverse_subordinator_density_cpe(x, t, a) >= 0.0);

    // integrating e^{-gamma x} against the density recovers ltilde
    const double gamma = 1.0, t = 1.0;
    const double num = oracles::integrate(
        [&](double x) {
            return std::exp(-gamma * x) *
                   inverse_subordinator_density_cpe(x, t, a);
        },
        0.0, 80.0);
    CHECK(num == doctest::Approx(ltilde_cpe_ref(gamma, t, a)).epsilon(1e-6));
}

TEST_CASE("time change closed forms and the stable reconciliation") {
    const auto cpe = BernsteinSpec::cpe_family(1.0);
    CHECK(time_change_g(0.0, 1.0, cpe) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    for (double t : {0.0, 1.0, 2.0, 5.0})
        CHECK(time_change_g(t, 1.0, cpe) ==
              doctest::Approx(t / 4.0 + 0.5 * std::log(2.0)).epsilon(1e-13));
    // general (a, gamma): a t / (2 (gamma+1)) + log(gamma+1) / (2 gamma)
    const auto cpe2 = BernsteinSpec::cpe_family(2.0);
    CHECK(time_change_g(1.5, 0.6, cpe2) ==
          doctest::Approx(2.0 * 1.5 / (2.0 * 1.6) +
                          std::log(1.6) / 1.2).epsilon(1e-13));

    const auto one = BernsteinSpec::stable_family(1.0);
    for (double t : {0.0, 0.7, 3.0})
        CHECK(time_change_g(t, 1.3, one) ==
              doctest::Approx(t / 2.0).epsilon(1e-12));

    // the alpha-stable clock agrees with the doubled-time closed form
    const auto st = BernsteinSpec::stable_family(0.6);
    ProcessParams p{0.6, 0.9, 1.0};
    for (double t : {0.4, 1.0, 3.0})
        CHECK(time_change_g(t, 0.9, st) ==
              doctest::Approx(time_change_alpha(t / 2.0, p)).epsilon(1e-14));

    // non-decreasing in t
    const auto grid = geomspace(0.1, 30.0, 14);
    double prev = time_change_g(0.0, 1.0, cpe);
    for (int i = 0; i < grid.size(); ++i) {
        const double v = time_change_g(grid[i], 1.0, cpe);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("generalized started-at-0 covariance reduces to the stable kernel") {
    const ProcessParams p{0.55, 1.3, 0.7};
    const auto st = BernsteinSpec::stable_family(0.55);
    const auto k2 = make_spec(GeneralizedKernelSpec::Model::x_g, st, 1.3, 0.7,
                              TimeScale::two_t);
    const auto k1 = make_spec(GeneralizedKernelSpec::Model::x_g, st, 1.3, 0.7,
                              TimeScale::plain_t);
    const double pts[] = {0.0, 0.3, 0.8, 1.7, 3.1};
    for (double s : pts)
        for (double t : pts) {
            const double ref = cov_time_changed_ou(s, t, p);
            if (ref == 0.0) {
                CHECK(cov_X_g(s, t, k2) == 0.0);
            } else {
                CHECK(cov_X_g(s, t, k2) == doctest::Approx(ref).epsilon(1e-13));
            }
            // plain-time variant is the doubled-time kernel at half the times
            const double ref_half = cov_time_changed_ou(s / 2.0, t / 2.0, p);
            if (ref_half == 0.0) {
                CHECK(cov_X_g(s, t, k1) == 0.0);
            } else {
                CHECK(cov_X_g(s, t, k1) ==
                      doctest::Approx(ref_half).epsilon(1e-13));
            }
        }
    CHECK(cov_X_g(1.0, 2.0, k2) == cov_X_g(2.0, 1.0, k2));
}

TEST_CASE("generalized covariances for the compound Poisson clock") {
    const auto cpe = BernsteinSpec::cpe_family(1.0);
    const auto k = make_spec(GeneralizedKernelSpec::Model::x_g, cpe, 1.0, 1.0,
                             TimeScale::plain_t);

    // explicit value at (1, 2) from ltilde(t) = e^{-t/2} / 2
    const double l1 = 0.5 * std::exp(-0.5);
    const double l2 = 0.5 * std::exp(-1.0);
    CHECK(cov_X_g(1.0, 2.0, k) ==
          doctest::Approx(std::sqrt(l2 / l1) * (1.0 - l1)).epsilon(1e-14));

    // the clock starts with an atom, so the variance at 0+ does not vanish
    CHECK(cov_X_g(0.0, 0.0, k) == doctest::Approx(0.5).epsilon(1e-14));
    const auto k_st = make_spec(GeneralizedKernelSpec::Model::x_g,
                                BernsteinSpec::stable_family(0.5), 1.0, 1.0,
                                TimeScale::plain_t);
    CHECK(cov_X_g(0.0, 0.0, k_st) == 0.0);

    // doubled-time convention pushes the clock arguments, nothing else
    const auto k2 = make_spec(GeneralizedKernelSpec::Model::x_g, cpe, 1.0, 1.0,
                              TimeScale::two_t);
    CHECK(cov_X_g(1.0, 2.0, k2) ==
          doctest::Approx(cov_X_g(2.0, 4.0, k)).epsilon(1e-15));

    // stationary kernel: (theta/gamma) e^{-a gamma |s| / (gamma+1)} / (gamma+1)
    const auto kbar =
        make_spec(GeneralizedKernelSpec::Model::ybar_g,
                  BernsteinSpec::cpe_family(2.0), 1.2, 0.8, TimeScale::two_t);
    const double r_ref =
        (0.8 / 1.2) * std::exp(-2.0 * 1.2 * 1.7 / 2.2) / 2.2;
    CHECK(cov_Ybar_g(1.7, kbar) == doctest::Approx(r_ref).epsilon(1e-14));
    CHECK(cov_Ybar_g(-1.7, kbar) == cov_Ybar_g(1.7, kbar));
    CHECK(cov_Ybar_g(0.0, k) == doctest::Approx(0.5).epsilon(1e-15));

    // bridge-type kernel vanishes at the origin but not the lag term alone
    const auto ky = make_spec(GeneralizedKernelSpec::Model::y_g, cpe, 1.0, 1.0,
                              TimeScale::plain_t);
    CHECK(std::abs(cov_Y_g(0.0, 0.0, ky)) < 1e-15);
    CHECK(cov_Y_g(0.0, 3.0, ky) < 0.0);  // sqrt(l(0) l(3)) exceeds l(3)
}

TEST_CASE("stationary and bridged kernels reduce to the stable closed forms") {
    const ProcessParams p{0.7, 0.9, 1.4};
    const auto st = BernsteinSpec::stable_family(0.7);
    for (TimeScale sc : {TimeScale::two_t, TimeScale::plain_t}) {
        const auto k = make_spec(GeneralizedKernelSpec::Model::ybar_g, st, 0.9,
                                 1.4, sc);
        for (double s : {-2.4, -0.7, 0.0, 0.9, 3.3})
            CHECK(cov_Ybar_g(s, k) ==
                  doctest::Approx(cov_stationary(s, p)).epsilon(1e-14));
    }

    const ProcessParams p2{0.6, 1.1, 0.9};
    const auto k2 = make_spec(GeneralizedKernelSpec::Model::y_g,
                              BernsteinSpec::stable_family(0.6), 1.1, 0.9,
                              TimeScale::two_t);
    const double pts[] = {0.0, 0.4, 1.1, 2.6};
    for (double s : pts)
        for (double t : pts) {
            const double ref = cov_fractional_ou(s, t, p2);
            if (std::abs(ref) < 1e-15) {
                CHECK(std::abs(cov_Y_g(s, t, k2)) < 1e-14);
            } else {
                CHECK(cov_Y_g(s, t, k2) ==
                      doctest::Approx(ref).epsilon(1e-12));
            }
        }
}

TEST_CASE("renewal density pairs with the clock transform") {
    // d/dt ltilde(gamma, t) = -gamma h(t) with
    // h(t) = a e^{-a gamma t/(gamma+1)} / (gamma+1)^2 for the CPE family
    const double a = 1.5, gamma = 0.8;
    const auto cpe = BernsteinSpec::cpe_family(a);
    const double h_fd = 1e-6;
    for (double t : {0.3, 1.0, 2.0}) {
        const double deriv = (ltilde(gamma, t + h_fd, cpe) -
                              ltilde(gamma, t - h_fd, cpe)) /
                             (2.0 * h_fd);
        const double h_cpe = a / ((gamma + 1.0) * (gamma + 1.0)) *
                             std::exp(-a * gamma * t / (gamma + 1.0));
        CHECK(deriv == doctest::Approx(-gamma * h_cpe).epsilon(1e-6));
        // pairing the same-order derivatives instead fails by sign alone
        const double same_order = -gamma * (-a * gamma / (gamma + 1.0)) * h_cpe;
        CHECK(deriv * same_order < 0.0);
    }
}

TEST_CASE("relaxation equation for the clock transform on a grid") {
    // D^g ltilde = -gamma ltilde + (gamma/(gamma+1)) e^{-a t}; dropping the
    // inhomogeneous term (the clock's age-zero atom) leaves an O(1) residual
    const double a = 1.0, gamma = 1.0;
    TimeGrid grid{0.0, 2.0, 512};
    GridFunction lt{grid, Eigen::VectorXd(grid.n_steps + 1)};
    for (int i = 0; i <= grid.n_steps; ++i)
        lt.values[i] = ltilde_cpe_ref(gamma, grid.node(i), a);
    const GridFunction d = convolution_derivative(lt, exponential_tail(a));

    double res_full = 0.0, res_printed = 0.0;
    for (int i = 0; i <= grid.n_steps; ++i) {
        const double nu = std::exp(-a * grid.node(i));
        const double full =
            d.values[i] + gamma * lt.values[i] - gamma / (gamma + 1.0) * nu;
        const double printed = d.values[i] + gamma * lt.values[i];
        res_full = std::max(res_full, std::abs(full));
        res_printed = std::max(res_printed, std::abs(printed));
    }
    CHECK(res_full <= 1e-4);
    CHECK(res_printed >= 0.1);
}

TEST_CASE("generalized Fokker-Planck residual on a grid") {
    // char function u(xi,t) = exp(-(theta xi^2 / 2 gamma)(1 - ltilde)) solves
    // L^g u = -(gamma/2) xi du/dxi - (theta/2) xi^2 u + defect, where the
    // defect carries the clock's age-zero atom
    const double a = 1.0, gamma = 1.0, theta = 1.0;
    TimeGrid grid{0.0, 2.0, 256};
    const double lt0 = 1.0 / (gamma + 1.0);
    for (double xi : {0.5, 1.0, 2.0}) {
        GridFunction u{grid, Eigen::VectorXd(grid.n_steps + 1)};
        Eigen::VectorXd om(grid.n_steps + 1);
        for (int i = 0; i <= grid.n_steps; ++i) {
            const double t = grid.node(i);
            const double z = a * t * gamma / (gamma + 1.0);
            om[i] = (gamma - std::expm1(-z)) / (gamma + 1.0);
            u.values[i] =
                std::exp(-(theta * xi * xi / (2.0 * gamma)) * om[i]);
        }
        const GridFunction Lu = log_operator_g(u, exponential_tail(a));
        double worst = 0.0;
        for (int i = 1; i <= grid.n_steps; ++i) {
            const double nu = std::exp(-a * grid.node(i));
            const double dudxi = u.values[i] * (-theta * xi / gamma) * om[i];
            const double defect = (theta * xi * xi / (2.0 * gamma)) *
                                  (1.0 - lt0) * nu * u.values[i];
            const double res = Lu.values[i] + (gamma / 2.0) * xi * dudxi +
                               (theta / 2.0) * xi * xi * u.values[i] - defect;
            worst = std::max(worst, std::abs(res));
        }
        CHECK(worst <= 1e-5);
    }

    // stable clock variant: no atom at zero, so no defect term
    const double alpha = 0.6;
    GridFunction u{grid, Eigen::VectorXd(grid.n_steps + 1)};
    Eigen::VectorXd om(grid.n_steps + 1);
    const double xi = 1.0;
    for (int i = 0; i <= grid.n_steps; ++i) {
        om[i] = one_minus_ml(alpha, std::pow(grid.node(i), alpha));
        u.values[i] = std::exp(-(xi * xi / 2.0) * om[i]);
    }
    const GridFunction Lu = log_operator_g(u, stable_tail(alpha));
    double worst = 0.0;
    for (int i = 1; i <= grid.n_steps; ++i) {
        if (grid.node(i) < 1.0) continue;
        const double dudxi = u.values[i] * (-xi) * om[i];
        const double res = Lu.values[i] + 0.5 * xi * dudxi +
                           0.5 * xi * xi * u.values[i];
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("stationary tail classifies long memory") {
    const auto st = make_spec(GeneralizedKernelSpec::Model::ybar_g,
                              BernsteinSpec::stable_family(0.5), 1.0, 1.0,
                              TimeScale::two_t);
    const FitReport fit = lrd_tail_check(st, geomspace(1e2, 1e4, 12));
    CHECK(fit.power_law);
    CHECK(std::abs(fit.slope + 0.5) <= 0.05);

    // exponential tail: positive everywhere but no power law
    const auto cpe = make_spec(GeneralizedKernelSpec::Model::ybar_g,
                               BernsteinSpec::cpe_family(1.0), 1.0, 1.0,
                               TimeScale::two_t);
    const FitReport fit2 = lrd_tail_check(cpe, geomspace(0.5, 50.0, 12));
    CHECK_FALSE(fit2.power_law);

    // the spectral exponent tells the same story at alpha = 1/2, where the
    // low-frequency slope alpha-1 coincides with the lag slope -alpha
    const ProcessParams p{0.5, 1.0, 1.0};
    const auto omegas = geomspace(1e-4, 1e-2, 10);
    Eigen::VectorXd sd(omegas.size());
    for (int i = 0; i < omegas.size(); ++i)
        sd[i] = spectral_density(omegas[i], p);
    const FitReport fit3 = loglog_fit(omegas, sd);
    CHECK(std::abs(fit3.slope - fit.slope) <= 0.12);

    CHECK_THROWS_AS((void)lrd_tail_check(st, geomspace(1.0, 50.0, 12)),
                    const std::invalid_argument&);
}

TEST_CASE("precondition violations throw") {
    const auto cpe = BernsteinSpec::cpe_family(1.0);
    CHECK_THROWS_AS((void)ltilde(0.0, 1.0, cpe), const std::invalid_argument&);
    CHECK_THROWS_AS((void)ltilde(-1.0, 1.0, cpe), const std::invalid_argument&);
    CHECK_THROWS_AS((void)ltilde(1.0, -0.5, cpe), const std::invalid_argument&);
    CHECK_THROWS_AS((void)BernsteinSpec::stable_family(0.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)BernsteinSpec::stable_family(1.2),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)BernsteinSpec::cpe_family(-1.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)BernsteinSpec::custom_family(nullptr),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)inverse_subordinator_density_cpe(-0.1, 1.0, 1.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)inverse_subordinator_density_cpe(0.1, -1.0, 1.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)inverse_subordinator_density_cpe(0.1, 1.0, 0.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)time_change_g(-1.0, 1.0, cpe),
                    const std::invalid_argument&);

    auto k = make_spec(GeneralizedKernelSpec::Model::x_g, cpe, 1.0, 1.0,
                       TimeScale::two_t);
    CHECK_THROWS_AS((void)cov_X_g(-1.0, 1.0, k), const std::invalid_argument&);
    CHECK_THROWS_AS((void)cov_Y_g(1.0, -1.0, k), const std::invalid_argument&);
    k.gamma = -2.0;
    CHECK_THROWS_AS((void)cov_Ybar_g(1.0, k), const std::invalid_argument&);
    k.gamma = 1.0;
    k.theta = 0.0;
    CHECK_THROWS_AS((void)cov_X_g(1.0, 1.0, k), const std::invalid_argument&);
}
