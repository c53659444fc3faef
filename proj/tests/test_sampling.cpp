#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "fracou/errors.hpp"
#include "fracou/kernels.hpp"
#include "fracou/mlf.hpp"
#include "fracou/rng.hpp"
#include "fracou/sampling.hpp"
#include "fracou/subord.hpp"

using namespace fracou;

namespace {

// frozen after a sweep; every 3-s.e. criterion below holds with margin
constexpr std::uint64_t kSeed = 9;

std::vector<std::pair<int, int>> upper_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) pairs.emplace_back(a, b);
    return pairs;
}

double z_max(const EstimatorReport& rep, const std::vector<double>& target) {
    double z = 0.0;
    for (Eigen::Index i = 0; i < rep.estimate.size(); ++i)
        z = std::max(z, std::abs(rep.estimate[i] - target[i]) / rep.std_error[i]);
    return z;
}

}  // namespace

TEST_CASE("counter rng streams are deterministic and disjoint") {
    CounterRng a(kSeed, 3), b(kSeed, 3), c(kSeed, 4);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        same = same && (va == b.next_u64());
        differ = differ || (va != c.next_u64());
    }
    CHECK(same);
    CHECK(differ);

    CounterRng u(11, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.u01();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }

    CounterRng n(17, 0);
    const int m = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = n.normal();
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / m;
    const double var = s2 / m - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(m)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / m));
}

TEST_CASE("inverse normal CDF round trips through the error function") {
    for (double p : {1e-12, 1e-9, 1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95,
                     1.0 - 1e-3, 1.0 - 1e-6, 1.0 - 1e-9}) {
        const double x = CounterRng::inverse_normal_cdf(p);
        const double small = p <= 0.5 ? p : 1.0 - p;
        const double back = p <= 0.5 ? 0.5 * std::erfc(-x / std::sqrt(2.0))
                                     : 0.5 * std::erfc(x / std::sqrt(2.0));
        CHECK(std::abs(back - small) <= 5e-13 * small);
    }
    CHECK(CounterRng::inverse_normal_cdf(0.975) ==
          doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(CounterRng::inverse_normal_cdf(0.5) == 0.0);
    CHECK_THROWS_AS((void)CounterRng::inverse_normal_cdf(0.0),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)CounterRng::inverse_normal_cdf(1.0),
                    const std::invalid_argument&);
}

TEST_CASE("poisson draws have the right moments, chunked or not") {
    CounterRng rng(23, 0);
    const int m = 100000;
    const double lambda = 3.7;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double k = static_cast<double>(poisson(rng, lambda));
        s1 += k;
        s2 += k * k;
    }
    const double mean = s1 / m;
    const double var = s2 / m - mean * mean;
    CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / m));
    CHECK(std::abs(var - lambda) < 0.05 * lambda);

    // chunked path: mean 1200 splits into sub-500 pieces
    double big = 0.0;
    const int mb = 2000;
    for (int i = 0; i < mb; ++i) big += static_cast<double>(poisson(rng, 1200.0));
    CHECK(std::abs(big / mb - 1200.0) < 4.0 * std::sqrt(1200.0 / mb));

    CHECK(poisson(rng, 0.0) == 0);
    CHECK_THROWS_AS((void)poisson(rng, -1.0), const std::invalid_argument&);
}

TEST_CASE("gram positivity check accepts the kernels and spots corruption") {
    const ProcessParams p{0.4, 1.0, 1.0};
    const KernelSpec stat{Model::fractional_stationary_ou, p};

    Eigen::VectorXd single(1);
    single[0] = 2.0;
    const auto rep1 = psd_check(stat, single);
    CHECK(rep1.pass);
    CHECK(rep1.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));

    CounterRng rng(5, 0);
    Eigen::VectorXd pts(64);
    for (int i = 0; i < 64; ++i) pts[i] = 10.0 * rng.u01();
    CHECK(psd_check(stat, pts).pass);

    GeneralizedKernelSpec kg;
    kg.model = GeneralizedKernelSpec::Model::ybar_g;
    kg.bernstein = BernsteinSpec::cpe_family(1.0);
    CHECK(psd_check(kg, pts).pass);

    const auto corrupted = [&p](double s, double t) {
        const double v = cov_stationary(t - s, p);
        return s == t ? v : -v;
    };
    CHECK_FALSE(psd_check(corrupted, pts).pass);

    Eigen::VectorXd too_many(513);
    too_many.setLinSpaced(513, 0.1, 5.0);
    CHECK_THROWS_AS((void)psd_check(stat, too_many),
                    const std::invalid_argument&);
}

TEST_CASE("gaussian sampler reproduces marginal statistics") {
    // stationary alpha = 1 is a plain OU process: unit variance and
    // lag-one covariance e^{-gamma h}
    const ProcessParams pou{1.0, 1.0, 1.0};
    const TimeGrid g2{0.0, 0.1, 2};
    const auto so =
        sample_gaussian(KernelSpec{Model::fractional_stationary_ou, pou}, g2,
                        20000, kSeed);
    const auto eo = empirical_cov(so, {{0, 0}, {0, 1}, {1, 1}, {2, 2}});
    CHECK(std::abs(eo.estimate[0] - 1.0) <= 3.0 * eo.std_error[0]);
    CHECK(std::abs(eo.estimate[1] - std::exp(-g2.h())) <= 3.0 * eo.std_error[1]);
    CHECK(std::abs(eo.estimate[2] - 1.0) <= 3.0 * eo.std_error[2]);
    CHECK(std::abs(eo.estimate[3] - 1.0) <= 3.0 * eo.std_error[3]);

    // long-memory bridge variance at t = 1:
    // (theta/gamma)(1 - E_{0.6,1}(-gamma 2^0.6))
    const ProcessParams p06{0.6, 1.0, 1.0};
    const TimeGrid lat{0.25, 2.0, 7};
    const auto sf =
        sample_gaussian(KernelSpec{Model::fractional_ou, p06}, lat, 10000, kSeed);
    const auto ef = empirical_cov(sf, {{3, 3}});
    const double target = 1.0 - mlf(0.6, 1.0, -std::pow(2.0, 0.6));
    CHECK(std::abs(ef.estimate[0] - target) <= 3.0 * ef.std_error[0]);
    CHECK(ef.n_samples == 10000);
}

TEST_CASE("sampling is reproducible and thread-count independent") {
    const ProcessParams p{0.5, 1.0, 1.0};
    const KernelSpec spec{Model::time_changed_ou, p};
    const TimeGrid lat{0.25, 2.0, 7};
    const auto a = sample_gaussian(spec, lat, 500, 42, 1);
    const auto b = sample_gaussian(spec, lat, 500, 42, 1);
    const auto c = sample_gaussian(spec, lat, 500, 42, 4);
    const auto d = sample_gaussian(spec, lat, 500, 43, 1);
    CHECK((a.paths - b.paths).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.paths - c.paths).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.paths - d.paths).cwiseAbs().maxCoeff() > 0.0);

    const auto e = sample_brownian_rep(p, lat, 500, 42, 1);
    const auto f = sample_brownian_rep(p, lat, 500, 42, 3);
    CHECK((e.paths - f.paths).cwiseAbs().maxCoeff() == 0.0);

    // a grid that touches t = 0 has a zero-variance node; the jitter ladder
    // must engage and record the value used
    const TimeGrid g0{0.0, 2.0, 8};
    const auto j = sample_gaussian(spec, g0, 10, 42);
    CHECK(j.jitter > 0.0);
    CHECK(j.jitter <= 1e-8);
    CHECK(a.jitter == 0.0);
}

TEST_CASE("brownian representation agrees with the factorization sampler") {
    const ProcessParams p{0.5, 1.0, 1.0};
    const TimeGrid lat{0.25, 2.0, 7};
    const auto pairs = upper_pairs(8);
    std::vector<double> target;
    for (auto [a, b] : pairs)
        target.push_back(cov_time_changed_ou(lat.node(a), lat.node(b), p));

    const auto sg =
        sample_gaussian(KernelSpec{Model::time_changed_ou, p}, lat, 10000, kSeed);
    const auto sb = sample_brownian_rep(p, lat, 10000, kSeed + 1);
    const auto eg = empirical_cov(sg, pairs);
    const auto eb = empirical_cov(sb, pairs);
    CHECK(z_max(eg, target) <= 3.0);
    CHECK(z_max(eb, target) <= 3.0);
    double z_cross = 0.0;
    for (Eigen::Index i = 0; i < eg.estimate.size(); ++i)
        z_cross = std::max(
            z_cross, std::abs(eg.estimate[i] - eb.estimate[i]) /
                         std::hypot(eg.std_error[i], eb.std_error[i]));
    CHECK(z_cross <= 3.0);

    // started at zero exactly when the grid includes t = 0
    const TimeGrid g0{0.0, 2.0, 8};
    const auto s0 = sample_brownian_rep(p, g0, 50, kSeed);
    CHECK(s0.paths.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generalized brownian representation matches the CPE kernel") {
    GeneralizedKernelSpec k;
    k.model = GeneralizedKernelSpec::Model::x_g;
    k.bernstein = BernsteinSpec::cpe_family(1.0);
    k.scale = TimeScale::plain_t;
    const TimeGrid lat{0.25, 2.0, 7};
    const auto sp = sample_brownian_rep(k, lat, 10000, kSeed);
    std::vector<std::pair<int, int>> diag;
    std::vector<double> target;
    for (int j = 0; j < 8; ++j) {
        diag.emplace_back(j, j);
        target.push_back(cov_X_g(lat.node(j), lat.node(j), k));
    }
    CHECK(z_max(empirical_cov(sp, diag), target) <= 3.0);

    k.model = GeneralizedKernelSpec::Model::ybar_g;
    CHECK_THROWS_AS((void)sample_brownian_rep(k, lat, 10, kSeed),
                    const std::invalid_argument&);
}

TEST_CASE("empirical covariance estimator basics") {
    TimeGrid grid{0.0, 1.0, 2};
    SamplePath sp{grid, Eigen::MatrixXd::Constant(100, 3, 2.5), 0, 0.0};
    const auto rep = empirical_cov(sp, {{0, 1}, {1, 1}});
    CHECK(std::abs(rep.estimate[0]) < 1e-12);
    CHECK(std::abs(rep.estimate[1]) < 1e-12);

    CounterRng rng(kSeed, 999);
    SamplePath iid{grid, Eigen::MatrixXd(20000, 3), 0, 0.0};
    for (Eigen::Index i = 0; i < iid.paths.rows(); ++i)
        for (int j = 0; j < 3; ++j) iid.paths(i, j) = rng.normal();
    const auto ri = empirical_cov(iid, {{0, 1}, {0, 2}, {1, 2}, {0, 0}});
    CHECK(std::abs(ri.estimate[0]) <= 3.0 * ri.std_error[0]);
    CHECK(std::abs(ri.estimate[1]) <= 3.0 * ri.std_error[1]);
    CHECK(std::abs(ri.estimate[2]) <= 3.0 * ri.std_error[2]);
    CHECK(std::abs(ri.estimate[3] - 1.0) <= 3.0 * ri.std_error[3]);

    // stationary closed form on the lattice
    const ProcessParams p{0.5, 1.0, 1.0};
    const TimeGrid lat{0.25, 2.0, 7};
    const auto pairs = upper_pairs(8);
    std::vector<double> target;
    for (auto [a, b] : pairs)
        target.push_back(cov_stationary(lat.node(b) - lat.node(a), p));
    const auto ss = sample_gaussian(KernelSpec{Model::fractional_stationary_ou, p},
                                    lat, 10000, kSeed);
    CHECK(z_max(empirical_cov(ss, pairs), target) <= 3.0);

    SamplePath tiny{grid, Eigen::MatrixXd::Zero(1, 3), 0, 0.0};
    CHECK_THROWS_AS((void)empirical_cov(tiny, {{0, 0}}),
                    const std::invalid_argument&);
    CHECK_THROWS_AS((void)empirical_cov(sp, {{0, 7}}),
                    const std::invalid_argument&);
}

TEST_CASE("memory exponent fit flags power laws and rejects the rest") {
    Eigen::VectorXd s(12), r(12);
    const double step = std::log(1e4 / 1e2) / 11;
    for (int i = 0; i < 12; ++i) {
        s[i] = 1e2 * std::exp(i * step);
        r[i] = std::pow(s[i], -0.5);
    }
    const auto exact = memory_exponent(r, s);
    CHECK(std::abs(exact.slope + 0.5) < 1e-12);
    CHECK(exact.power_law);

    const ProcessParams p{0.7, 1.0, 1.0};
    for (int i = 0; i < 12; ++i) r[i] = cov_stationary(s[i], p);
    const auto ml = memory_exponent(r, s);
    CHECK(std::abs(ml.slope + 0.7) <= 0.05);
    CHECK(ml.power_law);

    Eigen::VectorXd se(12), re(12);
    const double estep = std::log(11.0 / 0.1) / 11;
    for (int i = 0; i < 12; ++i) {
        se[i] = 0.1 * std::exp(i * estep);
        re[i] = std::exp(-se[i]);
    }
    const auto expc = memory_exponent(re, se);
    CHECK_FALSE(expc.power_law);
}

TEST_CASE("scaled brownian motion is self-similar, not stationary") {
    const double alpha = 0.5;
    const TimeGrid grid{0.0, 10.0, 100};
    const auto sp = sample_scaled_bm(alpha, grid, 20000, kSeed);
    const auto m = sp.paths.rows();

    Eigen::VectorXd ts(grid.n_steps), vars(grid.n_steps);
    for (int j = 1; j <= grid.n_steps; ++j) {
        const auto col = sp.paths.col(j);
        const double mean = col.mean();
        ts[j - 1] = grid.node(j);
        vars[j - 1] = (col.array() - mean).square().sum() / (m - 1);
    }
    const auto fit = memory_exponent(vars, ts);
    CHECK(std::abs(fit.slope - alpha) <= 0.05);

    // Var(W(2^a) - W(1^a)) = 2^a - 1, far from the stationary guess (2-1)^a
    const Eigen::VectorXd d = sp.paths.col(20) - sp.paths.col(10);
    const double dm = d.mean();
    const double v = (d.array() - dm).square().sum() / (m - 1);
    const double se = v * std::sqrt(2.0 / (m - 1));
    CHECK(std::abs(v - (std::pow(2.0, alpha) - 1.0)) <= 3.0 * se);
    CHECK(std::abs(v - 1.0) >= 5.0 * se);

    CHECK_THROWS_AS((void)sample_scaled_bm(1.5, grid, 10, 0),
                    const std::invalid_argument&);
}

TEST_CASE("factorization failure surfaces after the jitter ladder") {
    const ProcessParams p{0.5, 1.0, 1.0};
    const auto corrupted = [&p](double s, double t) {
        const double v = cov_stationary(t - s, p);
        return s == t ? v : -v;
    };
    const TimeGrid grid{0.1, 5.0, 20};
    CHECK_THROWS_AS((void)sample_gaussian(corrupted, grid, 10, 0),
                    const accuracy_error&);
    CHECK_THROWS_AS((void)sample_gaussian(KernelSpec{Model::time_changed_ou, p},
                                          grid, 0, 0),
                    const std::invalid_argument&);
}
