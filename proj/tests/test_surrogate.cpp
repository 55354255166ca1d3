#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "botune/errors.hpp"
#include "botune/rng.hpp"
#include "botune/surrogate.hpp"

using namespace botune;

namespace {

// Independent Matern 5/2 evaluation, written against the closed form.
double matern_oracle(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& ls, double sv) {
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]) / (ls[i] * ls[i]);
    const double r = std::sqrt(acc);
    const double s5r = std::sqrt(5.0) * r;
    return sv * (1.0 + s5r + 5.0 * r * r / 3.0) * std::exp(-s5r);
}

// Dense-solve GP posterior via an explicit matrix inverse; shares nothing
// with the library's Cholesky path.
Posterior posterior_oracle(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                           const Eigen::VectorXd& ls, double sv, double nv,
                           const Eigen::VectorXd& q) {
    const int n = static_cast<int>(xs.rows());
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = matern_oracle(xs.row(i), xs.row(j), ls, sv);
    k.diagonal().array() += nv;
    const Eigen::MatrixXd kinv = k.inverse();
    Eigen::VectorXd kstar(n);
    for (int i = 0; i < n; ++i) kstar[i] = matern_oracle(xs.row(i), q, ls, sv);
    const double mean_y = ys.mean();
    Posterior p;
    p.mean = mean_y + kstar.dot(kinv * (ys.array() - mean_y).matrix());
    p.variance = sv - kstar.dot(kinv * kstar);
    return p;
}

GpModel model_with(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                   const Eigen::VectorXd& ls, double sv, double nv) {
    // fixed hyperparameters: fit machinery bypassed via tight bounds
    FitOptions opt;
    opt.restarts = 1;
    opt.max_steps = 1;
    opt.bounds.lengthscale_lo = opt.bounds.lengthscale_hi = ls[0];
    opt.bounds.signal_lo = opt.bounds.signal_hi = sv;
    opt.bounds.noise_lo = opt.bounds.noise_hi = nv;
    return fit(xs, ys, opt);
}

}  // namespace

TEST_CASE("matern kernel basics") {
    Eigen::VectorXd ls = Eigen::VectorXd::Constant(3, 0.7);
    Eigen::VectorXd x(3), y(3);
    x << 0.1, 0.2, 0.3;
    y = x;
    CHECK(matern52(x, y, ls, 2.5) == doctest::Approx(2.5));
    // monotone decay toward zero with distance
    double prev = matern52(x, y, ls, 1.0);
    for (double step = 0.5; step < 20.0; step += 0.5) {
        Eigen::VectorXd far = x.array() + step;
        const double v = matern52(x, far, ls, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-10);
    CHECK_THROWS_AS(matern52(x, y, ls, -1.0), ParameterError);
    Eigen::VectorXd bad_ls = ls;
    bad_ls[1] = 0.0;
    CHECK_THROWS_AS(matern52(x, y, bad_ls, 1.0), ParameterError);
    CHECK_THROWS_AS(matern52(x, Eigen::VectorXd::Zero(2), ls, 1.0), DimensionError);
}

TEST_CASE("matern matches the independent closed form") {
    Rng rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        Rng t = rng.fork(trial);
        Eigen::VectorXd x(3), y(3), ls(3);
        for (int i = 0; i < 3; ++i) {
            x[i] = t.uniform(-3.0, 3.0);
            y[i] = t.uniform(-3.0, 3.0);
            ls[i] = t.uniform(0.05, 4.0);
        }
        const double sv = t.uniform(0.1, 5.0);
        CHECK(matern52(x, y, ls, sv) ==
              doctest::Approx(matern_oracle(x, y, ls, sv)).epsilon(1e-12));
        CHECK(matern52(x, y, ls, sv) == matern52(y, x, ls, sv));  // symmetry
    }
}

TEST_CASE("predict matches the dense-solve oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        Rng t = rng.fork(trial);
        const int n = static_cast<int>(t.uniform_int(3, 10));
        const int d = static_cast<int>(t.uniform_int(1, 3));
        Eigen::MatrixXd xs(n, d);
        Eigen::VectorXd ys(n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < d; ++k) xs(i, k) = t.uniform(0.0, 1.0);
            ys[i] = t.uniform(-1.0, 1.0);
        }
        Eigen::VectorXd ls = Eigen::VectorXd::Constant(d, t.uniform(0.2, 1.5));
        const double sv = t.uniform(0.3, 3.0);
        const double nv = t.uniform(1e-4, 0.1);
        const GpModel m = model_with(xs, ys, ls, sv, nv);
        for (int q = 0; q < 5; ++q) {
            Eigen::VectorXd query(d);
            for (int k = 0; k < d; ++k) query[k] = t.uniform(-0.2, 1.2);
            const Posterior got = predict(m, query);
            const Posterior want = posterior_oracle(xs, ys, ls, sv, nv, query);
            CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
            CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-8));
        }
    }
}

TEST_CASE("predict_batch agrees with predict") {
    Rng rng(31);
    Eigen::MatrixXd xs(8, 2);
    Eigen::VectorXd ys(8);
    for (int i = 0; i < 8; ++i) {
        xs(i, 0) = rng.uniform();
        xs(i, 1) = rng.uniform();
        ys[i] = std::sin(3 * xs(i, 0)) + xs(i, 1);
    }
    const GpModel m = fit(xs, ys);
    Eigen::MatrixXd queries(20, 2);
    for (int i = 0; i < 20; ++i) {
        queries(i, 0) = rng.uniform();
        queries(i, 1) = rng.uniform();
    }
    Eigen::VectorXd means, vars;
    predict_batch(m, queries, means, vars);
    for (int i = 0; i < 20; ++i) {
        const Posterior p = predict(m, queries.row(i));
        CHECK(means[i] == doctest::Approx(p.mean).epsilon(1e-12));
        CHECK(vars[i] == doctest::Approx(p.variance).epsilon(1e-12));
    }
}

TEST_CASE("constant targets give constant posterior mean") {
    Eigen::MatrixXd xs(5, 2);
    Rng rng(5);
    for (int i = 0; i < 5; ++i) {
        xs(i, 0) = rng.uniform();
        xs(i, 1) = rng.uniform();
    }
    const Eigen::VectorXd ys = Eigen::VectorXd::Constant(5, 3.25);
    const GpModel m = fit(xs, ys);
    for (int q = 0; q < 10; ++q) {
        Eigen::VectorXd query(2);
        query << rng.uniform(), rng.uniform();
        CHECK(predict(m, query).mean == doctest::Approx(3.25).epsilon(1e-9));
    }
    for (int i = 0; i < 5; ++i)
        CHECK(predict(m, xs.row(i)).variance < 1e-6);
}

TEST_CASE("interpolation at training points as noise vanishes") {
    Eigen::MatrixXd xs(6, 1);
    Eigen::VectorXd ys(6);
    for (int i = 0; i < 6; ++i) {
        xs(i, 0) = i / 5.0;
        ys[i] = std::cos(2.0 * xs(i, 0));
    }
    Eigen::VectorXd ls = Eigen::VectorXd::Constant(1, 0.5);
    const GpModel m = model_with(xs, ys, ls, 1.0, 1e-9);
    for (int i = 0; i < 6; ++i) {
        const Posterior p = predict(m, xs.row(i));
        CHECK(p.mean == doctest::Approx(ys[i]).epsilon(1e-5));
        CHECK(p.variance <= m.noise_var + 1e-6);
    }
}

TEST_CASE("far from data the posterior reverts to the prior") {
    Eigen::MatrixXd xs(4, 2);
    Eigen::VectorXd ys(4);
    Rng rng(8);
    for (int i = 0; i < 4; ++i) {
        xs(i, 0) = rng.uniform();
        xs(i, 1) = rng.uniform();
        ys[i] = rng.uniform(-2.0, 2.0);
    }
    Eigen::VectorXd ls = Eigen::VectorXd::Constant(2, 0.3);
    const GpModel m = model_with(xs, ys, ls, 1.7, 1e-4);
    Eigen::VectorXd far(2);
    far << 100.0, -50.0;
    const Posterior p = predict(m, far);
    CHECK(p.mean == doctest::Approx(ys.mean()).epsilon(1e-9));
    CHECK(p.variance == doctest::Approx(1.7).epsilon(1e-9));
}

TEST_CASE("duplicated inputs with contradicting targets still fit") {
    Eigen::MatrixXd xs(4, 1);
    xs << 0.5, 0.5, 0.1, 0.9;
    Eigen::VectorXd ys(4);
    ys << 1.0, -1.0, 0.2, 0.4;
    const GpModel m = fit(xs, ys);
    CHECK(m.noise_var > 0.0);
    CHECK(std::isfinite(m.log_marginal));
    // the contradiction forces a substantial noise estimate
    CHECK(m.noise_var > 1e-4);
}

TEST_CASE("cholesky factor reconstructs kernel plus noise") {
    Rng rng(12);
    Eigen::MatrixXd xs(12, 3);
    Eigen::VectorXd ys(12);
    for (int i = 0; i < 12; ++i) {
        for (int k = 0; k < 3; ++k) xs(i, k) = rng.uniform();
        ys[i] = rng.uniform(-1.0, 1.0);
    }
    const GpModel m = fit(xs, ys);
    Eigen::MatrixXd expect(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            expect(i, j) = matern52(xs.row(i), xs.row(j), m.lengthscales, m.signal_var);
    expect.diagonal().array() += m.noise_var;
    const Eigen::MatrixXd recon = m.chol * m.chol.transpose();
    CHECK((recon - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit recovers lengthscales of a known GP within a factor of two") {
    // samples drawn from a GP with known hyperparameters; ARD estimates
    // should land near the truth most of the time
    Rng rng(2718);
    const int n = 50, d = 2;
    Eigen::VectorXd true_ls(d);
    true_ls << 0.3, 0.9;
    const double true_sv = 1.0, true_nv = 1e-4;
    int ok = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        Rng t = rng.fork(trial);
        Eigen::MatrixXd xs(n, d);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) xs(i, k) = t.uniform(0.0, 1.0);
        Eigen::MatrixXd k(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                k(i, j) = matern52(xs.row(i), xs.row(j), true_ls, true_sv);
        k.diagonal().array() += true_nv;
        const Eigen::MatrixXd l = k.llt().matrixL();
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = t.normal();
        const Eigen::VectorXd ys = l * z;
        const GpModel m = fit(xs, ys);
        const bool within = m.lengthscales[0] >= true_ls[0] / 2 &&
                            m.lengthscales[0] <= true_ls[0] * 2 &&
                            m.lengthscales[1] >= true_ls[1] / 2 &&
                            m.lengthscales[1] <= true_ls[1] * 2;
        if (within) ++ok;
    }
    CHECK(ok >= 16);  // >= 80% of trials
}

TEST_CASE("fit requires at least two observations") {
    Eigen::MatrixXd xs(1, 1);
    xs << 0.5;
    Eigen::VectorXd ys(1);
    ys << 1.0;
    CHECK_THROWS_AS(fit(xs, ys), ParameterError);
}

TEST_CASE("expected improvement closed form and edge cases") {
    CHECK(expected_improvement({1.0, 0.0}, 1.0) == 0.0);
    CHECK(expected_improvement({1.3, 0.0}, 1.0) == doctest::Approx(0.3));
    CHECK(expected_improvement({0.5, 0.0}, 1.0) == 0.0);
    // mu = best, sigma = 1: EI = phi(0) ~ 0.39894
    CHECK(expected_improvement({0.0, 1.0}, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("expected improvement matches Monte-Carlo expectation at sigma=1") {
    Rng rng(314159);
    for (double mu : {-0.7, 0.0, 0.4}) {
        const double best = 0.1;
        double acc = 0.0;
        const int samples = 1000000;
        for (int i = 0; i < samples; ++i) acc += std::max(0.0, mu + rng.normal() - best);
        const double mc = acc / samples;
        CHECK(std::abs(expected_improvement({mu, 1.0}, best) - mc) < 1e-3);
    }
}

TEST_CASE("expected improvement is monotone in mean and spread") {
    double prev = expected_improvement({-2.0, 0.49}, 0.0);
    for (double mu = -1.9; mu < 2.0; mu += 0.1) {
        const double ei = expected_improvement({mu, 0.49}, 0.0);
        CHECK(ei >= prev);
        prev = ei;
    }
    prev = expected_improvement({-0.5, 1e-6}, 0.0);
    for (double var = 0.1; var < 5.0; var += 0.1) {
        const double ei = expected_improvement({-0.5, var}, 0.0);
        CHECK(ei >= prev);  // mu <= best: more spread, more improvement
        prev = ei;
    }
}

TEST_CASE("posterior mean is linear in the targets") {
    Rng rng(41);
    Eigen::MatrixXd xs(7, 2);
    for (int i = 0; i < 7; ++i) {
        xs(i, 0) = rng.uniform();
        xs(i, 1) = rng.uniform();
    }
    Eigen::VectorXd y1(7), y2(7);
    for (int i = 0; i < 7; ++i) {
        y1[i] = rng.uniform(-1.0, 1.0);
        y2[i] = rng.uniform(-1.0, 1.0);
    }
    Eigen::VectorXd ls = Eigen::VectorXd::Constant(2, 0.5);
    const double a = 0.7, b = -1.3;
    const GpModel m1 = model_with(xs, y1, ls, 1.0, 1e-3);
    const GpModel m2 = model_with(xs, y2, ls, 1.0, 1e-3);
    const GpModel mc = model_with(xs, a * y1 + b * y2, ls, 1.0, 1e-3);
    for (int q = 0; q < 10; ++q) {
        Eigen::VectorXd query(2);
        query << rng.uniform(), rng.uniform();
        const double lhs = predict(mc, query).mean;
        const double rhs = a * predict(m1, query).mean + b * predict(m2, query).mean;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}
