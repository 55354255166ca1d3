#include "botune/surrogate.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "botune/errors.hpp"
#include "botune/rng.hpp"

namespace botune {

namespace {

constexpr double kSqrt5 = 2.23606797749978969;
constexpr double kJitterLadder[] = {1e-10, 1e-8, 1e-6, 1e-4};
constexpr double kLogTwoPi = 1.83787706640934548;

double matern_shape(double r) { return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r); }

void check_hyper(const Eigen::VectorXd& lengthscales, double signal_var) {
    if (signal_var <= 0.0) throw ParameterError("signal variance must be positive");
    for (int i = 0; i < lengthscales.size(); ++i)
        if (!(lengthscales[i] > 0.0)) throw ParameterError("lengthscales must be positive");
}

// Scaled squared distance matrix r^2 from precomputed per-dimension squared
// differences; sqdiff[k](i,j) = (x_ik - x_jk)^2.
Eigen::MatrixXd scaled_sqdist(const std::vector<Eigen::MatrixXd>& sqdiff,
                              const Eigen::VectorXd& lengthscales) {
    const auto n = sqdiff.empty() ? 0 : sqdiff[0].rows();
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < sqdiff.size(); ++k)
        r2 += sqdiff[k] / (lengthscales[k] * lengthscales[k]);
    return r2;
}

struct LmlEval {
    double lml = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;      // d/d(log theta)
    double jitter = 0.0;
    bool ok = false;
};

// Log marginal likelihood and its gradient w.r.t. log-hyperparameters
// theta = [log ls_1..log ls_d, log sv, log nv]. Escalates jitter when the
// Cholesky factorisation fails.
LmlEval eval_lml(const std::vector<Eigen::MatrixXd>& sqdiff, const Eigen::VectorXd& yc,
                 const Eigen::VectorXd& theta, bool want_grad) {
    const int d = static_cast<int>(sqdiff.size());
    const int n = static_cast<int>(yc.size());
    LmlEval out;
    Eigen::VectorXd ls = theta.head(d).array().exp();
    const double sv = std::exp(theta[d]);
    const double nv = std::exp(theta[d + 1]);

    const Eigen::MatrixXd r2 = scaled_sqdist(sqdiff, ls);
    const Eigen::MatrixXd r = r2.array().sqrt();
    const Eigen::MatrixXd expterm = (-kSqrt5 * r.array()).exp();
    Eigen::MatrixXd ksig =
        sv * ((1.0 + kSqrt5 * r.array() + 5.0 / 3.0 * r2.array()) * expterm.array()).matrix();

    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    for (double j : kJitterLadder) {
        Eigen::MatrixXd kmat = ksig;
        kmat.diagonal().array() += nv + j;
        llt.compute(kmat);
        if (llt.info() == Eigen::Success) {
            jitter = j;
            break;
        }
        jitter = -1.0;
    }
    if (jitter < 0.0) return out;  // not ok

    const Eigen::MatrixXd& lmat = llt.matrixLLT();
    Eigen::VectorXd alpha = llt.solve(yc);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(lmat(i, i));
    out.lml = -0.5 * yc.dot(alpha) - logdet - 0.5 * n * kLogTwoPi;
    out.jitter = jitter;
    out.ok = true;
    if (!want_grad) return out;

    // grad_theta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd m = alpha * alpha.transpose() - kinv;
    out.grad.resize(d + 2);
    // dK/d(log ls_k) = sv * (5/3)(1 + sqrt5 r) exp(-sqrt5 r) .* sqdiff_k / ls_k^2
    const Eigen::MatrixXd t =
        (m.array() * (sv * 5.0 / 3.0 * (1.0 + kSqrt5 * r.array()) * expterm.array())).matrix();
    for (int k = 0; k < d; ++k)
        out.grad[k] = 0.5 * (t.array() * sqdiff[k].array()).sum() / (ls[k] * ls[k]);
    out.grad[d] = 0.5 * (m.array() * ksig.array()).sum();        // d/d(log sv)
    out.grad[d + 1] = 0.5 * nv * m.diagonal().sum();             // d/d(log nv)
    return out;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                const Eigen::VectorXd& lengthscales, double signal_var) {
    if (x.size() != x2.size() || x.size() != lengthscales.size())
        throw DimensionError("matern52: mismatched point/lengthscale dimensions");
    check_hyper(lengthscales, signal_var);
    double r2 = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double d = (x[i] - x2[i]) / lengthscales[i];
        r2 += d * d;
    }
    return signal_var * matern_shape(std::sqrt(r2));
}

Eigen::VectorXd GpModel::log_hyper() const {
    Eigen::VectorXd theta(dim() + 2);
    theta.head(dim()) = lengthscales.array().log();
    theta[dim()] = std::log(signal_var);
    theta[dim() + 1] = std::log(noise_var);
    return theta;
}

GpModel fit(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, const FitOptions& opt) {
    const int n = static_cast<int>(xs.rows());
    const int d = static_cast<int>(xs.cols());
    if (n < 2) throw ParameterError("fit needs at least 2 observations");
    if (ys.size() != n) throw DimensionError("fit: xs/ys length mismatch");

    const double y_mean = ys.mean();
    Eigen::VectorXd yc = ys.array() - y_mean;
    const double y_var = yc.squaredNorm() / n;

    std::vector<Eigen::MatrixXd> sqdiff(d);
    for (int k = 0; k < d; ++k) {
        const Eigen::VectorXd col = xs.col(k);
        sqdiff[k] = (col.replicate(1, n) - col.transpose().replicate(n, 1)).array().square();
    }

    const HyperBounds& b = opt.bounds;
    Eigen::VectorXd lo(d + 2), hi(d + 2);
    lo.head(d).setConstant(std::log(b.lengthscale_lo));
    hi.head(d).setConstant(std::log(b.lengthscale_hi));
    lo[d] = std::log(b.signal_lo);
    hi[d] = std::log(b.signal_hi);
    lo[d + 1] = std::log(b.noise_lo);
    hi[d + 1] = std::log(b.noise_hi);
    auto clamp_box = [&](Eigen::VectorXd& v) {
        v = v.cwiseMax(lo).cwiseMin(hi);
    };

    // Degenerate targets: responses are (nearly) constant, likelihood is flat.
    const bool flat = y_var < 1e-24;

    Eigen::VectorXd best_theta;
    double best_lml = -std::numeric_limits<double>::infinity();

    if (!flat) {
        const double sv0 = std::max(y_var, b.signal_lo * 2);
        Rng rng(Rng::mix(opt.seed, static_cast<std::uint64_t>(n) * 1315423911ULL + d));
        for (int restart = 0; restart < opt.restarts; ++restart) {
            Eigen::VectorXd theta(d + 2);
            if (restart == 0 && opt.warm_start && opt.warm_start->size() == d + 2) {
                theta = *opt.warm_start;
            } else if (restart <= 1) {
                // heuristic start: mid-range lengthscales, signal at data variance
                theta.head(d).setConstant(std::log(0.5));
                theta[d] = std::log(sv0);
                theta[d + 1] = std::log(std::max(0.05 * sv0, b.noise_lo * 4));
            } else {
                for (int k = 0; k < d; ++k) theta[k] = std::log(rng.uniform(0.08, 3.0));
                theta[d] = std::log(sv0 * rng.uniform(0.2, 5.0));
                theta[d + 1] = std::log(std::max(sv0 * rng.uniform(1e-4, 0.5), b.noise_lo * 2));
            }
            clamp_box(theta);

            // Adam ascent on the log marginal likelihood; random restarts get a
            // short probe and are abandoned when far behind the leader
            const bool has_warm = opt.warm_start && opt.warm_start->size() == d + 2;
            const int full_budget_until = has_warm ? 0 : 1;
            const int probe_steps = restart <= full_budget_until ? opt.max_steps : 10;
            Eigen::VectorXd m = Eigen::VectorXd::Zero(d + 2);
            Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 2);
            double local_best = -std::numeric_limits<double>::infinity();
            Eigen::VectorXd local_best_theta = theta;
            int stall = 0;
            for (int step = 1; step <= opt.max_steps; ++step) {
                if (step == probe_steps + 1 && local_best < best_lml - 10.0) break;
                LmlEval e = eval_lml(sqdiff, yc, theta, true);
                if (!e.ok) break;
                if (e.lml > local_best + 1e-9) {
                    local_best = e.lml;
                    local_best_theta = theta;
                    stall = 0;
                } else if (++stall >= 5) {
                    break;
                }
                m = 0.9 * m + 0.1 * e.grad;
                v = 0.999 * v.array() + 0.001 * e.grad.array().square();
                const double bias1 = 1.0 - std::pow(0.9, step);
                const double bias2 = 1.0 - std::pow(0.999, step);
                theta += (opt.learning_rate * (m / bias1).array() /
                          ((v / bias2).array().sqrt() + 1e-8))
                             .matrix();
                clamp_box(theta);
            }
            if (local_best > best_lml) {
                best_lml = local_best;
                best_theta = local_best_theta;
            }
        }
    }
    if (!best_theta.size()) {
        best_theta.resize(d + 2);
        best_theta.head(d).setConstant(0.0);
        best_theta[d] = std::log(std::max(y_var, b.signal_lo * 10));
        best_theta[d + 1] = std::log(std::max(0.01 * y_var, b.noise_lo * 10));
        clamp_box(best_theta);
    }

    GpModel model;
    model.xs = xs;
    model.ys = ys;
    model.y_mean = y_mean;
    model.lengthscales = best_theta.head(d).array().exp();
    model.signal_var = std::exp(best_theta[d]);
    const double nv = std::exp(best_theta[d + 1]);

    Eigen::MatrixXd r2 = scaled_sqdist(sqdiff, model.lengthscales);
    Eigen::MatrixXd ksig =
        model.signal_var *
        (r2.array().sqrt().unaryExpr([](double r) { return matern_shape(r); })).matrix();
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool done = false;
    for (double j : kJitterLadder) {
        Eigen::MatrixXd kmat = ksig;
        kmat.diagonal().array() += nv + j;
        llt.compute(kmat);
        if (llt.info() == Eigen::Success) {
            model.noise_var = nv + j;  // accepted jitter folds into the noise term
            done = true;
            break;
        }
    }
    if (!done)
        throw ConditioningError("kernel matrix not positive definite after jitter ladder");
    model.chol = llt.matrixL();
    model.alpha = llt.solve(yc);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(model.chol(i, i));
    model.log_marginal = -0.5 * yc.dot(model.alpha) - logdet - 0.5 * n * kLogTwoPi;
    return model;
}

Posterior predict(const GpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim())
        throw DimensionError("predict: query dimension " + std::to_string(x.size()) +
                             " != model dimension " + std::to_string(model.dim()));
    const int n = model.size();
    Eigen::VectorXd kstar(n);
    for (int i = 0; i < n; ++i)
        kstar[i] = matern52(model.xs.row(i), x, model.lengthscales, model.signal_var);
    Eigen::VectorXd v =
        model.chol.triangularView<Eigen::Lower>().solve(kstar);
    Posterior p;
    p.mean = model.y_mean + kstar.dot(model.alpha);
    p.variance = std::max(0.0, model.signal_var - v.squaredNorm());
    return p;
}

void predict_batch(const GpModel& model, const Eigen::MatrixXd& queries,
                   Eigen::VectorXd& means, Eigen::VectorXd& variances) {
    if (queries.cols() != model.dim())
        throw DimensionError("predict_batch: query dimension mismatch");
    const int n = model.size();
    const int m = static_cast<int>(queries.rows());
    Eigen::MatrixXd kstar(n, m);
    const auto& ls = model.lengthscales;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            double r2 = 0.0;
            for (int k = 0; k < model.dim(); ++k) {
                const double dd = (model.xs(i, k) - queries(j, k)) / ls[k];
                r2 += dd * dd;
            }
            kstar(i, j) = model.signal_var * matern_shape(std::sqrt(r2));
        }
    }
    Eigen::MatrixXd v = model.chol.triangularView<Eigen::Lower>().solve(kstar);
    means = (kstar.transpose() * model.alpha).array() + model.y_mean;
    variances =
        (model.signal_var - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
}

double expected_improvement(const Posterior& post, double best_y) {
    const double sigma = std::sqrt(std::max(0.0, post.variance));
    const double delta = post.mean - best_y;
    if (sigma < 1e-14) return std::max(0.0, delta);
    const double z = delta / sigma;
    return std::max(0.0, delta * normal_cdf(z) + sigma * normal_pdf(z));
}

}  // namespace botune
