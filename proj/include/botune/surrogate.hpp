#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace botune {

// Box constraints for the marginal-likelihood search, in natural units.
struct HyperBounds {
    double lengthscale_lo = 5e-3;
    double lengthscale_hi = 1e2;
    double signal_lo = 1e-8;
    double signal_hi = 1e4;
    double noise_lo = 1e-8;
    double noise_hi = 1.0;
};

struct FitOptions {
    HyperBounds bounds;
    int restarts = 8;
    int max_steps = 40;                       // Adam steps per restart
    double learning_rate = 0.12;
    std::uint64_t seed = 0x5eedULL;           // restart initialisation stream
    std::optional<Eigen::VectorXd> warm_start;  // log-hyperparameters [log ls.., log sv, log nv]
};

// Gaussian process with an ARD Matern 5/2 kernel and constant (empirical
// mean) mean function. Immutable after fit.
struct GpModel {
    Eigen::MatrixXd xs;  // n x d
    Eigen::VectorXd ys;  // n
    Eigen::VectorXd lengthscales;
    double signal_var = 1.0;
    double noise_var = 1e-6;  // includes any jitter accepted during fit
    Eigen::MatrixXd chol;     // lower-triangular L, L L^T = K + noise_var I
    Eigen::VectorXd alpha;    // (K + noise_var I)^{-1} (ys - y_mean)
    double y_mean = 0.0;
    double log_marginal = 0.0;

    int dim() const { return static_cast<int>(xs.cols()); }
    int size() const { return static_cast<int>(xs.rows()); }
    Eigen::VectorXd log_hyper() const;
};

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;  // clamped at 0 after round-off
};

// k(x,x2) = sv * (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r),
// r = scaled Euclidean distance with per-dimension lengthscales.
double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                const Eigen::VectorXd& lengthscales, double signal_var);

// Maximum marginal likelihood over log-hyperparameters, multi-start Adam.
// ys are mean-centered internally. Throws ConditioningError if the kernel
// matrix stays singular through the jitter ladder (1e-10 .. 1e-4).
GpModel fit(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys, const FitOptions& opt = {});

Posterior predict(const GpModel& model, const Eigen::VectorXd& x);

// Column-wise posterior for a batch of query points (m x d row layout).
void predict_batch(const GpModel& model, const Eigen::MatrixXd& queries,
                   Eigen::VectorXd& means, Eigen::VectorXd& variances);

// EI in maximisation form: (mu - best) Phi(z) + sigma phi(z). Non-negative;
// equals max(0, mu - best) at zero variance.
double expected_improvement(const Posterior& post, double best_y);

double normal_cdf(double z);
double normal_pdf(double z);

}  // namespace botune
