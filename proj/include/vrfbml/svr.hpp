#ifndef VRFBML_SVR_HPP
#define VRFBML_SVR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vrfbml/dataset.hpp"
#include "vrfbml/errors.hpp"

namespace vrfbml {

enum class SvrKernel { Rbf, Linear };

inline std::string to_string(SvrKernel k) { return k == SvrKernel::Rbf ? "rbf" : "linear"; }

inline SvrKernel svr_kernel_from_string(const std::string& s) {
    if (s == "rbf") return SvrKernel::Rbf;
    if (s == "linear") return SvrKernel::Linear;
    throw ValueError("unknown kernel '" + s + "' (expected rbf|linear)");
}

struct SvrHyper {
    double c = 10.0;
    double epsilon = 0.05;           // tube half-width, degC
    std::optional<double> gamma;     // RBF width; empty means auto (= 1 on standardized x)
    SvrKernel kernel = SvrKernel::Rbf;
    std::size_t max_passes = 100000; // pair updates before giving up
    double tol = 1e-4;               // KKT violation threshold

    void validate() const {
        if (!(c > 0.0)) throw TrainingError("svr: C must be > 0");
        if (!(epsilon >= 0.0)) throw TrainingError("svr: epsilon must be >= 0");
        if (gamma && !(*gamma > 0.0)) throw TrainingError("svr: gamma must be > 0");
        if (!(tol > 0.0)) throw TrainingError("svr: tol must be > 0");
        if (max_passes < 1) throw TrainingError("svr: max_passes must be >= 1");
    }
};

struct SvrTrainingInfo {
    bool converged = false;
    double kkt_violation = 0.0;
    std::size_t iterations = 0;
};

struct SvrModel {
    std::vector<double> support_x;  // standardized training inputs with nonzero duals
    std::vector<double> dual_coefs; // alpha_i - alpha_i^*
    double bias = 0.0;
    double gamma = 1.0;
    double epsilon = 0.05;
    double c = 10.0;
    double x_mean = 0.0;
    double x_std = 1.0;
    SvrKernel kernel = SvrKernel::Rbf;
    SvrTrainingInfo training;
};

inline double svr_kernel_eval(SvrKernel kernel, double gamma, double a, double b) {
    if (kernel == SvrKernel::Rbf) {
        const double d = a - b;
        return std::exp(-gamma * d * d);
    }
    return a * b;
}

/// Dual objective 0.5 b'Kb + eps*sum|b| - y'b in the beta = alpha - alpha^*
/// parameterization. Dense O(n^2); meant for diagnostics and small oracles.
inline double svr_dual_objective(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& beta, double gamma, double epsilon,
                                 SvrKernel kernel) {
    const std::size_t n = x.size();
    double quad = 0.0, rest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (beta[j] != 0.0)
                quad += beta[i] * beta[j] * svr_kernel_eval(kernel, gamma, x[i], x[j]);
        }
        rest += epsilon * std::abs(beta[i]) - y[i] * beta[i];
    }
    return 0.5 * quad + rest;
}

namespace svr_detail {

/**
 * Sequential-minimal-optimization solver for the epsilon-SVR dual, working
 * directly on beta_i = alpha_i - alpha_i^* in the box [-C, C] with the
 * equality constraint sum(beta) = 0 kept exact by updating the two maximal
 * KKT violators in opposite directions. The |beta| penalty makes the line
 * search piecewise quadratic; its derivative only ever jumps upward at the
 * sign-crossing kinks, so the 1-D minimum is found by a forward segment walk.
 */
class SmoSolver {
public:
    SmoSolver(const std::vector<double>& x, const std::vector<double>& y, double c,
              double epsilon, double gamma, SvrKernel kernel, double tol,
              std::size_t max_iterations)
        : x_(x), y_(y), c_(c), epsilon_(epsilon), gamma_(gamma), kernel_(kernel), tol_(tol),
          max_iterations_(max_iterations), n_(x.size()), beta_(x.size(), 0.0),
          f_(x.size(), 0.0), columns_(x.size()) {
        const std::size_t column_bytes = n_ * sizeof(double);
        max_cached_columns_ = std::max<std::size_t>(2, (128u << 20) / std::max<std::size_t>(column_bytes, 1));
    }

    SvrTrainingInfo solve() {
        SvrTrainingInfo info;
        while (info.iterations < max_iterations_) {
            const KktBounds kkt = scan_kkt();
            info.kkt_violation = kkt.b_low - kkt.b_high;
            if (info.kkt_violation < tol_) {
                info.converged = true;
                break;
            }
            // second-order working set: the partner maximizing the estimated
            // objective decrease along the pair direction
            const std::size_t j = select_second(kkt);
            if (!optimize_pair(kkt.i_low, j)) {
                break; // numerically stuck; final violation reported below
            }
            ++info.iterations;
        }
        refresh_f_exact();
        const KktBounds final_kkt = scan_kkt();
        info.kkt_violation = final_kkt.b_low - final_kkt.b_high;
        info.converged = info.kkt_violation < tol_;
        bias_ = compute_bias(final_kkt);
        return info;
    }

    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& f() const { return f_; }
    double bias() const { return bias_; }

private:
    struct KktBounds {
        double b_low = -std::numeric_limits<double>::infinity();
        double b_high = std::numeric_limits<double>::infinity();
        std::size_t i_low = 0;
        std::size_t i_high = 0;
    };

    KktBounds scan_kkt() const {
        KktBounds out;
        const double bound_margin = 1e-12 * std::max(1.0, c_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double resid = y_[i] - f_[i];
            // candidate lower bound on the bias (direction: beta_i up);
            // sign boundaries are exact so they agree with the line search
            if (beta_[i] < 0.0) {
                consider_low(out, resid + epsilon_, i);
            } else if (beta_[i] < c_ - bound_margin) {
                consider_low(out, resid - epsilon_, i);
            }
            // candidate upper bound on the bias (direction: beta_i down)
            if (beta_[i] > 0.0) {
                consider_high(out, resid - epsilon_, i);
            } else if (beta_[i] > -c_ + bound_margin) {
                consider_high(out, resid + epsilon_, i);
            }
        }
        return out;
    }

    static void consider_low(KktBounds& b, double value, std::size_t i) {
        if (value > b.b_low) {
            b.b_low = value;
            b.i_low = i;
        }
    }

    std::size_t select_second(const KktBounds& kkt) {
        const std::size_t i = kkt.i_low;
        fetch_columns(i, i);
        const std::vector<double>& col_i = columns_[i];
        const double k_ii = col_i[i];
        const double bound_margin = 1e-12 * std::max(1.0, c_);
        std::size_t best = kkt.i_high;
        double best_score = -1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            double down;
            if (beta_[j] > 0.0) {
                down = y_[j] - f_[j] - epsilon_;
            } else if (beta_[j] > -c_ + bound_margin) {
                down = y_[j] - f_[j] + epsilon_;
            } else {
                continue;
            }
            const double gap = kkt.b_low - down;
            if (!(gap > 0.0)) continue;
            const double k_jj = kernel_ == SvrKernel::Rbf ? 1.0 : x_[j] * x_[j];
            const double curvature = std::max(k_ii + k_jj - 2.0 * col_i[j], 1e-12);
            const double score = gap * gap / curvature;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    static void consider_high(KktBounds& b, double value, std::size_t i) {
        if (value < b.b_high) {
            b.b_high = value;
            b.i_high = i;
        }
    }

    // Minimize along beta_i += t, beta_j -= t for t in [0, t_max].
    bool optimize_pair(std::size_t i, std::size_t j) {
        if (i == j) return false;
        fetch_columns(i, j); // may evict, so take references only afterwards
        const std::vector<double>& col_i = columns_[i];
        const std::vector<double>& col_j = columns_[j];
        const double k_ii = col_i[i];
        const double k_jj = col_j[j];
        const double k_ij = col_i[j];
        const double curvature = std::max(k_ii + k_jj - 2.0 * k_ij, 0.0);

        const double t_max = std::min(c_ - beta_[i], beta_[j] + c_);
        if (!(t_max > 0.0)) return false;

        double slope = (f_[i] - f_[j]) - (y_[i] - y_[j]) +
                       epsilon_ * (beta_[i] >= 0.0 ? 1.0 : -1.0) +
                       epsilon_ * (beta_[j] > 0.0 ? -1.0 : 1.0);
        if (!(slope < 0.0)) return false;

        // kinks where a beta crosses zero; the slope jumps by +2*epsilon there
        double kinks[2];
        int n_kinks = 0;
        if (beta_[i] < 0.0 && -beta_[i] < t_max) kinks[n_kinks++] = -beta_[i];
        if (beta_[j] > 0.0 && beta_[j] < t_max) kinks[n_kinks++] = beta_[j];
        if (n_kinks == 2 && kinks[0] > kinks[1]) std::swap(kinks[0], kinks[1]);

        double t_cur = 0.0;
        double t_star = t_max;
        bool found = false;
        for (int k = 0; k < n_kinks && !found; ++k) {
            const double seg_end = kinks[k];
            if (curvature > 0.0) {
                const double t_zero = t_cur - slope / curvature;
                if (t_zero <= seg_end) {
                    t_star = t_zero;
                    found = true;
                    break;
                }
            }
            slope += curvature * (seg_end - t_cur) + 2.0 * epsilon_;
            t_cur = seg_end;
            if (slope >= 0.0) {
                t_star = t_cur;
                found = true;
            }
        }
        if (!found) {
            if (curvature > 0.0) {
                const double t_zero = t_cur - slope / curvature;
                t_star = std::min(t_zero, t_max);
            } else {
                t_star = slope < 0.0 ? t_max : t_cur;
            }
        }
        if (!(t_star > 0.0)) return false;

        beta_[i] += t_star;
        beta_[j] -= t_star;
        for (std::size_t k = 0; k < n_; ++k) f_[k] += t_star * (col_i[k] - col_j[k]);
        return true;
    }

    void fetch_columns(std::size_t i, std::size_t j) {
        if ((columns_[i].empty() || columns_[j].empty()) &&
            cached_columns_ + 2 > max_cached_columns_) {
            for (auto& c : columns_) std::vector<double>().swap(c);
            cached_columns_ = 0;
        }
        for (std::size_t idx : {i, j}) {
            std::vector<double>& col = columns_[idx];
            if (!col.empty()) continue;
            col.resize(n_);
            for (std::size_t k = 0; k < n_; ++k)
                col[k] = svr_kernel_eval(kernel_, gamma_, x_[k], x_[idx]);
            ++cached_columns_;
        }
    }

    void refresh_f_exact() {
        std::fill(f_.begin(), f_.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            if (beta_[j] == 0.0) continue;
            for (std::size_t k = 0; k < n_; ++k)
                f_[k] += beta_[j] * svr_kernel_eval(kernel_, gamma_, x_[k], x_[j]);
        }
    }

    double compute_bias(const KktBounds& kkt) const {
        const double margin = 1e-8 * c_;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double magnitude = std::abs(beta_[i]);
            if (magnitude > 0.0 && magnitude < c_ - margin) {
                sum += y_[i] - f_[i] - epsilon_ * (beta_[i] > 0.0 ? 1.0 : -1.0);
                ++count;
            }
        }
        if (count > 0) return sum / static_cast<double>(count);
        if (std::isfinite(kkt.b_low) && std::isfinite(kkt.b_high))
            return 0.5 * (kkt.b_low + kkt.b_high);
        return 0.0;
    }

    const std::vector<double>& x_;
    const std::vector<double>& y_;
    double c_;
    double epsilon_;
    double gamma_;
    SvrKernel kernel_;
    double tol_;
    std::size_t max_iterations_;
    std::size_t n_;
    std::vector<double> beta_;
    std::vector<double> f_;
    double bias_ = 0.0;
    std::vector<std::vector<double>> columns_;
    std::size_t cached_columns_ = 0;
    std::size_t max_cached_columns_ = 0;
};

} // namespace svr_detail

/**
 * Train epsilon-insensitive SVR on standardized time. Non-convergence within
 * max_passes is not fatal: the model is still returned and carries the final
 * KKT violation in its training info.
 */
inline SvrModel fit_svr(const TimeSeriesDataset& train, const SvrHyper& hyper = {}) {
    hyper.validate();
    const std::size_t n = train.size();
    if (n < 2) throw TrainingError("fit_svr: need at least 2 samples");

    std::vector<double> x = train.times();
    const std::vector<double> y = train.temperatures();

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0)) throw TrainingError("fit_svr: all sample times are equal");
    const double stddev = std::sqrt(var);
    for (double& v : x) v = (v - mean) / stddev;

    // auto gamma: 1 / var of the standardized input, which is 1 by construction
    const double gamma = hyper.gamma.value_or(1.0);

    svr_detail::SmoSolver solver(x, y, hyper.c, hyper.epsilon, gamma, hyper.kernel, hyper.tol,
                                 hyper.max_passes);
    SvrModel model;
    model.training = solver.solve();
    model.bias = solver.bias();
    model.gamma = gamma;
    model.epsilon = hyper.epsilon;
    model.c = hyper.c;
    model.x_mean = mean;
    model.x_std = stddev;
    model.kernel = hyper.kernel;
    const std::vector<double>& beta = solver.beta();
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] != 0.0) {
            model.support_x.push_back(x[i]);
            model.dual_coefs.push_back(beta[i]);
        }
    }
    return model;
}

inline double predict_svr(const SvrModel& model, double time_s) {
    const double xq = (time_s - model.x_mean) / model.x_std;
    double acc = model.bias;
    for (std::size_t i = 0; i < model.support_x.size(); ++i)
        acc += model.dual_coefs[i] *
               svr_kernel_eval(model.kernel, model.gamma, model.support_x[i], xq);
    return acc;
}

} // namespace vrfbml

#endif // VRFBML_SVR_HPP
