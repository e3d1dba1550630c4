#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylo/dataset.hpp"

namespace stylo {

class SvmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SvmKernel { Linear, Polynomial, Rbf, Sigmoid };

inline std::string_view to_string(SvmKernel k) {
    switch (k) {
        case SvmKernel::Linear: return "linear";
        case SvmKernel::Polynomial: return "poly";
        case SvmKernel::Rbf: return "rbf";
        case SvmKernel::Sigmoid: return "sigmoid";
    }
    return "?";
}

struct SvmConfig {
    SvmKernel kernel = SvmKernel::Linear;
    double nu = 0.5;
    double gamma = 0; // 0 means 1/n_features, resolved at training time
    int degree = 3;
    double coef0 = 0;
    double epsilon = 0.001; // termination tolerance on the KKT violation
    bool shrinking = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double kernel_eval(const SvmConfig& cfg, double gamma, std::span<const double> a,
                          std::span<const double> b) {
    switch (cfg.kernel) {
        case SvmKernel::Linear:
            return dot(a, b);
        case SvmKernel::Polynomial:
            return std::pow(gamma * dot(a, b) + cfg.coef0, cfg.degree);
        case SvmKernel::Rbf: {
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                s += d * d;
            }
            return std::exp(-gamma * s);
        }
        case SvmKernel::Sigmoid:
            return std::tanh(gamma * dot(a, b) + cfg.coef0);
    }
    return 0;
}

struct NuSolution {
    std::vector<double> coef; // alpha_i * y_i, rescaled by 1/r
    double rho = 0;
    std::size_t iterations = 0;
};

/// nu-SVC dual for one class pair, solved by sequential two-variable
/// optimization with maximal-violating-pair selection. Both sum constraints
/// stay satisfied because the selected pair always shares a label. When
/// shrinking is on, bound variables that satisfy KKT are dropped from the
/// selection scan; convergence is always re-verified on the full set.
inline NuSolution solve_nu_svc(const std::vector<std::span<const double>>& x,
                               const std::vector<int>& y, const SvmConfig& cfg, double gamma) {
    const std::size_t l = x.size();
    const double nu_l = cfg.nu * static_cast<double>(l);

    // kernel matrix: problems here are a few hundred rows, keep it dense
    std::vector<double> K(l * l);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            K[i * l + j] = K[j * l + i] = kernel_eval(cfg, gamma, x[i], x[j]);
        }
    }
    const auto k_at = [&](std::size_t i, std::size_t j) { return K[i * l + j]; };

    std::vector<double> alpha(l, 0.0);
    double sum_pos = nu_l / 2.0;
    double sum_neg = nu_l / 2.0;
    for (std::size_t i = 0; i < l; ++i) {
        double& budget = (y[i] > 0) ? sum_pos : sum_neg;
        alpha[i] = std::min(1.0, budget);
        budget -= alpha[i];
    }

    // G_i = sum_j y_i y_j K_ij alpha_j
    std::vector<double> G(l, 0.0);
    for (std::size_t j = 0; j < l; ++j) {
        if (alpha[j] == 0.0) continue;
        const double aj = alpha[j] * y[j];
        for (std::size_t i = 0; i < l; ++i) G[i] += y[i] * aj * k_at(i, j);
    }

    std::vector<char> active(l, 1);
    bool shrunk = false;
    const std::size_t shrink_period = std::max<std::size_t>(l, 1000);

    NuSolution sol;
    const std::size_t max_iter =
        std::max<std::size_t>(10000000, 100 * l);

    const auto select_pair = [&](std::size_t& out_i, std::size_t& out_j, double& gap) {
        double gmax_p = -std::numeric_limits<double>::infinity();
        double gmax_p2 = -std::numeric_limits<double>::infinity();
        double gmax_n = -std::numeric_limits<double>::infinity();
        double gmax_n2 = -std::numeric_limits<double>::infinity();
        std::size_t ip = l, jp = l, in = l, jn = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (!active[t]) continue;
            if (y[t] > 0) {
                if (alpha[t] < 1.0 && -G[t] > gmax_p) {
                    gmax_p = -G[t];
                    ip = t;
                }
                if (alpha[t] > 0.0 && G[t] > gmax_p2) {
                    gmax_p2 = G[t];
                    jp = t;
                }
            } else {
                if (alpha[t] > 0.0 && G[t] > gmax_n) {
                    gmax_n = G[t];
                    in = t;
                }
                if (alpha[t] < 1.0 && -G[t] > gmax_n2) {
                    gmax_n2 = -G[t];
                    jn = t;
                }
            }
        }
        const double gap_p = (ip < l && jp < l) ? gmax_p + gmax_p2
                                                : -std::numeric_limits<double>::infinity();
        const double gap_n = (in < l && jn < l) ? gmax_n + gmax_n2
                                                : -std::numeric_limits<double>::infinity();
        if (gap_p >= gap_n) {
            gap = gap_p;
            out_i = ip;
            out_j = jp;
        } else {
            gap = gap_n;
            out_i = in;
            out_j = jn;
        }
    };

    // KKT-based shrink: keep free variables and bound variables still in
    // doubt relative to the current per-class multiplier estimate.
    const auto reshrink = [&] {
        for (int side = 0; side < 2; ++side) {
            const int ys = side == 0 ? 1 : -1;
            double sum_free = 0;
            std::size_t n_free = 0;
            double ub = std::numeric_limits<double>::infinity();
            double lb = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < l; ++i) {
                if (y[i] != ys) continue;
                if (alpha[i] >= 1.0) {
                    lb = std::max(lb, G[i]);
                } else if (alpha[i] <= 0.0) {
                    ub = std::min(ub, G[i]);
                } else {
                    sum_free += G[i];
                    ++n_free;
                }
            }
            const double r = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2;
            for (std::size_t i = 0; i < l; ++i) {
                if (y[i] != ys) continue;
                if (!std::isfinite(r)) {
                    active[i] = 1; // no usable multiplier estimate for this side
                } else if (alpha[i] <= 0.0) {
                    active[i] = G[i] < r - cfg.epsilon ? 1 : 0; // still wants to grow
                } else if (alpha[i] >= 1.0) {
                    active[i] = G[i] > r + cfg.epsilon ? 1 : 0; // still wants to shrink
                } else {
                    active[i] = 1;
                }
            }
        }
        shrunk = true;
    };

    while (sol.iterations < max_iter) {
        std::size_t i = l, j = l;
        double gap = 0;
        select_pair(i, j, gap);
        if (gap < cfg.epsilon) {
            if (!shrunk) break;
            std::fill(active.begin(), active.end(), 1); // verify on the full set
            shrunk = false;
            select_pair(i, j, gap);
            if (gap < cfg.epsilon) break;
        }
        ++sol.iterations;

        double quad = k_at(i, i) + k_at(j, j) - 2.0 * k_at(i, j);
        if (quad <= 0) quad = 1e-12; // sigmoid kernels are not PSD
        const double delta = (G[i] - G[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        double ai = alpha[i] - delta;
        ai = std::clamp(ai, std::max(0.0, sum - 1.0), std::min(1.0, sum));
        alpha[i] = ai;
        alpha[j] = sum - ai;

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        const int ys = y[i]; // y[i] == y[j]
        for (std::size_t t = 0; t < l; ++t) {
            G[t] += y[t] * ys * (k_at(t, i) * dai + k_at(t, j) * daj);
        }

        if (cfg.shrinking && sol.iterations % shrink_period == 0) reshrink();
    }

    // per-class multipliers, as in the reference formulation:
    // rho = (r1 - r2) / 2 and the margin scale r = (r1 + r2) / 2
    double r_side[2];
    for (int side = 0; side < 2; ++side) {
        const int ys = side == 0 ? 1 : -1;
        double sum_free = 0;
        std::size_t n_free = 0;
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < l; ++i) {
            if (y[i] != ys) continue;
            if (alpha[i] >= 1.0) {
                lb = std::max(lb, G[i]);
            } else if (alpha[i] <= 0.0) {
                ub = std::min(ub, G[i]);
            } else {
                sum_free += G[i];
                ++n_free;
            }
        }
        r_side[side] = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2;
    }
    const double r = (r_side[0] + r_side[1]) / 2;
    double rho = (r_side[0] - r_side[1]) / 2;

    sol.coef.resize(l);
    // scale to the standard C-SVC form when the margin term is usable;
    // the sign of the decision function does not depend on this
    const double scale = (std::isfinite(r) && r > 1e-12) ? 1.0 / r : 1.0;
    for (std::size_t i = 0; i < l; ++i) sol.coef[i] = alpha[i] * y[i] * scale;
    sol.rho = rho * scale;
    return sol;
}

} // namespace detail

/// One binary machine of the one-vs-one decomposition.
struct SvmBinary {
    int class_a = 0; // votes for class_a when the decision value is positive
    int class_b = 0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coef; // alpha_i * y_i (scaled)
    double rho = 0;
    std::size_t n_train = 0;
    std::size_t iterations = 0;
};

struct SvmModel {
    SvmConfig config;
    double gamma = 0;
    std::size_t n_features = 0;
    std::vector<int> classes;
    std::vector<SvmBinary> machines;
};

inline double max_feasible_nu(std::size_t n_a, std::size_t n_b) {
    return 2.0 * static_cast<double>(std::min(n_a, n_b)) / static_cast<double>(n_a + n_b);
}

inline double svm_decision_value(const SvmModel& model, const SvmBinary& machine,
                                 std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < machine.support_vectors.size(); ++i) {
        s += machine.coef[i] * detail::kernel_eval(model.config, model.gamma,
                                                   machine.support_vectors[i], x);
    }
    return s - machine.rho;
}

/// Trains one nu-SVC machine per unordered class pair.
/// An infeasible nu names the offending pair and its feasible maximum.
inline SvmModel svm_train(const FeatureMatrix& train, SvmConfig cfg) {
    if (train.empty()) throw SvmError("svm_train: empty training set");
    if (cfg.nu <= 0 || cfg.nu > 1) {
        throw SvmError("svm_train: nu must be in (0,1], got " + std::to_string(cfg.nu));
    }
    SvmModel model;
    model.config = cfg;
    model.n_features = train.n_features;
    model.gamma = cfg.gamma > 0 ? cfg.gamma : 1.0 / static_cast<double>(train.n_features);

    std::vector<std::vector<std::size_t>> rows_of(kNumAuthors);
    for (std::size_t i = 0; i < train.size(); ++i) {
        rows_of[static_cast<std::size_t>(train.labels[i])].push_back(i);
    }
    for (int c = 0; c < kNumAuthors; ++c) {
        if (!rows_of[static_cast<std::size_t>(c)].empty()) model.classes.push_back(c);
    }
    if (model.classes.size() < 2) throw SvmError("svm_train: need at least two classes");

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            const int ca = model.classes[a];
            const int cb = model.classes[b];
            const auto& ra = rows_of[static_cast<std::size_t>(ca)];
            const auto& rb = rows_of[static_cast<std::size_t>(cb)];
            const double nu_max = max_feasible_nu(ra.size(), rb.size());
            if (cfg.nu > nu_max + 1e-12) {
                throw SvmError("svm_train: nu=" + std::to_string(cfg.nu) +
                               " infeasible for class pair (" + std::to_string(ca) + "," +
                               std::to_string(cb) + "); maximum feasible nu is " +
                               std::to_string(nu_max));
            }
            std::vector<std::span<const double>> x;
            std::vector<int> y;
            for (std::size_t r : ra) {
                x.emplace_back(train.rows[r]);
                y.push_back(+1);
            }
            for (std::size_t r : rb) {
                x.emplace_back(train.rows[r]);
                y.push_back(-1);
            }
            const detail::NuSolution sol = detail::solve_nu_svc(x, y, cfg, model.gamma);

            SvmBinary machine;
            machine.class_a = ca;
            machine.class_b = cb;
            machine.rho = sol.rho;
            machine.n_train = x.size();
            machine.iterations = sol.iterations;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (sol.coef[i] != 0.0) {
                    machine.support_vectors.emplace_back(x[i].begin(), x[i].end());
                    machine.coef.push_back(sol.coef[i]);
                }
            }
            model.machines.push_back(std::move(machine));
        }
    }
    return model;
}

/// One-vs-one majority vote; vote ties go to the smallest label.
inline int svm_predict(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.n_features) {
        throw SvmError("svm: input has " + std::to_string(x.size()) + " features, expected " +
                       std::to_string(model.n_features));
    }
    int votes[kNumAuthors] = {};
    for (const auto& machine : model.machines) {
        const double d = svm_decision_value(model, machine, x);
        ++votes[d > 0 ? machine.class_a : machine.class_b];
    }
    int best = 0;
    for (int c = 1; c < kNumAuthors; ++c) {
        if (votes[c] > votes[best]) best = c;
    }
    return best;
}

inline double svm_test_error_pct(const SvmModel& model, const FeatureMatrix& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (svm_predict(model, test.rows[i]) != test.labels[i]) ++wrong;
    }
    return test.empty() ? 0.0
                        : 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

} // namespace stylo
