#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylo/dataset.hpp"
#include "stylo/rng.hpp"

namespace stylo {

class MlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Three-layer feedforward net, sigmoid everywhere, one-hot targets.
struct MlpConfig {
    int n_inputs = 0;
    int n_hidden = 10;
    int n_outputs = 10;
    int max_epochs = 500;
    double desired_validation_rmse = 0.001;
    std::uint64_t seed = 1;

    enum class Algo { Rprop, Backprop };
    Algo algo = Algo::Rprop; // sign-based per-weight step adaptation (iRprop-)
    double learning_rate = 0.7;
};

struct MlpModel {
    int n_inputs = 0, n_hidden = 0, n_outputs = 0;
    std::vector<double> w1; // n_hidden x n_inputs, row-major
    std::vector<double> b1; // n_hidden
    std::vector<double> w2; // n_outputs x n_hidden
    std::vector<double> b2; // n_outputs

    std::size_t n_weights() const {
        return w1.size() + b1.size() + w2.size() + b2.size();
    }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void mlp_forward(const MlpModel& m, std::span<const double> x, std::vector<double>& hidden,
                        std::vector<double>& out) {
    hidden.assign(static_cast<std::size_t>(m.n_hidden), 0.0);
    out.assign(static_cast<std::size_t>(m.n_outputs), 0.0);
    for (int h = 0; h < m.n_hidden; ++h) {
        double s = m.b1[static_cast<std::size_t>(h)];
        const double* w = &m.w1[static_cast<std::size_t>(h) * m.n_inputs];
        for (int i = 0; i < m.n_inputs; ++i) s += w[i] * x[static_cast<std::size_t>(i)];
        hidden[static_cast<std::size_t>(h)] = sigmoid(s);
    }
    for (int o = 0; o < m.n_outputs; ++o) {
        double s = m.b2[static_cast<std::size_t>(o)];
        const double* w = &m.w2[static_cast<std::size_t>(o) * m.n_hidden];
        for (int h = 0; h < m.n_hidden; ++h) s += w[h] * hidden[static_cast<std::size_t>(h)];
        out[static_cast<std::size_t>(o)] = sigmoid(s);
    }
}

inline std::vector<double> mlp_outputs(const MlpModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.n_inputs) {
        throw MlpError("mlp: input has " + std::to_string(x.size()) + " features, expected " +
                       std::to_string(m.n_inputs));
    }
    std::vector<double> hidden, out;
    mlp_forward(m, x, hidden, out);
    return out;
}

/// argmax over the output activations; exact ties go to the smaller label.
inline int mlp_predict(const MlpModel& m, std::span<const double> x) {
    const std::vector<double> out = mlp_outputs(m, x);
    int best = 0;
    for (int o = 1; o < m.n_outputs; ++o) {
        if (out[static_cast<std::size_t>(o)] > out[static_cast<std::size_t>(best)]) best = o;
    }
    return best;
}

/// Root of the mean squared deviation from one-hot targets, over all
/// outputs and examples (the stopping criterion's error measure).
inline double mlp_rmse(const MlpModel& m, const FeatureMatrix& data) {
    if (data.empty()) return 0.0;
    std::vector<double> hidden, out;
    double sum = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        mlp_forward(m, data.rows[r], hidden, out);
        for (int o = 0; o < m.n_outputs; ++o) {
            const double target = (o == data.labels[r]) ? 1.0 : 0.0;
            const double d = out[static_cast<std::size_t>(o)] - target;
            sum += d * d;
        }
    }
    return std::sqrt(sum / (static_cast<double>(data.size()) * m.n_outputs));
}

/// Batch half-sum-of-squares loss and its gradient, flattened in
/// (w1, b1, w2, b2) order. Exposed so the backpropagation path can be
/// checked against finite differences.
inline double mlp_gradient(const MlpModel& m, const FeatureMatrix& data,
                           std::vector<double>& grad) {
    grad.assign(m.n_weights(), 0.0);
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + m.w1.size();
    double* g_w2 = g_b1 + m.b1.size();
    double* g_b2 = g_w2 + m.w2.size();

    std::vector<double> hidden, out;
    std::vector<double> delta_out(static_cast<std::size_t>(m.n_outputs));
    std::vector<double> delta_hidden(static_cast<std::size_t>(m.n_hidden));
    double loss = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto& x = data.rows[r];
        mlp_forward(m, x, hidden, out);
        for (int o = 0; o < m.n_outputs; ++o) {
            const double target = (o == data.labels[r]) ? 1.0 : 0.0;
            const double y = out[static_cast<std::size_t>(o)];
            const double d = y - target;
            loss += 0.5 * d * d;
            delta_out[static_cast<std::size_t>(o)] = d * y * (1.0 - y);
        }
        for (int h = 0; h < m.n_hidden; ++h) {
            double s = 0;
            for (int o = 0; o < m.n_outputs; ++o) {
                s += delta_out[static_cast<std::size_t>(o)] *
                     m.w2[static_cast<std::size_t>(o) * m.n_hidden + h];
            }
            const double yh = hidden[static_cast<std::size_t>(h)];
            delta_hidden[static_cast<std::size_t>(h)] = s * yh * (1.0 - yh);
        }
        for (int o = 0; o < m.n_outputs; ++o) {
            const double d = delta_out[static_cast<std::size_t>(o)];
            double* row = g_w2 + static_cast<std::size_t>(o) * m.n_hidden;
            for (int h = 0; h < m.n_hidden; ++h) row[h] += d * hidden[static_cast<std::size_t>(h)];
            g_b2[o] += d;
        }
        for (int h = 0; h < m.n_hidden; ++h) {
            const double d = delta_hidden[static_cast<std::size_t>(h)];
            double* row = g_w1 + static_cast<std::size_t>(h) * m.n_inputs;
            for (int i = 0; i < m.n_inputs; ++i) row[i] += d * x[static_cast<std::size_t>(i)];
            g_b1[h] += d;
        }
    }
    return loss;
}

struct MlpTrainResult {
    MlpModel model;          // weights with the best validation RMSE seen
    int epochs_run = 0;
    int best_epoch = 0;
    double best_validation_rmse = 0;
    double final_train_rmse = 0;
};

namespace detail {

inline void flatten(const MlpModel& m, std::vector<double>& w) {
    w.clear();
    w.insert(w.end(), m.w1.begin(), m.w1.end());
    w.insert(w.end(), m.b1.begin(), m.b1.end());
    w.insert(w.end(), m.w2.begin(), m.w2.end());
    w.insert(w.end(), m.b2.begin(), m.b2.end());
}

inline void unflatten(std::span<const double> w, MlpModel& m) {
    std::size_t k = 0;
    for (auto& v : m.w1) v = w[k++];
    for (auto& v : m.b1) v = w[k++];
    for (auto& v : m.w2) v = w[k++];
    for (auto& v : m.b2) v = w[k++];
}

} // namespace detail

/// Trains with full-batch iRprop- (default) or plain gradient descent.
/// Stops at max_epochs or once validation RMSE drops to the desired error;
/// the returned weights are the ones with the best validation RMSE seen.
/// Same seed and data give bitwise identical weights.
inline MlpTrainResult mlp_train(const FeatureMatrix& train, const FeatureMatrix& validation,
                                MlpConfig cfg) {
    if (train.empty()) throw MlpError("mlp_train: empty training set");
    if (cfg.n_hidden < 1) throw MlpError("mlp_train: need at least one hidden neuron");
    if (cfg.n_outputs < 2) throw MlpError("mlp_train: need at least two outputs");
    if (cfg.n_inputs == 0) cfg.n_inputs = static_cast<int>(train.n_features);
    if (static_cast<std::size_t>(cfg.n_inputs) != train.n_features) {
        throw MlpError("mlp_train: config says " + std::to_string(cfg.n_inputs) +
                       " inputs but data has " + std::to_string(train.n_features));
    }

    MlpModel model;
    model.n_inputs = cfg.n_inputs;
    model.n_hidden = cfg.n_hidden;
    model.n_outputs = cfg.n_outputs;
    model.w1.resize(static_cast<std::size_t>(cfg.n_hidden) * cfg.n_inputs);
    model.b1.resize(static_cast<std::size_t>(cfg.n_hidden));
    model.w2.resize(static_cast<std::size_t>(cfg.n_outputs) * cfg.n_hidden);
    model.b2.resize(static_cast<std::size_t>(cfg.n_outputs));

    Rng rng(cfg.seed);
    for (auto* block : {&model.w1, &model.b1, &model.w2, &model.b2}) {
        for (auto& w : *block) w = rng.next_double(-0.5, 0.5);
    }

    // iRprop- constants
    constexpr double kEtaPlus = 1.2;
    constexpr double kEtaMinus = 0.5;
    constexpr double kDeltaInit = 0.1;
    constexpr double kDeltaMin = 1e-9;
    constexpr double kDeltaMax = 50.0;

    std::vector<double> weights;
    detail::flatten(model, weights);
    std::vector<double> grad, prev_grad(weights.size(), 0.0);
    std::vector<double> step(weights.size(), kDeltaInit);

    const FeatureMatrix& val = validation.empty() ? train : validation;
    MlpTrainResult res;
    res.best_validation_rmse = mlp_rmse(model, val);
    res.model = model;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const double loss = mlp_gradient(model, train, grad);
        if (!std::isfinite(loss)) {
            throw MlpError("mlp_train: loss diverged at epoch " + std::to_string(epoch));
        }
        if (cfg.algo == MlpConfig::Algo::Rprop) {
            for (std::size_t w = 0; w < weights.size(); ++w) {
                const double s = prev_grad[w] * grad[w];
                if (s > 0) {
                    step[w] = std::min(step[w] * kEtaPlus, kDeltaMax);
                    weights[w] -= (grad[w] > 0 ? 1.0 : (grad[w] < 0 ? -1.0 : 0.0)) * step[w];
                    prev_grad[w] = grad[w];
                } else if (s < 0) {
                    step[w] = std::max(step[w] * kEtaMinus, kDeltaMin);
                    prev_grad[w] = 0; // skip the update after a sign flip
                } else {
                    weights[w] -= (grad[w] > 0 ? 1.0 : (grad[w] < 0 ? -1.0 : 0.0)) * step[w];
                    prev_grad[w] = grad[w];
                }
            }
        } else {
            const double scale = cfg.learning_rate / static_cast<double>(train.size());
            for (std::size_t w = 0; w < weights.size(); ++w) weights[w] -= scale * grad[w];
        }
        detail::unflatten(weights, model);

        const double val_rmse = mlp_rmse(model, val);
        res.epochs_run = epoch;
        if (val_rmse < res.best_validation_rmse) {
            res.best_validation_rmse = val_rmse;
            res.best_epoch = epoch;
            res.model = model;
        }
        if (val_rmse <= cfg.desired_validation_rmse) break;
    }
    res.final_train_rmse = mlp_rmse(res.model, train);
    return res;
}

/// Percent of incorrectly classified items, the figure the tables report.
inline double mlp_test_error_pct(const MlpModel& m, const FeatureMatrix& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (mlp_predict(m, test.rows[i]) != test.labels[i]) ++wrong;
    }
    return test.empty() ? 0.0
                        : 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

} // namespace stylo
