#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stylo {

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Class-by-class count matrix: rows are actual labels, columns predicted.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int n_classes = 10)
        : n_(n_classes), m_(static_cast<std::size_t>(n_classes) * n_classes, 0) {}

    static ConfusionMatrix from_pairs(std::span<const int> targets, std::span<const int> outputs,
                                      int n_classes = 10) {
        if (targets.size() != outputs.size()) {
            throw MetricsError("confusion: targets and outputs differ in length");
        }
        ConfusionMatrix cm(n_classes);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            cm.add(targets[i], outputs[i]);
        }
        return cm;
    }

    void add(int actual, int predicted, std::int64_t count = 1) {
        check(actual);
        check(predicted);
        m_[static_cast<std::size_t>(actual) * n_ + predicted] += count;
    }

    std::int64_t at(int actual, int predicted) const {
        check(actual);
        check(predicted);
        return m_[static_cast<std::size_t>(actual) * n_ + predicted];
    }

    int n_classes() const { return n_; }

    std::int64_t total() const {
        std::int64_t s = 0;
        for (auto v : m_) s += v;
        return s;
    }

    std::int64_t row_sum(int a) const {
        std::int64_t s = 0;
        for (int p = 0; p < n_; ++p) s += at(a, p);
        return s;
    }

    std::int64_t col_sum(int p) const {
        std::int64_t s = 0;
        for (int a = 0; a < n_; ++a) s += at(a, p);
        return s;
    }

    std::int64_t diagonal_sum() const {
        std::int64_t s = 0;
        for (int c = 0; c < n_; ++c) s += at(c, c);
        return s;
    }

private:
    void check(int c) const {
        if (c < 0 || c >= n_) {
            throw MetricsError("confusion: class " + std::to_string(c) + " outside 0-" +
                               std::to_string(n_ - 1));
        }
    }

    int n_;
    std::vector<std::int64_t> m_;
};

/// Percentages throughout, mirroring the published tables.
struct MetricsReport {
    double overall_error = 0;     // misclassified / total
    double average_accuracy = 0;  // mean over classes of (TP+TN)/N
    double precision_micro = 0;
    double recall_micro = 0;
    double fscore_micro = 0;
    double precision_macro = 0;
    double recall_macro = 0;
    double fscore_macro = 0;
};

/// Harmonic mean of precision and recall (same unit in, same unit out).
inline double fscore(double precision, double recall) {
    const double s = precision + recall;
    return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

/// Micro metrics pool TP/FP/FN over classes; macro metrics average the
/// per-class values unweighted. A class never predicted contributes
/// precision 0 to the macro average.
inline MetricsReport report(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n == 0) throw MetricsError("report: empty confusion matrix");
    const int k = cm.n_classes();
    double sum_prec = 0, sum_rec = 0, sum_acc = 0;
    std::int64_t tp_pool = 0, fp_pool = 0, fn_pool = 0;
    for (int c = 0; c < k; ++c) {
        const std::int64_t tp = cm.at(c, c);
        const std::int64_t fp = cm.col_sum(c) - tp;
        const std::int64_t fn = cm.row_sum(c) - tp;
        const std::int64_t tn = n - tp - fp - fn;
        tp_pool += tp;
        fp_pool += fp;
        fn_pool += fn;
        sum_prec += (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        sum_rec += (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        sum_acc += static_cast<double>(tp + tn) / static_cast<double>(n);
    }
    MetricsReport r;
    r.overall_error = 100.0 * static_cast<double>(n - cm.diagonal_sum()) / static_cast<double>(n);
    r.average_accuracy = 100.0 * sum_acc / k;
    r.precision_micro =
        100.0 * static_cast<double>(tp_pool) / static_cast<double>(tp_pool + fp_pool);
    r.recall_micro =
        100.0 * static_cast<double>(tp_pool) / static_cast<double>(tp_pool + fn_pool);
    r.fscore_micro = fscore(r.precision_micro, r.recall_micro);
    r.precision_macro = 100.0 * sum_prec / k;
    r.recall_macro = 100.0 * sum_rec / k;
    r.fscore_macro = fscore(r.precision_macro, r.recall_macro);
    return r;
}

namespace detail {

/// Continued-fraction evaluation of the regularized incomplete beta
/// function I_x(a,b) (Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

} // namespace detail

struct TTestResult {
    double t = 0;
    double p = 1;
    std::size_t df = 0;
    bool degenerate = false; // zero pooled variance with unequal means
};

/// Two-sample, pooled-variance (equal variance), two-tailed Student t-test.
/// p comes from the regularized incomplete beta: p = I_{df/(df+t^2)}(df/2, 1/2).
inline TTestResult t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw MetricsError("t_test: both samples need at least 2 values");
    }
    const auto mean = [](std::span<const double> s) {
        double m = 0;
        for (double x : s) m += x;
        return m / static_cast<double>(s.size());
    };
    const auto ss = [](std::span<const double> s, double m) {
        double v = 0;
        for (double x : s) v += (x - m) * (x - m);
        return v;
    };
    const double ma = mean(a);
    const double mb = mean(b);
    TTestResult r;
    r.df = a.size() + b.size() - 2;
    const double pooled_var =
        (ss(a, ma) + ss(b, mb)) / static_cast<double>(r.df);
    if (pooled_var <= 0.0) {
        if (ma == mb) {
            r.t = 0;
            r.p = 1;
        } else {
            r.t = std::numeric_limits<double>::infinity();
            r.p = 0;
            r.degenerate = true;
        }
        return r;
    }
    const double se = std::sqrt(pooled_var * (1.0 / static_cast<double>(a.size()) +
                                              1.0 / static_cast<double>(b.size())));
    r.t = (ma - mb) / se;
    const double df = static_cast<double>(r.df);
    const double x = df / (df + r.t * r.t);
    r.p = detail::incomplete_beta(df / 2.0, 0.5, x);
    return r;
}

/// Best / average / sample standard deviation over a battery of run errors.
struct RunSummary {
    double best = 0;
    double avg = 0;
    double stddev = 0;
};

inline RunSummary summarize(std::span<const double> errors) {
    if (errors.empty()) throw MetricsError("summarize: empty sample");
    RunSummary s;
    s.best = *std::min_element(errors.begin(), errors.end());
    double m = 0;
    for (double e : errors) m += e;
    m /= static_cast<double>(errors.size());
    s.avg = m;
    if (errors.size() > 1) {
        double v = 0;
        for (double e : errors) v += (e - m) * (e - m);
        s.stddev = std::sqrt(v / static_cast<double>(errors.size() - 1));
    }
    return s;
}

} // namespace stylo
