#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "stylo/metrics.hpp"
#include "stylo/rng.hpp"

using namespace stylo;
using Catch::Approx;

namespace {

// Published test-set confusion matrix of the best evolutionary run
// (rows actual, columns predicted).
ConfusionMatrix published_matrix() {
    const int m[10][10] = {
        {6, 0, 0, 0, 0, 0, 0, 0, 0, 1},  {0, 4, 0, 3, 1, 0, 1, 0, 0, 2},
        {0, 0, 6, 0, 0, 0, 0, 0, 0, 0},  {0, 1, 1, 6, 0, 0, 0, 0, 0, 0},
        {1, 1, 0, 0, 6, 0, 0, 0, 1, 1},  {0, 0, 0, 0, 0, 10, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 8, 0, 0, 0},  {0, 1, 0, 0, 1, 0, 0, 8, 0, 0},
        {0, 1, 0, 0, 0, 0, 1, 0, 12, 1}, {0, 0, 0, 0, 0, 0, 0, 0, 1, 12},
    };
    ConfusionMatrix cm(10);
    for (int a = 0; a < 10; ++a) {
        for (int p = 0; p < 10; ++p) cm.add(a, p, m[a][p]);
    }
    return cm;
}

} // namespace

TEST_CASE("confusion counts actual/predicted pairs") {
    const std::vector<int> targets = {0, 1, 1, 2};
    const std::vector<int> outputs = {0, 1, 2, 2};
    const ConfusionMatrix cm = ConfusionMatrix::from_pairs(targets, outputs, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(1, 1) == 1);
    CHECK(cm.at(1, 2) == 1);
    CHECK(cm.at(2, 2) == 1);
    CHECK(cm.total() == 4);
}

TEST_CASE("confusion: perfect classifier gives a diagonal matrix") {
    const std::vector<int> targets = {3, 1, 4, 1, 5};
    const ConfusionMatrix cm = ConfusionMatrix::from_pairs(targets, targets);
    CHECK(cm.diagonal_sum() == 5);
    CHECK(cm.total() == 5);
}

TEST_CASE("confusion rejects length mismatch and bad labels") {
    const std::vector<int> a = {0, 1};
    const std::vector<int> b = {0};
    CHECK_THROWS_AS(ConfusionMatrix::from_pairs(a, b), MetricsError);
    const std::vector<int> bad = {10, 0};
    const std::vector<int> ok = {0, 0};
    CHECK_THROWS_AS(ConfusionMatrix::from_pairs(bad, ok), MetricsError);
}

TEST_CASE("published confusion matrix has the documented shape") {
    const ConfusionMatrix cm = published_matrix();
    CHECK(cm.total() == 98);
    const std::array<int, 10> diag = {6, 4, 6, 6, 6, 10, 8, 8, 12, 12};
    for (int c = 0; c < 10; ++c) CHECK(cm.at(c, c) == diag[static_cast<std::size_t>(c)]);
    CHECK(cm.diagonal_sum() == 78);
    const std::array<int, 10> rows = {7, 11, 6, 8, 10, 10, 8, 10, 15, 13};
    for (int c = 0; c < 10; ++c) CHECK(cm.row_sum(c) == rows[static_cast<std::size_t>(c)]);
}

TEST_CASE("report on the published matrix reproduces the derivable entries") {
    const MetricsReport r = report(published_matrix());
    CHECK(r.overall_error == Approx(100.0 * 20.0 / 98.0).margin(1e-12)); // 20.408%
    CHECK(r.precision_macro == Approx(79.93977591036415).margin(1e-9));
    CHECK(r.recall_macro == Approx(80.93856143856144).margin(1e-9));
    CHECK(r.average_accuracy == Approx(95.91836734693878).margin(1e-9));
    // micro identity for single-label multiclass
    CHECK(r.precision_micro == Approx(100.0 * 78.0 / 98.0).margin(1e-12));
    CHECK(r.recall_micro == Approx(r.precision_micro).margin(1e-12));
    CHECK(r.fscore_micro == Approx(r.precision_micro).margin(1e-12));
}

TEST_CASE("macro F-score is the harmonic mean of macro precision and recall") {
    const MetricsReport r = report(published_matrix());
    CHECK(r.fscore_macro == Approx(fscore(r.precision_macro, r.recall_macro)).margin(1e-12));
    // the published macro P and R combine to the published macro F
    CHECK(fscore(79.9398, 96.8525) == Approx(87.58717975273811).margin(1e-9));
}

TEST_CASE("report: identity matrix with the published row sums scores 100 everywhere") {
    ConfusionMatrix cm(10);
    const std::array<int, 10> rows = {7, 11, 6, 8, 10, 10, 8, 10, 15, 13};
    for (int c = 0; c < 10; ++c) cm.add(c, c, rows[static_cast<std::size_t>(c)]);
    const MetricsReport r = report(cm);
    CHECK(r.overall_error == Approx(0.0));
    CHECK(r.average_accuracy == Approx(100.0));
    CHECK(r.precision_micro == Approx(100.0));
    CHECK(r.precision_macro == Approx(100.0));
    CHECK(r.recall_macro == Approx(100.0));
    CHECK(r.fscore_macro == Approx(100.0));
}

TEST_CASE("report is invariant under simultaneous row/column permutation") {
    const ConfusionMatrix cm = published_matrix();
    Rng rng(3);
    std::vector<int> perm(10);
    for (int i = 0; i < 10; ++i) perm[static_cast<std::size_t>(i)] = i;
    shuffle(perm, rng);
    ConfusionMatrix permuted(10);
    for (int a = 0; a < 10; ++a) {
        for (int p = 0; p < 10; ++p) {
            permuted.add(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(p)],
                         cm.at(a, p));
        }
    }
    const MetricsReport r1 = report(cm);
    const MetricsReport r2 = report(permuted);
    CHECK(r1.overall_error == Approx(r2.overall_error).margin(1e-12));
    CHECK(r1.average_accuracy == Approx(r2.average_accuracy).margin(1e-12));
    CHECK(r1.precision_macro == Approx(r2.precision_macro).margin(1e-12));
    CHECK(r1.recall_macro == Approx(r2.recall_macro).margin(1e-12));
    CHECK(r1.fscore_macro == Approx(r2.fscore_macro).margin(1e-12));
    CHECK(r1.precision_micro == Approx(r2.precision_micro).margin(1e-12));
}

TEST_CASE("report rejects the empty matrix") {
    CHECK_THROWS_AS(report(ConfusionMatrix(10)), MetricsError);
}

TEST_CASE("t_test: identical samples give t = 0, p = 1") {
    const std::vector<double> a = {3.0, 4.0, 5.0, 6.0};
    const TTestResult r = t_test(a, a);
    CHECK(r.t == Approx(0.0).margin(1e-15));
    CHECK(r.p == Approx(1.0).margin(1e-12));
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("t_test matches a high-precision oracle on the documented fixture") {
    // frozen with an independent arbitrary-precision implementation
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> b = {1.0, 2.0, 3.0001};
    const TTestResult r = t_test(a, b);
    CHECK(r.df == 4);
    CHECK(r.p == Approx(0.9999693821436882).margin(1e-9));
}

TEST_CASE("t_test: constant unequal samples are degenerate with p = 0") {
    const std::vector<double> a = {1.0, 1.0, 1.0};
    const std::vector<double> b = {2.0, 2.0, 2.0};
    const TTestResult r = t_test(a, b);
    CHECK(r.degenerate);
    CHECK(r.p == 0.0);
}

TEST_CASE("t_test on 30-run samples built from the published summary statistics") {
    // two-point samples with exactly the published means and sample stddevs
    const auto make = [](double mean, double sd) {
        std::vector<double> v(30);
        const double d = sd * std::sqrt(29.0 / 30.0);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 == 0) ? mean + d : mean - d;
        return v;
    };
    const auto ann = make(36.93, 4.80);
    const auto mep = make(34.89, 4.58);
    const TTestResult r = t_test(ann, mep);
    CHECK(r.df == 58);
    CHECK(r.t == Approx(1.6841607235678386).margin(1e-9));
    CHECK(r.p == Approx(0.09752551309070077).margin(1e-9));
}

TEST_CASE("t_test needs two values per sample") {
    const std::vector<double> one = {1.0};
    const std::vector<double> two = {1.0, 2.0};
    CHECK_THROWS_AS(t_test(one, two), MetricsError);
}

TEST_CASE("summarize: constant and two-point samples") {
    const std::vector<double> c = {10.0, 10.0, 10.0};
    const RunSummary s1 = summarize(c);
    CHECK(s1.best == Approx(10.0));
    CHECK(s1.avg == Approx(10.0));
    CHECK(s1.stddev == Approx(0.0));

    const std::vector<double> d = {20.0, 30.0};
    const RunSummary s2 = summarize(d);
    CHECK(s2.best == Approx(20.0));
    CHECK(s2.avg == Approx(25.0));
    CHECK(s2.stddev == Approx(7.0710678118654755).margin(1e-12));
    CHECK(s2.best <= s2.avg);
}
