// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one PASS/FAIL line per check. Dataset-dependent criteria are
// skipped (not failed) when the published split files are not installed
// under STYLO_DATA_ROOT.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "expected_counts.hpp"
#include "stylo/corpus.hpp"
#include "stylo/dataset.hpp"
#include "stylo/dtree.hpp"
#include "stylo/knn.hpp"
#include "stylo/lexicon.hpp"
#include "stylo/mep.hpp"
#include "stylo/metrics.hpp"
#include "stylo/mlp.hpp"
#include "stylo/runner.hpp"
#include "stylo/svm.hpp"

namespace fs = std::filesystem;
using namespace stylo;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label, const std::string& detail = "") {
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.empty() ? "" : " — ",
                detail.c_str());
    if (!ok) ++g_failures;
}

void skip(const std::string& label, const std::string& why) {
    std::printf("SKIP %s — %s\n", label.c_str(), why.c_str());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ConfusionMatrix published_confusion() {
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

// ---------------------------------------------------------------- criterion 1
void criterion_metrics_oracle() {
    const auto t0 = Clock::now();
    const MetricsReport r = report(published_confusion());
    check(std::fabs(r.overall_error - 100.0 * 20.0 / 98.0) < 1e-9 &&
              std::fabs(r.overall_error - 20.408) < 0.001,
          "[1] overall error from the published confusion matrix is 20.408%",
          "got " + fmt(r.overall_error));
    check(std::fabs(r.precision_macro - 79.9398) < 0.01,
          "[1] macro precision matches the published 79.9398 within 0.01",
          "got " + fmt(r.precision_macro));
    const double f = fscore(79.9398, 96.8525);
    check(std::fabs(f - 87.587) < 0.001,
          "[1] macro F-score from the published macro P and R is 87.587 within 0.001",
          "got " + fmt(f));
    check(seconds_since(t0) < 1.0, "[1] metrics oracle runs in under one second",
          fmt(seconds_since(t0)) + "s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_split_arithmetic() {
    const std::map<int, int> counts = {{0, 28}, {1, 44}, {2, 27}, {3, 34}, {4, 43},
                                       {5, 40}, {6, 32}, {7, 40}, {8, 60}, {9, 52}};
    FeatureMatrix m;
    int id = 0;
    for (const auto& [author, n] : counts) {
        for (int i = 0; i < n; ++i) m.add_row({static_cast<double>(id++) / 512.0}, author);
    }
    const Split s = split_corpus(m, 20260810);
    const std::map<int, std::array<int, 3>> expected = {
        {0, {14, 7, 7}},   {1, {22, 11, 11}}, {2, {15, 6, 6}},  {3, {18, 8, 8}},
        {4, {23, 10, 10}}, {5, {20, 10, 10}}, {6, {16, 8, 8}},  {7, {20, 10, 10}},
        {8, {30, 15, 15}}, {9, {26, 13, 13}},
    };
    const auto count_of = [](const FeatureMatrix& part, int author) {
        int c = 0;
        for (int l : part.labels) c += (l == author) ? 1 : 0;
        return c;
    };
    bool all_ok = true;
    std::string bad;
    for (const auto& [author, sizes] : expected) {
        const int tr = count_of(s.train, author);
        const int va = count_of(s.validation, author);
        const int te = count_of(s.test, author);
        if (tr != sizes[0] || va != sizes[1] || te != sizes[2]) {
            all_ok = false;
            bad += " author" + std::to_string(author);
        }
    }
    check(all_ok, "[2] split arithmetic matches every published per-author row", bad);
    check(s.train.size() == 204 && s.validation.size() == 98 && s.test.size() == 98,
          "[2] split totals are 204/98/98",
          std::to_string(s.train.size()) + "/" + std::to_string(s.validation.size()) + "/" +
              std::to_string(s.test.size()));
}

// ---------------------------------------------------------------- criterion 3
struct PublishedRow {
    const char* dataset;
    int knn_k;
    int knn_errors; // misclassified out of 98
    double svm_nu;
    int svm_errors;
    int dt_cases;
    int dt_errors;
};

// best-configuration columns of the published per-method tables
constexpr PublishedRow kPublished[] = {
    {"ROST-P-1", 8, 52, 0.6, 43, 8, 50},   {"ROST-P-2", 23, 53, 0.6, 54, 3, 50},
    {"ROST-P-3", 11, 48, 0.6, 43, 1, 56},  {"ROST-PA-1", 1, 31, 0.5, 31, 12, 31},
    {"ROST-PA-2", 1, 32, 0.5, 26, 1, 26},  {"ROST-PA-3", 1, 35, 0.4, 28, 3, 29},
    {"ROST-PAC-1", 2, 33, 0.2, 23, 2, 28}, {"ROST-PAC-2", 1, 29, 0.5, 24, 14, 24},
    {"ROST-PAC-3", 4, 29, 0.5, 26, 14, 26},
};

bool datasets_present(std::vector<std::string> ids) {
    for (const auto& id : ids) {
        if (!resolve_dataset(id).all_present()) return false;
    }
    return true;
}

void criterion_deterministic_reproduction() {
    std::vector<std::string> ids;
    for (const auto& row : kPublished) ids.push_back(row.dataset);
    if (!datasets_present(ids)) {
        skip("[3] k-NN / linear nu-SVC / decision-tree reproduction",
             std::string("published ROST split files not found under $") + kDataRootEnv);
        return;
    }
    for (const auto& row : kPublished) {
        const LoadedDataset data = load_dataset(resolve_dataset(row.dataset));
        const auto errors_of = [&](double pct) {
            return static_cast<int>(std::lround(pct / 100.0 * static_cast<double>(data.test.size())));
        };

        const KnnModel knn = knn_fit(data.train_full, row.knn_k);
        const int knn_err = errors_of(knn_test_error_pct(knn, data.test));
        check(std::abs(knn_err - row.knn_errors) <= 1,
              std::string("[3] k-NN ") + row.dataset + " k=" + std::to_string(row.knn_k) +
                  " within 1 misclassification of the published result",
              std::to_string(knn_err) + " vs " + std::to_string(row.knn_errors));

        SvmConfig svm_cfg;
        svm_cfg.kernel = SvmKernel::Linear;
        svm_cfg.nu = row.svm_nu;
        const SvmModel svm = svm_train(data.train_full, svm_cfg);
        const int svm_err = errors_of(svm_test_error_pct(svm, data.test));
        check(std::abs(svm_err - row.svm_errors) <= 2,
              std::string("[3] linear nu-SVC ") + row.dataset + " nu=" + fmt(row.svm_nu) +
                  " within 2 misclassifications of the published result",
              std::to_string(svm_err) + " vs " + std::to_string(row.svm_errors));

        TreeOptions opts;
        opts.min_cases = row.dt_cases;
        const DecisionTree tree = dtree_train(data.train_full, opts);
        const int dt_err = errors_of(dtree_test_error_pct(tree, data.test));
        check(std::abs(dt_err - row.dt_errors) <= 3,
              std::string("[3] decision tree ") + row.dataset + " min_cases=" +
                  std::to_string(row.dt_cases) +
                  " within 3 misclassifications of the published result",
              std::to_string(dt_err) + " vs " + std::to_string(row.dt_errors));
    }
}

// ---------------------------------------------------------------- criterion 4
void criterion_stochastic_bands() {
    const std::vector<std::string> pac = {"ROST-PAC-1", "ROST-PAC-2", "ROST-PAC-3"};
    if (!datasets_present(pac) || !resolve_dataset("ROST-PA-2").all_present()) {
        skip("[4] 30-run MLP and MEP stochastic bands",
             std::string("published ROST split files not found under $") + kDataRootEnv);
        return;
    }
    for (const auto& id : pac) {
        const LoadedDataset data = load_dataset(resolve_dataset(id));
        const SweepResult sweep =
            sweep_mlp(id, data.train, data.validation, data.test, 5, 50, 30, 1);
        const auto& best = sweep.cells[sweep.best_cell()];
        double best_overall = best.summary.best;
        for (const auto& cell : sweep.cells) {
            if (cell.ok) best_overall = std::min(best_overall, cell.summary.best);
        }
        check(best_overall <= 30.0,
              "[4] MLP " + id + " best error over the hidden-layer sweep is at most 30%",
              fmt(best_overall));
        check(best.summary.avg >= 36.93 - 8.0 && best.summary.avg <= 38.16 + 8.0,
              "[4] MLP " + id + " best-cell average lies within 8 points of the published band",
              fmt(best.summary.avg));
    }
    const LoadedDataset pa2 = load_dataset(resolve_dataset("ROST-PA-2"));
    const SweepResult mep =
        sweep_mep("ROST-PA-2", pa2.train, pa2.validation, pa2.test, MepParams{}, 30, 1);
    check(mep.cells[0].summary.best <= 27.0,
          "[4] MEP ROST-PA-2 (full profile, 30 runs) best error is at most 27%",
          fmt(mep.cells[0].summary.best));
}

// ---------------------------------------------------------------- criterion 5
int knn_oracle(const FeatureMatrix& train, std::span<const double> x, int k) {
    struct Entry {
        double dist;
        int label;
        std::size_t idx;
    };
    std::vector<Entry> all;
    for (std::size_t i = 0; i < train.size(); ++i) {
        all.push_back({std::sqrt(squared_distance(train.rows[i], x)), train.labels[i], i});
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.label != b.label) return a.label < b.label;
        return a.idx < b.idx;
    });
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[all[static_cast<std::size_t>(i)].label];
    int best_label = -1, best_count = -1;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best_label = label;
            best_count = count;
        }
    }
    return best_label;
}

double mep_oracle_eval(const MepChromosome& c, std::size_t g, std::span<const double> x) {
    const MepGene& gene = c.genes[g];
    if (gene.kind == MepGene::Kind::Variable) return x[static_cast<std::size_t>(gene.index)];
    if (gene.kind == MepGene::Kind::Constant) return c.constants[static_cast<std::size_t>(gene.index)];
    const auto arg = [&](int i) {
        return mep_oracle_eval(c, static_cast<std::size_t>(gene.args[static_cast<std::size_t>(i)]), x);
    };
    const auto guard = [](double v) { return std::isfinite(v) ? v : 1.0; };
    switch (gene.op) {
        case MepOp::Add: return guard(arg(0) + arg(1));
        case MepOp::Sub: return guard(arg(0) - arg(1));
        case MepOp::Mul: return guard(arg(0) * arg(1));
        case MepOp::Div: {
            const double b = arg(1);
            if (std::fabs(b) < 1e-12) return 1.0;
            return guard(arg(0) / b);
        }
        case MepOp::IfLessZero: return arg(0) < 0 ? arg(1) : arg(2);
        case MepOp::IfLess: return arg(0) < arg(1) ? arg(2) : arg(3);
    }
    return 0;
}

void criterion_property_suites() {
    const auto t0 = Clock::now();
    Rng rng(8080);

    // k-NN against the brute-force oracle: 200 fixtures, k = 1..10
    bool knn_ok = true;
    for (int fixture = 0; fixture < 200 && knn_ok; ++fixture) {
        FeatureMatrix train;
        const std::size_t n = 12 + rng.index(28);
        for (std::size_t i = 0; i < n; ++i) {
            train.add_row({rng.next_double(), rng.next_double(), rng.next_double()},
                          static_cast<int>(rng.index(10)));
        }
        const std::vector<double> x = {rng.next_double(), rng.next_double(), rng.next_double()};
        for (int k = 1; k <= 10; ++k) {
            if (knn_predict(knn_fit(train, k), x) != knn_oracle(train, x, k)) {
                knn_ok = false;
                break;
            }
        }
    }
    check(knn_ok, "[5] k-NN equals the brute-force oracle on 200 fixtures, k in 1..10");

    // MLP gradients vs central finite differences, relative error 1e-4
    bool grad_ok = true;
    double worst_rel = 0;
    for (int fixture = 0; fixture < 3; ++fixture) {
        MlpModel model;
        model.n_inputs = 5;
        model.n_hidden = 3;
        model.n_outputs = 2;
        model.w1.resize(15);
        model.b1.resize(3);
        model.w2.resize(6);
        model.b2.resize(2);
        for (auto* block : {&model.w1, &model.b1, &model.w2, &model.b2}) {
            for (auto& w : *block) w = rng.next_double(-1.0, 1.0);
        }
        FeatureMatrix data;
        for (int r = 0; r < 10; ++r) {
            std::vector<double> row(5);
            for (auto& v : row) v = rng.next_double();
            data.add_row(std::move(row), static_cast<int>(rng.index(2)));
        }
        std::vector<double> grad;
        mlp_gradient(model, data, grad);
        std::vector<double> flat;
        detail::flatten(model, flat);
        const double eps = 1e-6;
        for (std::size_t w = 0; w < flat.size(); ++w) {
            MlpModel plus = model;
            MlpModel minus = model;
            std::vector<double> fp = flat, fm = flat;
            fp[w] += eps;
            fm[w] -= eps;
            detail::unflatten(fp, plus);
            detail::unflatten(fm, minus);
            std::vector<double> tmp;
            const double fd =
                (mlp_gradient(plus, data, tmp) - mlp_gradient(minus, data, tmp)) / (2 * eps);
            const double rel =
                std::fabs(fd - grad[w]) / std::max({std::fabs(fd), std::fabs(grad[w]), 1e-8});
            worst_rel = std::max(worst_rel, rel);
            if (rel >= 1e-4) grad_ok = false;
        }
    }
    check(grad_ok, "[5] MLP gradients match central finite differences within 1e-4",
          "worst relative error " + fmt(worst_rel));

    // gain ratio against a plain-definition entropy oracle on small fixtures
    bool gain_ok = true;
    for (int fixture = 0; fixture < 30 && gain_ok; ++fixture) {
        FeatureMatrix m;
        const std::size_t n = 6 + rng.index(15);
        for (std::size_t i = 0; i < n; ++i) {
            m.add_row({rng.next_double(), rng.next_double()}, static_cast<int>(rng.index(3)));
        }
        // oracle: exhaustive best gain-ratio split
        double best_ratio = -1;
        int best_attr = -1;
        double best_thr = 0;
        const auto entropy_of = [](const std::vector<int>& labels) {
            std::map<int, int> c;
            for (int l : labels) ++c[l];
            double h = 0;
            for (const auto& [lab, k] : c) {
                const double p = static_cast<double>(k) / static_cast<double>(labels.size());
                h -= p * std::log2(p);
            }
            return h;
        };
        const double h = entropy_of(m.labels);
        for (std::size_t attr = 0; attr < 2; ++attr) {
            std::vector<double> sorted;
            for (const auto& row : m.rows) sorted.push_back(row[attr]);
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                if (sorted[i] == sorted[i + 1]) continue;
                const double thr = (sorted[i] + sorted[i + 1]) / 2;
                std::vector<int> left, right;
                for (std::size_t r = 0; r < m.size(); ++r) {
                    (m.rows[r][attr] <= thr ? left : right).push_back(m.labels[r]);
                }
                const double pl = static_cast<double>(left.size()) / static_cast<double>(n);
                const double pr = 1 - pl;
                const double gain = h - pl * entropy_of(left) - pr * entropy_of(right);
                if (gain <= 1e-12) continue;
                const double si = -pl * std::log2(pl) - pr * std::log2(pr);
                if (gain / si > best_ratio + 1e-12) {
                    best_ratio = gain / si;
                    best_attr = static_cast<int>(attr);
                    best_thr = thr;
                }
            }
        }
        TreeOptions opts;
        opts.min_cases = 1;
        opts.confidence_factor = 100; // keep the root split visible
        const DecisionTree t = dtree_train(m, opts);
        if (best_attr >= 0 && !t.nodes[0].leaf) {
            if (t.nodes[0].attribute != best_attr ||
                std::fabs(t.nodes[0].threshold - best_thr) > 1e-12) {
                gain_ok = false;
            }
        }
    }
    check(gain_ok, "[5] decision-tree splits match the entropy/gain-ratio oracle");

    // raising min_cases monotonically shrinks trees
    bool mono_ok = true;
    for (int fixture = 0; fixture < 10 && mono_ok; ++fixture) {
        FeatureMatrix m;
        const std::size_t n = 50 + rng.index(30);
        for (std::size_t i = 0; i < n; ++i) {
            int label = static_cast<int>(rng.index(4));
            std::vector<double> row = {0.2 * label + 0.15 * rng.next_double(), rng.next_double()};
            if (rng.next_double() < 0.1) label = static_cast<int>(rng.index(4));
            m.add_row(std::move(row), label);
        }
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (const int cases : {1, 2, 4, 8, 15, 25}) {
            TreeOptions opts;
            opts.min_cases = cases;
            const std::size_t size = dtree_train(m, opts).size();
            if (size > prev) mono_ok = false;
            prev = size;
        }
    }
    check(mono_ok, "[5] raising min_cases monotonically shrinks trees");

    // nu-SVC: separable fixture trains clean; nu-property within 0.05
    {
        FeatureMatrix sep;
        for (int i = 0; i < 20; ++i) {
            sep.add_row({0.1 + 0.1 * rng.next_double(), 0.1 + 0.1 * rng.next_double()}, 0);
            sep.add_row({0.8 + 0.1 * rng.next_double(), 0.8 + 0.1 * rng.next_double()}, 1);
        }
        SvmConfig cfg;
        cfg.nu = 0.1;
        const SvmModel model = svm_train(sep, cfg);
        check(svm_test_error_pct(model, sep) == 0.0,
              "[5] nu-SVC reaches zero training error on a separable fixture");

        FeatureMatrix overlap;
        for (int i = 0; i < 60; ++i) {
            if (i % 2 == 0) {
                overlap.add_row({0.2 + 0.25 * rng.next_double(), 0.2 + 0.25 * rng.next_double()}, 0);
            } else {
                overlap.add_row({0.4 + 0.25 * rng.next_double(), 0.4 + 0.25 * rng.next_double()}, 1);
            }
        }
        bool nu_ok = true;
        std::string nu_detail;
        for (const double nu : {0.2, 0.4, 0.6}) {
            SvmConfig c2;
            c2.nu = nu;
            const SvmModel m2 = svm_train(overlap, c2);
            const auto& machine = m2.machines[0];
            std::size_t margin_errors = 0;
            for (std::size_t i = 0; i < overlap.size(); ++i) {
                const double y = overlap.labels[i] == machine.class_a ? 1.0 : -1.0;
                if (y * svm_decision_value(m2, machine, overlap.rows[i]) < 1.0 - 1e-3) {
                    ++margin_errors;
                }
            }
            const double fm = static_cast<double>(margin_errors) / static_cast<double>(overlap.size());
            const double fsv = static_cast<double>(machine.support_vectors.size()) /
                               static_cast<double>(machine.n_train);
            if (!(fm <= nu + 0.05 && nu <= fsv + 0.05)) {
                nu_ok = false;
                nu_detail = "nu=" + fmt(nu) + " margin=" + fmt(fm) + " sv=" + fmt(fsv);
            }
        }
        check(nu_ok, "[5] nu bounds margin errors below and support vectors above (tol 0.05)",
              nu_detail);
    }

    // MEP gene evaluation vs the recursive oracle: 100 chromosomes x 100 inputs
    {
        MepParams params;
        params.chromosome_length = 50;
        bool mep_ok = true;
        for (int chrom = 0; chrom < 100 && mep_ok; ++chrom) {
            const MepChromosome c = detail::random_chromosome(rng, 4, params);
            for (int q = 0; q < 100 && mep_ok; ++q) {
                const std::vector<double> x = {rng.next_double(), rng.next_double(),
                                               rng.next_double(), rng.next_double()};
                const auto values = mep_eval_chromosome(c, x);
                for (std::size_t g = 0; g < c.genes.size(); ++g) {
                    if (values[g] != mep_oracle_eval(c, g, x)) {
                        mep_ok = false;
                        break;
                    }
                }
            }
        }
        check(mep_ok, "[5] MEP gene evaluation equals the recursive expression oracle (100x100)");
    }

    // t-test: published-statistics fixture lands near the published p-value
    {
        const auto make = [](double mean, double sd) {
            std::vector<double> v(30);
            const double d = sd * std::sqrt(29.0 / 30.0);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 == 0) ? mean + d : mean - d;
            return v;
        };
        const TTestResult r = t_test(make(36.93, 4.80), make(34.89, 4.58));
        check(std::fabs(r.p - 0.107) < 0.015,
              "[5] t-test on samples matching the published 30-run statistics gives p near 0.107",
              "p=" + fmt(r.p));
        const std::vector<double> same = {3.0, 4.0, 5.0};
        check(t_test(same, same).p == 1.0, "[5] t-test on identical samples gives p = 1");
    }

    const double elapsed = seconds_since(t0);
    check(elapsed < 60.0, "[5] property suites finish in under 60 seconds", fmt(elapsed) + "s");
}

// ---------------------------------------------------------------- criterion 6
void criterion_featurization_contract() {
    const fs::path data_dir = STYLO_TEST_DATA_DIR;
    const std::vector<Lexicon> lexicons = {
        load_lexicon(data_dir / "lexicons" / "prepositions.txt", IposKind::Preposition),
        load_lexicon(data_dir / "lexicons" / "adverbs.txt", IposKind::Adverb),
        load_lexicon(data_dir / "lexicons" / "conjunctions.txt", IposKind::Conjunction),
    };
    const std::vector<Document> corpus = load_corpus(data_dir / "corpus");
    check(corpus.size() == expected::kNumDocs, "[6] bundled corpus has all 20 documents",
          std::to_string(corpus.size()));

    const FeatureSet pac = build_feature_set(corpus, lexicons, "PAC");
    bool columns_ok = pac.size() == expected::kPacColumns.size();
    for (std::size_t i = 0; columns_ok && i < pac.size(); ++i) {
        columns_ok = pac.columns[i].second == expected::kPacColumns[i];
    }
    check(columns_ok, "[6] PAC feature set has exactly the attested columns, in order",
          std::to_string(pac.size()) + " columns");

    const FeatureSet p_only =
        build_feature_set(corpus, std::span<const Lexicon>(lexicons.data(), 1), "P");
    bool p_ok = p_only.size() == expected::kPColumns.size();
    for (std::size_t i = 0; p_ok && i < p_only.size(); ++i) {
        p_ok = p_only.columns[i].second == expected::kPColumns[i];
    }
    check(p_ok, "[6] preposition-only feature set prunes to the attested list");

    // pruning removes exactly the unattested words, nothing else
    bool pruned_ok = true;
    for (const auto& lex : lexicons) {
        for (const auto& word : lex.words) {
            const bool in_columns = pac.index.count(word) > 0;
            const bool listed_unattested =
                std::find(expected::kUnattested.begin(), expected::kUnattested.end(), word) !=
                expected::kUnattested.end();
            if (in_columns == listed_unattested) pruned_ok = false;
        }
    }
    check(pruned_ok, "[6] pruning drops exactly the unattested lexicon words");

    bool counts_ok = true;
    std::string bad;
    for (const auto& doc : corpus) {
        const expected::DocCounts* row = nullptr;
        for (const auto& e : expected::kDocs) {
            if (e.author_id == doc.author_id && e.title == doc.title) {
                row = &e;
                break;
            }
        }
        if (!row) {
            counts_ok = false;
            bad = "missing " + doc.title;
            break;
        }
        if (static_cast<int>(doc.word_count) != row->word_count ||
            static_cast<int>(doc.unique_word_count) != row->unique_count) {
            counts_ok = false;
            bad = doc.title + " word/unique counts diverge from the hand tally";
            break;
        }
        const std::vector<double> v = featurize(doc, pac);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double hand =
                static_cast<double>(row->counts[i]) / static_cast<double>(row->word_count);
            if (v[i] != hand) {
                counts_ok = false;
                bad = doc.title + " column " + std::string(expected::kPacColumns[i]);
                break;
            }
        }
        if (!counts_ok) break;
    }
    check(counts_ok, "[6] featurize matches the hand-counted occurrences exactly", bad);
}

// ---------------------------------------------------------------- criterion 7
void criterion_determinism() {
    const fs::path data_dir = STYLO_TEST_DATA_DIR;
    fs::path tmp = fs::temp_directory_path() / "stylo_acceptance_determinism";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    // featurize + split the bundled corpus, twice, byte-compare everything
    const std::vector<Lexicon> lexicons = {
        load_lexicon(data_dir / "lexicons" / "prepositions.txt", IposKind::Preposition),
        load_lexicon(data_dir / "lexicons" / "adverbs.txt", IposKind::Adverb),
        load_lexicon(data_dir / "lexicons" / "conjunctions.txt", IposKind::Conjunction),
    };
    const std::vector<Document> corpus = load_corpus(data_dir / "corpus");
    const FeatureSet pac = build_feature_set(corpus, lexicons, "PAC");
    const FeatureMatrix matrix = featurize_corpus(corpus, pac);

    const auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };

    bool same = true;
    for (int round = 0; round < 2; ++round) {
        const fs::path dir = tmp / ("round" + std::to_string(round));
        const fs::path toy = dir / "data" / "toy";
        fs::create_directories(toy);
        write_matrix(matrix, dir / "matrix.txt");
        const Split s = split_corpus(matrix, 42);
        write_matrix(s.train, toy / "train.txt");
        write_matrix(s.validation, toy / "validation.txt");
        write_matrix(s.test, toy / "test.txt");

        ExperimentPlan plan;
        plan.datasets = {"toy"};
        plan.method = Method::Knn;
        plan.k_max = 5;
        run_plan(plan, dir / "data", dir / "knn_out");

        ExperimentPlan mlp_plan = plan;
        mlp_plan.method = Method::Mlp;
        mlp_plan.hidden_lo = 5;
        mlp_plan.hidden_hi = 6;
        mlp_plan.runs = 2;
        mlp_plan.seed_base = 7;
        run_plan(mlp_plan, dir / "data", dir / "mlp_out");
    }
    for (const char* f : {"matrix.txt", "data/toy/train.txt", "data/toy/validation.txt",
                          "data/toy/test.txt", "knn_out/runs.csv", "knn_out/summary.csv",
                          "knn_out/best.csv", "mlp_out/runs.csv", "mlp_out/summary.csv",
                          "mlp_out/best.csv"}) {
        if (read_bytes(tmp / "round0" / f) != read_bytes(tmp / "round1" / f)) {
            same = false;
            check(false, std::string("[7] byte-identical re-run output: ") + f);
        }
    }
    if (same) check(true, "[7] identical seeds and inputs give byte-identical output files");
    fs::remove_all(tmp);
}

} // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    try {
        criterion_metrics_oracle();
        criterion_split_arithmetic();
        criterion_deterministic_reproduction();
        criterion_stochastic_bands();
        criterion_property_suites();
        criterion_featurization_contract();
        criterion_determinism();
    } catch (const std::exception& e) {
        check(false, "unexpected exception", e.what());
    }
    std::printf("----------------\n%s (%d failure%s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
