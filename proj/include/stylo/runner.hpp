#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stylo/dataset.hpp"
#include "stylo/dtree.hpp"
#include "stylo/knn.hpp"
#include "stylo/mep.hpp"
#include "stylo/metrics.hpp"
#include "stylo/mlp.hpp"
#include "stylo/svm.hpp"

namespace stylo {

class RunnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { Knn, Dtree, Svm, Mlp, Mep };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::Knn: return "knn";
        case Method::Dtree: return "dtree";
        case Method::Svm: return "svm";
        case Method::Mlp: return "mlp";
        case Method::Mep: return "mep";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    if (s == "knn") return Method::Knn;
    if (s == "dtree" || s == "dt") return Method::Dtree;
    if (s == "svm") return Method::Svm;
    if (s == "mlp" || s == "ann") return Method::Mlp;
    if (s == "mep") return Method::Mep;
    throw RunnerError("unknown method: " + std::string(s));
}

/// train/validation/test file triple of one dataset representation.
struct DatasetFiles {
    std::string id;
    std::filesystem::path train;
    std::filesystem::path validation;
    std::filesystem::path test;

    bool all_present() const {
        namespace fs = std::filesystem;
        return fs::exists(train) && fs::exists(validation) && fs::exists(test);
    }
};

inline constexpr const char* kDataRootEnv = "STYLO_DATA_ROOT";

/// Dataset ids resolve to `<root>/<id>/{train,validation,test}.txt`.
/// Without an explicit root the STYLO_DATA_ROOT environment variable is used.
inline DatasetFiles resolve_dataset(const std::string& id,
                                    std::optional<std::filesystem::path> root = {}) {
    std::filesystem::path base;
    if (root) {
        base = *root;
    } else if (const char* env = std::getenv(kDataRootEnv)) {
        base = env;
    } else {
        base = "data";
    }
    DatasetFiles f;
    f.id = id;
    f.train = base / id / "train.txt";
    f.validation = base / id / "validation.txt";
    f.test = base / id / "test.txt";
    return f;
}

struct LoadedDataset {
    std::string id;
    FeatureMatrix train;      // 50%
    FeatureMatrix validation; // 25%
    FeatureMatrix test;       // 25%
    FeatureMatrix train_full; // train + validation, for methods without validation
};

inline LoadedDataset load_dataset(const DatasetFiles& files) {
    LoadedDataset d;
    d.id = files.id;
    d.train = read_matrix(files.train);
    d.validation = read_matrix(files.validation);
    d.test = read_matrix(files.test);
    d.train_full = concat(d.train, d.validation);
    return d;
}

/// One grid cell of a sweep: a parameter setting and its run errors.
struct SweepCell {
    std::string param;          // "k=8", "kernel=linear nu=0.2", "hidden=40", ...
    std::vector<double> errors; // test error %, one entry per run
    RunSummary summary;
    bool ok = true;
    std::string note;  // why a cell was skipped (e.g. infeasible nu)
    double extra = 0;  // tree size for dtree cells

    void summarize_errors() {
        if (!errors.empty()) summary = summarize(errors);
    }
};

struct SweepResult {
    std::string dataset;
    Method method = Method::Knn;
    std::vector<SweepCell> cells;

    /// Cell with the lowest best error; earlier cells win ties.
    std::size_t best_cell() const {
        std::size_t best = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!cells[i].ok || cells[i].errors.empty()) continue;
            if (best == cells.size() || cells[i].summary.best < cells[best].summary.best) {
                best = i;
            }
        }
        if (best == cells.size()) throw RunnerError("sweep has no successful cell");
        return best;
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, static_cast<std::size_t>(res.ptr - buf));
}

/// Bounded worker pool over independent grid cells. Each cell writes only
/// its own slot, so artifacts never depend on scheduling.
template <typename Fn>
void for_each_cell(std::size_t n_cells, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_workers = std::min<std::size_t>(hw, n_cells);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_cells) return;
                fn(i);
            }
        });
    }
    for (auto& t : workers) t.join();
}

} // namespace detail

/// k from 1 to k_max, one deterministic run each (the 30 "runs" of the
/// published protocol vary k with the run index).
inline SweepResult sweep_knn(const std::string& dataset, const FeatureMatrix& train_full,
                             const FeatureMatrix& test, int k_max = 30) {
    SweepResult result{dataset, Method::Knn, {}};
    for (int k = 1; k <= k_max && static_cast<std::size_t>(k) <= train_full.size(); ++k) {
        SweepCell cell;
        cell.param = "k=" + std::to_string(k);
        const KnnModel model = knn_fit(train_full, k);
        cell.errors.push_back(knn_test_error_pct(model, test));
        cell.summarize_errors();
        result.cells.push_back(std::move(cell));
    }
    return result;
}

/// min_cases from lo to hi with fixed confidence/global settings.
inline SweepResult sweep_dtree(const std::string& dataset, const FeatureMatrix& train_full,
                               const FeatureMatrix& test, TreeOptions base = {}, int lo = 1,
                               int hi = 30) {
    SweepResult result{dataset, Method::Dtree, {}};
    result.cells.resize(static_cast<std::size_t>(hi - lo + 1));
    detail::for_each_cell(result.cells.size(), [&](std::size_t i) {
        TreeOptions opts = base;
        opts.min_cases = lo + static_cast<int>(i);
        SweepCell& cell = result.cells[i];
        cell.param = "min_cases=" + std::to_string(opts.min_cases);
        const DecisionTree tree = dtree_train(train_full, opts);
        cell.errors.push_back(dtree_test_error_pct(tree, test));
        cell.extra = static_cast<double>(tree.size());
        cell.summarize_errors();
    });
    return result;
}

/// The nu grid of the published exploration: 0.001..0.009, 0.01..0.09,
/// 0.1..1.0 (28 points), per kernel. Infeasible cells are recorded, not fatal.
inline std::vector<double> svm_nu_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 1000.0);
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 100.0);
    for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
    return grid;
}

inline SweepResult sweep_svm(const std::string& dataset, const FeatureMatrix& train_full,
                             const FeatureMatrix& test,
                             std::vector<SvmKernel> kernels = {SvmKernel::Linear,
                                                               SvmKernel::Polynomial,
                                                               SvmKernel::Rbf, SvmKernel::Sigmoid},
                             std::vector<double> nu_grid = svm_nu_grid()) {
    SweepResult result{dataset, Method::Svm, {}};
    result.cells.resize(kernels.size() * nu_grid.size());
    detail::for_each_cell(result.cells.size(), [&](std::size_t i) {
        const SvmKernel kernel = kernels[i / nu_grid.size()];
        const double nu = nu_grid[i % nu_grid.size()];
        SweepCell& cell = result.cells[i];
        cell.param =
            "kernel=" + std::string(to_string(kernel)) + " nu=" + detail::fmt_double(nu);
        try {
            SvmConfig cfg;
            cfg.kernel = kernel;
            cfg.nu = nu;
            const SvmModel model = svm_train(train_full, cfg);
            cell.errors.push_back(svm_test_error_pct(model, test));
            cell.summarize_errors();
        } catch (const SvmError& e) {
            cell.ok = false;
            cell.note = e.what();
        }
    });
    return result;
}

/// Hidden-layer sizes lo..hi, `runs` seeded runs each (seed_base + run).
inline SweepResult sweep_mlp(const std::string& dataset, const FeatureMatrix& train,
                             const FeatureMatrix& validation, const FeatureMatrix& test,
                             int hidden_lo = 5, int hidden_hi = 50, int runs = 30,
                             std::uint64_t seed_base = 1) {
    SweepResult result{dataset, Method::Mlp, {}};
    result.cells.resize(static_cast<std::size_t>(hidden_hi - hidden_lo + 1));
    detail::for_each_cell(result.cells.size(), [&](std::size_t i) {
        const int hidden = hidden_lo + static_cast<int>(i);
        SweepCell& cell = result.cells[i];
        cell.param = "hidden=" + std::to_string(hidden);
        for (int run = 0; run < runs; ++run) {
            MlpConfig cfg;
            cfg.n_hidden = hidden;
            cfg.seed = seed_base + static_cast<std::uint64_t>(run);
            const MlpTrainResult trained = mlp_train(train, validation, cfg);
            cell.errors.push_back(mlp_test_error_pct(trained.model, test));
        }
        cell.summarize_errors();
    });
    return result;
}

/// Smallest class count covering every label in the matrix.
inline int n_classes_of(const FeatureMatrix& m) {
    int top = 0;
    for (int l : m.labels) top = std::max(top, l);
    return top + 1;
}

/// One cell of `runs` seeded evolutionary runs.
inline SweepResult sweep_mep(const std::string& dataset, const FeatureMatrix& train,
                             const FeatureMatrix& validation, const FeatureMatrix& test,
                             MepParams params = {}, int runs = 30, std::uint64_t seed_base = 1) {
    params.n_classes = std::max(2, n_classes_of(train));
    SweepResult result{dataset, Method::Mep, {}};
    SweepCell cell;
    cell.param = "profile=" + std::to_string(params.n_subpopulations) + "x" +
                 std::to_string(params.subpop_size) + "x" + std::to_string(params.n_generations);
    for (int run = 0; run < runs; ++run) {
        const MepRunResult r =
            mep_evolve(train, validation, params, seed_base + static_cast<std::uint64_t>(run));
        cell.errors.push_back(mep_test_error_pct(r.best, test));
    }
    cell.summarize_errors();
    result.cells.push_back(std::move(cell));
    return result;
}

/// A battery over datasets for one method.
struct ExperimentPlan {
    std::vector<std::string> datasets;
    Method method = Method::Knn;
    int runs = 30;
    std::uint64_t seed_base = 1;

    int k_max = 30;
    int hidden_lo = 5, hidden_hi = 50;
    int min_cases_lo = 1, min_cases_hi = 30;
    TreeOptions tree_base;
    std::vector<SvmKernel> kernels = {SvmKernel::Linear, SvmKernel::Polynomial, SvmKernel::Rbf,
                                      SvmKernel::Sigmoid};
    bool fast_mep = false; // desk-scale MEP profile for CI

    void validate() const {
        if (datasets.empty()) throw RunnerError("plan has no datasets");
        if (runs < 1) throw RunnerError("plan needs runs >= 1");
        if (hidden_lo < 5 || hidden_hi > 50 || hidden_lo > hidden_hi) {
            throw RunnerError("hidden-neuron grid must stay within [5,50]");
        }
        if (k_max < 1 || k_max > 30) throw RunnerError("k grid must stay within [1,30]");
        if (min_cases_lo < 1 || min_cases_hi > 30 || min_cases_lo > min_cases_hi) {
            throw RunnerError("min_cases grid must stay within [1,30]");
        }
    }
};

inline SweepResult run_sweep_on(const ExperimentPlan& plan, const LoadedDataset& data) {
    switch (plan.method) {
        case Method::Knn:
            return sweep_knn(data.id, data.train_full, data.test, plan.k_max);
        case Method::Dtree:
            return sweep_dtree(data.id, data.train_full, data.test, plan.tree_base,
                               plan.min_cases_lo, plan.min_cases_hi);
        case Method::Svm:
            return sweep_svm(data.id, data.train_full, data.test, plan.kernels);
        case Method::Mlp:
            return sweep_mlp(data.id, data.train, data.validation, data.test, plan.hidden_lo,
                             plan.hidden_hi, plan.runs, plan.seed_base);
        case Method::Mep: {
            const MepParams params = plan.fast_mep ? MepParams::fast() : MepParams{};
            return sweep_mep(data.id, data.train, data.validation, data.test, params, plan.runs,
                             plan.seed_base);
        }
    }
    throw RunnerError("unreachable");
}

inline void write_sweep_csv(std::span<const SweepResult> sweeps,
                            const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream runs(out_dir / "runs.csv", std::ios::binary);
    runs << "dataset,method,param,run,error_pct\n";
    std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
    summary << "dataset,method,param,best,avg,stddev,note,extra\n";
    std::ofstream best(out_dir / "best.csv", std::ios::binary);
    best << "dataset,method,param,best,avg,stddev\n";
    for (const auto& sweep : sweeps) {
        for (const auto& cell : sweep.cells) {
            for (std::size_t run = 0; run < cell.errors.size(); ++run) {
                runs << sweep.dataset << ',' << to_string(sweep.method) << ',' << cell.param << ','
                     << run << ',' << detail::fmt_double(cell.errors[run]) << '\n';
            }
            summary << sweep.dataset << ',' << to_string(sweep.method) << ',' << cell.param << ',';
            if (cell.ok && !cell.errors.empty()) {
                summary << detail::fmt_double(cell.summary.best) << ','
                        << detail::fmt_double(cell.summary.avg) << ','
                        << detail::fmt_double(cell.summary.stddev);
            } else {
                summary << ",,";
            }
            summary << ',' << cell.note << ',' << detail::fmt_double(cell.extra) << '\n';
        }
        const auto& top = sweep.cells[sweep.best_cell()];
        best << sweep.dataset << ',' << to_string(sweep.method) << ',' << top.param << ','
             << detail::fmt_double(top.summary.best) << ',' << detail::fmt_double(top.summary.avg)
             << ',' << detail::fmt_double(top.summary.stddev) << '\n';
    }
}

/// Runs every (dataset, grid cell); outputs are canonically ordered, so a
/// re-run with the same seeds writes byte-identical files.
inline std::vector<SweepResult> run_plan(const ExperimentPlan& plan,
                                         const std::optional<std::filesystem::path>& data_root = {},
                                         const std::optional<std::filesystem::path>& out_dir = {}) {
    plan.validate();
    std::vector<SweepResult> sweeps;
    for (const auto& id : plan.datasets) {
        const DatasetFiles files = resolve_dataset(id, data_root);
        if (!files.all_present()) {
            throw RunnerError("dataset " + id + " not found under its data root (expected " +
                              files.train.string() + ")");
        }
        sweeps.push_back(run_sweep_on(plan, load_dataset(files)));
    }
    if (out_dir) write_sweep_csv(sweeps, *out_dir);
    return sweeps;
}

/// One method's best error on one dataset, for the cross-method top.
struct MethodBest {
    std::string dataset;
    Method method = Method::Knn;
    double best_error = 0;
};

struct RankedEntry {
    Method method = Method::Knn;
    double best_error = 0;
    int place = 0; // 1-based; equal errors share a place
};

/// Per dataset, methods sorted ascending by error; ties share their place
/// and the following method skips it (1,1,3 ordering).
inline std::map<std::string, std::vector<RankedEntry>> rank_methods(
    std::span<const MethodBest> bests) {
    std::map<std::string, std::vector<RankedEntry>> out;
    std::map<std::string, std::vector<MethodBest>> grouped;
    for (const auto& b : bests) grouped[b.dataset].push_back(b);
    for (auto& [dataset, entries] : grouped) {
        std::sort(entries.begin(), entries.end(), [](const MethodBest& a, const MethodBest& b) {
            if (a.best_error != b.best_error) return a.best_error < b.best_error;
            return to_string(a.method) < to_string(b.method);
        });
        std::vector<RankedEntry>& ranked = out[dataset];
        for (std::size_t i = 0; i < entries.size(); ++i) {
            RankedEntry e;
            e.method = entries[i].method;
            e.best_error = entries[i].best_error;
            if (i > 0 && entries[i].best_error == entries[i - 1].best_error) {
                e.place = ranked.back().place;
            } else {
                e.place = static_cast<int>(i) + 1;
            }
            ranked.push_back(e);
        }
    }
    return out;
}

} // namespace stylo
