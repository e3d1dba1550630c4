// stylo-attr: command-line harness around the stylo library.
//
// Subcommands: featurize, split, stats, train, sweep, rank, report, plus the
// five method names (knn, dtree, svm, mlp, mep) as direct training commands.
// A plain-text key=value config file can be passed with --config; the
// STYLO_DATA_ROOT environment variable locates dataset directories.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

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

namespace {

struct LexiconPaths {
    std::string prepositions;
    std::string adverbs;
    std::string conjunctions;
    std::string interjections;
};

void add_lexicon_options(CLI::App* cmd, LexiconPaths& paths, bool need_all) {
    auto* p = cmd->add_option("--prepositions", paths.prepositions, "preposition list file");
    auto* a = cmd->add_option("--adverbs", paths.adverbs, "adverb list file");
    auto* c = cmd->add_option("--conjunctions", paths.conjunctions, "conjunction list file");
    cmd->add_option("--interjections", paths.interjections, "interjection list file");
    if (need_all) {
        p->required();
        a->required();
        c->required();
    }
}

/// Lexicons in the investigation order that defines feature columns:
/// prepositions, then adverbs, then conjunctions.
std::vector<Lexicon> load_feature_lexicons(const LexiconPaths& paths, const std::string& set) {
    std::vector<Lexicon> out;
    const auto need = [&](const std::string& path, IposKind kind, const char* flag) {
        if (path.empty()) {
            throw LexiconError(std::string("feature set ") + set + " needs " + flag);
        }
        out.push_back(load_lexicon(path, kind));
    };
    if (set == "P") {
        need(paths.prepositions, IposKind::Preposition, "--prepositions");
    } else if (set == "PA") {
        need(paths.prepositions, IposKind::Preposition, "--prepositions");
        need(paths.adverbs, IposKind::Adverb, "--adverbs");
    } else if (set == "PAC") {
        need(paths.prepositions, IposKind::Preposition, "--prepositions");
        need(paths.adverbs, IposKind::Adverb, "--adverbs");
        need(paths.conjunctions, IposKind::Conjunction, "--conjunctions");
    } else if (set == "PC") {
        need(paths.prepositions, IposKind::Preposition, "--prepositions");
        need(paths.conjunctions, IposKind::Conjunction, "--conjunctions");
    } else {
        throw LexiconError("unknown feature set \"" + set + "\" (use P, PA, PAC or PC)");
    }
    return out;
}

std::string pct(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

void print_confusion(const ConfusionMatrix& cm, std::ostream& os) {
    for (int a = 0; a < cm.n_classes(); ++a) {
        for (int p = 0; p < cm.n_classes(); ++p) {
            os << std::setw(p == 0 ? 0 : 4) << cm.at(a, p);
            if (p + 1 < cm.n_classes()) os << ' ';
        }
        os << '\n';
    }
}

void print_report(const MetricsReport& r, std::ostream& os) {
    os << "overall error       " << pct(r.overall_error) << "\n"
       << "average accuracy    " << pct(r.average_accuracy) << "\n"
       << "precision (micro)   " << pct(r.precision_micro) << "\n"
       << "recall (micro)      " << pct(r.recall_micro) << "\n"
       << "f-score (micro)     " << pct(r.fscore_micro) << "\n"
       << "precision (macro)   " << pct(r.precision_macro) << "\n"
       << "recall (macro)      " << pct(r.recall_macro) << "\n"
       << "f-score (macro)     " << pct(r.fscore_macro) << "\n";
}

void append_report_csv(const fs::path& path, const std::string& dataset,
                       const std::string& method, const std::string& config,
                       const MetricsReport& r) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (fresh) {
        out << "dataset,method,config,overall_error,average_accuracy,precision_micro,"
               "recall_micro,fscore_micro,precision_macro,recall_macro,fscore_macro\n";
    }
    out << dataset << ',' << method << ',' << config << ',' << pct(r.overall_error) << ','
        << pct(r.average_accuracy) << ',' << pct(r.precision_micro) << ',' << pct(r.recall_micro)
        << ',' << pct(r.fscore_micro) << ',' << pct(r.precision_macro) << ','
        << pct(r.recall_macro) << ',' << pct(r.fscore_macro) << '\n';
}

struct TrainArgs {
    std::string train_file;
    std::string validation_file;
    std::string test_file;
    std::string report_csv;
    std::string dataset_label = "dataset";
    bool show_confusion = false;

    int k = 1;

    TreeOptions tree;
    bool no_global_prune = false;
    bool dump_tree = false;

    std::string kernel = "linear";
    double nu = 0.5;
    double gamma = 0;
    double svm_epsilon = 0.001;
    bool shrinking = false;

    int hidden = 10;
    int runs = 1;
    std::uint64_t seed_base = 1;
    std::string mlp_algo = "rprop";

    int generations = 0; // 0 keeps the profile default
    bool fast = false;
    std::string save_best;
};

SvmKernel kernel_from_string(const std::string& s) {
    if (s == "linear") return SvmKernel::Linear;
    if (s == "poly" || s == "polynomial") return SvmKernel::Polynomial;
    if (s == "rbf" || s == "radial") return SvmKernel::Rbf;
    if (s == "sigmoid") return SvmKernel::Sigmoid;
    throw SvmError("unknown kernel \"" + s + "\" (use linear|poly|rbf|sigmoid)");
}

void add_data_options(CLI::App* cmd, TrainArgs& args, bool need_validation) {
    cmd->add_option("--train", args.train_file, "training matrix file")->required();
    auto* v = cmd->add_option("--validation", args.validation_file, "validation matrix file");
    cmd->add_option("--test", args.test_file, "test matrix file")->required();
    cmd->add_option("--report", args.report_csv, "append a metrics CSV row to this file");
    cmd->add_option("--dataset-label", args.dataset_label, "dataset name used in reports");
    cmd->add_flag("--confusion", args.show_confusion, "print the confusion matrix");
    if (need_validation) v->required();
}

/// Shared epilogue: score a set of predictions against the test labels.
int finish_run(const TrainArgs& args, const std::string& method, const std::string& config,
               const FeatureMatrix& test, const std::vector<int>& predictions) {
    const ConfusionMatrix cm =
        ConfusionMatrix::from_pairs(test.labels, predictions, kNumAuthors);
    const MetricsReport r = report(cm);
    std::cout << method << " " << config << ": test error " << pct(r.overall_error) << "% ("
              << (cm.total() - cm.diagonal_sum()) << "/" << cm.total() << ")\n";
    if (args.show_confusion) print_confusion(cm, std::cout);
    if (!args.report_csv.empty()) {
        append_report_csv(args.report_csv, args.dataset_label, method, config, r);
    }
    return 0;
}

int run_knn(const TrainArgs& args) {
    const FeatureMatrix train = read_matrix(args.train_file);
    const FeatureMatrix train_full =
        args.validation_file.empty() ? train : concat(train, read_matrix(args.validation_file));
    const FeatureMatrix test = read_matrix(args.test_file);
    const KnnModel model = knn_fit(train_full, args.k);
    std::vector<int> predictions;
    for (const auto& row : test.rows) predictions.push_back(knn_predict(model, row));
    return finish_run(args, "knn", "k=" + std::to_string(args.k), test, predictions);
}

int run_dtree(const TrainArgs& args) {
    const FeatureMatrix train = read_matrix(args.train_file);
    const FeatureMatrix train_full =
        args.validation_file.empty() ? train : concat(train, read_matrix(args.validation_file));
    const FeatureMatrix test = read_matrix(args.test_file);
    TreeOptions opts = args.tree;
    opts.global_prune = !args.no_global_prune;
    const DecisionTree tree = dtree_train(train_full, opts);
    if (args.dump_tree) tree.dump(std::cout);
    std::vector<int> predictions;
    for (const auto& row : test.rows) predictions.push_back(tree.predict(row));
    std::ostringstream config;
    config << "min_cases=" << opts.min_cases << " cf=" << opts.confidence_factor
           << (opts.global_prune ? "" : " no-global-prune") << " size=" << tree.size();
    return finish_run(args, "dtree", config.str(), test, predictions);
}

int run_svm(const TrainArgs& args) {
    const FeatureMatrix train = read_matrix(args.train_file);
    const FeatureMatrix train_full =
        args.validation_file.empty() ? train : concat(train, read_matrix(args.validation_file));
    const FeatureMatrix test = read_matrix(args.test_file);
    SvmConfig cfg;
    cfg.kernel = kernel_from_string(args.kernel);
    cfg.nu = args.nu;
    cfg.gamma = args.gamma;
    cfg.epsilon = args.svm_epsilon;
    cfg.shrinking = args.shrinking;
    const SvmModel model = svm_train(train_full, cfg);
    std::vector<int> predictions;
    for (const auto& row : test.rows) predictions.push_back(svm_predict(model, row));
    std::ostringstream config;
    config << "kernel=" << args.kernel << " nu=" << args.nu;
    return finish_run(args, "svm", config.str(), test, predictions);
}

int run_mlp(const TrainArgs& args) {
    const FeatureMatrix train = read_matrix(args.train_file);
    const FeatureMatrix validation =
        args.validation_file.empty() ? FeatureMatrix{} : read_matrix(args.validation_file);
    const FeatureMatrix test = read_matrix(args.test_file);
    std::vector<double> errors;
    MlpTrainResult best_run;
    double best_error = std::numeric_limits<double>::infinity();
    for (int run = 0; run < args.runs; ++run) {
        MlpConfig cfg;
        cfg.n_hidden = args.hidden;
        cfg.seed = args.seed_base + static_cast<std::uint64_t>(run);
        cfg.algo = args.mlp_algo == "backprop" ? MlpConfig::Algo::Backprop
                                               : MlpConfig::Algo::Rprop;
        MlpTrainResult r = mlp_train(train, validation, cfg);
        const double err = mlp_test_error_pct(r.model, test);
        errors.push_back(err);
        if (err < best_error) {
            best_error = err;
            best_run = std::move(r);
        }
    }
    const RunSummary s = summarize(errors);
    std::cout << "mlp hidden=" << args.hidden << " runs=" << args.runs << ": best " << pct(s.best)
              << "% avg " << pct(s.avg) << "% stddev " << pct(s.stddev) << "\n";
    std::vector<int> predictions;
    for (const auto& row : test.rows) predictions.push_back(mlp_predict(best_run.model, row));
    return finish_run(args, "mlp", "hidden=" + std::to_string(args.hidden), test, predictions);
}

int run_mep(const TrainArgs& args) {
    const FeatureMatrix train = read_matrix(args.train_file);
    const FeatureMatrix validation =
        args.validation_file.empty() ? FeatureMatrix{} : read_matrix(args.validation_file);
    const FeatureMatrix test = read_matrix(args.test_file);
    MepParams params = args.fast ? MepParams::fast() : MepParams{};
    if (args.generations > 0) params.n_generations = args.generations;
    params.n_classes = std::max(2, n_classes_of(train));
    std::vector<double> errors;
    MepRunResult best_run;
    double best_error = std::numeric_limits<double>::infinity();
    for (int run = 0; run < args.runs; ++run) {
        MepRunResult r =
            mep_evolve(train, validation, params, args.seed_base + static_cast<std::uint64_t>(run));
        const double err = mep_test_error_pct(r.best, test);
        errors.push_back(err);
        if (err < best_error) {
            best_error = err;
            best_run = std::move(r);
        }
    }
    const RunSummary s = summarize(errors);
    std::cout << "mep runs=" << args.runs << " generations=" << params.n_generations << ": best "
              << pct(s.best) << "% avg " << pct(s.avg) << "% stddev " << pct(s.stddev) << "\n";
    if (!args.save_best.empty()) {
        std::ofstream out(args.save_best, std::ios::binary);
        mep_write(best_run.best, out);
    }
    std::vector<int> predictions;
    for (const auto& row : test.rows) predictions.push_back(mep_predict(best_run.best, row));
    return finish_run(args, "mep", "profile=" + std::to_string(params.n_subpopulations) + "x" +
                                       std::to_string(params.subpop_size) + "x" +
                                       std::to_string(params.n_generations),
                      test, predictions);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"authorship attribution over inflexible-part-of-speech frequencies"};
    app.set_config("--config", "", "key=value config file; subcommand options go under [subcommand]");
    app.require_subcommand(1);

    // ---- featurize ----------------------------------------------------
    struct {
        std::string corpus_dir;
        LexiconPaths lexicons;
        std::string feature_set = "PAC";
        std::string out_file;
        bool with_split = false;
        std::uint64_t seed = 1;
        std::string split_dir;
    } fz;
    auto* featurize_cmd =
        app.add_subcommand("featurize", "turn a corpus directory into a frequency matrix");
    featurize_cmd->add_option("--corpus", fz.corpus_dir, "corpus root directory")->required();
    add_lexicon_options(featurize_cmd, fz.lexicons, false);
    featurize_cmd->add_option("--features", fz.feature_set, "feature set: P, PA, PAC or PC");
    featurize_cmd->add_option("--out", fz.out_file, "output matrix file")->required();
    featurize_cmd->add_flag("--split", fz.with_split, "also write a 50/25/25 split");
    featurize_cmd->add_option("--seed", fz.seed, "shuffle seed for --split");
    featurize_cmd->add_option("--split-dir", fz.split_dir, "directory for the split files");

    // ---- split ---------------------------------------------------------
    struct {
        std::string matrix_file;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
    } sp;
    auto* split_cmd = app.add_subcommand("split", "shuffle and split a matrix 50/25/25");
    split_cmd->add_option("--matrix", sp.matrix_file, "input matrix file")->required();
    split_cmd->add_option("--seed", sp.seed, "shuffle seed");
    split_cmd->add_option("--out-dir", sp.out_dir, "output directory");

    // ---- stats ---------------------------------------------------------
    struct {
        std::string corpus_dir;
        LexiconPaths lexicons;
        bool csv = false;
    } st;
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics tables");
    stats_cmd->add_option("--corpus", st.corpus_dir, "corpus root directory")->required();
    add_lexicon_options(stats_cmd, st.lexicons, false);
    stats_cmd->add_flag("--csv", st.csv, "emit CSV instead of aligned text");

    // ---- method subcommands ---------------------------------------------
    TrainArgs targs;
    auto* knn_cmd = app.add_subcommand("knn", "k-nearest-neighbors classification");
    add_data_options(knn_cmd, targs, false);
    knn_cmd->add_option("--k", targs.k, "number of neighbors")->required();

    auto* dtree_cmd = app.add_subcommand("dtree", "decision-tree classification");
    add_data_options(dtree_cmd, targs, false);
    dtree_cmd->add_option("--min-cases", targs.tree.min_cases, "minimum cases per branch (1..30)")
        ->check(CLI::Range(1, 30));
    dtree_cmd->add_option("--cf", targs.tree.confidence_factor, "pruning confidence (10..100)")
        ->check(CLI::Range(10, 100));
    dtree_cmd->add_flag("--no-global-prune", targs.no_global_prune, "disable the global pass");
    dtree_cmd->add_flag("--dump-tree", targs.dump_tree, "print the tree before scoring");

    auto* svm_cmd = app.add_subcommand("svm", "nu-SVC classification");
    add_data_options(svm_cmd, targs, false);
    svm_cmd->add_option("--kernel", targs.kernel, "linear|poly|rbf|sigmoid");
    svm_cmd->add_option("--nu", targs.nu, "nu parameter in (0,1]");
    svm_cmd->add_option("--gamma", targs.gamma, "kernel gamma (default 1/n_features)");
    svm_cmd->add_option("--epsilon", targs.svm_epsilon, "termination tolerance");
    svm_cmd->add_flag("--shrinking", targs.shrinking, "enable shrinking heuristics");

    auto* mlp_cmd = app.add_subcommand("mlp", "feedforward network classification");
    add_data_options(mlp_cmd, targs, true);
    mlp_cmd->add_option("--hidden", targs.hidden, "hidden neurons (5..50)")
        ->required()
        ->check(CLI::Range(5, 50));
    mlp_cmd->add_option("--runs", targs.runs, "number of seeded runs");
    mlp_cmd->add_option("--seed-base", targs.seed_base, "seed of run 0");
    mlp_cmd->add_option("--algo", targs.mlp_algo, "rprop|backprop");

    auto* mep_cmd = app.add_subcommand("mep", "multi-expression-programming classification");
    add_data_options(mep_cmd, targs, true);
    mep_cmd->add_option("--runs", targs.runs, "number of seeded runs");
    mep_cmd->add_option("--generations", targs.generations, "override generation budget");
    mep_cmd->add_option("--seed-base", targs.seed_base, "seed of run 0");
    mep_cmd->add_flag("--fast", targs.fast, "desk-scale profile (5x100, 200 generations)");
    mep_cmd->add_option("--save-best", targs.save_best, "write the best chromosome to a file");

    // ---- train (generic dispatcher) --------------------------------------
    std::string train_method;
    auto* train_cmd = app.add_subcommand("train", "train one configuration of any method");
    add_data_options(train_cmd, targs, false);
    train_cmd->add_option("--method", train_method, "knn|dtree|svm|mlp|mep")->required();
    train_cmd->add_option("--k", targs.k, "knn: number of neighbors");
    train_cmd->add_option("--min-cases", targs.tree.min_cases, "dtree: minimum cases per branch");
    train_cmd->add_option("--cf", targs.tree.confidence_factor, "dtree: pruning confidence");
    train_cmd->add_flag("--no-global-prune", targs.no_global_prune, "dtree: no global pass");
    train_cmd->add_option("--kernel", targs.kernel, "svm: kernel");
    train_cmd->add_option("--nu", targs.nu, "svm: nu");
    train_cmd->add_option("--hidden", targs.hidden, "mlp: hidden neurons");
    train_cmd->add_option("--runs", targs.runs, "mlp/mep: seeded runs");
    train_cmd->add_option("--seed-base", targs.seed_base, "mlp/mep: seed of run 0");
    train_cmd->add_option("--generations", targs.generations, "mep: generation budget");
    train_cmd->add_flag("--fast", targs.fast, "mep: desk-scale profile");

    // ---- sweep -----------------------------------------------------------
    struct {
        std::vector<std::string> datasets;
        std::string method = "knn";
        std::string data_root;
        std::string out_dir;
        int runs = 30;
        std::uint64_t seed_base = 1;
        bool fast = false;
        bool table = false;
    } sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid over datasets");
    sweep_cmd->add_option("--dataset", sw.datasets, "dataset ids (e.g. ROST-PA-2)")->required();
    sweep_cmd->add_option("--method", sw.method, "knn|dtree|svm|mlp|mep")->required();
    sweep_cmd->add_option("--data-root", sw.data_root,
                          "dataset root (default $STYLO_DATA_ROOT or ./data)");
    sweep_cmd->add_option("--out", sw.out_dir, "output directory for CSV files")->required();
    sweep_cmd->add_option("--runs", sw.runs, "runs per stochastic cell");
    sweep_cmd->add_option("--seed-base", sw.seed_base, "seed of run 0");
    sweep_cmd->add_flag("--fast", sw.fast, "desk-scale MEP profile");
    sweep_cmd->add_flag("--table", sw.table, "print the aligned per-cell table");

    // ---- rank ------------------------------------------------------------
    struct {
        std::vector<std::string> best_files;
    } rk;
    auto* rank_cmd = app.add_subcommand("rank", "rank methods per dataset from best.csv files");
    rank_cmd->add_option("--best", rk.best_files, "best.csv files from sweeps")->required();

    // ---- report ------------------------------------------------------------
    struct {
        std::string targets_file;
        std::string outputs_file;
        std::string csv;
        std::string dataset_label = "dataset";
        std::string method_label = "method";
        std::string config_label = "config";
    } rp;
    auto* report_cmd =
        app.add_subcommand("report", "confusion matrix and metrics from label files");
    report_cmd->add_option("--targets", rp.targets_file, "actual labels, one per line")
        ->required();
    report_cmd->add_option("--outputs", rp.outputs_file, "predicted labels, one per line")
        ->required();
    report_cmd->add_option("--csv", rp.csv, "append a metrics CSV row to this file");
    report_cmd->add_option("--dataset-label", rp.dataset_label, "dataset name for the CSV row");
    report_cmd->add_option("--method-label", rp.method_label, "method name for the CSV row");
    report_cmd->add_option("--config-label", rp.config_label, "config name for the CSV row");

    for (auto* sub : app.get_subcommands({})) sub->configurable();

    CLI11_PARSE(app, argc, argv);

    try {
        if (featurize_cmd->parsed()) {
            const auto docs = load_corpus(fz.corpus_dir);
            const auto lexicons = load_feature_lexicons(fz.lexicons, fz.feature_set);
            const FeatureSet fs_set = build_feature_set(docs, lexicons, fz.feature_set);
            const FeatureMatrix m = featurize_corpus(docs, fs_set);
            if (const fs::path parent = fs::path(fz.out_file).parent_path(); !parent.empty()) {
                fs::create_directories(parent);
            }
            write_matrix(m, fz.out_file);
            std::cout << "wrote " << m.size() << " rows x " << m.n_features << " features ("
                      << fz.feature_set << ") to " << fz.out_file << "\n";
            if (fz.with_split) {
                const fs::path dir = fz.split_dir.empty() ? fs::path(".") : fs::path(fz.split_dir);
                fs::create_directories(dir);
                const Split s = split_corpus(m, fz.seed);
                write_matrix(s.train, dir / "train.txt");
                write_matrix(s.validation, dir / "validation.txt");
                write_matrix(s.test, dir / "test.txt");
                std::cout << "split " << s.train.size() << "/" << s.validation.size() << "/"
                          << s.test.size() << " into " << dir.string() << "\n";
            }
            return 0;
        }
        if (split_cmd->parsed()) {
            const FeatureMatrix m = read_matrix(sp.matrix_file);
            const Split s = split_corpus(m, sp.seed);
            fs::create_directories(sp.out_dir);
            const fs::path dir(sp.out_dir);
            write_matrix(s.train, dir / "train.txt");
            write_matrix(s.validation, dir / "validation.txt");
            write_matrix(s.test, dir / "test.txt");
            std::cout << "split " << s.train.size() << "/" << s.validation.size() << "/"
                      << s.test.size() << " (seed " << sp.seed << ") into " << sp.out_dir << "\n";
            return 0;
        }
        if (stats_cmd->parsed()) {
            const auto docs = load_corpus(st.corpus_dir);
            const auto stats = corpus_author_stats(docs);
            const char* sep = st.csv ? "," : "  ";
            std::cout << (st.csv ? "author,docs,avg_words,stddev_words,avg_unique,stddev_unique,"
                                   "avg_ratio,stddev_ratio\n"
                                 : "author  docs  avg-words  stddev  avg-unique  stddev  "
                                   "avg-ratio  stddev\n");
            for (const auto& s : stats) {
                std::cout << s.author_id << sep << s.n_docs << sep << pct(s.avg_words) << sep
                          << pct(s.stddev_words) << sep << pct(s.avg_unique) << sep
                          << pct(s.stddev_unique) << sep << pct(s.avg_ratio) << sep
                          << pct(s.stddev_ratio);
                if (s.n_excluded > 0) std::cout << sep << "excluded=" << s.n_excluded;
                if (s.degenerate_stddev) std::cout << sep << "single-document";
                std::cout << "\n";
            }
            std::vector<Lexicon> lexicons;
            const auto maybe = [&](const std::string& p, IposKind k) {
                if (!p.empty()) lexicons.push_back(load_lexicon(p, k));
            };
            maybe(st.lexicons.conjunctions, IposKind::Conjunction);
            maybe(st.lexicons.prepositions, IposKind::Preposition);
            maybe(st.lexicons.interjections, IposKind::Interjection);
            maybe(st.lexicons.adverbs, IposKind::Adverb);
            if (!lexicons.empty()) {
                std::cout << (st.csv ? "ipos,occurrences,pct_of_words,files,avg_per_file,"
                                       "list_size\n"
                                     : "\nipos  occurrences  pct-of-words  files  avg-per-file  "
                                       "list-size\n");
                for (const auto& s : ipos_occurrence_stats(docs, lexicons)) {
                    std::cout << to_string(s.kind) << sep << s.occurrences << sep
                              << pct(s.pct_of_total_words) << sep << s.files_with_hit << sep
                              << pct(s.avg_per_file) << sep << s.list_size << "\n";
                }
            }
            return 0;
        }
        if (knn_cmd->parsed()) return run_knn(targs);
        if (dtree_cmd->parsed()) return run_dtree(targs);
        if (svm_cmd->parsed()) return run_svm(targs);
        if (mlp_cmd->parsed()) return run_mlp(targs);
        if (mep_cmd->parsed()) return run_mep(targs);
        if (train_cmd->parsed()) {
            switch (method_from_string(train_method)) {
                case Method::Knn: return run_knn(targs);
                case Method::Dtree: return run_dtree(targs);
                case Method::Svm: return run_svm(targs);
                case Method::Mlp: return run_mlp(targs);
                case Method::Mep: return run_mep(targs);
            }
        }
        if (sweep_cmd->parsed()) {
            ExperimentPlan plan;
            plan.datasets = sw.datasets;
            plan.method = method_from_string(sw.method);
            plan.runs = sw.runs;
            plan.seed_base = sw.seed_base;
            plan.fast_mep = sw.fast;
            std::optional<fs::path> root;
            if (!sw.data_root.empty()) root = sw.data_root;
            const auto sweeps = run_plan(plan, root, fs::path(sw.out_dir));
            for (const auto& sweep : sweeps) {
                if (sw.table) {
                    std::cout << sweep.dataset << " " << to_string(sweep.method) << "\n"
                              << std::left << std::setw(28) << "  param" << std::right
                              << std::setw(10) << "best" << std::setw(10) << "avg"
                              << std::setw(10) << "stddev" << "\n";
                    for (const auto& cell : sweep.cells) {
                        std::cout << "  " << std::left << std::setw(26) << cell.param
                                  << std::right;
                        if (cell.ok && !cell.errors.empty()) {
                            std::cout << std::setw(10) << pct(cell.summary.best) << std::setw(10)
                                      << pct(cell.summary.avg) << std::setw(10)
                                      << pct(cell.summary.stddev);
                        } else {
                            std::cout << std::setw(30) << "skipped";
                        }
                        std::cout << "\n";
                    }
                }
                const auto& best = sweep.cells[sweep.best_cell()];
                std::cout << sweep.dataset << " " << to_string(sweep.method) << ": best "
                          << pct(best.summary.best) << "% (" << best.param << ")\n";
            }
            std::cout << "CSV written to " << sw.out_dir << "\n";
            return 0;
        }
        if (rank_cmd->parsed()) {
            std::vector<MethodBest> bests;
            for (const auto& file : rk.best_files) {
                std::ifstream in(file);
                if (!in) throw RunnerError("cannot open " + file);
                std::string line;
                std::getline(in, line); // header
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    std::istringstream ls(line);
                    std::string dataset, method, param, best;
                    std::getline(ls, dataset, ',');
                    std::getline(ls, method, ',');
                    std::getline(ls, param, ',');
                    std::getline(ls, best, ',');
                    bests.push_back({dataset, method_from_string(method), std::stod(best)});
                }
            }
            for (const auto& [dataset, entries] : rank_methods(bests)) {
                std::cout << dataset << ":";
                for (const auto& e : entries) {
                    std::cout << "  " << e.place << "." << to_string(e.method) << " "
                              << pct(e.best_error) << "%";
                }
                std::cout << "\n";
            }
            return 0;
        }
        if (report_cmd->parsed()) {
            const auto read_labels = [](const std::string& path) {
                std::ifstream in(path);
                if (!in) throw MetricsError("cannot open " + path);
                std::vector<int> labels;
                int v = 0;
                while (in >> v) labels.push_back(v);
                return labels;
            };
            const auto targets = read_labels(rp.targets_file);
            const auto outputs = read_labels(rp.outputs_file);
            const ConfusionMatrix cm = ConfusionMatrix::from_pairs(targets, outputs, kNumAuthors);
            print_confusion(cm, std::cout);
            const MetricsReport r = report(cm);
            print_report(r, std::cout);
            if (!rp.csv.empty()) {
                append_report_csv(rp.csv, rp.dataset_label, rp.method_label, rp.config_label, r);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
