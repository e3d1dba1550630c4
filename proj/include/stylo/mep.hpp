#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stylo/dataset.hpp"
#include "stylo/rng.hpp"

namespace stylo {

class MepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Multi-Expression Programming: linear chromosomes of three-address code.
// Every gene's value is a candidate program output; classes pick the gene
// that separates them best, and prediction is an argmax over those picks.

enum class MepOp : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,        // protected: |b| < 1e-12 evaluates to 1
    IfLessZero, // a < 0 ? b : c
    IfLess,     // a < b ? c : d
};

inline constexpr int kMepOpCount = 6;

inline int arity(MepOp op) {
    switch (op) {
        case MepOp::Add:
        case MepOp::Sub:
        case MepOp::Mul:
        case MepOp::Div: return 2;
        case MepOp::IfLessZero: return 3;
        case MepOp::IfLess: return 4;
    }
    return 0;
}

inline std::string_view to_string(MepOp op) {
    switch (op) {
        case MepOp::Add: return "add";
        case MepOp::Sub: return "sub";
        case MepOp::Mul: return "mul";
        case MepOp::Div: return "div";
        case MepOp::IfLessZero: return "ifltz";
        case MepOp::IfLess: return "iflt";
    }
    return "?";
}

struct MepGene {
    enum class Kind : std::uint8_t { Variable, Constant, Function };
    Kind kind = Kind::Variable;
    MepOp op = MepOp::Add;      // meaningful for Kind::Function
    std::int32_t index = 0;     // feature index or constant index
    std::array<std::int32_t, 4> args = {0, 0, 0, 0}; // gene indices, all < own position
};

struct MepChromosome {
    std::vector<MepGene> genes;
    std::vector<double> constants;
    std::vector<int> class_map;     // one output gene per class; -1 = unmapped
    double fitness = std::numeric_limits<double>::infinity(); // train misclassifications
};

/// Table of run parameters; defaults are the full experiment profile.
struct MepParams {
    int chromosome_length = 200;
    int n_subpopulations = 25;
    int subpop_size = 300;
    int n_generations = 1000;
    double crossover_probability = 0.9;
    double mutation_probability = 0.01;
    int tournament_size = 2;
    int n_constants = 5;
    double constants_min = 0.0;
    double constants_max = 1.0;
    double constants_delta = 1.0;
    double p_function = 0.4;
    double p_variable = 0.5;
    double p_constant = 0.1;
    int n_classes = 10;
    int n_threads = 0; // 0 = hardware concurrency; results never depend on it

    /// Desk-scale profile for CI runs.
    static MepParams fast() {
        MepParams p;
        p.n_subpopulations = 5;
        p.subpop_size = 100;
        p.n_generations = 200;
        return p;
    }

    void validate() const {
        if (chromosome_length < 1) throw MepError("chromosome_length must be >= 1");
        if (n_subpopulations < 1) throw MepError("need at least one subpopulation");
        if (subpop_size < 2) throw MepError("subpop_size must be >= 2");
        if (n_constants < 0) throw MepError("n_constants must be >= 0");
        const double p = p_function + p_variable + p_constant;
        if (std::fabs(p - 1.0) > 1e-9) throw MepError("gene kind probabilities must sum to 1");
    }
};

namespace detail {

inline double protect(double v) { return std::isfinite(v) ? v : 1.0; }

inline double apply_op(MepOp op, const double* v) {
    switch (op) {
        case MepOp::Add: return protect(v[0] + v[1]);
        case MepOp::Sub: return protect(v[0] - v[1]);
        case MepOp::Mul: return protect(v[0] * v[1]);
        case MepOp::Div:
            if (std::fabs(v[1]) < 1e-12) return 1.0;
            return protect(v[0] / v[1]);
        case MepOp::IfLessZero: return v[0] < 0 ? v[1] : v[2];
        case MepOp::IfLess: return v[0] < v[1] ? v[2] : v[3];
    }
    return 0;
}

} // namespace detail

/// Evaluates every gene on one input, in index order (three-address code:
/// arguments always reference earlier genes). All values are finite.
inline std::vector<double> mep_eval_chromosome(const MepChromosome& c,
                                               std::span<const double> x) {
    std::vector<double> values(c.genes.size());
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        const MepGene& gene = c.genes[g];
        switch (gene.kind) {
            case MepGene::Kind::Variable:
                values[g] = x[static_cast<std::size_t>(gene.index)];
                break;
            case MepGene::Kind::Constant:
                values[g] = c.constants[static_cast<std::size_t>(gene.index)];
                break;
            case MepGene::Kind::Function: {
                double argv[4] = {0, 0, 0, 0};
                for (int a = 0; a < arity(gene.op); ++a) {
                    argv[a] = values[static_cast<std::size_t>(gene.args[static_cast<std::size_t>(a)])];
                }
                values[g] = detail::apply_op(gene.op, argv);
                break;
            }
        }
    }
    return values;
}

/// argmax over the class-mapped gene values; ties go to the smallest label.
inline int mep_predict(const MepChromosome& c, std::span<const int> class_map,
                       std::span<const double> x) {
    const std::vector<double> values = mep_eval_chromosome(c, x);
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < class_map.size(); ++k) {
        if (class_map[k] < 0) {
            throw MepError("mep_predict: class " + std::to_string(k) + " has no mapped gene");
        }
        const double v = values[static_cast<std::size_t>(class_map[k])];
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(k);
        }
    }
    return best;
}

inline int mep_predict(const MepChromosome& c, std::span<const double> x) {
    return mep_predict(c, c.class_map, x);
}

namespace detail {

/// Gene values for a whole matrix, gene-major: values[g * n + row].
inline void mep_eval_batch(const MepChromosome& c, const FeatureMatrix& data,
                           std::vector<double>& values) {
    const std::size_t n = data.size();
    values.assign(c.genes.size() * n, 0.0);
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        double* out = &values[g * n];
        const MepGene& gene = c.genes[g];
        switch (gene.kind) {
            case MepGene::Kind::Variable:
                for (std::size_t r = 0; r < n; ++r) {
                    out[r] = data.rows[r][static_cast<std::size_t>(gene.index)];
                }
                break;
            case MepGene::Kind::Constant: {
                const double v = c.constants[static_cast<std::size_t>(gene.index)];
                for (std::size_t r = 0; r < n; ++r) out[r] = v;
                break;
            }
            case MepGene::Kind::Function: {
                const double* a0 = &values[static_cast<std::size_t>(gene.args[0]) * n];
                const double* a1 = &values[static_cast<std::size_t>(gene.args[1]) * n];
                const double* a2 = &values[static_cast<std::size_t>(gene.args[2]) * n];
                const double* a3 = &values[static_cast<std::size_t>(gene.args[3]) * n];
                for (std::size_t r = 0; r < n; ++r) {
                    const double argv[4] = {a0[r], a1[r], a2[r], a3[r]};
                    out[r] = apply_op(gene.op, argv);
                }
                break;
            }
        }
    }
}

/// Picks one output gene per class: the gene whose values separate that
/// class best, scored as the standardized gap between the class mean and
/// the rest-of-train mean. Then scores the chromosome by replaying the
/// argmax decision over the training rows.
inline void mep_assign_outputs(MepChromosome& c, const std::vector<double>& values,
                               const FeatureMatrix& train, int n_classes) {
    const std::size_t n = train.size();
    std::vector<std::size_t> class_count(static_cast<std::size_t>(n_classes), 0);
    for (int label : train.labels) ++class_count[static_cast<std::size_t>(label)];

    c.class_map.assign(static_cast<std::size_t>(n_classes), -1);
    std::vector<double> best_score(static_cast<std::size_t>(n_classes),
                                   -std::numeric_limits<double>::infinity());
    std::vector<double> class_sum(static_cast<std::size_t>(n_classes));
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        const double* v = &values[g * n];
        std::fill(class_sum.begin(), class_sum.end(), 0.0);
        double sum = 0, sum_sq = 0;
        for (std::size_t r = 0; r < n; ++r) {
            class_sum[static_cast<std::size_t>(train.labels[r])] += v[r];
            sum += v[r];
            sum_sq += v[r] * v[r];
        }
        const double mean_all = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean_all * mean_all);
        const double sd = std::sqrt(var) + 1e-12;
        for (int k = 0; k < n_classes; ++k) {
            const std::size_t nk = class_count[static_cast<std::size_t>(k)];
            if (nk == 0 || nk == n) continue;
            const double mean_k = class_sum[static_cast<std::size_t>(k)] / static_cast<double>(nk);
            const double mean_rest =
                (sum - class_sum[static_cast<std::size_t>(k)]) / static_cast<double>(n - nk);
            const double score = (mean_k - mean_rest) / sd;
            if (score > best_score[static_cast<std::size_t>(k)]) { // ties keep the lower gene
                best_score[static_cast<std::size_t>(k)] = score;
                c.class_map[static_cast<std::size_t>(k)] = static_cast<int>(g);
            }
        }
    }

    std::size_t wrong = 0;
    for (std::size_t r = 0; r < n; ++r) {
        int best = -1;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_classes; ++k) {
            const int g = c.class_map[static_cast<std::size_t>(k)];
            if (g < 0) continue;
            const double v = values[static_cast<std::size_t>(g) * n + r];
            if (v > best_value) {
                best_value = v;
                best = k;
            }
        }
        if (best != train.labels[r]) ++wrong;
    }
    c.fitness = static_cast<double>(wrong);
}

inline MepGene random_gene(Rng& rng, std::size_t position, std::size_t n_features,
                           const MepParams& p) {
    MepGene g;
    const bool has_constants = p.n_constants > 0;
    if (position == 0) {
        // first gene has nothing to reference: variable or constant only
        const double span = p.p_variable + (has_constants ? p.p_constant : 0.0);
        const double r = rng.next_double() * span;
        if (!has_constants || r < p.p_variable) {
            g.kind = MepGene::Kind::Variable;
            g.index = static_cast<std::int32_t>(rng.index(n_features));
        } else {
            g.kind = MepGene::Kind::Constant;
            g.index = static_cast<std::int32_t>(rng.index(static_cast<std::size_t>(p.n_constants)));
        }
        return g;
    }
    const double r = rng.next_double();
    if (r < p.p_function) {
        g.kind = MepGene::Kind::Function;
        g.op = static_cast<MepOp>(rng.index(kMepOpCount));
        for (auto& a : g.args) a = static_cast<std::int32_t>(rng.index(position));
    } else if (!has_constants || r < p.p_function + p.p_variable) {
        g.kind = MepGene::Kind::Variable;
        g.index = static_cast<std::int32_t>(rng.index(n_features));
    } else {
        g.kind = MepGene::Kind::Constant;
        g.index = static_cast<std::int32_t>(rng.index(static_cast<std::size_t>(p.n_constants)));
    }
    return g;
}

inline MepChromosome random_chromosome(Rng& rng, std::size_t n_features, const MepParams& p) {
    MepChromosome c;
    c.constants.resize(static_cast<std::size_t>(p.n_constants));
    for (auto& v : c.constants) v = rng.next_double(p.constants_min, p.constants_max);
    c.genes.resize(static_cast<std::size_t>(p.chromosome_length));
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        c.genes[g] = random_gene(rng, g, n_features, p);
    }
    return c;
}

inline void mutate(MepChromosome& c, Rng& rng, std::size_t n_features, const MepParams& p) {
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        if (rng.next_double() < p.mutation_probability) {
            c.genes[g] = random_gene(rng, g, n_features, p);
        }
    }
    for (auto& v : c.constants) {
        if (rng.next_double() < p.mutation_probability) {
            v += rng.next_double(-p.constants_delta, p.constants_delta); // may leave [0,1]
        }
    }
}

inline MepChromosome uniform_crossover(const MepChromosome& a, const MepChromosome& b, Rng& rng) {
    MepChromosome child = a;
    for (std::size_t g = 0; g < child.genes.size(); ++g) {
        if (rng.next_bool()) child.genes[g] = b.genes[g];
    }
    for (std::size_t k = 0; k < child.constants.size(); ++k) {
        if (rng.next_bool()) child.constants[k] = b.constants[k];
    }
    return child;
}

inline std::size_t tournament(const std::vector<MepChromosome>& pop, Rng& rng, int size) {
    std::size_t best = rng.index(pop.size());
    for (int t = 1; t < size; ++t) {
        const std::size_t r = rng.index(pop.size());
        if (pop[r].fitness < pop[best].fitness) best = r;
    }
    return best;
}

} // namespace detail

struct MepRunResult {
    MepChromosome best;     // lowest validation error among train-best improvements
    double train_error_pct = 0;
    double validation_error_pct = 0;
    double initial_best_fitness = 0; // best train fitness in the initial population
    int generations_run = 0;
};

inline double mep_test_error_pct(const MepChromosome& c, const FeatureMatrix& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (mep_predict(c, test.rows[i]) != test.labels[i]) ++wrong;
    }
    return test.empty() ? 0.0
                        : 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
}

/// Steady-state evolution in a ring of subpopulations. Each generation every
/// subpopulation breeds subpop_size offspring (tournament parents, uniform
/// crossover, per-gene mutation); an offspring replaces the subpopulation's
/// worst only when strictly better. After the generation barrier each
/// subpopulation sends a copy of its best to the next ring neighbor,
/// replacing that neighbor's worst. Each subpopulation owns a seeded stream,
/// so results are independent of worker scheduling.
inline MepRunResult mep_evolve(const FeatureMatrix& train, const FeatureMatrix& validation,
                               const MepParams& params, std::uint64_t seed) {
    params.validate();
    if (train.empty()) throw MepError("mep_evolve: empty training set");
    const std::size_t n_features = train.n_features;
    const int n_classes = params.n_classes;
    {
        std::vector<std::size_t> per_class(static_cast<std::size_t>(n_classes), 0);
        for (int label : train.labels) {
            if (label >= n_classes) {
                throw MepError("mep_evolve: label " + std::to_string(label) +
                               " outside the configured " + std::to_string(n_classes) +
                               " classes");
            }
            ++per_class[static_cast<std::size_t>(label)];
        }
        for (int k = 0; k < n_classes; ++k) {
            if (per_class[static_cast<std::size_t>(k)] == 0) {
                throw MepError("mep_evolve: class " + std::to_string(k) +
                               " has no training rows; no output gene can be mapped to it");
            }
        }
    }

    const std::size_t n_sub = static_cast<std::size_t>(params.n_subpopulations);
    std::vector<std::vector<MepChromosome>> subpops(n_sub);
    std::vector<Rng> rngs;
    rngs.reserve(n_sub);
    for (std::size_t s = 0; s < n_sub; ++s) rngs.emplace_back(mix_seed(seed, s));

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads =
        std::min<std::size_t>(params.n_threads > 0 ? static_cast<std::size_t>(params.n_threads) : hw,
                              n_sub);

    const auto parallel_over_subpops = [&](auto&& body) {
        if (n_threads <= 1) {
            std::vector<double> scratch;
            for (std::size_t s = 0; s < n_sub; ++s) body(s, scratch);
            return;
        }
        std::vector<std::thread> workers;
        for (std::size_t t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t] {
                std::vector<double> scratch;
                for (std::size_t s = t; s < n_sub; s += n_threads) body(s, scratch);
            });
        }
        for (auto& w : workers) w.join();
    };

    parallel_over_subpops([&](std::size_t s, std::vector<double>& scratch) {
        auto& pop = subpops[s];
        pop.reserve(static_cast<std::size_t>(params.subpop_size));
        for (int i = 0; i < params.subpop_size; ++i) {
            MepChromosome c = detail::random_chromosome(rngs[s], n_features, params);
            detail::mep_eval_batch(c, train, scratch);
            detail::mep_assign_outputs(c, scratch, train, n_classes);
            pop.push_back(std::move(c));
        }
    });

    const auto best_of = [](const std::vector<MepChromosome>& pop) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pop.size(); ++i) {
            if (pop[i].fitness < pop[best].fitness) best = i;
        }
        return best;
    };
    const auto worst_of = [](const std::vector<MepChromosome>& pop) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < pop.size(); ++i) {
            if (pop[i].fitness >= pop[worst].fitness) worst = i;
        }
        return worst;
    };

    MepRunResult result;
    double best_train_fitness = std::numeric_limits<double>::infinity();
    double best_validation_error = std::numeric_limits<double>::infinity();
    const FeatureMatrix& val = validation.empty() ? train : validation;

    const auto consider_candidate = [&](const MepChromosome& c) {
        if (c.fitness >= best_train_fitness) return;
        best_train_fitness = c.fitness;
        const double val_err = mep_test_error_pct(c, val);
        if (val_err < best_validation_error) {
            best_validation_error = val_err;
            result.best = c;
            result.validation_error_pct = val_err;
            result.train_error_pct =
                100.0 * c.fitness / static_cast<double>(train.size());
        }
    };

    {
        std::size_t global_best_sub = 0;
        for (std::size_t s = 1; s < n_sub; ++s) {
            if (subpops[s][best_of(subpops[s])].fitness <
                subpops[global_best_sub][best_of(subpops[global_best_sub])].fitness) {
                global_best_sub = s;
            }
        }
        const MepChromosome& first = subpops[global_best_sub][best_of(subpops[global_best_sub])];
        result.initial_best_fitness = first.fitness;
        consider_candidate(first);
    }

    for (int gen = 1; gen <= params.n_generations; ++gen) {
        parallel_over_subpops([&](std::size_t s, std::vector<double>& scratch) {
            auto& pop = subpops[s];
            Rng& rng = rngs[s];
            for (int rep = 0; rep < params.subpop_size; ++rep) {
                const std::size_t p1 = detail::tournament(pop, rng, params.tournament_size);
                const std::size_t p2 = detail::tournament(pop, rng, params.tournament_size);
                MepChromosome child;
                if (rng.next_double() < params.crossover_probability) {
                    child = detail::uniform_crossover(pop[p1], pop[p2], rng);
                } else {
                    child = pop[p1];
                }
                detail::mutate(child, rng, n_features, params);
                detail::mep_eval_batch(child, train, scratch);
                detail::mep_assign_outputs(child, scratch, train, n_classes);
                const std::size_t worst = worst_of(pop);
                if (child.fitness < pop[worst].fitness) {
                    pop[worst] = std::move(child);
                }
            }
        });

        // ring migration: one individual per generation, simultaneous
        if (n_sub > 1) {
            std::vector<MepChromosome> migrants;
            migrants.reserve(n_sub);
            for (std::size_t s = 0; s < n_sub; ++s) migrants.push_back(subpops[s][best_of(subpops[s])]);
            for (std::size_t s = 0; s < n_sub; ++s) {
                auto& neighbor = subpops[(s + 1) % n_sub];
                neighbor[worst_of(neighbor)] = migrants[s];
            }
        }

        std::size_t global_best_sub = 0;
        for (std::size_t s = 1; s < n_sub; ++s) {
            if (subpops[s][best_of(subpops[s])].fitness <
                subpops[global_best_sub][best_of(subpops[global_best_sub])].fitness) {
                global_best_sub = s;
            }
        }
        consider_candidate(subpops[global_best_sub][best_of(subpops[global_best_sub])]);
        result.generations_run = gen;
    }
    return result;
}

/// Line-oriented text form of a chromosome, for inspection and round-trips.
inline void mep_write(const MepChromosome& c, std::ostream& os) {
    os << "mep " << c.genes.size() << ' ' << c.constants.size() << ' ' << c.class_map.size()
       << '\n';
    char buf[32];
    for (double v : c.constants) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        os << "const " << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
    for (const auto& g : c.genes) {
        switch (g.kind) {
            case MepGene::Kind::Variable: os << "var " << g.index << '\n'; break;
            case MepGene::Kind::Constant: os << "cidx " << g.index << '\n'; break;
            case MepGene::Kind::Function: {
                os << to_string(g.op);
                for (int a = 0; a < arity(g.op); ++a) os << ' ' << g.args[static_cast<std::size_t>(a)];
                os << '\n';
                break;
            }
        }
    }
    os << "classmap";
    for (int k : c.class_map) os << ' ' << k;
    os << "\nfitness " << c.fitness << '\n';
}

inline MepChromosome mep_read(std::istream& is) {
    MepChromosome c;
    std::string tag;
    std::size_t n_genes = 0, n_constants = 0, n_classes = 0;
    if (!(is >> tag >> n_genes >> n_constants >> n_classes) || tag != "mep") {
        throw MepError("mep_read: bad header");
    }
    c.constants.resize(n_constants);
    for (auto& v : c.constants) {
        if (!(is >> tag >> v) || tag != "const") throw MepError("mep_read: bad constant line");
    }
    c.genes.reserve(n_genes);
    for (std::size_t g = 0; g < n_genes; ++g) {
        if (!(is >> tag)) throw MepError("mep_read: truncated gene list");
        MepGene gene;
        if (tag == "var") {
            gene.kind = MepGene::Kind::Variable;
            is >> gene.index;
        } else if (tag == "cidx") {
            gene.kind = MepGene::Kind::Constant;
            is >> gene.index;
        } else {
            gene.kind = MepGene::Kind::Function;
            bool found = false;
            for (int op = 0; op < kMepOpCount; ++op) {
                if (tag == to_string(static_cast<MepOp>(op))) {
                    gene.op = static_cast<MepOp>(op);
                    found = true;
                    break;
                }
            }
            if (!found) throw MepError("mep_read: unknown op \"" + tag + "\"");
            for (int a = 0; a < arity(gene.op); ++a) {
                is >> gene.args[static_cast<std::size_t>(a)];
                if (gene.args[static_cast<std::size_t>(a)] < 0 ||
                    gene.args[static_cast<std::size_t>(a)] >= static_cast<std::int32_t>(g)) {
                    throw MepError("mep_read: gene " + std::to_string(g) +
                                   " references a non-earlier gene");
                }
            }
        }
        c.genes.push_back(gene);
    }
    if (!(is >> tag) || tag != "classmap") throw MepError("mep_read: missing classmap");
    c.class_map.resize(n_classes);
    for (auto& k : c.class_map) is >> k;
    if (!(is >> tag >> c.fitness) || tag != "fitness") throw MepError("mep_read: missing fitness");
    return c;
}

} // namespace stylo
