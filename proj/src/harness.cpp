#include "dcg/harness.hpp"

#include "dcg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dcg {

namespace {

template <typename Fn>
auto in_stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e.what());
    }
}

std::size_t resolve_k(const ExperimentConfig& cfg, const Corpus& corpus) {
    const std::size_t k = cfg.k.value_or(static_cast<std::size_t>(corpus.labels.k_true));
    if (k < 1) {
        throw InvalidArgument("cluster count must be >= 1");
    }
    return k;
}

void check_corpus(const Corpus& corpus) {
    if (corpus.labels.size() != corpus.matrix.n_docs()) {
        throw InvalidArgument("corpus has " + std::to_string(corpus.matrix.n_docs()) + " documents but " +
                              std::to_string(corpus.labels.size()) + " labels");
    }
}

SimilarityGraph sparsify(const SimilarityGraph& source, const PipelineParams& p) {
    if (p.eps >= 0.0) {
        return epsilon_sparsify(source, p.eps);
    }
    const std::size_t n = source.size();
    if (n < 2) {
        return source;
    }
    const std::size_t k = p.k_nn == 0 ? default_knn(n) : std::min(p.k_nn, n - 1);
    return knn_sparsify(source, k);
}

SimilarityGraph games_graph(const FeatureMatrix& f, const PipelineParams& p) {
    const auto w = cosine_proximity(f);
    const auto s = gaussian_kernel(w, p.sigma);
    if (p.sparsify_from == SparsifySource::Laplacian) {
        return sparsify(normalized_laplacian(s), p);
    }
    return sparsify(s, p);
}

RunOutcome finish(const Corpus& corpus, std::vector<int> assignment) {
    RunOutcome out;
    out.eval = in_stage("evaluation", [&] { return evaluate(assignment, corpus.labels.labels); });
    out.assignment = std::move(assignment);
    return out;
}

std::vector<int> gather(const std::vector<int>& values, const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(values[i]);
    }
    return out;
}

StreamRun stream_impl(const ExperimentConfig& cfg, const Corpus& corpus, bool use_games) {
    check_corpus(corpus);
    const std::size_t n = corpus.matrix.n_docs();
    if (cfg.n_folds < 2) {
        throw InvalidArgument("streaming needs at least two folds");
    }
    if (cfg.n_folds > n) {
        throw InvalidArgument("streaming: " + std::to_string(cfg.n_folds) + " folds for " + std::to_string(n) +
                              " documents leaves empty folds");
    }
    if (cfg.repetitions < 1) {
        throw InvalidArgument("repetitions must be >= 1");
    }
    const std::size_t k = resolve_k(cfg, corpus);
    const auto& truth = corpus.labels.labels;
    for (int l : truth) {
        if (l < 0 || static_cast<std::size_t>(l) >= k) {
            throw InvalidArgument("streaming: ground-truth class " + std::to_string(l) + " outside 0.." +
                                  std::to_string(k - 1));
        }
    }

    StreamRun run;
    run.mode = use_games ? Mode::Streaming : Mode::KnnBaseline;
    run.n_folds = cfg.n_folds;
    run.seed = cfg.seed;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        auto rng = derived_rng(cfg.seed, rep);
        StreamRepetition r;
        r.folds = make_folds(n, cfg.n_folds, rng);
        r.initial_fold = uniform_below(rng, cfg.n_folds);
        std::vector<std::size_t> order{r.initial_fold};
        for (std::size_t f = 0; f < cfg.n_folds; ++f) {
            if (f != r.initial_fold) {
                order.push_back(f);
            }
        }

        std::vector<int> assigned(n, kUnlabeled);
        std::vector<std::size_t> accumulated = r.folds[r.initial_fold];
        for (std::size_t d : accumulated) {
            assigned[d] = truth[d];
        }
        std::vector<std::size_t> test;
        for (std::size_t step = 1; step < order.size(); ++step) {
            const auto& fresh = r.folds[order[step]];
            const std::size_t n_prev = accumulated.size();
            accumulated.insert(accumulated.end(), fresh.begin(), fresh.end());

            const auto sub = corpus.matrix.select_documents(accumulated);
            const auto features = in_stage("weighting", [&] { return build_features(sub, cfg.pipeline); });
            std::vector<int> fresh_labels(fresh.size(), 0);
            if (use_games) {
                const auto g = in_stage("graph", [&] { return games_graph(features, cfg.pipeline); });
                std::vector<int> labels(accumulated.size(), kUnlabeled);
                for (std::size_t q = 0; q < n_prev; ++q) {
                    labels[q] = assigned[accumulated[q]];
                }
                const auto res = in_stage("games", [&] {
                    return run_games(g, PlayerPartition(std::move(labels), k), k, cfg.games);
                });
                for (std::size_t q = 0; q < fresh.size(); ++q) {
                    fresh_labels[q] = res.assignment[n_prev + q];
                }
            } else {
                const auto w = in_stage("graph", [&] { return cosine_proximity(features); });
                for (std::size_t q = 0; q < fresh.size(); ++q) {
                    const auto row = static_cast<Eigen::Index>(n_prev + q);
                    Eigen::Index best = 0;
                    w.weights.row(row).head(static_cast<Eigen::Index>(n_prev)).minCoeff(&best);
                    fresh_labels[q] = assigned[accumulated[static_cast<std::size_t>(best)]];
                }
            }
            for (std::size_t q = 0; q < fresh.size(); ++q) {
                assigned[fresh[q]] = fresh_labels[q];
            }
            test.insert(test.end(), fresh.begin(), fresh.end());

            FoldOutcome fo;
            fo.fold = step + 1;
            fo.n_accumulated = accumulated.size();
            fo.n_labeled = n_prev;
            fo.n_new = fresh.size();
            fo.eval = in_stage("evaluation", [&] { return evaluate(gather(assigned, test), gather(truth, test)); });
            r.per_fold.push_back(std::move(fo));
        }
        run.repetitions.push_back(std::move(r));
    }

    for (std::size_t f = 0; f + 1 < cfg.n_folds; ++f) {
        std::vector<double> ac;
        std::vector<double> nm;
        for (const auto& r : run.repetitions) {
            ac.push_back(r.per_fold[f].eval.ac);
            nm.push_back(r.per_fold[f].eval.nmi);
        }
        run.per_fold.push_back(FoldSummary{f + 2, summarize(std::move(ac)), summarize(std::move(nm))});
    }
    return run;
}

} // namespace

std::string to_string(Weighting w) {
    switch (w) {
    case Weighting::Tfidf:
        return "tfidf";
    case Weighting::Lsa:
        return "lsa";
    case Weighting::Raw:
        return "raw";
    }
    return "tfidf";
}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::StaticK:
        return "static-k";
    case Mode::StaticNoK:
        return "static-nok";
    case Mode::Streaming:
        return "streaming";
    case Mode::KnnBaseline:
        return "knn-baseline";
    }
    return "static-k";
}

std::string to_string(SparsifySource s) {
    return s == SparsifySource::Kernel ? "kernel" : "laplacian";
}

Weighting weighting_from_string(const std::string& s) {
    for (auto w : {Weighting::Tfidf, Weighting::Lsa, Weighting::Raw}) {
        if (to_string(w) == s) {
            return w;
        }
    }
    throw InvalidArgument("unknown weighting `" + s + "`");
}

Mode mode_from_string(const std::string& s) {
    for (auto m : {Mode::StaticK, Mode::StaticNoK, Mode::Streaming, Mode::KnnBaseline}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw InvalidArgument("unknown mode `" + s + "`");
}

SparsifySource sparsify_source_from_string(const std::string& s) {
    if (s == "kernel") {
        return SparsifySource::Kernel;
    }
    if (s == "laplacian") {
        return SparsifySource::Laplacian;
    }
    throw InvalidArgument("unknown sparsification source `" + s + "`");
}

ExperimentConfig ExperimentConfig::streaming_defaults() {
    ExperimentConfig cfg;
    cfg.mode = Mode::Streaming;
    cfg.repetitions = 15;
    cfg.n_folds = 12;
    return cfg;
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("uniform_below: empty range");
    }
    // Rejection sampling keeps the draw unbiased; std distributions differ between libraries.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = 0;
    do {
        v = rng();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
}

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.k < 1 || spec.docs_per_cluster < 1 || spec.vocab_per_cluster < 1 || spec.tokens_per_doc < 1) {
        throw InvalidArgument("synthetic corpus: counts must be >= 1");
    }
    if (!(spec.noise >= 0.0 && spec.noise < 1.0)) {
        throw InvalidArgument("synthetic corpus: noise must lie in [0, 1)");
    }
    auto rng = derived_rng(spec.seed, 0);
    const std::size_t vocab = spec.k * spec.vocab_per_cluster;
    const auto n_noise = static_cast<std::size_t>(std::lround(spec.noise * static_cast<double>(spec.tokens_per_doc)));
    const std::size_t n_block = spec.tokens_per_doc - n_noise;

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<int> labels;
    std::size_t doc = 0;
    for (std::size_t c = 0; c < spec.k; ++c) {
        for (std::size_t d = 0; d < spec.docs_per_cluster; ++d, ++doc) {
            for (std::size_t t = 0; t < n_block; ++t) {
                const std::size_t term = c * spec.vocab_per_cluster + uniform_below(rng, spec.vocab_per_cluster);
                triplets.emplace_back(static_cast<int>(doc), static_cast<int>(term), 1.0);
            }
            for (std::size_t t = 0; t < n_noise; ++t) {
                triplets.emplace_back(static_cast<int>(doc), static_cast<int>(uniform_below(rng, vocab)), 1.0);
            }
            labels.push_back(static_cast<int>(c));
        }
    }
    SparseCounts m(static_cast<Eigen::Index>(doc), static_cast<Eigen::Index>(vocab));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return Corpus{DocumentTermMatrix(std::move(m)), canonicalize_labels(labels)};
}

FeatureMatrix build_features(const DocumentTermMatrix& m, const PipelineParams& p) {
    const DocumentTermMatrix* source = &m;
    std::optional<FilteredCorpus> filtered;
    if (p.min_total >= 1.0) {
        filtered = frequency_filter(m, p.min_total);
        source = &filtered->matrix;
    }
    switch (p.weighting) {
    case Weighting::Raw:
        return raw_features(*source);
    case Weighting::Tfidf:
        return tfidf(*source);
    case Weighting::Lsa: {
        const auto weighted = tfidf(*source);
        const std::size_t k = std::min({p.k_lsa, weighted.n_docs(), weighted.n_dims()});
        return lsa_project(weighted, k);
    }
    }
    return tfidf(*source);
}

PipelineGraphs build_graphs(const FeatureMatrix& f, const PipelineParams& p) {
    PipelineGraphs g;
    g.proximity = cosine_proximity(f);
    g.kernel = gaussian_kernel(g.proximity, p.sigma);
    g.laplacian = normalized_laplacian(g.kernel);
    g.games = sparsify(p.sparsify_from == SparsifySource::Laplacian ? g.laplacian : g.kernel, p);
    return g;
}

MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    if (values.empty()) {
        return s;
    }
    const auto n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = std::sqrt(ss / n);
    s.values = std::move(values);
    return s;
}

RunOutcome cluster_static_k(const Corpus& corpus, std::size_t k, const ExperimentConfig& cfg) {
    check_corpus(corpus);
    const auto features = in_stage("weighting", [&] { return build_features(corpus.matrix, cfg.pipeline); });
    const auto graphs = in_stage("graph", [&] { return build_graphs(features, cfg.pipeline); });
    const auto seeds = in_stage("dominant-sets", [&] {
        return peel_off(graphs.laplacian, StopRule::first_k(k), cfg.dominant);
    });
    std::vector<int> labels(corpus.matrix.n_docs(), kUnlabeled);
    std::size_t members = 0;
    for (std::size_t c = 0; c < seeds.clusters.size(); ++c) {
        for (std::size_t d : seeds.clusters[c].members) {
            labels[d] = static_cast<int>(c);
            ++members;
        }
    }
    const auto res = in_stage("games", [&] {
        return run_games(graphs.games, PlayerPartition(std::move(labels), k), k, cfg.games);
    });
    RunOutcome out = finish(corpus, res.assignment);
    out.discovered_k = k;
    out.n_seeds = seeds.clusters.size();
    out.n_seed_members = members;
    out.game_iterations = res.iterations;
    out.games_converged = res.converged;
    out.tie_count = res.tie_count;
    return out;
}

MetaClustering discover_clusters(const SimilarityGraph& seed_graph, const SimilarityGraph& merge_graph,
                                 const ExperimentConfig& cfg) {
    const auto seeds = in_stage("dominant-sets", [&] {
        return peel_off(seed_graph, StopRule::exhaustive(), cfg.dominant);
    });
    return in_stage("games", [&] { return merge_until_stable(seeds, merge_graph, cfg.games); });
}

RunOutcome cluster_static_nok(const Corpus& corpus, const ExperimentConfig& cfg) {
    check_corpus(corpus);
    const auto features = in_stage("weighting", [&] { return build_features(corpus.matrix, cfg.pipeline); });
    struct NokGraphs {
        SimilarityGraph seed;
        SimilarityGraph merge;
    };
    const auto graphs = in_stage("graph", [&] {
        const auto w = cosine_proximity(features);
        return NokGraphs{normalized_laplacian(gaussian_kernel(w, cfg.pipeline.nok_sigma)),
                         games_graph(features, cfg.pipeline)};
    });
    const auto meta = discover_clusters(graphs.seed, graphs.merge, cfg);
    RunOutcome out = finish(corpus, meta.assignment);
    out.discovered_k = meta.discovered_k;
    out.n_seeds = meta.round_sizes.front();
    out.merge_rounds = meta.round_sizes;
    out.n_seed_members = corpus.matrix.n_docs();
    out.game_iterations = meta.games.iterations;
    out.games_converged = meta.games.converged;
    out.tie_count = meta.games.tie_count;
    return out;
}

namespace {

StaticReport aggregate(Mode mode, std::vector<RunOutcome> runs) {
    StaticReport rep;
    rep.mode = mode;
    std::vector<double> ac;
    std::vector<double> nm;
    std::vector<double> kk;
    for (const auto& r : runs) {
        ac.push_back(r.eval.ac);
        nm.push_back(r.eval.nmi);
        kk.push_back(static_cast<double>(r.discovered_k));
    }
    rep.ac = summarize(std::move(ac));
    rep.nmi = summarize(std::move(nm));
    rep.discovered_k = summarize(std::move(kk));
    rep.runs = std::move(runs);
    return rep;
}

} // namespace

StaticReport run_static(const ExperimentConfig& cfg, const Corpus& corpus) {
    if (cfg.repetitions < 1) {
        throw InvalidArgument("repetitions must be >= 1");
    }
    const std::size_t k = resolve_k(cfg, corpus);
    // The static pipeline has no random component, so every repetition reproduces the first run.
    std::vector<RunOutcome> runs(cfg.repetitions, cluster_static_k(corpus, k, cfg));
    return aggregate(Mode::StaticK, std::move(runs));
}

StaticReport run_static_nok(const ExperimentConfig& cfg, const Corpus& corpus) {
    if (cfg.repetitions < 1) {
        throw InvalidArgument("repetitions must be >= 1");
    }
    std::vector<RunOutcome> runs(cfg.repetitions, cluster_static_nok(corpus, cfg));
    return aggregate(Mode::StaticNoK, std::move(runs));
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t n_folds, std::mt19937_64& rng) {
    if (n_folds < 1 || n_folds > n) {
        throw InvalidArgument("make_folds: need 1 <= n_folds <= n");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
    }
    std::vector<std::vector<std::size_t>> folds(n_folds);
    for (std::size_t f = 0; f < n_folds; ++f) {
        const std::size_t lo = f * n / n_folds;
        const std::size_t hi = (f + 1) * n / n_folds;
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo), perm.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    return folds;
}

StreamRun run_streaming(const ExperimentConfig& cfg, const Corpus& corpus) {
    return stream_impl(cfg, corpus, true);
}

StreamRun run_knn_baseline(const ExperimentConfig& cfg, const Corpus& corpus) {
    return stream_impl(cfg, corpus, false);
}

} // namespace dcg
