#pragma once

#include "dcg/corpus.hpp"
#include "dcg/dominant_sets.hpp"
#include "dcg/evaluation.hpp"
#include "dcg/games.hpp"
#include "dcg/graph.hpp"
#include "dcg/weighting.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace dcg {

enum class Weighting { Tfidf, Lsa, Raw };
enum class Mode { StaticK, StaticNoK, Streaming, KnnBaseline };
enum class SparsifySource { Kernel, Laplacian };

std::string to_string(Weighting w);
std::string to_string(Mode m);
std::string to_string(SparsifySource s);
Weighting weighting_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);
SparsifySource sparsify_source_from_string(const std::string& s);

struct PipelineParams {
    Weighting weighting = Weighting::Tfidf;
    std::size_t k_lsa = 100;
    double min_total = 0.0;          ///< frequency filter threshold; 0 disables it
    double sigma = 1.0;              ///< kernel width for the games graph and seed extraction
    std::size_t k_nn = 0;            ///< 0 picks default_knn(n)
    double eps = -1.0;               ///< >= 0 switches to epsilon sparsification
    SparsifySource sparsify_from = SparsifySource::Kernel;
    double nok_sigma = 0.1;          ///< kernel width for over-segmentation without K
};

struct ExperimentConfig {
    PipelineParams pipeline;
    GameConfig games;
    DominantSetConfig dominant;
    Mode mode = Mode::StaticK;
    std::size_t repetitions = 50;
    std::uint64_t seed = 0;
    std::size_t n_folds = 12;
    std::optional<std::size_t> k;    ///< cluster count; defaults to the number of label classes

    static ExperimentConfig streaming_defaults();
};

struct Corpus {
    DocumentTermMatrix matrix;
    LabelSet labels;
};

struct SyntheticSpec {
    std::size_t k = 3;
    std::size_t docs_per_cluster = 100;
    std::size_t vocab_per_cluster = 60;
    double noise = 0.05;
    std::size_t tokens_per_doc = 11;
    std::uint64_t seed = 0;
};

/// Planted partition: cluster c owns vocabulary block [c*V, (c+1)*V); each document draws
/// round((1-noise)*L) tokens from its block and the rest from the whole vocabulary.
Corpus make_synthetic_corpus(const SyntheticSpec& spec);

/// Deterministic generator for repetition `rep` of an experiment seeded with `seed`.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t rep);

/// Uniform integer in [0, n) computed the same way on every standard library.
std::size_t uniform_below(std::mt19937_64& rng, std::size_t n);

FeatureMatrix build_features(const DocumentTermMatrix& m, const PipelineParams& p);

struct PipelineGraphs {
    SimilarityGraph proximity;
    SimilarityGraph kernel;
    SimilarityGraph laplacian;
    SimilarityGraph games;
};

PipelineGraphs build_graphs(const FeatureMatrix& f, const PipelineParams& p);

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0;               ///< population standard deviation
    std::vector<double> values;
};

MetricSummary summarize(std::vector<double> values);

struct RunOutcome {
    EvalReport eval;
    std::vector<int> assignment;
    std::size_t discovered_k = 0;
    std::size_t n_seeds = 0;
    std::size_t n_seed_members = 0;
    std::size_t game_iterations = 0;
    bool games_converged = false;
    std::size_t tie_count = 0;
    std::vector<std::size_t> merge_rounds; ///< no-K only: group counts through the merge rounds
};

struct StaticReport {
    Mode mode = Mode::StaticK;
    std::vector<RunOutcome> runs;
    MetricSummary ac;
    MetricSummary nmi;
    MetricSummary discovered_k;
};

/// Seeds from the first K dominant sets, remaining documents assigned by the games.
RunOutcome cluster_static_k(const Corpus& corpus, std::size_t k, const ExperimentConfig& cfg);

/// Over-segmentation by exhaustive peel-off on `seed_graph`, then rounds of games among the
/// seeds using cluster similarities measured on `merge_graph` until the grouping is stable.
MetaClustering discover_clusters(const SimilarityGraph& seed_graph, const SimilarityGraph& merge_graph,
                                 const ExperimentConfig& cfg);

RunOutcome cluster_static_nok(const Corpus& corpus, const ExperimentConfig& cfg);

StaticReport run_static(const ExperimentConfig& cfg, const Corpus& corpus);
StaticReport run_static_nok(const ExperimentConfig& cfg, const Corpus& corpus);

struct FoldOutcome {
    std::size_t fold = 0;          ///< 2..n_folds
    std::size_t n_accumulated = 0;
    std::size_t n_labeled = 0;
    std::size_t n_new = 0;
    EvalReport eval;               ///< over folds 2..fold
};

struct StreamRepetition {
    std::size_t initial_fold = 0;
    std::vector<std::vector<std::size_t>> folds;
    std::vector<FoldOutcome> per_fold;
};

struct FoldSummary {
    std::size_t fold = 0;
    MetricSummary ac;
    MetricSummary nmi;
};

struct StreamRun {
    Mode mode = Mode::Streaming;
    std::size_t n_folds = 0;
    std::uint64_t seed = 0;
    std::vector<StreamRepetition> repetitions;
    std::vector<FoldSummary> per_fold;
};

/// Splits 0..n-1 into n_folds random folds whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t n_folds, std::mt19937_64& rng);

StreamRun run_streaming(const ExperimentConfig& cfg, const Corpus& corpus);
StreamRun run_knn_baseline(const ExperimentConfig& cfg, const Corpus& corpus);

} // namespace dcg
