#include "dcg/errors.hpp"
#include "dcg/harness.hpp"
#include "dcg/report.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace dcg;

namespace {

Corpus small_synthetic(std::uint64_t seed, std::size_t k = 3, std::size_t docs = 20) {
    SyntheticSpec spec;
    spec.k = k;
    spec.docs_per_cluster = docs;
    spec.vocab_per_cluster = 30;
    spec.seed = seed;
    return make_synthetic_corpus(spec);
}

ExperimentConfig quick_config() {
    ExperimentConfig cfg;
    cfg.repetitions = 2;
    cfg.pipeline.k_nn = 5;
    return cfg;
}

} // namespace

TEST_CASE("folds partition the documents with sizes differing by at most one") {
    test::Rand pick(97);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = pick.between(1, 60);
        const std::size_t f = pick.between(1, n);
        auto rng = derived_rng(static_cast<std::uint64_t>(trial), 0);
        const auto folds = make_folds(n, f, rng);
        REQUIRE(folds.size() == f);
        std::vector<std::size_t> all;
        std::size_t lo = n;
        std::size_t hi = 0;
        for (const auto& fold : folds) {
            all.insert(all.end(), fold.begin(), fold.end());
            lo = std::min(lo, fold.size());
            hi = std::max(hi, fold.size());
        }
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expected(n);
        std::iota(expected.begin(), expected.end(), std::size_t{0});
        CHECK(all == expected);
        CHECK(hi - lo <= 1);
    }
    auto rng = derived_rng(0, 0);
    CHECK_THROWS_AS(make_folds(3, 4, rng), InvalidArgument);
}

TEST_CASE("derived generators depend on seed and repetition only") {
    auto a = derived_rng(5, 2);
    auto b = derived_rng(5, 2);
    auto c = derived_rng(5, 3);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    auto r = derived_rng(1, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(uniform_below(r, 7) < 7);
    }
}

TEST_CASE("synthetic corpus: noise-free documents stay inside their block") {
    SyntheticSpec spec;
    spec.k = 3;
    spec.docs_per_cluster = 10;
    spec.vocab_per_cluster = 15;
    spec.noise = 0.0;
    const auto c = make_synthetic_corpus(spec);
    CHECK(c.matrix.n_docs() == 30);
    CHECK(c.matrix.n_terms() == 45);
    const auto& e = c.matrix.entries();
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        const auto block = static_cast<Eigen::Index>(c.labels.labels[static_cast<std::size_t>(r)]);
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            CHECK(it.col() / 15 == block);
        }
    }
    CHECK(c.labels.k_true == 3);

    spec.k = 1;
    const auto one = make_synthetic_corpus(spec);
    CHECK(one.labels.k_true == 1);
    CHECK(std::all_of(one.labels.labels.begin(), one.labels.labels.end(), [](int l) { return l == 0; }));

    spec.noise = 0.2;
    spec.k = 3;
    const auto x = make_synthetic_corpus(spec);
    const auto y = make_synthetic_corpus(spec);
    CHECK(x.matrix == y.matrix);
    CHECK(x.labels.labels == y.labels.labels);
    spec.noise = 1.0;
    CHECK_THROWS_AS(make_synthetic_corpus(spec), InvalidArgument);
}

TEST_CASE("summaries use the population standard deviation") {
    const auto s = summarize({1.0, 3.0});
    CHECK(s.mean == 2.0);
    CHECK(s.sd == 1.0);
    CHECK(s.values.size() == 2);
}

TEST_CASE("static-K recovers a small planted partition and is deterministic") {
    const auto corpus = small_synthetic(1);
    const auto cfg = quick_config();
    const auto a = run_static(cfg, corpus);
    const auto b = run_static(cfg, corpus);
    CHECK(a.runs.size() == 2);
    CHECK(a.nmi.mean >= 0.9);
    CHECK(a.runs[0].assignment == b.runs[0].assignment);
    CHECK(a.runs[0].n_seeds == 3);
}

TEST_CASE("static-K with K=1 scores AC = NMI = 1") {
    const auto corpus = small_synthetic(2, 1, 15);
    auto cfg = quick_config();
    const auto r = run_static(cfg, corpus);
    CHECK(r.ac.mean == 1.0);
    CHECK(r.nmi.mean == 1.0);
}

TEST_CASE("no-K discovery on two cliques given as a prebuilt graph finds two clusters") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(10, 10);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            if (i != j && (i < 5) == (j < 5)) {
                w(i, j) = 1.0;
            }
        }
    }
    const auto g = make_graph(w, GraphKind::Kernel);
    const auto meta = discover_clusters(normalized_laplacian(g), g, ExperimentConfig{});
    CHECK(meta.discovered_k == 2);
    const std::vector<int> truth{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(evaluate(meta.assignment, truth).nmi == 1.0);
}

TEST_CASE("no-K discovery on a small planted corpus finds the planted count") {
    const auto corpus = small_synthetic(3, 3, 30);
    auto cfg = quick_config();
    cfg.repetitions = 1;
    cfg.pipeline.k_nn = 0;
    const auto r = run_static_nok(cfg, corpus);
    CHECK(r.runs[0].discovered_k == 3);
    CHECK(r.runs[0].merge_rounds.front() >= 3);
}

TEST_CASE("streaming bookkeeping: nested test sets and labeled counts") {
    const auto corpus = small_synthetic(4, 3, 12);
    auto cfg = quick_config();
    cfg.n_folds = 6;
    cfg.seed = 11;
    const auto run = run_streaming(cfg, corpus);
    REQUIRE(run.repetitions.size() == 2);
    for (const auto& rep : run.repetitions) {
        REQUIRE(rep.per_fold.size() == 5);
        for (std::size_t f = 0; f < rep.per_fold.size(); ++f) {
            const auto& fo = rep.per_fold[f];
            CHECK(fo.fold == f + 2);
            CHECK(fo.n_accumulated == fo.n_labeled + fo.n_new);
            if (f > 0) {
                CHECK(fo.n_labeled == rep.per_fold[f - 1].n_accumulated);
                CHECK(fo.eval.n > rep.per_fold[f - 1].eval.n);
            }
        }
        CHECK(rep.per_fold.back().n_accumulated == corpus.matrix.n_docs());
        CHECK(rep.per_fold.back().eval.n == corpus.matrix.n_docs() - rep.folds[rep.initial_fold].size());
    }
    CHECK(run.per_fold.size() == 5);
    CHECK(run.per_fold.front().fold == 2);

    const auto again = run_streaming(cfg, corpus);
    CHECK(again.repetitions[1].per_fold.back().eval.nmi == run.repetitions[1].per_fold.back().eval.nmi);
    CHECK(again.repetitions[1].folds == run.repetitions[1].folds);
}

TEST_CASE("streaming with two folds equals one static run with half the corpus labeled") {
    const auto corpus = small_synthetic(5, 2, 15);
    auto cfg = quick_config();
    cfg.n_folds = 2;
    cfg.repetitions = 1;
    const auto run = run_streaming(cfg, corpus);
    REQUIRE(run.repetitions[0].per_fold.size() == 1);
    const auto& rep = run.repetitions[0];

    const auto& first = rep.folds[rep.initial_fold];
    const auto& second = rep.folds[1 - rep.initial_fold];
    std::vector<std::size_t> order(first);
    order.insert(order.end(), second.begin(), second.end());
    const auto features = build_features(corpus.matrix.select_documents(order), cfg.pipeline);
    const auto graphs = build_graphs(features, cfg.pipeline);
    std::vector<int> labels(order.size(), kUnlabeled);
    for (std::size_t q = 0; q < first.size(); ++q) {
        labels[q] = corpus.labels.labels[first[q]];
    }
    const auto res = run_games(graphs.games, PlayerPartition(labels, 2), 2, cfg.games);
    std::vector<int> pred;
    std::vector<int> truth;
    for (std::size_t q = first.size(); q < order.size(); ++q) {
        pred.push_back(res.assignment[q]);
        truth.push_back(corpus.labels.labels[order[q]]);
    }
    CHECK(rep.per_fold[0].eval.nmi == evaluate(pred, truth).nmi);
    CHECK(rep.per_fold[0].eval.ac == evaluate(pred, truth).ac);
}

TEST_CASE("1-NN baseline on identical documents assigns the single class") {
    SparseCounts m(8, 3);
    for (int r = 0; r < 8; ++r) {
        m.insert(r, 0) = 2.0;
        m.insert(r, 2) = 1.0;
    }
    const std::vector<int> ids(8, 0);
    const Corpus corpus{DocumentTermMatrix(m), canonicalize_labels(ids)};
    auto cfg = quick_config();
    cfg.n_folds = 4;
    cfg.pipeline.weighting = Weighting::Raw;
    const auto run = run_knn_baseline(cfg, corpus);
    for (const auto& f : run.per_fold) {
        CHECK(f.ac.mean == 1.0);
    }
}

TEST_CASE("pipeline errors carry the failing stage") {
    SparseCounts m(4, 3);
    m.insert(0, 0) = 1.0;
    m.insert(1, 1) = 1.0;
    m.insert(2, 2) = 1.0; // document 3 is empty
    const std::vector<int> ids{0, 1, 2, 0};
    const Corpus corpus{DocumentTermMatrix(m), canonicalize_labels(ids)};
    auto cfg = quick_config();
    cfg.pipeline.weighting = Weighting::Raw;
    try {
        run_static(cfg, corpus);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "graph");
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }

    const Corpus mismatched{DocumentTermMatrix(m), canonicalize_labels(std::vector<int>{0, 1})};
    CHECK_THROWS_AS(run_static(cfg, mismatched), InvalidArgument);
    cfg.n_folds = 1;
    CHECK_THROWS_AS(run_streaming(cfg, corpus), InvalidArgument);
}

TEST_CASE("reports are byte-identical for identical configurations") {
    const auto corpus = small_synthetic(6, 3, 12);
    auto cfg = quick_config();
    cfg.n_folds = 4;
    cfg.seed = 3;
    const auto stats = corpus_stats(corpus.matrix, corpus.labels);
    const auto s1 = static_report(cfg, run_static(cfg, corpus), stats).dump(2);
    const auto s2 = static_report(cfg, run_static(cfg, corpus), stats).dump(2);
    CHECK(s1 == s2);
    const auto t1 = stream_report(cfg, run_streaming(cfg, corpus), stats).dump(2);
    const auto t2 = stream_report(cfg, run_streaming(cfg, corpus), stats).dump(2);
    CHECK(t1 == t2);

    const auto j = Json::parse(t1);
    CHECK(j.contains("conventions"));
    CHECK(j["config"]["seed"] == 3);
    CHECK(j.contains("config_hash"));
    auto other = cfg;
    other.seed = 4;
    CHECK(config_hash(cfg) != config_hash(other));
}
