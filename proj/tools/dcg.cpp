// Command-line front end: synth, prep, cluster, stream, eval.

#include "dcg/corpus.hpp"
#include "dcg/errors.hpp"
#include "dcg/evaluation.hpp"
#include "dcg/graph.hpp"
#include "dcg/harness.hpp"
#include "dcg/report.hpp"
#include "dcg/weighting.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace dcg;

namespace {

struct PipelineFlags {
    std::string weighting = "tfidf";
    std::size_t k_lsa = 100;
    double min_total = 0.0;
    double sigma = 1.0;
    std::size_t k_nn = 0;
    double eps = -1.0;
    std::string sparsify_from = "kernel";
    double nok_sigma = 0.1;
    double tol = 1e-6;
    std::size_t max_iters = 5000;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--weighting", f.weighting, "tfidf, lsa or raw")->check(CLI::IsMember({"tfidf", "lsa", "raw"}));
    cmd->add_option("--k-lsa", f.k_lsa, "LSA rank");
    cmd->add_option("--min-total", f.min_total, "drop terms whose corpus total is <= this (0 keeps all)");
    cmd->add_option("--sigma", f.sigma, "Gaussian kernel width");
    cmd->add_option("--k-nn", f.k_nn, "neighbours kept per node (0 = max(ceil(log2 n), 10))");
    cmd->add_option("--eps", f.eps, "epsilon sparsification threshold (negative = use k-NN)");
    cmd->add_option("--sparsify-from", f.sparsify_from, "kernel or laplacian")
        ->check(CLI::IsMember({"kernel", "laplacian"}));
    cmd->add_option("--nok-sigma", f.nok_sigma, "kernel width for over-segmentation without K");
    cmd->add_option("--tol", f.tol, "game convergence tolerance");
    cmd->add_option("--max-iters", f.max_iters, "game iteration cap");
}

ExperimentConfig to_config(const PipelineFlags& f) {
    ExperimentConfig cfg;
    cfg.pipeline.weighting = weighting_from_string(f.weighting);
    cfg.pipeline.k_lsa = f.k_lsa;
    cfg.pipeline.min_total = f.min_total;
    cfg.pipeline.sigma = f.sigma;
    cfg.pipeline.k_nn = f.k_nn;
    cfg.pipeline.eps = f.eps;
    cfg.pipeline.sparsify_from = sparsify_source_from_string(f.sparsify_from);
    cfg.pipeline.nok_sigma = f.nok_sigma;
    cfg.games.tol = f.tol;
    cfg.games.max_iters = f.max_iters;
    return cfg;
}

DocumentTermMatrix load_matrix(const std::string& corpus, const std::string& text_dir) {
    if (!text_dir.empty()) {
        const auto docs = read_text_directory(text_dir);
        return tokenize_corpus(docs).matrix;
    }
    return parse_sparse_corpus(fs::path(corpus));
}

Corpus load_corpus(const std::string& corpus, const std::string& text_dir, const std::string& labels) {
    return Corpus{load_matrix(corpus, text_dir), read_labels(fs::path(labels))};
}

void emit(const Json& j, const std::string& out) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + out);
    }
    f << text;
}

void write_fold_table(const StreamRun& run, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw Error("cannot write " + path);
    }
    f << "fold\tac_mean\tac_sd\tnmi_mean\tnmi_sd\n";
    for (const auto& row : run.per_fold) {
        f << row.fold << '\t' << row.ac.mean << '\t' << row.ac.sd << '\t' << row.nmi.mean << '\t' << row.nmi.sd << '\n';
    }
}

std::vector<int> read_int_labels(const std::string& path) {
    return read_labels(fs::path(path)).labels;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document clustering with dominant sets and clustering games"};
    app.require_subcommand(1);

    // synth
    SyntheticSpec spec;
    std::string synth_dir = ".";
    auto* synth = app.add_subcommand("synth", "generate a planted-partition corpus");
    synth->add_option("--k", spec.k, "number of clusters");
    synth->add_option("--docs-per-cluster", spec.docs_per_cluster);
    synth->add_option("--vocab-per-cluster", spec.vocab_per_cluster);
    synth->add_option("--noise", spec.noise, "fraction of tokens drawn from the whole vocabulary");
    synth->add_option("--tokens", spec.tokens_per_doc, "tokens per document");
    synth->add_option("--seed", spec.seed);
    synth->add_option("--out-dir", synth_dir, "writes corpus.mat and corpus.labels here");

    // prep
    PipelineFlags prep_flags;
    std::string prep_corpus;
    std::string prep_text;
    std::string features_out;
    std::string graph_out;
    std::string graph_kind = "games";
    auto* prep = app.add_subcommand("prep", "ingest, weight and dump features or graphs");
    auto* prep_src = prep->add_option("--corpus", prep_corpus, "sparse corpus file");
    prep->add_option("--text-dir", prep_text, "directory of plain-text documents")->excludes(prep_src);
    prep->add_option("--features-out", features_out);
    prep->add_option("--graph-out", graph_out);
    prep->add_option("--graph", graph_kind, "proximity, kernel, laplacian or games")
        ->check(CLI::IsMember({"proximity", "kernel", "laplacian", "games"}));
    add_pipeline_flags(prep, prep_flags);

    // cluster
    PipelineFlags cl_flags;
    std::string cl_corpus;
    std::string cl_text;
    std::string cl_labels;
    std::string cl_mode = "static-k";
    std::size_t cl_k = 0;
    std::size_t cl_reps = 50;
    std::uint64_t cl_seed = 0;
    std::string cl_out;
    auto* cluster = app.add_subcommand("cluster", "static clustering with or without K");
    auto* cl_src = cluster->add_option("--corpus", cl_corpus, "sparse corpus file");
    cluster->add_option("--text-dir", cl_text)->excludes(cl_src);
    cluster->add_option("--labels", cl_labels, "ground-truth labels, one per line")->required();
    cluster->add_option("--mode", cl_mode)->check(CLI::IsMember({"static-k", "static-nok"}));
    cluster->add_option("--k", cl_k, "cluster count (default: number of label classes)");
    cluster->add_option("--repetitions", cl_reps);
    cluster->add_option("--seed", cl_seed);
    cluster->add_option("--out", cl_out, "report path (default stdout)");
    add_pipeline_flags(cluster, cl_flags);

    // stream
    PipelineFlags st_flags;
    std::string st_corpus;
    std::string st_text;
    std::string st_labels;
    std::string st_method = "games";
    std::uint64_t st_seed = 0;
    std::size_t st_folds = 12;
    std::size_t st_reps = 15;
    std::size_t st_k = 0;
    std::string st_out;
    std::string st_table;
    auto* stream = app.add_subcommand("stream", "fold-by-fold streaming protocol");
    auto* st_src = stream->add_option("--corpus", st_corpus, "sparse corpus file");
    stream->add_option("--text-dir", st_text)->excludes(st_src);
    stream->add_option("--labels", st_labels)->required();
    stream->add_option("--method", st_method, "games or knn")->check(CLI::IsMember({"games", "knn"}));
    stream->add_option("--seed", st_seed)->required();
    stream->add_option("--folds", st_folds);
    stream->add_option("--repetitions", st_reps);
    stream->add_option("--k", st_k, "class count (default: number of label classes)");
    stream->add_option("--out", st_out);
    stream->add_option("--table", st_table, "also write a per-fold TSV table");
    add_pipeline_flags(stream, st_flags);

    // eval
    std::string ev_pred;
    std::string ev_truth;
    std::string ev_out;
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--pred", ev_pred)->required();
    eval->add_option("--truth", ev_truth)->required();
    eval->add_option("--out", ev_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const Corpus c = make_synthetic_corpus(spec);
            fs::create_directories(synth_dir);
            write_sparse_corpus(fs::path(synth_dir) / "corpus.mat", c.matrix);
            std::ofstream lf(fs::path(synth_dir) / "corpus.labels");
            write_labels(lf, c.labels.labels);
            if (!lf) {
                throw Error("cannot write labels under " + synth_dir);
            }
        } else if (*prep) {
            const auto m = load_matrix(prep_corpus, prep_text);
            const auto cfg = to_config(prep_flags);
            const auto features = build_features(m, cfg.pipeline);
            if (!features_out.empty()) {
                write_features(fs::path(features_out), features);
            }
            if (!graph_out.empty()) {
                const auto graphs = build_graphs(features, cfg.pipeline);
                const SimilarityGraph& g = graph_kind == "proximity" ? graphs.proximity
                                           : graph_kind == "kernel"  ? graphs.kernel
                                           : graph_kind == "laplacian" ? graphs.laplacian
                                                                       : graphs.games;
                write_graph(fs::path(graph_out), g);
            }
            emit(Json{{"n_docs", features.n_docs()},
                      {"n_dims", features.n_dims()},
                      {"kind", to_string(features.kind)},
                      {"provenance", hex64(features.provenance)},
                      {"empty_documents", m.empty_documents()}},
                 "-");
        } else if (*cluster) {
            const Corpus c = load_corpus(cl_corpus, cl_text, cl_labels);
            auto cfg = to_config(cl_flags);
            cfg.mode = mode_from_string(cl_mode);
            cfg.repetitions = cl_reps;
            cfg.seed = cl_seed;
            if (cl_k > 0) {
                cfg.k = cl_k;
            }
            const auto stats = corpus_stats(c.matrix, c.labels);
            const auto rep = cfg.mode == Mode::StaticK ? run_static(cfg, c) : run_static_nok(cfg, c);
            emit(static_report(cfg, rep, stats), cl_out);
        } else if (*stream) {
            const Corpus c = load_corpus(st_corpus, st_text, st_labels);
            auto cfg = to_config(st_flags);
            cfg.mode = st_method == "games" ? Mode::Streaming : Mode::KnnBaseline;
            cfg.seed = st_seed;
            cfg.n_folds = st_folds;
            cfg.repetitions = st_reps;
            if (st_k > 0) {
                cfg.k = st_k;
            }
            const auto stats = corpus_stats(c.matrix, c.labels);
            const auto run = cfg.mode == Mode::Streaming ? run_streaming(cfg, c) : run_knn_baseline(cfg, c);
            emit(stream_report(cfg, run, stats), st_out);
            if (!st_table.empty()) {
                write_fold_table(run, st_table);
            }
        } else if (*eval) {
            const auto pred = read_int_labels(ev_pred);
            const auto truth = read_int_labels(ev_truth);
            Json j = to_json(evaluate(pred, truth));
            j["conventions"] = conventions();
            emit(j, ev_out);
        }
    } catch (const StageError& e) {
        std::cerr << "dcg: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "dcg: [input] " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dcg: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
