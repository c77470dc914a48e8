#include "dcg/report.hpp"

#include <cstdio>

namespace dcg {

namespace {

std::string payoff_name(PayoffKind k) {
    return k == PayoffKind::Identity ? "identity" : "custom";
}

Json matrix_rows(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json stats_json(const CorpusStats& s) {
    return Json{{"n_d", s.n_d}, {"n_v", s.n_v}, {"K", s.k}, {"n_c", s.n_c}, {"balance", s.balance}};
}

} // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json to_json(const GameConfig& cfg) {
    Json j{{"tol", cfg.tol},
           {"max_iters", cfg.max_iters},
           {"tie_break", "lowest-index"},
           {"payoff_kind", payoff_name(cfg.payoff_kind)}};
    if (cfg.payoff_kind == PayoffKind::Custom) {
        j["payoff"] = matrix_rows(cfg.payoff);
    }
    return j;
}

Json to_json(const DominantSetConfig& cfg) {
    return Json{{"tol", cfg.tol},
                {"max_iters", cfg.max_iters},
                {"min_cohesiveness", cfg.min_cohesiveness},
                {"support_threshold", "1/(10*|active|)"}};
}

Json to_json(const ExperimentConfig& cfg) {
    const auto& p = cfg.pipeline;
    Json pipeline{{"weighting", to_string(p.weighting)},
                  {"k_lsa", p.k_lsa},
                  {"min_total", p.min_total},
                  {"sigma", p.sigma},
                  {"k_nn", p.k_nn == 0 ? Json("default:max(ceil(log2 n),10)") : Json(p.k_nn)},
                  {"eps", p.eps},
                  {"sparsify_from", to_string(p.sparsify_from)},
                  {"nok_sigma", p.nok_sigma}};
    Json j{{"mode", to_string(cfg.mode)},
           {"pipeline", std::move(pipeline)},
           {"games", to_json(cfg.games)},
           {"dominant_sets", to_json(cfg.dominant)},
           {"repetitions", cfg.repetitions},
           {"seed", cfg.seed},
           {"n_folds", cfg.n_folds}};
    j["k"] = cfg.k ? Json(*cfg.k) : Json(nullptr);
    return j;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string s = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Json conventions() {
    return Json{{"tfidf_log", "natural"},
                {"lsa_coordinates", "U_k*Sigma_k, largest-magnitude entry of each left vector positive"},
                {"proximity", "1 - cosine"},
                {"knn_symmetrization", "max"},
                {"nmi_log", "base 2"},
                {"nmi_single_class", "both single-class -> 1, one single-class -> 0"},
                {"sd", "population"},
                {"game_update", "synchronous"},
                {"zero_payoff_rows", "frozen"}};
}

Json to_json(const EvalReport& r) {
    Json mapping = Json::array();
    for (const auto& [cluster, cls] : r.mapping) {
        mapping.push_back({cluster, cls});
    }
    return Json{{"ac", r.ac},
                {"nmi", r.nmi},
                {"matches", r.matches},
                {"n", r.n},
                {"mapping", std::move(mapping)},
                {"contingency",
                 {{"cluster_ids", r.contingency.cluster_ids},
                  {"class_ids", r.contingency.class_ids},
                  {"counts", r.contingency.counts}}}};
}

Json to_json(const DominantSet& d) {
    return Json{{"members", d.members},
                {"weights", d.weights},
                {"cohesiveness", d.cohesiveness},
                {"support_threshold", d.support_threshold},
                {"converged", d.converged},
                {"iterations", d.iterations}};
}

Json to_json(const SeedClustering& s) {
    Json clusters = Json::array();
    for (const auto& c : s.clusters) {
        clusters.push_back(to_json(c));
    }
    return Json{{"clusters", std::move(clusters)}, {"residual", s.residual}};
}

Json to_json(const GameResult& r, bool with_strategies) {
    Json j{{"assignment", r.assignment},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"tie_count", r.tie_count},
           {"tied_players", r.tied_players},
           {"isolated_players", r.isolated_players}};
    if (!r.avg_payoff_trace.empty()) {
        j["avg_payoff_trace"] = r.avg_payoff_trace;
    }
    if (with_strategies) {
        j["strategies"] = matrix_rows(r.final_x.x);
    }
    return j;
}

Json to_json(const MetricSummary& m) {
    return Json{{"mean", m.mean}, {"sd", m.sd}, {"values", m.values}};
}

Json static_report(const ExperimentConfig& cfg, const StaticReport& r, const CorpusStats& stats) {
    Json runs = Json::array();
    for (const auto& run : r.runs) {
        runs.push_back(Json{{"eval", to_json(run.eval)},
                            {"discovered_k", run.discovered_k},
                            {"n_seeds", run.n_seeds},
                            {"n_seed_members", run.n_seed_members},
                            {"game_iterations", run.game_iterations},
                            {"games_converged", run.games_converged},
                            {"tie_count", run.tie_count},
                            {"merge_rounds", run.merge_rounds}});
    }
    Json j{{"mode", to_string(r.mode)},
           {"seed", cfg.seed},
           {"config_hash", hex64(config_hash(cfg))},
           {"config", to_json(cfg)},
           {"conventions", conventions()},
           {"corpus", stats_json(stats)},
           {"ac", to_json(r.ac)},
           {"nmi", to_json(r.nmi)},
           {"discovered_k", to_json(r.discovered_k)},
           {"runs", std::move(runs)}};
    if (!r.runs.empty()) {
        j["assignment"] = r.runs.back().assignment;
    }
    return j;
}

Json stream_report(const ExperimentConfig& cfg, const StreamRun& r, const CorpusStats& stats) {
    Json per_fold = Json::array();
    for (const auto& f : r.per_fold) {
        per_fold.push_back(Json{{"fold", f.fold}, {"ac", to_json(f.ac)}, {"nmi", to_json(f.nmi)}});
    }
    Json reps = Json::array();
    for (const auto& rep : r.repetitions) {
        Json folds = Json::array();
        for (const auto& f : rep.per_fold) {
            folds.push_back(Json{{"fold", f.fold},
                                 {"n_accumulated", f.n_accumulated},
                                 {"n_labeled", f.n_labeled},
                                 {"n_new", f.n_new},
                                 {"ac", f.eval.ac},
                                 {"nmi", f.eval.nmi}});
        }
        std::vector<std::size_t> sizes;
        for (const auto& fold : rep.folds) {
            sizes.push_back(fold.size());
        }
        reps.push_back(Json{{"initial_fold", rep.initial_fold}, {"fold_sizes", sizes}, {"per_fold", std::move(folds)}});
    }
    return Json{{"mode", to_string(r.mode)},
                {"seed", r.seed},
                {"n_folds", r.n_folds},
                {"config_hash", hex64(config_hash(cfg))},
                {"config", to_json(cfg)},
                {"conventions", conventions()},
                {"corpus", stats_json(stats)},
                {"per_fold", std::move(per_fold)},
                {"repetitions", std::move(reps)}};
}

} // namespace dcg
