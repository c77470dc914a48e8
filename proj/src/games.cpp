#include "dcg/games.hpp"

#include "dcg/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace dcg {

namespace {

using SparseGraph = Eigen::SparseMatrix<double>;

constexpr double kTieTolerance = 1e-9;
// Equilibrium test at convergence: strategies above kSupportFloor must earn the average payoff
// within kNashSlack*tol, the rest at most that much above it.
constexpr double kSupportFloor = 1e-6;
constexpr double kNashSlack = 10.0;

void check_shapes(const StrategySpace& x, const SimilarityGraph& g, const PlayerPartition& p) {
    if (g.size() != p.size() || x.players() != p.size()) {
        throw InvalidArgument("games: graph, partition and strategy space disagree on the player count");
    }
    if (x.strategies() != p.k()) {
        throw InvalidArgument("games: strategy space has " + std::to_string(x.strategies()) + " strategies, expected " +
                              std::to_string(p.k()));
    }
    if (x.payoff_kind == PayoffKind::Custom &&
        (x.payoff.rows() != x.x.cols() || x.payoff.cols() != x.x.cols())) {
        throw InvalidArgument("games: custom payoff matrix must be K x K");
    }
}

/// Row i holds u_i(e_h) for every h.
Eigen::MatrixXd strategy_payoffs(const SparseGraph& g, const StrategySpace& x) {
    Eigen::MatrixXd u = g * x.x;
    if (x.payoff_kind == PayoffKind::Custom) {
        u = u * x.payoff.transpose();
    }
    return u;
}

/// Updates `next` in place from `cur`; returns the largest row L1 change.
double step_into(const StrategySpace& cur, const Eigen::MatrixXd& u, std::span<const std::size_t> unlabeled,
                 StrategySpace& next, double* mean_payoff) {
    double worst = 0.0;
    double payoff_sum = 0.0;
    for (std::size_t i : unlabeled) {
        const auto r = static_cast<Eigen::Index>(i);
        const double avg = cur.x.row(r).dot(u.row(r));
        payoff_sum += avg;
        if (!(avg > 0.0)) {
            next.x.row(r) = cur.x.row(r);
            continue;
        }
        next.x.row(r) = cur.x.row(r).cwiseProduct(u.row(r)) / avg;
        next.x.row(r) /= next.x.row(r).sum();
        worst = std::max(worst, (next.x.row(r) - cur.x.row(r)).lpNorm<1>());
    }
    if (mean_payoff != nullptr) {
        *mean_payoff = unlabeled.empty() ? 0.0 : payoff_sum / static_cast<double>(unlabeled.size());
    }
    return worst;
}

bool at_equilibrium(const StrategySpace& x, const Eigen::MatrixXd& u, std::span<const std::size_t> unlabeled,
                    double slack) {
    for (std::size_t i : unlabeled) {
        const auto r = static_cast<Eigen::Index>(i);
        const double avg = x.x.row(r).dot(u.row(r));
        if (!(avg > 0.0)) {
            continue; // frozen row, reported as isolated
        }
        for (Eigen::Index h = 0; h < u.cols(); ++h) {
            const double gap = u(r, h) - avg;
            if (gap > slack || (x.x(r, h) > kSupportFloor && -gap > slack)) {
                return false;
            }
        }
    }
    return true;
}

StrategySpace with_payoff(StrategySpace x, const GameConfig& cfg) {
    x.payoff_kind = cfg.payoff_kind;
    x.payoff = cfg.payoff;
    return x;
}

} // namespace

PlayerPartition::PlayerPartition(std::vector<int> labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    if (k_ < 1) {
        throw InvalidArgument("player partition: K must be >= 1");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const int l = labels_[i];
        if (l != kUnlabeled && (l < 0 || static_cast<std::size_t>(l) >= k_)) {
            throw InvalidArgument("player partition: player " + std::to_string(i) + " has class " +
                                  std::to_string(l) + " outside 0.." + std::to_string(k_ - 1));
        }
    }
}

PlayerPartition PlayerPartition::all_unlabeled(std::size_t n, std::size_t k) {
    return PlayerPartition(std::vector<int>(n, kUnlabeled), k);
}

std::vector<std::size_t> PlayerPartition::labeled(int h) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == h) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> PlayerPartition::labeled() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != kUnlabeled) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> PlayerPartition::unlabeled() const {
    return labeled(kUnlabeled);
}

StrategySpace init_strategy_space(const PlayerPartition& p, std::size_t k) {
    if (k < 1 || k != p.k()) {
        throw InvalidArgument("init_strategy_space: K must be >= 1 and match the partition");
    }
    StrategySpace s;
    s.x = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(k),
                                    1.0 / static_cast<double>(k));
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.is_labeled(i)) {
            const auto r = static_cast<Eigen::Index>(i);
            s.x.row(r).setZero();
            s.x(r, p.label(i)) = 1.0;
        }
    }
    return s;
}

double payoff_single(std::size_t i, std::size_t h, const StrategySpace& x, const SimilarityGraph& g,
                     const PlayerPartition& p) {
    check_shapes(x, g, p);
    if (p.is_labeled(i)) {
        throw InvalidArgument("payoff_single: player " + std::to_string(i) + " is labeled");
    }
    if (h >= x.strategies()) {
        throw InvalidArgument("payoff_single: strategy out of range");
    }
    const auto r = static_cast<Eigen::Index>(i);
    const auto col = static_cast<Eigen::Index>(h);
    double total = 0.0;
    for (Eigen::Index j = 0; j < g.weights.cols(); ++j) {
        const double w = g.weights(r, j);
        if (j == r || w == 0.0) {
            continue;
        }
        // (A x_j)^h; labeled rows are one-hot so they feed only their own class under identity A.
        const double share = x.payoff_kind == PayoffKind::Custom ? x.payoff.row(col).dot(x.x.row(j)) : x.x(j, col);
        total += w * share;
    }
    return total;
}

double payoff_average(std::size_t i, const StrategySpace& x, const SimilarityGraph& g, const PlayerPartition& p) {
    double total = 0.0;
    for (std::size_t h = 0; h < x.strategies(); ++h) {
        const double xi = x.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
        if (xi != 0.0) {
            total += xi * payoff_single(i, h, x, g, p);
        }
    }
    return total;
}

StrategySpace replicator_step(const StrategySpace& x, const SimilarityGraph& g, const PlayerPartition& p) {
    check_shapes(x, g, p);
    const SparseGraph sg = to_sparse(g);
    const Eigen::MatrixXd u = strategy_payoffs(sg, x);
    StrategySpace next = x;
    const auto unlabeled = p.unlabeled();
    step_into(x, u, unlabeled, next, nullptr);
    return next;
}

std::vector<int> argmax_assignment(const Eigen::MatrixXd& x, std::vector<std::size_t>* tied) {
    std::vector<int> out(static_cast<std::size_t>(x.rows()), 0);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        Eigen::Index best = 0;
        const double top = x.row(r).maxCoeff(&best); // first maximal index
        out[static_cast<std::size_t>(r)] = static_cast<int>(best);
        if (tied != nullptr) {
            int near = 0;
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                near += (top - x(r, c) <= kTieTolerance) ? 1 : 0;
            }
            if (near > 1) {
                tied->push_back(static_cast<std::size_t>(r));
            }
        }
    }
    return out;
}

GameResult run_games(const SimilarityGraph& g, const PlayerPartition& p, std::size_t k, const GameConfig& cfg) {
    return run_games(g, p, with_payoff(init_strategy_space(p, k), cfg), cfg);
}

GameResult run_games(const SimilarityGraph& g, const PlayerPartition& p, StrategySpace start, const GameConfig& cfg) {
    start = with_payoff(std::move(start), cfg);
    check_shapes(start, g, p);
    for (std::size_t i : p.labeled()) {
        const auto r = static_cast<Eigen::Index>(i);
        if (start.x(r, p.label(i)) != 1.0 || start.x.row(r).sum() != 1.0) {
            throw InvalidArgument("run_games: labeled player " + std::to_string(i) + " must start one-hot");
        }
    }
    const SparseGraph sg = to_sparse(g);
    const auto unlabeled = p.unlabeled();

    GameResult res;
    StrategySpace cur = std::move(start);
    StrategySpace next = cur;
    res.converged = unlabeled.empty();
    double change = std::numeric_limits<double>::infinity();
    while (!res.converged) {
        const Eigen::MatrixXd u = strategy_payoffs(sg, cur);
        if (change < cfg.tol && at_equilibrium(cur, u, unlabeled, kNashSlack * cfg.tol)) {
            res.converged = true;
            break;
        }
        if (res.iterations >= cfg.max_iters) {
            break;
        }
        double mean_payoff = 0.0;
        change = step_into(cur, u, unlabeled, next, &mean_payoff);
        std::swap(cur, next);
        ++res.iterations;
        if (cfg.record_trace) {
            res.avg_payoff_trace.push_back(mean_payoff);
        }
    }

    const Eigen::MatrixXd u = strategy_payoffs(sg, cur);
    for (std::size_t i : unlabeled) {
        const auto r = static_cast<Eigen::Index>(i);
        if (!(cur.x.row(r).dot(u.row(r)) > 0.0)) {
            res.isolated_players.push_back(i);
        }
    }
    std::vector<std::size_t> tied;
    res.assignment = argmax_assignment(cur.x, &tied);
    for (std::size_t i : tied) {
        if (!p.is_labeled(i)) {
            res.tied_players.push_back(i);
        }
    }
    res.tie_count = res.tied_players.size();
    res.final_x = std::move(cur);
    return res;
}

MetaClustering cluster_the_clusters(const SeedClustering& seeds, const SimilarityGraph& s,
                                    std::optional<std::size_t> k_target, const GameConfig& cfg) {
    if (seeds.clusters.empty()) {
        throw InvalidArgument("cluster_the_clusters: no seed clusters");
    }
    MetaClustering out;
    for (const auto& c : seeds.clusters) {
        out.meta_nodes.push_back(c.members);
    }
    for (std::size_t v : seeds.residual) {
        out.meta_nodes.push_back({v});
    }
    const std::size_t n_seeds = seeds.clusters.size();
    const std::size_t m = out.meta_nodes.size();
    if (k_target && (*k_target < 1 || *k_target > n_seeds)) {
        throw InvalidArgument("cluster_the_clusters: " + std::to_string(n_seeds) + " seeds cannot form " +
                              std::to_string(*k_target) + " classes");
    }

    Eigen::MatrixXd mw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const double sim = cluster_similarity(out.meta_nodes[a], out.meta_nodes[b], s);
            mw(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sim;
            mw(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = sim;
        }
    }
    out.meta_graph = make_graph(std::move(mw));

    if (k_target) {
        std::vector<std::size_t> order(n_seeds);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out.meta_nodes[a].size() > out.meta_nodes[b].size();
        });
        order.resize(*k_target);
        std::sort(order.begin(), order.end());
        std::vector<int> labels(m, kUnlabeled);
        for (std::size_t c = 0; c < order.size(); ++c) {
            labels[order[c]] = static_cast<int>(c);
        }
        out.games = run_games(out.meta_graph, PlayerPartition(std::move(labels), *k_target), *k_target, cfg);
    } else {
        // Every seed is a strategy of its own; a meta-player starts from its affinity
        // profile (own cohesion on the diagonal, cluster similarities elsewhere).
        StrategySpace start;
        start.x = out.meta_graph.weights;
        for (std::size_t a = 0; a < m; ++a) {
            const auto& members = out.meta_nodes[a];
            double self = 0.0;
            for (std::size_t r : members) {
                for (std::size_t t : members) {
                    self += s.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
                }
            }
            self /= 2.0 * static_cast<double>(members.size());
            const auto r = static_cast<Eigen::Index>(a);
            start.x(r, r) = self;
            const double total = start.x.row(r).sum();
            if (total > 0.0) {
                start.x.row(r) /= total;
            } else {
                start.x.row(r).setZero();
                start.x(r, r) = 1.0;
            }
        }
        out.games = run_games(out.meta_graph, PlayerPartition::all_unlabeled(m, m), std::move(start), cfg);
    }

    // Compact the surviving strategies to 0..discovered_k-1 in strategy order.
    std::map<int, int> compact;
    for (int h : out.games.assignment) {
        compact.emplace(h, 0);
    }
    int next_id = 0;
    for (auto& [h, id] : compact) {
        id = next_id++;
    }
    out.discovered_k = compact.size();
    std::size_t n_docs = 0;
    for (const auto& node : out.meta_nodes) {
        n_docs += node.size();
    }
    out.assignment.assign(n_docs, 0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t d : out.meta_nodes[a]) {
            if (d >= n_docs) {
                throw InvalidArgument("cluster_the_clusters: seeds do not cover documents 0.." +
                                      std::to_string(n_docs - 1));
            }
            out.assignment[d] = compact.at(out.games.assignment[a]);
        }
    }
    return out;
}

std::vector<std::size_t> unstable_players(const SimilarityGraph& g, const std::vector<int>& groups) {
    if (groups.size() != g.size()) {
        throw InvalidArgument("unstable_players: " + std::to_string(groups.size()) + " groups for " +
                              std::to_string(g.size()) + " players");
    }
    int n_groups = 0;
    for (int h : groups) {
        if (h < 0) {
            throw InvalidArgument("unstable_players: negative group id");
        }
        n_groups = std::max(n_groups, h + 1);
    }
    std::vector<std::size_t> out;
    std::vector<double> weight(static_cast<std::size_t>(n_groups));
    for (Eigen::Index i = 0; i < g.weights.rows(); ++i) {
        std::fill(weight.begin(), weight.end(), 0.0);
        double total = 0.0;
        for (Eigen::Index j = 0; j < g.weights.cols(); ++j) {
            if (j != i) {
                weight[static_cast<std::size_t>(groups[static_cast<std::size_t>(j)])] += g.weights(i, j);
                total += g.weights(i, j);
            }
        }
        const double own = weight[static_cast<std::size_t>(groups[static_cast<std::size_t>(i)])];
        const double slack = kTieTolerance * total;
        if (std::any_of(weight.begin(), weight.end(), [&](double w) { return w > own + slack; })) {
            out.push_back(static_cast<std::size_t>(i));
        }
    }
    return out;
}

MetaClustering merge_until_stable(const SeedClustering& seeds, const SimilarityGraph& s, const GameConfig& cfg,
                                  std::size_t max_rounds) {
    if (seeds.clusters.empty()) {
        throw InvalidArgument("merge_until_stable: no seed clusters");
    }
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& c : seeds.clusters) {
        groups.push_back(c.members);
    }
    for (std::size_t v : seeds.residual) {
        groups.push_back({v});
    }
    std::size_t n_docs = 0;
    for (const auto& grp : groups) {
        n_docs += grp.size();
    }
    if (n_docs != s.size()) {
        throw InvalidArgument("merge_until_stable: seeds cover " + std::to_string(n_docs) + " of " +
                              std::to_string(s.size()) + " documents");
    }
    auto labels_of = [&](const std::vector<std::vector<std::size_t>>& gs) {
        std::vector<int> out(n_docs, 0);
        for (std::size_t c = 0; c < gs.size(); ++c) {
            for (std::size_t d : gs[c]) {
                out[d] = static_cast<int>(c);
            }
        }
        return out;
    };

    MetaClustering result;
    std::vector<std::size_t> sizes;
    bool played = false;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        sizes.push_back(groups.size());
        if (groups.size() == 1 || unstable_players(s, labels_of(groups)).empty()) {
            break;
        }
        SeedClustering current;
        for (auto& grp : groups) {
            DominantSet d;
            d.members = grp;
            current.clusters.push_back(std::move(d));
        }
        MetaClustering meta = cluster_the_clusters(current, s, std::nullopt, cfg);
        const bool merged = meta.discovered_k < groups.size();
        std::vector<std::vector<std::size_t>> next(meta.discovered_k);
        for (std::size_t d = 0; d < n_docs; ++d) {
            next[static_cast<std::size_t>(meta.assignment[d])].push_back(d);
        }
        result = std::move(meta);
        played = true;
        groups = std::move(next);
        if (!merged) {
            break;
        }
    }
    if (!played) {
        // Already an equilibrium: report the identity meta-clustering.
        result.meta_nodes = groups;
        result.assignment = labels_of(groups);
        result.discovered_k = groups.size();
    }
    if (sizes.back() != groups.size()) {
        sizes.push_back(groups.size());
    }
    result.round_sizes = std::move(sizes);
    return result;
}

} // namespace dcg
