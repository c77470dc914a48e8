#pragma once

#include "dcg/dominant_sets.hpp"
#include "dcg/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dcg {

inline constexpr int kUnlabeled = -1;

/// Splits players into labeled (fixed pure strategy) and unlabeled (learning) sets.
class PlayerPartition {
public:
    /// `labels[i]` is the class of player i in 0..k-1, or kUnlabeled.
    PlayerPartition(std::vector<int> labels, std::size_t k);

    static PlayerPartition all_unlabeled(std::size_t n, std::size_t k);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t k() const noexcept { return k_; }
    int label(std::size_t i) const { return labels_.at(i); }
    bool is_labeled(std::size_t i) const { return labels_.at(i) != kUnlabeled; }
    const std::vector<int>& labels() const noexcept { return labels_; }

    std::vector<std::size_t> labeled(int h) const;
    std::vector<std::size_t> labeled() const;
    std::vector<std::size_t> unlabeled() const;

private:
    std::vector<int> labels_;
    std::size_t k_;
};

enum class PayoffKind {
    Identity, ///< imitation game: co-players are rewarded for picking the same strategy
    Custom,   ///< user-supplied K x K strategy payoff matrix
};

/// One point of the simplex per player, stored row-wise (players x strategies).
struct StrategySpace {
    Eigen::MatrixXd x;
    PayoffKind payoff_kind = PayoffKind::Identity;
    Eigen::MatrixXd payoff; ///< K x K, used only when payoff_kind == Custom

    std::size_t players() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t strategies() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

enum class TieBreak { LowestIndex };

struct GameConfig {
    double tol = 1e-6;            ///< max per-row L1 change that counts as converged
    std::size_t max_iters = 5000;
    TieBreak tie_break = TieBreak::LowestIndex;
    PayoffKind payoff_kind = PayoffKind::Identity;
    Eigen::MatrixXd payoff;       ///< K x K, for PayoffKind::Custom
    bool record_trace = false;
};

struct GameResult {
    std::vector<int> assignment;
    StrategySpace final_x;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> avg_payoff_trace;  ///< mean u_i(x) over unlabeled players, per step
    std::size_t tie_count = 0;
    std::vector<std::size_t> tied_players;
    std::vector<std::size_t> isolated_players; ///< unlabeled players with zero average payoff at the end
};

/// Uniform rows for unlabeled players, one-hot rows for labeled ones.
StrategySpace init_strategy_space(const PlayerPartition& p, std::size_t k);

/// u_i(e_h): payoff player i collects by playing pure strategy h against everyone else.
double payoff_single(std::size_t i, std::size_t h, const StrategySpace& x, const SimilarityGraph& g,
                     const PlayerPartition& p);

/// u_i(x) = sum_h x_i[h] u_i(e_h).
double payoff_average(std::size_t i, const StrategySpace& x, const SimilarityGraph& g, const PlayerPartition& p);

/// Synchronous discrete replicator update of every unlabeled row. Rows whose average
/// payoff is zero are left as they are.
StrategySpace replicator_step(const StrategySpace& x, const SimilarityGraph& g, const PlayerPartition& p);

/// Plays the games until the largest row change drops below cfg.tol and every learning player
/// is within 10*tol of equilibrium (supported strategies earn the average payoff, the others no
/// more than it), or until cfg.max_iters steps.
GameResult run_games(const SimilarityGraph& g, const PlayerPartition& p, std::size_t k, const GameConfig& cfg = {});

/// Same, starting from a caller-supplied strategy space (labeled rows must be one-hot).
GameResult run_games(const SimilarityGraph& g, const PlayerPartition& p, StrategySpace start,
                     const GameConfig& cfg = {});

/// Per-row argmax, lowest strategy index on ties.
std::vector<int> argmax_assignment(const Eigen::MatrixXd& x, std::vector<std::size_t>* tied = nullptr);

struct MetaClustering {
    SimilarityGraph meta_graph;          ///< pairwise cluster similarities between meta-nodes
    std::vector<std::vector<std::size_t>> meta_nodes; ///< documents of each meta-node
    GameResult games;                    ///< result over meta-nodes
    std::vector<int> assignment;         ///< per document, classes 0..discovered_k-1
    std::size_t discovered_k = 0;
    std::vector<std::size_t> round_sizes; ///< group count before each merge round, then the final count
};

/// Re-clusters seed clusters by playing the games among them. With `k_target`, the
/// k_target largest seeds become labeled meta-players; without it every seed starts
/// as its own strategy and the classes that survive at equilibrium are returned.
MetaClustering cluster_the_clusters(const SeedClustering& seeds, const SimilarityGraph& s,
                                    std::optional<std::size_t> k_target, const GameConfig& cfg = {});

/// Players whose own group is not a best response: some other group collects strictly more
/// of their edge weight than their own. Empty means the grouping, played as pure strategies,
/// is a Nash equilibrium of the game on `g`.
std::vector<std::size_t> unstable_players(const SimilarityGraph& g, const std::vector<int>& groups);

/// Repeats cluster_the_clusters without a target, contracting each round's classes into the
/// next round's meta-nodes, until the document grouping is an equilibrium on `s` or a round
/// merges nothing.
MetaClustering merge_until_stable(const SeedClustering& seeds, const SimilarityGraph& s, const GameConfig& cfg = {},
                                  std::size_t max_rounds = 64);

} // namespace dcg
