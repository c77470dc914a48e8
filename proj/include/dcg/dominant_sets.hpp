#pragma once

#include "dcg/errors.hpp"
#include "dcg/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace dcg {

/// Raised when the active nodes share no edge, so x'Ax vanishes at the barycenter.
class NoCohesiveStructure : public Error {
public:
    using Error::Error;
};

struct DominantSetConfig {
    double tol = 1e-7;               ///< L1 change between iterates
    std::size_t max_iters = 10000;
    double min_cohesiveness = 1e-9;  ///< exhaustive peel-off stops below this
};

/// Support of a local maximizer of x'Ax on the simplex.
struct DominantSet {
    std::vector<std::size_t> members;  ///< ascending global node indices
    std::vector<double> weights;       ///< participation of each member
    double cohesiveness = 0.0;         ///< x'Ax at the returned iterate
    double support_threshold = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
};

struct StopRule {
    enum class Mode { FirstK, Exhaustive };

    Mode mode = Mode::Exhaustive;
    std::size_t k = 0;

    static StopRule first_k(std::size_t k) { return {Mode::FirstK, k}; }
    static StopRule exhaustive() { return {Mode::Exhaustive, 0}; }
};

struct SeedClustering {
    std::vector<DominantSet> clusters;
    std::vector<std::size_t> residual; ///< ascending, nodes not covered by any cluster
};

double cohesiveness(const Eigen::MatrixXd& a, const Eigen::VectorXd& x);

/// One step of x <- x o (Ax) / (x'Ax). Requires x'Ax > 0.
Eigen::VectorXd simplex_replicator_step(const Eigen::MatrixXd& a, const Eigen::VectorXd& x);

/// Runs the replicator dynamics on the subgraph induced by `active`, starting at its barycenter.
DominantSet extract_dominant_set(const SimilarityGraph& a, std::span<const std::size_t> active,
                                 const DominantSetConfig& cfg = {});

/// Sequential extraction, removing each support from the graph.
SeedClustering peel_off(const SimilarityGraph& a, StopRule stop, const DominantSetConfig& cfg = {});

/// Sum of cross weights between two disjoint clusters divided by |ci| + |cj|.
double cluster_similarity(std::span<const std::size_t> ci, std::span<const std::size_t> cj, const SimilarityGraph& s);

} // namespace dcg
