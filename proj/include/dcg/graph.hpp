#pragma once

#include "dcg/weighting.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace dcg {

enum class GraphKind {
    Proximity,  ///< W: 1 - cosine similarity
    Kernel,     ///< S: Gaussian kernel of W
    Laplacian,  ///< L = D^-1/2 S D^-1/2
    Sparsified, ///< G: k-NN or epsilon neighbourhood graph
    Custom,     ///< supplied directly (tests, pre-built graphs)
};

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& s);

/// Weighted adjacency over players. The diagonal is always zero: nobody plays with themselves.
struct SimilarityGraph {
    Eigen::MatrixXd weights;
    GraphKind kind = GraphKind::Custom;
    double sigma = 0.0;     ///< kernel width, when built through a kernel
    std::size_t k_nn = 0;   ///< neighbour count, when k-NN sparsified
    double eps = 0.0;       ///< threshold, when epsilon sparsified

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

/// Wraps a user-supplied weight matrix; checks squareness, nonnegativity and zeroes the diagonal.
SimilarityGraph make_graph(Eigen::MatrixXd weights, GraphKind kind = GraphKind::Custom);

/// W[i,j] = 1 - cos(v_i, v_j). Zero rows are rejected.
SimilarityGraph cosine_proximity(const FeatureMatrix& f);

/// s_ij = exp(-w_ij^2 / sigma^2) off the diagonal.
SimilarityGraph gaussian_kernel(const SimilarityGraph& w, double sigma);

/// D^-1/2 S D^-1/2 with D the row sums of S.
SimilarityGraph normalized_laplacian(const SimilarityGraph& s);

/// Keeps the k_nn largest off-diagonal weights per row (lower index wins ties),
/// then symmetrizes by maximum.
SimilarityGraph knn_sparsify(const SimilarityGraph& g, std::size_t k_nn);

/// Zeroes every off-diagonal weight <= eps.
SimilarityGraph epsilon_sparsify(const SimilarityGraph& g, double eps);

/// max(ceil(log2 n), 10), clamped to n - 1.
std::size_t default_knn(std::size_t n);

double max_asymmetry(const Eigen::MatrixXd& m);

Eigen::SparseMatrix<double> to_sparse(const SimilarityGraph& g);

// Triplet dump: a header line
//   dcg-graph kind=<kind> n=<n> sigma=<s> k_nn=<k> eps=<e>
// then `i j w` lines (0-indexed, i < j); loading mirrors each edge.
void write_graph(std::ostream& out, const SimilarityGraph& g);
void write_graph(const std::filesystem::path& path, const SimilarityGraph& g);
SimilarityGraph read_graph(std::istream& in);
SimilarityGraph read_graph(const std::filesystem::path& path);

} // namespace dcg
