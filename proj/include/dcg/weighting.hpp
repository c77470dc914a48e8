#pragma once

#include "dcg/corpus.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace dcg {

enum class FeatureKind { Tfidf, Lsa, Raw };

std::string to_string(FeatureKind kind);

/// Dense document vectors, one row per document.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    FeatureKind kind = FeatureKind::Raw;
    bool row_normalized = false;
    /// Identifies the source matrix and parameters this matrix was derived from.
    std::uint64_t provenance = 0;

    std::size_t n_docs() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_dims() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct LsaResult {
    FeatureMatrix coordinates;        ///< U_k * Sigma_k
    Eigen::VectorXd singular_values;  ///< non-increasing, length k
    Eigen::MatrixXd left;             ///< U_k, n_docs x k
    Eigen::MatrixXd right;            ///< V_k, n_dims x k
};

/// tf(d,t) * ln(D / df(t)), then each nonzero row scaled to unit Euclidean norm.
FeatureMatrix tfidf(const DocumentTermMatrix& m);

/// Dense copy of raw counts, unweighted and unnormalized.
FeatureMatrix raw_features(const DocumentTermMatrix& m);

/// Rank-k truncated SVD; document coordinates are U_k Sigma_k. Each left singular
/// vector is signed so that its largest-magnitude entry is positive.
LsaResult lsa_decompose(const FeatureMatrix& f, std::size_t k_lsa);
FeatureMatrix lsa_project(const FeatureMatrix& f, std::size_t k_lsa);

/// Scales every nonzero row to unit norm.
void normalize_rows(Eigen::MatrixXd& values);

/// FNV-1a over the structure and values of a sparse matrix.
std::uint64_t fingerprint(const DocumentTermMatrix& m);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// Text cache format:
//   dcg-features <n_docs> <n_dims> <kind> <normalized 0|1> <provenance hex>
//   one row per line, shortest round-trip decimal values.
void write_features(std::ostream& out, const FeatureMatrix& f);
void write_features(const std::filesystem::path& path, const FeatureMatrix& f);
FeatureMatrix read_features(std::istream& in);
FeatureMatrix read_features(const std::filesystem::path& path);

} // namespace dcg
