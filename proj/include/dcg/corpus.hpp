#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dcg {

using SparseCounts = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Sparse nonnegative document-term matrix; rows are documents, columns are terms.
///
/// Empty documents are representable and reported through `empty_documents()`;
/// they are rejected later, when a similarity graph is built.
class DocumentTermMatrix {
public:
    explicit DocumentTermMatrix(SparseCounts entries);

    std::size_t n_docs() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t n_terms() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
    std::size_t nnz() const noexcept { return static_cast<std::size_t>(entries_.nonZeros()); }

    const SparseCounts& entries() const noexcept { return entries_; }
    double at(std::size_t doc, std::size_t term) const;

    bool has_empty_documents() const noexcept { return !empty_docs_.empty(); }
    const std::vector<std::size_t>& empty_documents() const noexcept { return empty_docs_; }

    /// Row-restricted copy, rows taken in the given order.
    DocumentTermMatrix select_documents(std::span<const std::size_t> docs) const;

    friend bool operator==(const DocumentTermMatrix& a, const DocumentTermMatrix& b);

private:
    SparseCounts entries_;
    std::vector<std::size_t> empty_docs_;
};

/// Per-document class ids, canonicalized to 0..k_true-1 in order of first appearance.
struct LabelSet {
    std::vector<int> labels;
    int k_true = 0;
    std::vector<std::string> names; ///< original token of each class id

    std::size_t size() const noexcept { return labels.size(); }
};

struct CorpusStats {
    std::size_t n_d = 0;
    std::size_t n_v = 0;
    int k = 0;
    double n_c = 0.0;
    double balance = 0.0; ///< smallest class size / largest class size
};

struct TokenizedCorpus {
    DocumentTermMatrix matrix;
    std::vector<std::string> vocabulary; ///< column order, sorted lexicographically
};

struct FilteredCorpus {
    DocumentTermMatrix matrix;
    std::vector<std::size_t> retained_columns; ///< new column -> original column
};

// CLUTO-style `.mat`: header `n_docs n_terms nnz`, then one line per document
// holding whitespace-separated `col value` pairs with 1-indexed columns.
DocumentTermMatrix parse_sparse_corpus(const std::filesystem::path& path);
DocumentTermMatrix parse_sparse_corpus(std::istream& in);
void write_sparse_corpus(std::ostream& out, const DocumentTermMatrix& m);
void write_sparse_corpus(const std::filesystem::path& path, const DocumentTermMatrix& m);

LabelSet canonicalize_labels(std::span<const std::string> tokens);
LabelSet canonicalize_labels(std::span<const int> ids);
LabelSet read_labels(const std::filesystem::path& path);
LabelSet read_labels(std::istream& in);
void write_labels(std::ostream& out, std::span<const int> labels);

/// Lowercase tokens split on non-alphanumeric ASCII characters; no stemming or stop words.
std::vector<std::string> tokenize(const std::string& text);
TokenizedCorpus tokenize_corpus(std::span<const std::string> documents);

/// Reads every regular file in `dir`; lexicographic filename order defines document index.
std::vector<std::string> read_text_directory(const std::filesystem::path& dir);

/// Drops every column whose corpus-wide total is <= min_total.
FilteredCorpus frequency_filter(const DocumentTermMatrix& m, double min_total);

CorpusStats corpus_stats(const DocumentTermMatrix& m, const LabelSet& labels);

} // namespace dcg
