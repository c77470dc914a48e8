#include "dcg/corpus.hpp"

#include "dcg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace dcg {

namespace {

using Triplet = Eigen::Triplet<double>;

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& value) {
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    return ec == std::errc() && ptr == end;
}

std::string to_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

DocumentTermMatrix::DocumentTermMatrix(SparseCounts entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw InvalidArgument("document-term matrix needs at least one document and one term");
    }
    entries_.makeCompressed();
    for (Eigen::Index r = 0; r < entries_.outerSize(); ++r) {
        bool any = false;
        for (SparseCounts::InnerIterator it(entries_, r); it; ++it) {
            if (!(it.value() >= 0.0)) {
                throw InvalidArgument("document-term matrix entry (" + std::to_string(r) + ", " +
                                      std::to_string(it.col()) + ") is negative or NaN");
            }
            any = any || it.value() > 0.0;
        }
        if (!any) {
            empty_docs_.push_back(static_cast<std::size_t>(r));
        }
    }
}

double DocumentTermMatrix::at(std::size_t doc, std::size_t term) const {
    return entries_.coeff(static_cast<Eigen::Index>(doc), static_cast<Eigen::Index>(term));
}

DocumentTermMatrix DocumentTermMatrix::select_documents(std::span<const std::size_t> docs) const {
    std::vector<Triplet> triplets;
    for (std::size_t r = 0; r < docs.size(); ++r) {
        for (SparseCounts::InnerIterator it(entries_, static_cast<Eigen::Index>(docs[r])); it; ++it) {
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
        }
    }
    SparseCounts out(static_cast<Eigen::Index>(docs.size()), entries_.cols());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return DocumentTermMatrix(std::move(out));
}

bool operator==(const DocumentTermMatrix& a, const DocumentTermMatrix& b) {
    if (a.entries_.rows() != b.entries_.rows() || a.entries_.cols() != b.entries_.cols() ||
        a.entries_.nonZeros() != b.entries_.nonZeros()) {
        return false;
    }
    for (Eigen::Index r = 0; r < a.entries_.outerSize(); ++r) {
        SparseCounts::InnerIterator ia(a.entries_, r);
        SparseCounts::InnerIterator ib(b.entries_, r);
        for (; ia && ib; ++ia, ++ib) {
            if (ia.col() != ib.col() || ia.value() != ib.value()) {
                return false;
            }
        }
        if (ia || ib) {
            return false;
        }
    }
    return true;
}

DocumentTermMatrix parse_sparse_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(ParseError::Kind::Io, 0, "cannot open " + path.string());
    }
    return parse_sparse_corpus(in);
}

DocumentTermMatrix parse_sparse_corpus(std::istream& in) {
    using Kind = ParseError::Kind;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(Kind::MalformedHeader, 1, "missing header");
    }
    ++lineno;
    const auto header = split_ws(line);
    std::size_t n_docs = 0;
    std::size_t n_terms = 0;
    std::size_t nnz = 0;
    if (header.size() != 3 || !parse_number(header[0], n_docs) || !parse_number(header[1], n_terms) ||
        !parse_number(header[2], nnz)) {
        throw ParseError(Kind::MalformedHeader, lineno, "header must be `n_docs n_terms nnz`");
    }
    if (n_docs == 0 || n_terms == 0) {
        throw ParseError(Kind::MalformedHeader, lineno, "header declares an empty matrix");
    }

    std::vector<Triplet> triplets;
    triplets.reserve(nnz);
    std::vector<std::size_t> seen_cols;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tokens = split_ws(line);
        if (row == n_docs) {
            if (!tokens.empty()) {
                throw ParseError(Kind::RowCountMismatch, lineno,
                                 "more document rows than the " + std::to_string(n_docs) + " declared");
            }
            continue;
        }
        if (tokens.size() % 2 != 0) {
            throw ParseError(Kind::MalformedBody, lineno, "odd number of tokens; expected `col value` pairs");
        }
        seen_cols.clear();
        for (std::size_t t = 0; t < tokens.size(); t += 2) {
            long long col = 0;
            double value = 0.0;
            if (!parse_number(tokens[t], col)) {
                throw ParseError(Kind::MalformedBody, lineno, "bad column index `" + std::string(tokens[t]) + "`");
            }
            if (col < 1 || static_cast<std::size_t>(col) > n_terms) {
                throw ParseError(Kind::ColumnOutOfRange, lineno,
                                 "column " + std::to_string(col) + " outside 1.." + std::to_string(n_terms));
            }
            if (!parse_number(tokens[t + 1], value)) {
                throw ParseError(Kind::MalformedBody, lineno, "bad value `" + std::string(tokens[t + 1]) + "`");
            }
            if (!(value >= 0.0)) {
                throw ParseError(Kind::NegativeValue, lineno, "negative value " + std::string(tokens[t + 1]));
            }
            const auto c = static_cast<std::size_t>(col - 1);
            if (std::find(seen_cols.begin(), seen_cols.end(), c) != seen_cols.end()) {
                throw ParseError(Kind::MalformedBody, lineno, "duplicate column " + std::to_string(col));
            }
            seen_cols.push_back(c);
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(c), value);
        }
        ++row;
    }
    // Missing trailing lines are read as empty documents.
    if (triplets.size() != nnz) {
        throw ParseError(Kind::NonzeroCountMismatch, lineno,
                         "header declares " + std::to_string(nnz) + " nonzeros, body holds " +
                             std::to_string(triplets.size()));
    }
    SparseCounts m(static_cast<Eigen::Index>(n_docs), static_cast<Eigen::Index>(n_terms));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return DocumentTermMatrix(std::move(m));
}

void write_sparse_corpus(std::ostream& out, const DocumentTermMatrix& m) {
    const auto& e = m.entries();
    out << m.n_docs() << ' ' << m.n_terms() << ' ' << m.nnz() << '\n';
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        bool first = true;
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            out << (first ? "" : " ") << (it.col() + 1) << ' ' << to_shortest(it.value());
            first = false;
        }
        out << '\n';
    }
}

void write_sparse_corpus(const std::filesystem::path& path, const DocumentTermMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_sparse_corpus(out, m);
}

LabelSet canonicalize_labels(std::span<const std::string> tokens) {
    LabelSet out;
    std::unordered_map<std::string, int> ids;
    out.labels.reserve(tokens.size());
    for (const auto& tok : tokens) {
        auto [it, inserted] = ids.try_emplace(tok, static_cast<int>(out.names.size()));
        if (inserted) {
            out.names.push_back(tok);
        }
        out.labels.push_back(it->second);
    }
    out.k_true = static_cast<int>(out.names.size());
    return out;
}

LabelSet canonicalize_labels(std::span<const int> ids) {
    std::vector<std::string> tokens;
    tokens.reserve(ids.size());
    for (int id : ids) {
        tokens.push_back(std::to_string(id));
    }
    return canonicalize_labels(tokens);
}

LabelSet read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(ParseError::Kind::Io, 0, "cannot open " + path.string());
    }
    return read_labels(in);
}

LabelSet read_labels(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    std::size_t lineno = 0;
    std::size_t blank_run = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto parts = split_ws(line);
        if (parts.empty()) {
            ++blank_run;
            continue;
        }
        if (blank_run > 0 || parts.size() != 1) {
            throw ParseError(ParseError::Kind::MalformedBody, lineno, "expected exactly one label per line");
        }
        tokens.emplace_back(parts[0]);
    }
    if (tokens.empty()) {
        throw ParseError(ParseError::Kind::MalformedBody, lineno, "label file is empty");
    }
    return canonicalize_labels(tokens);
}

void write_labels(std::ostream& out, std::span<const int> labels) {
    for (int l : labels) {
        out << l << '\n';
    }
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) { // bytes of UTF-8 sequences stay inside tokens
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

TokenizedCorpus tokenize_corpus(std::span<const std::string> documents) {
    if (documents.empty()) {
        throw InvalidArgument("tokenize_corpus needs at least one document");
    }
    std::vector<std::vector<std::string>> docs;
    docs.reserve(documents.size());
    std::map<std::string, std::size_t> vocab;
    for (const auto& text : documents) {
        docs.push_back(tokenize(text));
        for (const auto& tok : docs.back()) {
            vocab.emplace(tok, 0);
        }
    }
    std::vector<std::string> vocabulary;
    vocabulary.reserve(vocab.size());
    for (auto& [tok, idx] : vocab) {
        idx = vocabulary.size();
        vocabulary.push_back(tok);
    }
    std::vector<Triplet> triplets;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            triplets.emplace_back(static_cast<int>(d), static_cast<int>(vocab.at(tok)), 1.0);
        }
    }
    // An all-empty corpus still needs one column to be representable.
    const auto n_terms = std::max<std::size_t>(vocab.size(), 1);
    SparseCounts m(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(n_terms));
    m.setFromTriplets(triplets.begin(), triplets.end()); // duplicates are summed into counts
    return TokenizedCorpus{DocumentTermMatrix(std::move(m)), std::move(vocabulary)};
}

std::vector<std::string> read_text_directory(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    std::vector<std::string> docs;
    docs.reserve(files.size());
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) {
            throw ParseError(ParseError::Kind::Io, 0, "cannot open " + f.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        docs.push_back(ss.str());
    }
    if (docs.empty()) {
        throw InvalidArgument("no documents in " + dir.string());
    }
    return docs;
}

FilteredCorpus frequency_filter(const DocumentTermMatrix& m, double min_total) {
    if (!(min_total >= 1.0)) {
        throw InvalidArgument("frequency_filter: min_total must be >= 1");
    }
    const auto& e = m.entries();
    std::vector<double> totals(m.n_terms(), 0.0);
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            totals[static_cast<std::size_t>(it.col())] += it.value();
        }
    }
    std::vector<std::size_t> retained;
    std::vector<long> remap(m.n_terms(), -1);
    for (std::size_t c = 0; c < totals.size(); ++c) {
        if (totals[c] > min_total) {
            remap[c] = static_cast<long>(retained.size());
            retained.push_back(c);
        }
    }
    if (retained.empty()) {
        throw InvalidArgument("frequency_filter: every column has total <= " + to_shortest(min_total));
    }
    std::vector<Triplet> triplets;
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            const long c = remap[static_cast<std::size_t>(it.col())];
            if (c >= 0) {
                triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
            }
        }
    }
    SparseCounts out(e.rows(), static_cast<Eigen::Index>(retained.size()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return FilteredCorpus{DocumentTermMatrix(std::move(out)), std::move(retained)};
}

CorpusStats corpus_stats(const DocumentTermMatrix& m, const LabelSet& labels) {
    if (labels.size() != m.n_docs()) {
        throw InvalidArgument("label count " + std::to_string(labels.size()) + " differs from document count " +
                              std::to_string(m.n_docs()));
    }
    std::vector<std::size_t> sizes(static_cast<std::size_t>(labels.k_true), 0);
    for (int l : labels.labels) {
        ++sizes.at(static_cast<std::size_t>(l));
    }
    CorpusStats s;
    s.n_d = m.n_docs();
    s.n_v = m.n_terms();
    s.k = labels.k_true;
    s.n_c = static_cast<double>(s.n_d) / static_cast<double>(s.k);
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    s.balance = static_cast<double>(*lo) / static_cast<double>(*hi);
    return s;
}

} // namespace dcg
