#include "dcg/weighting.hpp"

#include "dcg/errors.hpp"

#include <Eigen/SVD>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dcg {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv_string(std::uint64_t h, const std::string& s) {
    return fnv_bytes(h, s.data(), s.size());
}

std::string to_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

FeatureKind parse_kind(const std::string& s) {
    if (s == "tfidf") {
        return FeatureKind::Tfidf;
    }
    if (s == "lsa") {
        return FeatureKind::Lsa;
    }
    if (s == "raw") {
        return FeatureKind::Raw;
    }
    throw ParseError(ParseError::Kind::MalformedHeader, 1, "unknown feature kind `" + s + "`");
}

} // namespace

std::string to_string(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::Tfidf:
        return "tfidf";
    case FeatureKind::Lsa:
        return "lsa";
    case FeatureKind::Raw:
        return "raw";
    }
    return "raw";
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return fnv_bytes(seed, &value, sizeof value);
}

std::uint64_t fingerprint(const DocumentTermMatrix& m) {
    std::uint64_t h = kFnvOffset;
    h = hash_combine(h, m.n_docs());
    h = hash_combine(h, m.n_terms());
    const auto& e = m.entries();
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            const auto col = static_cast<std::uint64_t>(it.col());
            const double v = it.value();
            h = fnv_bytes(h, &r, sizeof r);
            h = fnv_bytes(h, &col, sizeof col);
            h = fnv_bytes(h, &v, sizeof v);
        }
    }
    return h;
}

void normalize_rows(Eigen::MatrixXd& values) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        const double norm = values.row(r).norm();
        if (norm > 0.0) {
            values.row(r) /= norm;
        }
    }
}

FeatureMatrix raw_features(const DocumentTermMatrix& m) {
    FeatureMatrix f;
    f.values = Eigen::MatrixXd(m.entries());
    f.kind = FeatureKind::Raw;
    f.provenance = fnv_string(fingerprint(m), "raw");
    return f;
}

FeatureMatrix tfidf(const DocumentTermMatrix& m) {
    if (m.empty_documents().size() == m.n_docs()) {
        throw InvalidArgument("tfidf: every document is empty");
    }
    const auto& e = m.entries();
    std::vector<double> df(m.n_terms(), 0.0);
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            if (it.value() > 0.0) {
                df[static_cast<std::size_t>(it.col())] += 1.0;
            }
        }
    }
    const auto n_docs = static_cast<double>(m.n_docs());
    FeatureMatrix f;
    f.values = Eigen::MatrixXd::Zero(e.rows(), e.cols());
    for (Eigen::Index r = 0; r < e.outerSize(); ++r) {
        for (SparseCounts::InnerIterator it(e, r); it; ++it) {
            const double d = df[static_cast<std::size_t>(it.col())];
            if (d > 0.0) {
                f.values(r, it.col()) = it.value() * std::log(n_docs / d);
            }
        }
    }
    normalize_rows(f.values);
    f.kind = FeatureKind::Tfidf;
    f.row_normalized = true;
    f.provenance = fnv_string(fingerprint(m), "tfidf:ln");
    return f;
}

LsaResult lsa_decompose(const FeatureMatrix& f, std::size_t k_lsa) {
    const auto limit = std::min(f.n_docs(), f.n_dims());
    if (k_lsa < 1 || k_lsa > limit) {
        throw InvalidArgument("lsa: k_lsa=" + std::to_string(k_lsa) + " outside 1.." + std::to_string(limit));
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(f.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("lsa: SVD did not converge (Eigen status " + std::to_string(static_cast<int>(svd.info())) +
                             ")");
    }
    const auto k = static_cast<Eigen::Index>(k_lsa);
    LsaResult out;
    out.singular_values = svd.singularValues().head(k);
    out.left = svd.matrixU().leftCols(k);
    out.right = svd.matrixV().leftCols(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index pivot = 0;
        out.left.col(c).cwiseAbs().maxCoeff(&pivot);
        if (out.left(pivot, c) < 0.0) {
            out.left.col(c) *= -1.0;
            out.right.col(c) *= -1.0;
        }
    }
    out.coordinates.values = out.left * out.singular_values.asDiagonal();
    out.coordinates.kind = FeatureKind::Lsa;
    out.coordinates.row_normalized = false;
    out.coordinates.provenance = hash_combine(fnv_string(f.provenance, "lsa:U*S"), k_lsa);
    return out;
}

FeatureMatrix lsa_project(const FeatureMatrix& f, std::size_t k_lsa) {
    return lsa_decompose(f, k_lsa).coordinates;
}

void write_features(std::ostream& out, const FeatureMatrix& f) {
    std::ostringstream hex;
    hex << std::hex << f.provenance;
    out << "dcg-features " << f.n_docs() << ' ' << f.n_dims() << ' ' << to_string(f.kind) << ' '
        << (f.row_normalized ? 1 : 0) << ' ' << hex.str() << '\n';
    for (Eigen::Index r = 0; r < f.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
            out << (c ? " " : "") << to_shortest(f.values(r, c));
        }
        out << '\n';
    }
}

void write_features(const std::filesystem::path& path, const FeatureMatrix& f) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_features(out, f);
}

FeatureMatrix read_features(std::istream& in) {
    std::string magic;
    std::string kind;
    std::string hex;
    long rows = 0;
    long cols = 0;
    int normalized = 0;
    if (!(in >> magic >> rows >> cols >> kind >> normalized >> hex) || magic != "dcg-features" || rows < 1 ||
        cols < 1) {
        throw ParseError(ParseError::Kind::MalformedHeader, 1, "bad feature-matrix header");
    }
    FeatureMatrix f;
    f.kind = parse_kind(kind);
    f.row_normalized = normalized != 0;
    f.provenance = std::stoull(hex, nullptr, 16);
    f.values.resize(rows, cols);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            std::string tok;
            double v = 0.0;
            if (!(in >> tok)) {
                throw ParseError(ParseError::Kind::RowCountMismatch, static_cast<std::size_t>(r + 2),
                                 "feature matrix truncated");
            }
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError(ParseError::Kind::MalformedBody, static_cast<std::size_t>(r + 2),
                                 "bad value `" + tok + "`");
            }
            f.values(r, c) = v;
        }
    }
    return f;
}

FeatureMatrix read_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(ParseError::Kind::Io, 0, "cannot open " + path.string());
    }
    return read_features(in);
}

} // namespace dcg
