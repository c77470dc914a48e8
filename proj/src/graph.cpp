#include "dcg/graph.hpp"

#include "dcg/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace dcg {

namespace {

std::string to_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void mirror_upper(Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            m(j, i) = m(i, j);
        }
    }
}

} // namespace

std::string to_string(GraphKind kind) {
    switch (kind) {
    case GraphKind::Proximity:
        return "proximity";
    case GraphKind::Kernel:
        return "kernel";
    case GraphKind::Laplacian:
        return "laplacian";
    case GraphKind::Sparsified:
        return "sparsified";
    case GraphKind::Custom:
        return "custom";
    }
    return "custom";
}

GraphKind graph_kind_from_string(const std::string& s) {
    for (auto k : {GraphKind::Proximity, GraphKind::Kernel, GraphKind::Laplacian, GraphKind::Sparsified,
                   GraphKind::Custom}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw InvalidArgument("unknown graph kind `" + s + "`");
}

SimilarityGraph make_graph(Eigen::MatrixXd weights, GraphKind kind) {
    if (weights.rows() != weights.cols() || weights.rows() < 1) {
        throw InvalidArgument("graph weights must be a nonempty square matrix");
    }
    if (!(weights.array() >= 0.0).all()) {
        throw InvalidArgument("graph weights must be nonnegative");
    }
    weights.diagonal().setZero();
    SimilarityGraph g;
    g.weights = std::move(weights);
    g.kind = kind;
    return g;
}

SimilarityGraph cosine_proximity(const FeatureMatrix& f) {
    const Eigen::Index n = f.values.rows();
    Eigen::VectorXd norms = f.values.rowwise().norm();
    std::vector<std::size_t> zero_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(norms(i) > 0.0)) {
            zero_rows.push_back(static_cast<std::size_t>(i));
        }
    }
    if (!zero_rows.empty()) {
        throw DegenerateNodes("cosine_proximity: zero-norm document vectors", std::move(zero_rows));
    }
    const Eigen::MatrixXd unit = norms.cwiseInverse().asDiagonal() * f.values;
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n) - unit * unit.transpose();
    w = w.cwiseMax(0.0).cwiseMin(2.0);
    mirror_upper(w);
    w.diagonal().setZero();
    SimilarityGraph g;
    g.weights = std::move(w);
    g.kind = GraphKind::Proximity;
    return g;
}

SimilarityGraph gaussian_kernel(const SimilarityGraph& w, double sigma) {
    if (w.kind != GraphKind::Proximity) {
        throw InvalidArgument("gaussian_kernel expects a proximity graph, got " + to_string(w.kind));
    }
    if (!(sigma > 0.0)) {
        throw InvalidArgument("gaussian_kernel: sigma must be > 0");
    }
    const double inv = 1.0 / (sigma * sigma);
    SimilarityGraph s;
    s.weights = (-w.weights.array().square() * inv).exp().matrix();
    s.weights.diagonal().setZero();
    s.kind = GraphKind::Kernel;
    s.sigma = sigma;
    return s;
}

SimilarityGraph normalized_laplacian(const SimilarityGraph& s) {
    if (s.kind != GraphKind::Kernel && s.kind != GraphKind::Custom) {
        throw InvalidArgument("normalized_laplacian expects a kernel graph, got " + to_string(s.kind));
    }
    const Eigen::VectorXd degree = s.weights.rowwise().sum();
    std::vector<std::size_t> isolated;
    for (Eigen::Index i = 0; i < degree.size(); ++i) {
        if (!(degree(i) > 0.0)) {
            isolated.push_back(static_cast<std::size_t>(i));
        }
    }
    if (!isolated.empty()) {
        throw DegenerateNodes("normalized_laplacian: zero-degree nodes", std::move(isolated));
    }
    const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    SimilarityGraph l = s;
    l.weights = inv_sqrt.asDiagonal() * s.weights * inv_sqrt.asDiagonal();
    mirror_upper(l.weights);
    l.weights.diagonal().setZero();
    l.kind = GraphKind::Laplacian;
    return l;
}

SimilarityGraph knn_sparsify(const SimilarityGraph& g, std::size_t k_nn) {
    const std::size_t n = g.size();
    if (k_nn < 1 || k_nn >= n) {
        throw InvalidArgument("knn_sparsify: k_nn=" + std::to_string(k_nn) + " outside 1.." + std::to_string(n - 1));
    }
    Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(g.weights.rows(), g.weights.cols());
    std::vector<Eigen::Index> order;
    order.reserve(n - 1);
    for (Eigen::Index i = 0; i < g.weights.rows(); ++i) {
        order.clear();
        for (Eigen::Index j = 0; j < g.weights.cols(); ++j) {
            if (j != i) {
                order.push_back(j);
            }
        }
        const auto row = g.weights.row(i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_nn), order.end(),
                          [&](Eigen::Index a, Eigen::Index b) {
                              return row(a) > row(b) || (row(a) == row(b) && a < b);
                          });
        for (std::size_t t = 0; t < k_nn; ++t) {
            kept(i, order[t]) = row(order[t]);
        }
    }
    SimilarityGraph out = g;
    out.weights = kept.cwiseMax(kept.transpose());
    out.kind = GraphKind::Sparsified;
    out.k_nn = k_nn;
    return out;
}

SimilarityGraph epsilon_sparsify(const SimilarityGraph& g, double eps) {
    SimilarityGraph out = g;
    out.weights = (g.weights.array() > eps).select(g.weights, 0.0);
    out.weights.diagonal().setZero();
    mirror_upper(out.weights);
    out.kind = GraphKind::Sparsified;
    out.eps = eps;
    return out;
}

std::size_t default_knn(std::size_t n) {
    if (n < 2) {
        throw InvalidArgument("default_knn: need at least two nodes");
    }
    const auto log_n = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
    return std::min(std::max<std::size_t>(log_n, 10), n - 1);
}

double max_asymmetry(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Eigen::SparseMatrix<double> to_sparse(const SimilarityGraph& g) {
    return g.weights.sparseView(0.0, 0.0);
}

void write_graph(std::ostream& out, const SimilarityGraph& g) {
    out << "dcg-graph kind=" << to_string(g.kind) << " n=" << g.size() << " sigma=" << to_shortest(g.sigma)
        << " k_nn=" << g.k_nn << " eps=" << to_shortest(g.eps) << '\n';
    for (Eigen::Index i = 0; i < g.weights.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < g.weights.cols(); ++j) {
            if (g.weights(i, j) != 0.0) {
                out << i << ' ' << j << ' ' << to_shortest(g.weights(i, j)) << '\n';
            }
        }
    }
}

void write_graph(const std::filesystem::path& path, const SimilarityGraph& g) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_graph(out, g);
}

SimilarityGraph read_graph(std::istream& in) {
    using Kind = ParseError::Kind;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(Kind::MalformedHeader, 1, "missing graph header");
    }
    std::istringstream hs(line);
    std::string magic;
    hs >> magic;
    if (magic != "dcg-graph") {
        throw ParseError(Kind::MalformedHeader, 1, "expected `dcg-graph` header");
    }
    SimilarityGraph g;
    long n = -1;
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw ParseError(Kind::MalformedHeader, 1, "bad header field `" + field + "`");
        }
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        try {
            if (key == "kind") {
                g.kind = graph_kind_from_string(value);
            } else if (key == "n") {
                n = std::stol(value);
            } else if (key == "sigma") {
                g.sigma = std::stod(value);
            } else if (key == "k_nn") {
                g.k_nn = std::stoul(value);
            } else if (key == "eps") {
                g.eps = std::stod(value);
            }
        } catch (const std::exception&) {
            throw ParseError(Kind::MalformedHeader, 1, "bad header field `" + field + "`");
        }
    }
    if (n < 1) {
        throw ParseError(Kind::MalformedHeader, 1, "header must declare n >= 1");
    }
    g.weights = Eigen::MatrixXd::Zero(n, n);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        long i = 0;
        long j = 0;
        std::string wtok;
        if (!(ls >> i)) {
            continue; // blank line
        }
        double w = 0.0;
        if (!(ls >> j >> wtok)) {
            throw ParseError(Kind::MalformedBody, lineno, "expected `i j w`");
        }
        auto [ptr, ec] = std::from_chars(wtok.data(), wtok.data() + wtok.size(), w);
        if (ec != std::errc() || ptr != wtok.data() + wtok.size()) {
            throw ParseError(Kind::MalformedBody, lineno, "bad weight `" + wtok + "`");
        }
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
            throw ParseError(Kind::ColumnOutOfRange, lineno, "edge endpoint outside 0.." + std::to_string(n - 1));
        }
        if (!(w >= 0.0)) {
            throw ParseError(Kind::NegativeValue, lineno, "negative weight");
        }
        g.weights(i, j) = w;
        g.weights(j, i) = w;
    }
    return g;
}

SimilarityGraph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(ParseError::Kind::Io, 0, "cannot open " + path.string());
    }
    return read_graph(in);
}

} // namespace dcg
