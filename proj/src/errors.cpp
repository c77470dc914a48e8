#include "dcg/errors.hpp"

#include <sstream>
#include <utility>

namespace dcg {

namespace {

std::string with_line(std::size_t line, const std::string& what) {
    if (line == 0) {
        return what;
    }
    return "line " + std::to_string(line) + ": " + what;
}

std::string with_nodes(const std::string& what, const std::vector<std::size_t>& nodes) {
    std::ostringstream os;
    os << what << " [";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i == 8) {
            os << ", ... (" << nodes.size() << " total)";
            break;
        }
        os << (i ? ", " : "") << nodes[i];
    }
    os << "]";
    return os.str();
}

} // namespace

ParseError::ParseError(Kind kind, std::size_t line, const std::string& what)
    : Error(with_line(line, what)), kind_(kind), line_(line) {}

NumericalError::NumericalError(const std::string& what, long iterations)
    : Error(iterations >= 0 ? what + " after " + std::to_string(iterations) + " iterations" : what),
      iterations_(iterations) {}

DegenerateNodes::DegenerateNodes(const std::string& what, std::vector<std::size_t> nodes)
    : Error(with_nodes(what, nodes)), nodes_(std::move(nodes)) {}

StageError::StageError(std::string stage, const std::string& what)
    : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

} // namespace dcg
