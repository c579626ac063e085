#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twinsurf {

struct NodeIndex {
    int i = 0;
    int j = 0;

    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

enum class ErrorKind {
    kStencil,
    kNotAGradient,
    kTopology,
    kDomain,
    kSpacelike,
    kLightlike,
    kNotAreaDecreasing,
    kGridMismatch,
    kOde,
    kParse,
    kUnknownName,
};

inline const char* to_string(ErrorKind kind);

/// Library failure carrying a category and, where meaningful, the offending nodes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::vector<NodeIndex> nodes = {}, double value = 0.0)
        : std::runtime_error(what), kind_(kind), nodes_(std::move(nodes)), value_(value)
    {
    }

    ErrorKind kind() const { return kind_; }
    const std::vector<NodeIndex>& nodes() const { return nodes_; }
    /// Auxiliary number: curl max for kNotAGradient, spacelike margin for kLightlike.
    double value() const { return value_; }

private:
    ErrorKind kind_;
    std::vector<NodeIndex> nodes_;
    double value_;
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::kStencil: return "stencil-failure";
    case ErrorKind::kNotAGradient: return "not-a-gradient";
    case ErrorKind::kTopology: return "topology";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kSpacelike: return "spacelike-violation";
    case ErrorKind::kLightlike: return "lightlike-degeneracy";
    case ErrorKind::kNotAreaDecreasing: return "not-area-decreasing";
    case ErrorKind::kGridMismatch: return "grid-mismatch";
    case ErrorKind::kOde: return "ode";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kUnknownName: return "unknown-name";
    }
    return "unknown";
}

} // namespace twinsurf
