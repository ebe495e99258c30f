#pragma once

#include <memory>
#include <string>

#include "thermorel/common.hpp"

namespace thermorel {

/// Arithmetic expression over the spatial variables x, y, z.
///
/// Supported: numbers, + - * / ^ (right associative), parentheses, unary minus,
/// the constant pi, and the functions sin, cos, tan, exp, log, sqrt, abs.
/// Parsing happens once; evaluation is allocation-free and re-entrant.
class Expression {
public:
    struct Node;

    Expression() = default;

    /// Throws ValidationError with a column-anchored message on bad input.
    static Expression parse(const std::string& source);

    double eval(const Vec3& p) const;
    const std::string& source() const { return source_; }
    bool empty() const { return !root_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace thermorel
