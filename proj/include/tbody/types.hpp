#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace tbody {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Numeric tolerances shared by the library. Every approximate result carries
// the tolerance it was computed with.
struct Tolerances {
    double lp = 1e-9;          // LP optimality / membership slack
    double mvee = 1e-7;        // minimum-volume ellipsoid relative optimality
    double geometry = 1e-6;    // geometric comparisons
    double hull_gap = 1e-8;    // projection duality gap
    double hausdorff = 1e-9;   // target bracket for sampled Hausdorff
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& w) : Error("dimension_mismatch", w) {}
};

class CorruptBody : public Error {
public:
    explicit CorruptBody(const std::string& w) : Error("corrupt_body", w) {}
};

class Unsupported : public Error {
public:
    explicit Unsupported(const std::string& w) : Error("unsupported", w) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& w) : Error("invalid_argument", w) {}
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want)
        throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) +
                                ", got " + std::to_string(got));
}

}  // namespace tbody
