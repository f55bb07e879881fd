#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdoamap {

// Dense M x N matrix, rows are microphones and columns are sources.
using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::Vector3d;
using Points = std::vector<Point>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration values (counts, room sizes, negative sigma...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Reference microphone / source index out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

// TimingMatrix of the wrong kind handed to an operation.
class KindError : public Error {
public:
    using Error::Error;
};

// Mismatched matrix or point-cloud dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed CSV / JSON input. row and column are 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace tdoamap
