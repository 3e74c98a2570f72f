#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topomask/errors.hpp"

namespace topomask {

using Vector = std::vector<double>;

// Row-major matrix of 64-bit floats.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    Vector col(std::size_t j) const {
        Vector v(rows);
        for (std::size_t i = 0; i < rows; ++i) v[i] = at(i, j);
        return v;
    }
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);

// "TMV1" binary tensor container: magic, u32 ndim, ndim x u32 dims, then
// row-major little-endian f64 payload.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<double> data;

    std::size_t total() const {
        std::size_t t = 1;
        for (auto d : dims) t *= d;
        return t;
    }
};

Tensor read_tensor(const std::string& path);
void write_tensor(const std::string& path, const Tensor& t);

Tensor tensor_from_vector(const Vector& v);
Tensor tensor_from_matrix(const DenseMatrix& m);
DenseMatrix matrix_from_tensor(const Tensor& t);
Vector vector_from_tensor(const Tensor& t);

// Relative l2 error |a-b| / (|b| + 1e-30).
double rel_error(std::span<const double> a, std::span<const double> b);

}  // namespace topomask
