#include "topomask/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace topomask {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) throw DomainError("matmul: shape mismatch");
    DenseMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            double* crow = c.data.data() + i * c.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols != x.size()) throw DomainError("matvec: shape mismatch");
    Vector y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = a.data.data() + i * a.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

namespace {
constexpr char kMagic[4] = {'T', 'M', 'V', '1'};

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
}
}  // namespace

Tensor read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open tensor file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DomainError("bad tensor magic in " + path);
    Tensor t;
    std::uint32_t ndim = read_u32(in);
    t.dims.resize(ndim);
    for (auto& d : t.dims) d = read_u32(in);
    std::size_t total = t.total();
    t.data.resize(total);
    // Payload is little-endian f64; this build targets little-endian hosts.
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw DomainError("truncated tensor payload in " + path);
    for (double v : t.data)
        if (!std::isfinite(v)) throw DomainError("non-finite entry in tensor " + path);
    return t;
}

void write_tensor(const std::string& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write tensor file: " + path);
    out.write(kMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) write_u32(out, d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

Tensor tensor_from_vector(const Vector& v) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(v.size())};
    t.data = v;
    return t;
}

Tensor tensor_from_matrix(const DenseMatrix& m) {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)};
    t.data = m.data;
    return t;
}

DenseMatrix matrix_from_tensor(const Tensor& t) {
    if (t.dims.size() == 1) {
        DenseMatrix m(t.dims[0], 1);
        m.data = t.data;
        return m;
    }
    if (t.dims.size() != 2) throw DomainError("tensor is not a matrix");
    DenseMatrix m(t.dims[0], t.dims[1]);
    m.data = t.data;
    return m;
}

Vector vector_from_tensor(const Tensor& t) {
    if (t.dims.size() != 1) throw DomainError("tensor is not a vector");
    return t.data;
}

double rel_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return std::sqrt(num) / (std::sqrt(den) + 1e-30);
}

}  // namespace topomask
