#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "topomask/errors.hpp"

namespace topomask {

// d-dimensional grid of tokens. Flat ids follow row-major order over the
// reversed axis list (axis 1 innermost, axis d outermost), so ids adjacent
// along axis 1 differ by 1.
struct TokenGrid {
    std::vector<std::size_t> dims;  // [n_1, ..., n_d]

    explicit TokenGrid(std::vector<std::size_t> d) : dims(std::move(d)) {
        if (dims.empty()) throw DomainError("grid needs at least one axis");
        for (auto n : dims)
            if (n < 1) throw DomainError("grid axis size must be >= 1");
    }

    std::size_t ndim() const { return dims.size(); }

    std::size_t size() const {
        std::size_t t = 1;
        for (auto n : dims) t *= n;
        return t;
    }

    // Largest possible L1 grid distance between two nodes.
    std::size_t max_distance() const {
        std::size_t t = 0;
        for (auto n : dims) t += n - 1;
        return t;
    }

    std::size_t flat_index(const std::vector<std::size_t>& coords) const {
        if (coords.size() != dims.size()) throw DomainError("coordinate arity mismatch");
        std::size_t flat = 0;
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (coords[k] >= dims[k]) throw DomainError("grid coordinate out of range");
            flat = flat * dims[k] + coords[k];
        }
        return flat;
    }

    std::vector<std::size_t> coords(std::size_t flat) const {
        if (flat >= size()) throw DomainError("flat index out of range");
        std::vector<std::size_t> c(dims.size());
        for (std::size_t k = 0; k < dims.size(); ++k) {
            c[k] = flat % dims[k];
            flat /= dims[k];
        }
        return c;
    }

    // L1 shortest-path distance in the grid graph.
    std::size_t distance(std::size_t i, std::size_t j) const {
        auto a = coords(i), b = coords(j);
        std::size_t d = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
            d += a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
        return d;
    }
};

}  // namespace topomask
