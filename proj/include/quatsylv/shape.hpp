#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace quatsylv {

using Dims = std::vector<std::int64_t>;

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Row/column mode extents of an even-order tensor viewed as a linear map:
// N row modes (I_1..I_N) and M column modes (J_1..J_M), all >= 1.
struct Shape {
    Dims rows;
    Dims cols;

    Shape() = default;
    Shape(Dims r, Dims c) : rows(std::move(r)), cols(std::move(c)) { validate(); }

    void validate() const {
        if (rows.empty() || cols.empty())
            throw ShapeMismatch("Shape: need at least one row mode and one column mode");
        for (auto d : rows)
            if (d < 1) throw ShapeMismatch("Shape: row mode extent < 1");
        for (auto d : cols)
            if (d < 1) throw ShapeMismatch("Shape: column mode extent < 1");
    }

    std::int64_t total_rows() const {
        return std::accumulate(rows.begin(), rows.end(), std::int64_t{1},
                               std::multiplies<>());
    }
    std::int64_t total_cols() const {
        return std::accumulate(cols.begin(), cols.end(), std::int64_t{1},
                               std::multiplies<>());
    }

    Shape transposed() const { return Shape(cols, rows); }

    bool operator==(const Shape& o) const { return rows == o.rows && cols == o.cols; }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string str() const;
};

inline std::string dims_str(const Dims& d) {
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(d[i]);
    }
    return s + ")";
}

inline std::string Shape::str() const { return dims_str(rows) + "x" + dims_str(cols); }

}  // namespace quatsylv
