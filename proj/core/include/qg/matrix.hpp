#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qg {

//! Row-major sample matrix: n rows (observations) by d columns (coordinates).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c)
        : rows(r)
        , cols(c)
        , data(r * c, 0.0)
    {
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const
    {
        return { data.data() + i * cols, cols };
    }

    std::vector<double> column(std::size_t j) const
    {
        if (j >= cols)
            throw std::out_of_range("Matrix::column: index out of range");
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i)
            out[i] = (*this)(i, j);
        return out;
    }
};

} // namespace qg
