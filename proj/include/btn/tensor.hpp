/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "btn/bitvec.hpp"
#include "btn/errors.hpp"

namespace btn {

using Dims = std::vector<std::size_t>;

inline std::string dims_to_string(const Dims& dims) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
    os << ")";
    return os.str();
}

inline std::size_t dims_product(const Dims& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw ValueError("tensor dimension must be >= 1");
        if (p > static_cast<std::size_t>(-1) / d)
            throw ValueError("tensor element count overflows size_t");
        p *= d;
    }
    return p;
}

/// Dense bit-packed n-dimensional array of {0,1} values, row-major
/// (last index fastest).
class BooleanTensor {
public:
    BooleanTensor() : dims_{1}, data_(1) {}

    explicit BooleanTensor(Dims dims)
        : dims_(std::move(dims)), data_(dims_product(dims_)) {
        if (dims_.empty()) throw ValueError("tensor order must be >= 1");
    }

    BooleanTensor(Dims dims, BitVec data) : dims_(std::move(dims)), data_(std::move(data)) {
        if (dims_.empty()) throw ValueError("tensor order must be >= 1");
        if (data_.size() != dims_product(dims_))
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match dims " + dims_to_string(dims_));
    }

    const Dims& dims() const { return dims_; }
    std::size_t order() const { return dims_.size(); }
    std::size_t size() const { return data_.size(); }

    bool get(std::size_t linear) const { return data_.get(linear); }
    void set(std::size_t linear, bool v) { data_.set(linear, v); }

    bool at(std::span<const std::size_t> idx) const { return data_.get(linear_index(idx)); }
    void put(std::span<const std::size_t> idx, bool v) { data_.set(linear_index(idx), v); }

    std::size_t linear_index(std::span<const std::size_t> idx) const {
        if (idx.size() != dims_.size())
            throw ShapeError("index arity does not match tensor order");
        std::size_t lin = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= dims_[k]) throw ShapeError("tensor index out of range");
            lin = lin * dims_[k] + idx[k];
        }
        return lin;
    }

    const BitVec& data() const { return data_; }
    BitVec& mutable_data() { return data_; }

    bool operator==(const BooleanTensor& o) const {
        return dims_ == o.dims_ && data_ == o.data_;
    }
    bool operator!=(const BooleanTensor& o) const { return !(*this == o); }

private:
    Dims dims_;
    BitVec data_;
};

/// Order-2 Boolean tensor with named row/column sizes, row-major.
class BooleanMatrix {
public:
    BooleanMatrix() : rows_(1), cols_(1), data_(1) {}

    BooleanMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols)) {}

    BooleanMatrix(std::size_t rows, std::size_t cols, BitVec data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != checked_size(rows, cols))
            throw ShapeError("matrix data length does not match " + shape_string());
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    bool get(std::size_t i, std::size_t j) const { return data_.get(i * cols_ + j); }
    void set(std::size_t i, std::size_t j, bool v) { data_.set(i * cols_ + j, v); }

    const BitVec& data() const { return data_; }
    BitVec& mutable_data() { return data_; }

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    BooleanTensor to_tensor() const { return BooleanTensor({rows_, cols_}, data_); }

    static BooleanMatrix from_tensor(const BooleanTensor& t) {
        if (t.order() != 2)
            throw ShapeError("matrix view requires an order-2 tensor, got order " +
                             std::to_string(t.order()));
        return BooleanMatrix(t.dims()[0], t.dims()[1], t.data());
    }

    static BooleanMatrix identity(std::size_t n) {
        BooleanMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    bool operator==(const BooleanMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const BooleanMatrix& o) const { return !(*this == o); }

private:
    static std::size_t checked_size(std::size_t r, std::size_t c) {
        return dims_product({r, c});
    }

    std::size_t rows_, cols_;
    BitVec data_;
};

/// Boolean matrix product over the (OR, AND) semiring: out[i][j] = OR_l A[i][l] AND B[l][j].
inline BooleanMatrix bool_matmul(const BooleanMatrix& a, const BooleanMatrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("bool_matmul: inner dimensions differ, " + a.shape_string() +
                         " * " + b.shape_string());
    BooleanMatrix out(a.rows(), b.cols());
    const std::size_t m = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l)
            if (a.get(i, l)) out.mutable_data().or_range(b.data(), l * m, i * m, m);
    return out;
}

inline std::size_t hamming(const BooleanTensor& x, const BooleanTensor& y) {
    if (x.dims() != y.dims())
        throw ShapeError("hamming: shape mismatch " + dims_to_string(x.dims()) + " vs " +
                         dims_to_string(y.dims()));
    return x.data().hamming(y.data());
}

inline std::size_t hamming(const BooleanMatrix& x, const BooleanMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("hamming: shape mismatch " + x.shape_string() + " vs " +
                         y.shape_string());
    return x.data().hamming(y.data());
}

/// Split-at-a-point unfolding: rows indexed by the leading axes, columns by
/// the rest. Because storage is row-major the bit sequence is unchanged;
/// only the shape is relabeled.
inline BooleanMatrix unfold_split(const BooleanTensor& t, std::size_t split_point) {
    if (split_point == 0 || split_point >= t.order())
        throw ShapeError("unfold: split point " + std::to_string(split_point) +
                         " must select a nonempty proper prefix of " +
                         dims_to_string(t.dims()));
    std::size_t d1 = 1, d2 = 1;
    for (std::size_t k = 0; k < t.order(); ++k)
        (k < split_point ? d1 : d2) *= t.dims()[k];
    return BooleanMatrix(d1, d2, t.data());
}

/// Unfolding with an explicit row-axis selection. Only prefix-contiguous,
/// order-preserving selections are representable without reordering data.
inline BooleanMatrix unfold(const BooleanTensor& t, std::span<const std::size_t> row_dims) {
    if (row_dims.empty() || row_dims.size() >= t.order())
        throw ShapeError("unfold: row axes must be a nonempty proper subset of " +
                         std::to_string(t.order()) + " axes");
    for (std::size_t k = 0; k < row_dims.size(); ++k)
        if (row_dims[k] != k)
            throw ShapeError("unfold: row axes must be the prefix 0.." +
                             std::to_string(row_dims.size() - 1) + " in order");
    return unfold_split(t, row_dims.size());
}

/// Relabels the shape; the row-major bit sequence is untouched.
inline BooleanTensor reshape(const BooleanTensor& t, Dims new_dims) {
    if (dims_product(new_dims) != t.size())
        throw ShapeError("reshape: element count mismatch, " + dims_to_string(t.dims()) +
                         " -> " + dims_to_string(new_dims));
    return BooleanTensor(std::move(new_dims), t.data());
}

inline BooleanTensor reshape(const BooleanMatrix& m, Dims new_dims) {
    if (dims_product(new_dims) != m.size())
        throw ShapeError("reshape: element count mismatch, " + m.shape_string() + " -> " +
                         dims_to_string(new_dims));
    return BooleanTensor(std::move(new_dims), m.data());
}

inline BooleanMatrix transpose(const BooleanMatrix& m) {
    BooleanMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.get(i, j)) out.set(j, i, true);
    return out;
}

/// Column j as a bit vector.
inline BitVec matrix_column(const BooleanMatrix& m, std::size_t j) {
    if (j >= m.cols()) throw ShapeError("matrix_column: index out of range");
    BitVec col(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) col.set(i, m.get(i, j));
    return col;
}

inline void set_matrix_column(BooleanMatrix& m, std::size_t j, const BitVec& col) {
    if (col.size() != m.rows())
        throw ShapeError("set_matrix_column: length mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) m.set(i, j, col.get(i));
}

/// Reorders axes: out[idx[perm[0]], ..., idx[perm[d-1]]] = in[idx].
/// perm[k] names the input axis that becomes output axis k.
inline BooleanTensor permute_axes(const BooleanTensor& t, std::span<const std::size_t> perm) {
    const std::size_t d = t.order();
    if (perm.size() != d) throw ShapeError("permute_axes: permutation arity mismatch");
    std::vector<bool> seen(d, false);
    Dims new_dims(d);
    for (std::size_t k = 0; k < d; ++k) {
        if (perm[k] >= d || seen[perm[k]])
            throw ShapeError("permute_axes: not a permutation");
        seen[perm[k]] = true;
        new_dims[k] = t.dims()[perm[k]];
    }
    // Strides of the input axes in the output linearization.
    std::vector<std::size_t> out_stride_of_in(d);
    std::size_t stride = 1;
    for (std::size_t k = d; k-- > 0;) {
        out_stride_of_in[perm[k]] = stride;
        stride *= new_dims[k];
    }
    BooleanTensor out(new_dims);
    std::vector<std::size_t> idx(d, 0);
    const std::size_t n = t.size();
    std::size_t out_lin = 0;
    for (std::size_t lin = 0; lin < n; ++lin) {
        if (t.get(lin)) out.set(out_lin, true);
        // Row-major odometer over the input index, updating the output offset.
        for (std::size_t k = d; k-- > 0;) {
            idx[k]++;
            out_lin += out_stride_of_in[k];
            if (idx[k] < t.dims()[k]) break;
            out_lin -= idx[k] * out_stride_of_in[k];
            idx[k] = 0;
        }
    }
    return out;
}

/// Moves one axis to a new position, keeping the relative order of the rest.
inline BooleanTensor move_axis(const BooleanTensor& t, std::size_t from, std::size_t to) {
    const std::size_t d = t.order();
    if (from >= d || to >= d) throw ShapeError("move_axis: axis out of range");
    std::vector<std::size_t> perm;
    perm.reserve(d);
    for (std::size_t k = 0; k < d; ++k)
        if (k != from) perm.push_back(k);
    perm.insert(perm.begin() + static_cast<std::ptrdiff_t>(to), from);
    return permute_axes(t, perm);
}

} // namespace btn
