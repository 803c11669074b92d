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

#include <utility>
#include <vector>

#include "btn/factorization.hpp"
#include "btn/network.hpp"
#include "btn/tensor_train.hpp"

namespace btn {

struct TuckerResult {
    BooleanTensor core;                 // shape (rank, ..., rank), order d
    std::vector<BooleanMatrix> factors; // factor n is dims[n] x rank
};

namespace detail {

/// Mode-n matricization: rows are mode n, columns the remaining modes in
/// their original order.
inline BooleanMatrix matricize_mode(const BooleanTensor& t, std::size_t mode) {
    return unfold_split(move_axis(t, mode, 0), 1);
}

/// Inverse of matricize_mode for a matrix whose rows replace mode n.
inline BooleanTensor dematricize_mode(const BooleanMatrix& m, const Dims& dims,
                                      std::size_t mode) {
    Dims rotated;
    rotated.push_back(dims[mode]);
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (k != mode) rotated.push_back(dims[k]);
    return move_axis(reshape(m, rotated), 0, mode);
}

} // namespace detail

/// Mode-by-mode Tucker decomposition: for every mode in turn, matricize the
/// current tensor along it, factor at the given rank, keep the small factor
/// and continue with the large one (that mode's size becomes the rank). The
/// final tensor is the core.
inline TuckerResult iterative_tucker(const BooleanTensor& t, std::size_t rank,
                                     SolveContext& solve,
                                     const FactorizationParams& params = {}) {
    if (t.order() < 2)
        throw ShapeError("iterative_tucker: tensor order must be >= 2, got " +
                         std::to_string(t.order()));
    if (rank == 0) throw ValueError("iterative_tucker: rank must be >= 1");

    ScopedCache scope(solve);
    SolveContext& ctx = scope.context();

    TuckerResult result;
    BooleanTensor current = t;
    for (std::size_t mode = 0; mode < t.order(); ++mode) {
        const BooleanMatrix unfolded = detail::matricize_mode(current, mode);
        FactorizationParams p = params;
        p.seed = mix_seed(params.seed, 0x70C, mode);
        const FactorizationResult fact = matrix_factorization(unfolded, rank, ctx, p);
        result.factors.push_back(fact.a); // dims[mode] x rank
        Dims next_dims = current.dims();
        next_dims[mode] = rank;
        current = detail::dematricize_mode(fact.b, next_dims, mode);
    }
    result.core = std::move(current);
    return result;
}

/// Divide-and-conquer Tucker: split at the middle, factor, decompose both
/// halves (recursively while their order is at least min_rec_ord, else with
/// the iterative variant), then join the two sub-cores through the bond
/// created by the top split. Each half carries that bond as an extra mode;
/// its Tucker factor is absorbed into the joined core, so the result again
/// has one factor per original mode and a core of the original order.
inline TuckerResult recursive_tucker(const BooleanTensor& t, std::size_t rank,
                                     std::size_t min_rec_ord, SolveContext& solve,
                                     const FactorizationParams& params = {}) {
    if (t.order() < 2)
        throw ShapeError("recursive_tucker: tensor order must be >= 2, got " +
                         std::to_string(t.order()));
    if (min_rec_ord % 2 != 0)
        throw ValueError("recursive_tucker: min_rec_ord must be even, got " +
                         std::to_string(min_rec_ord));
    if (rank == 0) throw ValueError("recursive_tucker: rank must be >= 1");

    if (t.order() < min_rec_ord) return iterative_tucker(t, rank, solve, params);

    ScopedCache scope(solve);
    SolveContext& ctx = scope.context();

    const SplitInfo info = split_tt(t, /*recursive=*/true, rank);
    const BooleanMatrix m = unfold_split(t, info.split_point);
    FactorizationParams p = params;
    p.seed = mix_seed(params.seed, 0xFAC);
    const FactorizationResult fact = matrix_factorization(m, rank, ctx, p);

    Dims left_dims = info.dims1;
    left_dims.push_back(rank);
    Dims right_dims;
    right_dims.push_back(rank);
    right_dims.insert(right_dims.end(), info.dims2.begin(), info.dims2.end());

    FactorizationParams left_params = params, right_params = params;
    left_params.seed = mix_seed(params.seed, 1);
    right_params.seed = mix_seed(params.seed, 2);
    TuckerResult left =
        recursive_tucker(reshape(fact.a, left_dims), rank, min_rec_ord, ctx, left_params);
    TuckerResult right =
        recursive_tucker(reshape(fact.b, right_dims), rank, min_rec_ord, ctx, right_params);

    // The halves' bond modes sit last (left) and first (right); join their
    // cores through coupling = F_left_bond^T * F_right_bond.
    const BooleanMatrix coupling =
        bool_matmul(transpose(left.factors.back()), right.factors.front());
    const BooleanTensor joined_left =
        contract_modes(left.core, left.core.order() - 1, coupling.to_tensor(), 0);
    TuckerResult result;
    result.core = contract_modes(joined_left, joined_left.order() - 1, right.core, 0);
    result.factors.assign(left.factors.begin(), left.factors.end() - 1);
    result.factors.insert(result.factors.end(), right.factors.begin() + 1,
                          right.factors.end());
    return result;
}

/// Wraps a Tucker result as a contractible network.
inline TensorNetwork tucker_network(TuckerResult result, Dims target_dims) {
    return make_tucker_network(std::move(result.core), std::move(result.factors),
                               std::move(target_dims));
}

} // namespace btn
