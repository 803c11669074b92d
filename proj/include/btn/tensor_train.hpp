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

#include <vector>

#include "btn/factorization.hpp"
#include "btn/network.hpp"

namespace btn {

/// Where to cut the dimension list before unfolding and factoring.
struct SplitInfo {
    std::size_t split_point = 0; // rows take dims [0, split_point)
    std::size_t d1 = 1, d2 = 1;  // products of the two sides
    Dims dims1, dims2;
};

/// Tensor-train split rule. Recursive mode cuts at the middle,
/// ceil((order - gamma) / 2) with gamma = 1 when the trailing dimension is a
/// bond carried in from an earlier factorization (its size equals the rank).
/// Iterative mode cuts at 1 + gamma with gamma = 1 when the leading
/// dimension is such a bond. A bond and a true mode of equal size cannot be
/// told apart by shape alone, so when dimensions equal the rank the rule
/// deliberately treats them as bonds.
inline SplitInfo split_tt(const BooleanTensor& t, bool recursive, std::size_t rank) {
    const std::size_t order = t.order();
    if (order < 2)
        throw ShapeError("split_tt: tensor order must be >= 2, got " + std::to_string(order));

    std::size_t split;
    if (recursive) {
        const std::size_t gamma = t.dims().back() == rank ? 1 : 0;
        split = (order - gamma + 1) / 2;
    } else {
        const std::size_t gamma = t.dims().front() == rank ? 1 : 0;
        split = 1 + gamma;
    }
    if (split >= order) split = order - 1;
    if (split == 0) split = 1;

    SplitInfo info;
    info.split_point = split;
    info.dims1.assign(t.dims().begin(), t.dims().begin() + static_cast<std::ptrdiff_t>(split));
    info.dims2.assign(t.dims().begin() + static_cast<std::ptrdiff_t>(split), t.dims().end());
    info.d1 = dims_product(info.dims1);
    info.d2 = dims_product(info.dims2);
    return info;
}

namespace detail {

struct DecompositionContext {
    SolveContext& solve;
    FactorizationParams params;
};

inline void check_depth(std::size_t depth, std::size_t order) {
    if (depth > 2 * order + 4)
        throw NetworkError("decomposition recursion failed to reduce the problem");
}

/// Recursive body of the TT builder; emits the chain left to right.
inline void tensor_train_nodes(const BooleanTensor& t, bool recursive, std::size_t rank,
                               DecompositionContext& ctx, std::uint64_t seed,
                               std::size_t depth, std::size_t top_order,
                               std::vector<BooleanTensor>& out) {
    check_depth(depth, top_order);
    const SplitInfo info = split_tt(t, recursive, rank);
    const BooleanMatrix m = unfold_split(t, info.split_point);

    FactorizationParams params = ctx.params;
    params.seed = mix_seed(seed, 0xFAC);
    const FactorizationResult fact = matrix_factorization(m, rank, ctx.solve, params);

    Dims left_dims = info.dims1;
    left_dims.push_back(rank);
    Dims right_dims;
    right_dims.push_back(rank);
    right_dims.insert(right_dims.end(), info.dims2.begin(), info.dims2.end());

    // Left side: recurse while the piece can still shed modes; otherwise it
    // is already a boundary matrix or an order-3 carriage.
    if (info.split_point > 2 || (info.split_point > 1 && t.dims().front() > rank)) {
        tensor_train_nodes(reshape(fact.a, left_dims), recursive, rank, ctx,
                           mix_seed(seed, 1), depth + 1, top_order, out);
    } else {
        out.push_back(reshape(fact.a, left_dims));
    }

    // Right side: the mirrored guard, phrased on the order of the piece.
    const std::size_t right_order = info.dims2.size() + 1;
    if (right_order > 3 || (right_order > 2 && t.dims().back() > rank)) {
        tensor_train_nodes(reshape(fact.b, right_dims), recursive, rank, ctx,
                           mix_seed(seed, 2), depth + 1, top_order, out);
    } else {
        out.push_back(reshape(fact.b, right_dims));
    }
}

} // namespace detail

/// Tensor-train decomposition: unfold at the split point, factor, and carry
/// on recursively on both pieces per the guards; terminal pieces reshape to
/// boundary matrices or order-3 carriages. `recursive` selects the
/// middle-split variant, otherwise modes are peeled off one at a time.
inline TensorNetwork tensor_train(const BooleanTensor& t, bool recursive, std::size_t rank,
                                  SolveContext& solve, const FactorizationParams& params = {}) {
    if (t.order() < 3)
        throw ShapeError("tensor_train: tensor order must be >= 3, got " +
                         std::to_string(t.order()));
    if (rank == 0) throw ValueError("tensor_train: rank must be >= 1");

    ScopedCache scope(solve); // one memo shared by every factorization below
    detail::DecompositionContext ctx{scope.context(), params};
    std::vector<BooleanTensor> nodes;
    detail::tensor_train_nodes(t, recursive, rank, ctx, params.seed, 0, t.order(), nodes);
    return make_tt_network(std::move(nodes), t.dims());
}

} // namespace btn
