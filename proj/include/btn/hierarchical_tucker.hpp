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
namespace detail {

/// A partially built HT subtree in local node numbering. Node 0 is the
/// subtree root; `bond` addresses the mode that connects to the parent.
struct HtSubtree {
    std::vector<NetworkNode> nodes;
    std::vector<Edge> edges;
    ModeRef bond;
};

inline HtSubtree ht_leaf(BooleanTensor matrix) {
    HtSubtree sub;
    sub.nodes.push_back({NodeRole::HTLeaf, std::move(matrix)});
    sub.bond = {0, 1}; // leaves are stored (mode_size x bond)
    return sub;
}

/// Splices a child subtree into the parent's node list, rebasing its local
/// indices, and bonds it to the given parent mode.
inline void attach_child(HtSubtree& parent, const ModeRef& parent_mode, HtSubtree child) {
    const std::size_t base = parent.nodes.size();
    for (auto& node : child.nodes) parent.nodes.push_back(std::move(node));
    for (Edge e : child.edges) {
        e.first.node += base;
        e.second.node += base;
        parent.edges.push_back(e);
    }
    parent.edges.push_back({parent_mode, {child.bond.node + base, child.bond.mode}});
}

/// Builds the HT subtree of a working tensor with dims (n_1..n_s, q), the
/// trailing mode being the bond to the parent level. Splits the true modes
/// at s/2, factors the unfolding, extracts the transfer core (q, r, r'),
/// and recurses on both halves while they still hold more than one mode.
inline HtSubtree ht_subtree(const BooleanTensor& w, std::size_t rank,
                            DecompositionContext& ctx, std::uint64_t seed,
                            std::size_t depth, std::size_t top_order) {
    check_depth(depth, top_order);
    const std::size_t s = w.order() - 1;
    const std::size_t q = w.dims().back();
    const std::size_t s2 = s / 2;

    Dims dims1(w.dims().begin(), w.dims().begin() + static_cast<std::ptrdiff_t>(s2));
    Dims dims2(w.dims().begin() + static_cast<std::ptrdiff_t>(s2), w.dims().end() - 1);

    const BooleanMatrix m = unfold_split(w, s2);
    FactorizationParams p1 = ctx.params;
    p1.seed = mix_seed(seed, 0xF1);
    const FactorizationResult fact1 = matrix_factorization(m, rank, ctx.solve, p1);

    HtSubtree left;
    if (dims1.size() > 1) {
        Dims child_dims = dims1;
        child_dims.push_back(rank);
        left = ht_subtree(reshape(fact1.a, child_dims), rank, ctx, mix_seed(seed, 1),
                          depth + 1, top_order);
    } else {
        left = ht_leaf(fact1.a.to_tensor());
    }

    // Move the parent bond next to the fresh one: (r, n.., q) -> (q, r, n..),
    // then factor rows (q*r) against the remaining modes.
    Dims m2_dims;
    m2_dims.push_back(rank);
    m2_dims.insert(m2_dims.end(), dims2.begin(), dims2.end());
    m2_dims.push_back(q);
    const BooleanTensor m2_rotated = move_axis(reshape(fact1.b, m2_dims), m2_dims.size() - 1, 0);
    const BooleanMatrix m2 = unfold_split(m2_rotated, 2);

    FactorizationParams p2 = ctx.params;
    p2.seed = mix_seed(seed, 0xF2);
    const FactorizationResult fact2 = matrix_factorization(m2, rank, ctx.solve, p2);

    HtSubtree sub;
    sub.nodes.push_back({NodeRole::HTCore, reshape(fact2.a, {q, rank, rank})});
    sub.bond = {0, 0};

    HtSubtree right;
    if (dims2.size() > 1) {
        Dims child_dims;
        child_dims.push_back(rank);
        child_dims.insert(child_dims.end(), dims2.begin(), dims2.end());
        // Hand the child its bond as the trailing mode.
        const BooleanTensor child = move_axis(reshape(fact2.b, child_dims), 0,
                                              child_dims.size() - 1);
        right = ht_subtree(child, rank, ctx, mix_seed(seed, 2), depth + 1, top_order);
    } else {
        right = ht_leaf(transpose(fact2.b).to_tensor());
    }

    attach_child(sub, {0, 1}, std::move(left));
    attach_child(sub, {0, 2}, std::move(right));
    return sub;
}

} // namespace detail

/// Hierarchical Tucker decomposition into a binary tree of order-3 transfer
/// cores with leaf factor matrices. `q` is the bond rank handed down by the
/// enclosing level: 1 for a toplevel tensor, otherwise the size of the
/// trailing mode of `t`. The root core has shape (q, rank, rank); for a
/// toplevel call its unit bond is squeezed away on contraction.
inline TensorNetwork hierarchical_tucker(const BooleanTensor& t, std::size_t q,
                                         std::size_t rank, SolveContext& solve,
                                         const FactorizationParams& params = {}) {
    if (t.order() < 2)
        throw ShapeError("hierarchical_tucker: tensor order must be >= 2, got " +
                         std::to_string(t.order()));
    if (q < 1) throw ValueError("hierarchical_tucker: q must be >= 1");
    if (q > 1 && t.dims().back() != q)
        throw ShapeError("hierarchical_tucker: trailing mode " +
                         std::to_string(t.dims().back()) + " does not carry bond q=" +
                         std::to_string(q));
    if (rank == 0) throw ValueError("hierarchical_tucker: rank must be >= 1");

    ScopedCache scope(solve);
    detail::DecompositionContext ctx{scope.context(), params};

    TensorNetwork net;
    net.kind = NetworkKind::HT;
    net.target_dims = t.dims();

    if (q == 1 && t.order() == 2) {
        // A matrix bottoms out with a single factorization; the root core is
        // the degenerate identity coupling of the two leaves.
        FactorizationParams p = params;
        p.seed = mix_seed(params.seed, 0xF1);
        const FactorizationResult fact =
            matrix_factorization(BooleanMatrix::from_tensor(t), rank, ctx.solve, p);
        net.nodes.push_back(
            {NodeRole::HTCore, reshape(BooleanMatrix::identity(rank), {1, rank, rank})});
        net.nodes.push_back({NodeRole::HTLeaf, fact.a.to_tensor()});
        net.nodes.push_back({NodeRole::HTLeaf, transpose(fact.b).to_tensor()});
        net.edges.push_back({{0, 1}, {1, 1}});
        net.edges.push_back({{0, 2}, {2, 1}});
        validate(net);
        return net;
    }

    BooleanTensor w = t;
    if (q == 1) {
        Dims with_bond = t.dims();
        with_bond.push_back(1);
        w = reshape(t, with_bond);
    }
    if (w.order() - 1 == 1) {
        // One true mode: the subtree is a single leaf matrix.
        net.nodes.push_back({NodeRole::HTLeaf, w});
        validate(net);
        return net;
    }

    detail::HtSubtree sub =
        detail::ht_subtree(w, rank, ctx, params.seed, 0, t.order());
    net.nodes = std::move(sub.nodes);
    net.edges = std::move(sub.edges);
    validate(net);
    return net;
}

} // namespace btn
