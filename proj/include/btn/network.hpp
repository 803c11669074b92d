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

#include <algorithm>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "btn/tensor.hpp"

namespace btn {

enum class NetworkKind { TT, Tucker, HT };

enum class NodeRole { TTCar, TTCarriage, TuckerCore, TuckerFactor, HTCore, HTLeaf };

inline std::string to_string(NetworkKind k) {
    switch (k) {
    case NetworkKind::TT: return "tt";
    case NetworkKind::Tucker: return "tucker";
    case NetworkKind::HT: return "ht";
    }
    return "?";
}

inline NetworkKind kind_from_string(const std::string& s) {
    if (s == "tt") return NetworkKind::TT;
    if (s == "tucker") return NetworkKind::Tucker;
    if (s == "ht") return NetworkKind::HT;
    throw ValueError("unknown network kind '" + s + "'");
}

inline std::string to_string(NodeRole r) {
    switch (r) {
    case NodeRole::TTCar: return "tt-car";
    case NodeRole::TTCarriage: return "tt-carriage";
    case NodeRole::TuckerCore: return "tucker-core";
    case NodeRole::TuckerFactor: return "tucker-factor";
    case NodeRole::HTCore: return "ht-core";
    case NodeRole::HTLeaf: return "ht-leaf";
    }
    return "?";
}

inline NodeRole role_from_string(const std::string& s) {
    if (s == "tt-car") return NodeRole::TTCar;
    if (s == "tt-carriage") return NodeRole::TTCarriage;
    if (s == "tucker-core") return NodeRole::TuckerCore;
    if (s == "tucker-factor") return NodeRole::TuckerFactor;
    if (s == "ht-core") return NodeRole::HTCore;
    if (s == "ht-leaf") return NodeRole::HTLeaf;
    throw ValueError("unknown node role '" + s + "'");
}

struct NetworkNode {
    NodeRole role;
    BooleanTensor tensor;
};

/// Addresses one mode of one node.
struct ModeRef {
    std::size_t node = 0;
    std::size_t mode = 0;

    bool operator==(const ModeRef& o) const { return node == o.node && mode == o.mode; }
    bool operator<(const ModeRef& o) const {
        return node != o.node ? node < o.node : mode < o.mode;
    }
};

using Edge = std::pair<ModeRef, ModeRef>;

/// Typed collection of factor matrices and cores plus the pairing of bond
/// modes. Modes not covered by any edge are external; ordered by
/// (node, mode) they correspond to the target axes in order. Exception: for
/// an HT network, node 0 is the root core and its mode 0 is the bond to a
/// notional parent; it maps to a trailing axis, squeezed away when its size
/// is 1.
struct TensorNetwork {
    NetworkKind kind = NetworkKind::TT;
    std::vector<NetworkNode> nodes;
    std::vector<Edge> edges;
    Dims target_dims;
};

inline void validate(const TensorNetwork& net) {
    if (net.nodes.empty()) throw NetworkError("network has no nodes");
    std::vector<std::vector<bool>> used(net.nodes.size());
    for (std::size_t k = 0; k < net.nodes.size(); ++k)
        used[k].assign(net.nodes[k].tensor.order(), false);
    for (const Edge& e : net.edges) {
        for (const ModeRef& r : {e.first, e.second}) {
            if (r.node >= net.nodes.size() ||
                r.mode >= net.nodes[r.node].tensor.order())
                throw NetworkError("edge references nonexistent mode");
            if (used[r.node][r.mode])
                throw NetworkError("mode (" + std::to_string(r.node) + "," +
                                   std::to_string(r.mode) + ") appears in two edges");
            used[r.node][r.mode] = true;
        }
        const std::size_t da = net.nodes[e.first.node].tensor.dims()[e.first.mode];
        const std::size_t db = net.nodes[e.second.node].tensor.dims()[e.second.mode];
        if (da != db)
            throw NetworkError("edge joins modes of sizes " + std::to_string(da) + " and " +
                               std::to_string(db));
    }
}

namespace detail {

struct ContractionItem {
    BooleanTensor tensor;
    std::vector<ModeRef> origins; // original (node, mode) of each current mode
};

/// Contracts two tensors over the given aligned axis pairs:
/// out[freeX..., freeY...] = OR over shared of X AND Y.
inline BooleanTensor contract_pair(const BooleanTensor& x, const BooleanTensor& y,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const std::size_t dx = x.order(), dy = y.order();
    std::vector<bool> x_shared(dx, false), y_shared(dy, false);
    for (const auto& [ax, ay] : pairs) {
        if (x.dims()[ax] != y.dims()[ay])
            throw NetworkError("contracted modes differ in size");
        x_shared[ax] = true;
        y_shared[ay] = true;
    }
    std::vector<std::size_t> x_free, y_free;
    for (std::size_t k = 0; k < dx; ++k)
        if (!x_shared[k]) x_free.push_back(k);
    for (std::size_t k = 0; k < dy; ++k)
        if (!y_shared[k]) y_free.push_back(k);

    auto strides = [](const BooleanTensor& t) {
        std::vector<std::size_t> s(t.order(), 1);
        for (std::size_t k = t.order() - 1; k-- > 0;) s[k] = s[k + 1] * t.dims()[k + 1];
        return s;
    };
    const std::vector<std::size_t> sx = strides(x), sy = strides(y);

    Dims out_dims;
    for (std::size_t k : x_free) out_dims.push_back(x.dims()[k]);
    for (std::size_t k : y_free) out_dims.push_back(y.dims()[k]);
    if (out_dims.empty()) out_dims.push_back(1); // scalar result kept as a 1-tensor
    BooleanTensor out(out_dims);

    std::size_t shared_count = 1;
    for (const auto& [ax, ay] : pairs) shared_count *= x.dims()[ax];

    // Odometer over (x_free, y_free, shared).
    const std::size_t nxf = x_free.size(), nyf = y_free.size(), ns = pairs.size();
    std::vector<std::size_t> fx(nxf, 0), fy(nyf, 0), sh(ns, 0);
    std::size_t out_lin = 0;
    const std::size_t out_n = out.size();

    for (std::size_t cell = 0; cell < out_n; ++cell) {
        std::size_t x_base = 0, y_base = 0;
        for (std::size_t k = 0; k < nxf; ++k) x_base += fx[k] * sx[x_free[k]];
        for (std::size_t k = 0; k < nyf; ++k) y_base += fy[k] * sy[y_free[k]];

        bool hit = false;
        std::fill(sh.begin(), sh.end(), 0);
        for (std::size_t s = 0; s < shared_count && !hit; ++s) {
            std::size_t xi = x_base, yi = y_base;
            for (std::size_t t = 0; t < ns; ++t) {
                xi += sh[t] * sx[pairs[t].first];
                yi += sh[t] * sy[pairs[t].second];
            }
            hit = x.get(xi) && y.get(yi);
            for (std::size_t t = ns; t-- > 0;) {
                if (++sh[t] < x.dims()[pairs[t].first]) break;
                sh[t] = 0;
            }
        }
        if (hit) out.set(out_lin, true);
        ++out_lin;

        // advance (fx, fy) odometer, y fastest
        bool carried = true;
        for (std::size_t k = nyf; carried && k-- > 0;) {
            carried = ++fy[k] == y.dims()[y_free[k]];
            if (carried) fy[k] = 0;
        }
        for (std::size_t k = nxf; carried && k-- > 0;) {
            carried = ++fx[k] == x.dims()[x_free[k]];
            if (carried) fx[k] = 0;
        }
    }
    return out;
}

/// Contracts two axes of the same tensor (diagonal OR-sum).
inline BooleanTensor trace_pair(const BooleanTensor& x, std::size_t a1, std::size_t a2) {
    if (a1 == a2 || x.dims()[a1] != x.dims()[a2])
        throw NetworkError("trace requires two distinct equal-sized modes");
    if (a1 > a2) std::swap(a1, a2);
    Dims out_dims;
    for (std::size_t k = 0; k < x.order(); ++k)
        if (k != a1 && k != a2) out_dims.push_back(x.dims()[k]);
    if (out_dims.empty()) out_dims.push_back(1);
    BooleanTensor out(out_dims);

    std::vector<std::size_t> stride(x.order(), 1);
    for (std::size_t k = x.order() - 1; k-- > 0;) stride[k] = stride[k + 1] * x.dims()[k + 1];

    std::vector<std::size_t> idx(out_dims.size(), 0);
    const std::size_t n = out.size();
    for (std::size_t lin = 0; lin < n; ++lin) {
        std::size_t base = 0, t = 0;
        for (std::size_t k = 0; k < x.order(); ++k)
            if (k != a1 && k != a2) base += idx[t++] * stride[k];
        bool hit = false;
        for (std::size_t d = 0; d < x.dims()[a1] && !hit; ++d)
            hit = x.get(base + d * (stride[a1] + stride[a2]));
        if (hit) out.set(lin, true);
        for (std::size_t k = idx.size(); k-- > 0;) {
            if (++idx[k] < out_dims[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

} // namespace detail

/// Single-shared-mode Boolean contraction of two tensors; result modes are
/// X's remaining modes followed by Y's remaining modes.
inline BooleanTensor contract_modes(const BooleanTensor& x, std::size_t x_axis,
                                    const BooleanTensor& y, std::size_t y_axis) {
    return detail::contract_pair(x, y, {{x_axis, y_axis}});
}

/// Contracts the whole network to a tensor of shape target_dims. Pairwise
/// greedy order: the pending contraction producing the smallest intermediate
/// runs first; the result is order-independent because OR-AND contraction is
/// associative and commutative.
inline BooleanTensor contract(const TensorNetwork& net) {
    validate(net);

    std::vector<detail::ContractionItem> items;
    items.reserve(net.nodes.size());
    for (std::size_t k = 0; k < net.nodes.size(); ++k) {
        detail::ContractionItem item;
        item.tensor = net.nodes[k].tensor;
        for (std::size_t mode = 0; mode < item.tensor.order(); ++mode)
            item.origins.push_back({k, mode});
        items.push_back(std::move(item));
    }
    std::vector<Edge> pending = net.edges;

    auto locate = [&](const ModeRef& origin) -> std::pair<std::size_t, std::size_t> {
        for (std::size_t i = 0; i < items.size(); ++i)
            for (std::size_t m = 0; m < items[i].origins.size(); ++m)
                if (items[i].origins[m] == origin) return {i, m};
        throw NetworkError("dangling edge endpoint");
    };

    while (!pending.empty()) {
        // Pick the edge whose contraction yields the smallest intermediate.
        std::size_t best_edge = 0;
        std::size_t best_size = static_cast<std::size_t>(-1);
        for (std::size_t e = 0; e < pending.size(); ++e) {
            const auto [ia, ma] = locate(pending[e].first);
            const auto [ib, mb] = locate(pending[e].second);
            std::size_t size = 1;
            if (ia == ib) {
                for (std::size_t k = 0; k < items[ia].tensor.order(); ++k)
                    if (k != ma && k != mb) size *= items[ia].tensor.dims()[k];
            } else {
                size = items[ia].tensor.size() / items[ia].tensor.dims()[ma] *
                       (items[ib].tensor.size() / items[ib].tensor.dims()[mb]);
            }
            if (size < best_size) {
                best_size = size;
                best_edge = e;
            }
        }

        const Edge chosen = pending[best_edge];
        const auto [ia, ma] = locate(chosen.first);
        const auto [ib, mb] = locate(chosen.second);

        if (ia == ib) {
            detail::ContractionItem merged;
            merged.tensor = detail::trace_pair(items[ia].tensor, ma, mb);
            for (std::size_t m = 0; m < items[ia].origins.size(); ++m)
                if (m != ma && m != mb) merged.origins.push_back(items[ia].origins[m]);
            if (merged.origins.empty()) merged.origins.push_back(items[ia].origins[ma]);
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_edge));
            items[ia] = std::move(merged);
            continue;
        }

        // Contract over every pending edge joining these two items at once.
        std::vector<std::pair<std::size_t, std::size_t>> axis_pairs;
        std::vector<std::size_t> edge_ids;
        for (std::size_t e = 0; e < pending.size(); ++e) {
            auto [na, mma] = locate(pending[e].first);
            auto [nb, mmb] = locate(pending[e].second);
            if (na == ia && nb == ib) {
                axis_pairs.push_back({mma, mmb});
                edge_ids.push_back(e);
            } else if (na == ib && nb == ia) {
                axis_pairs.push_back({mmb, mma});
                edge_ids.push_back(e);
            }
        }

        detail::ContractionItem merged;
        merged.tensor = detail::contract_pair(items[ia].tensor, items[ib].tensor, axis_pairs);
        std::vector<bool> ash(items[ia].tensor.order(), false), bsh(items[ib].tensor.order(), false);
        for (const auto& [ax, bx] : axis_pairs) {
            ash[ax] = true;
            bsh[bx] = true;
        }
        for (std::size_t m = 0; m < items[ia].origins.size(); ++m)
            if (!ash[m]) merged.origins.push_back(items[ia].origins[m]);
        for (std::size_t m = 0; m < items[ib].origins.size(); ++m)
            if (!bsh[m]) merged.origins.push_back(items[ib].origins[m]);
        if (merged.origins.empty()) merged.origins.push_back({net.nodes.size(), 0});

        for (std::size_t k = edge_ids.size(); k-- > 0;)
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(edge_ids[k]));
        const std::size_t hi = std::max(ia, ib), lo = std::min(ia, ib);
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(hi));
        items[lo] = std::move(merged);
    }

    // Disconnected parts (possible only for degenerate inputs): outer product.
    while (items.size() > 1) {
        detail::ContractionItem merged;
        merged.tensor = detail::contract_pair(items[0].tensor, items[1].tensor, {});
        merged.origins = items[0].origins;
        merged.origins.insert(merged.origins.end(), items[1].origins.begin(),
                              items[1].origins.end());
        items.erase(items.begin() + 1);
        items[0] = std::move(merged);
    }

    detail::ContractionItem& final_item = items[0];

    // External ordering: by (node, mode); an HT root core's parent bond goes
    // last (it is mode 0 of node 0 by construction).
    const ModeRef ht_root{0, 0};
    const bool ht_root_rule =
        net.kind == NetworkKind::HT && net.nodes[0].role == NodeRole::HTCore;
    std::vector<std::size_t> perm(final_item.origins.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        const ModeRef &ra = final_item.origins[a], &rb = final_item.origins[b];
        if (ht_root_rule) {
            if (ra == ht_root) return false;
            if (rb == ht_root) return true;
        }
        return ra < rb;
    });
    BooleanTensor result = permute_axes(final_item.tensor, perm);

    // Squeeze the unit root bond of a toplevel HT network.
    if (ht_root_rule && result.order() == net.target_dims.size() + 1 &&
        result.dims().back() == 1) {
        Dims squeezed(result.dims().begin(), result.dims().end() - 1);
        result = reshape(result, squeezed);
    }

    if (result.dims() != net.target_dims)
        throw NetworkError("contracted shape " + dims_to_string(result.dims()) +
                           " does not match target " + dims_to_string(net.target_dims));
    return result;
}

/// Hamming distance divided by the element count.
inline double error_rate(const BooleanTensor& t, const BooleanTensor& t_prime) {
    return static_cast<double>(hamming(t, t_prime)) / static_cast<double>(t.size());
}

/// Chains a list of TT nodes: each node's last mode bonds to the next node's
/// first mode. Order-2 nodes are end cars, order-3 nodes carriages.
inline TensorNetwork make_tt_network(std::vector<BooleanTensor> nodes, Dims target_dims) {
    TensorNetwork net;
    net.kind = NetworkKind::TT;
    net.target_dims = std::move(target_dims);
    for (auto& t : nodes) {
        const NodeRole role = t.order() == 2 ? NodeRole::TTCar : NodeRole::TTCarriage;
        net.nodes.push_back({role, std::move(t)});
    }
    for (std::size_t k = 0; k + 1 < net.nodes.size(); ++k)
        net.edges.push_back({{k, net.nodes[k].tensor.order() - 1}, {k + 1, 0}});
    validate(net);
    return net;
}

/// Tucker assembly: node 0 is the core, factor k (stored mode_size x rank)
/// bonds its mode 1 to core mode k.
inline TensorNetwork make_tucker_network(BooleanTensor core, std::vector<BooleanMatrix> factors,
                                         Dims target_dims) {
    TensorNetwork net;
    net.kind = NetworkKind::Tucker;
    net.target_dims = std::move(target_dims);
    net.nodes.push_back({NodeRole::TuckerCore, std::move(core)});
    for (std::size_t k = 0; k < factors.size(); ++k) {
        net.nodes.push_back({NodeRole::TuckerFactor, factors[k].to_tensor()});
        net.edges.push_back({{0, k}, {k + 1, 1}});
    }
    validate(net);
    return net;
}

// ---------------------------------------------------------------------------
// .btnet JSON serialization
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

/// Bits packed LSB-first into bytes, then standard base64.
inline std::string bits_to_base64(const BitVec& bits) {
    std::vector<unsigned char> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits.get(i)) bytes[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
        out += kBase64Alphabet[(chunk >> 18) & 63];
        out += kBase64Alphabet[(chunk >> 12) & 63];
        out += i + 1 < bytes.size() ? kBase64Alphabet[(chunk >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? kBase64Alphabet[chunk & 63] : '=';
    }
    return out;
}

inline BitVec base64_to_bits(const std::string& text, std::size_t bit_count) {
    auto decode_char = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        if (c == '=') return -1;
        throw IoError("invalid base64 character");
    };
    if (text.size() % 4 != 0) throw IoError("truncated base64");
    std::vector<unsigned char> bytes;
    bytes.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const int a = decode_char(text[i]), b = decode_char(text[i + 1]);
        const int c = decode_char(text[i + 2]), d = decode_char(text[i + 3]);
        if (a < 0 || b < 0) throw IoError("malformed base64");
        bytes.push_back(static_cast<unsigned char>((a << 2) | (b >> 4)));
        if (c >= 0) bytes.push_back(static_cast<unsigned char>(((b & 15) << 4) | (c >> 2)));
        if (c >= 0 && d >= 0) bytes.push_back(static_cast<unsigned char>(((c & 3) << 6) | d));
    }
    if (bytes.size() != (bit_count + 7) / 8) throw IoError("base64 payload length mismatch");
    BitVec bits(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i)
        if (bytes[i / 8] & (1u << (i % 8))) bits.set(i, true);
    return bits;
}

} // namespace detail

inline nlohmann::json network_to_json(const TensorNetwork& net) {
    nlohmann::json j;
    j["kind"] = to_string(net.kind);
    j["target_dims"] = net.target_dims;
    j["nodes"] = nlohmann::json::array();
    for (const NetworkNode& node : net.nodes) {
        nlohmann::json n;
        n["role"] = to_string(node.role);
        n["dims"] = node.tensor.dims();
        n["bits"] = detail::bits_to_base64(node.tensor.data());
        j["nodes"].push_back(std::move(n));
    }
    j["topology"] = nlohmann::json::array();
    for (const Edge& e : net.edges)
        j["topology"].push_back({{e.first.node, e.first.mode}, {e.second.node, e.second.mode}});
    return j;
}

inline TensorNetwork network_from_json(const nlohmann::json& j) {
    try {
        TensorNetwork net;
        net.kind = kind_from_string(j.at("kind").get<std::string>());
        net.target_dims = j.at("target_dims").get<Dims>();
        for (const auto& n : j.at("nodes")) {
            const Dims dims = n.at("dims").get<Dims>();
            const BitVec bits =
                detail::base64_to_bits(n.at("bits").get<std::string>(), dims_product(dims));
            net.nodes.push_back(
                {role_from_string(n.at("role").get<std::string>()), BooleanTensor(dims, bits)});
        }
        for (const auto& e : j.at("topology")) {
            if (!e.is_array() || e.size() != 2 || e[0].size() != 2 || e[1].size() != 2)
                throw IoError("malformed topology edge");
            net.edges.push_back({{e[0][0].get<std::size_t>(), e[0][1].get<std::size_t>()},
                                 {e[1][0].get<std::size_t>(), e[1][1].get<std::size_t>()}});
        }
        validate(net);
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("invalid .btnet JSON: ") + e.what());
    }
}

inline void write_btnet_file(const TensorNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << network_to_json(net).dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

inline TensorNetwork read_btnet_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": invalid JSON: " + e.what());
    }
    return network_from_json(j);
}

} // namespace btn
