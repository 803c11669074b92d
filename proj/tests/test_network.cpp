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

#include <cstdio>

#include <catch2/catch_amalgamated.hpp>

#include "btn/bench.hpp"
#include "btn/network.hpp"

using namespace btn;

namespace {

BooleanTensor random_tensor(const Dims& dims, Rng& rng, double p = 0.5) {
    BooleanTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) t.set(i, rng.bernoulli(p));
    return t;
}

} // namespace

TEST_CASE("single-node network contracts to the node itself") {
    Rng rng(601);
    const BooleanTensor t = random_tensor({3, 4}, rng);
    TensorNetwork net;
    net.kind = NetworkKind::TT;
    net.nodes.push_back({NodeRole::TTCar, t});
    net.target_dims = t.dims();
    CHECK(contract(net) == t);
}

TEST_CASE("a two-matrix chain contracts to the Boolean product") {
    Rng rng(602);
    const BooleanTensor a = random_tensor({3, 2}, rng);
    const BooleanTensor b = random_tensor({2, 5}, rng);
    const TensorNetwork net = make_tt_network({a, b}, {3, 5});
    const BooleanTensor prod = contract(net);
    CHECK(BooleanMatrix::from_tensor(prod) ==
          bool_matmul(BooleanMatrix::from_tensor(a), BooleanMatrix::from_tensor(b)));
}

TEST_CASE("contraction matches a direct dense evaluation for Tucker") {
    Rng rng(603);
    const std::size_t d = 3, dim = 3, rank = 2;
    auto [net, t] = generate_ground_truth(NetworkKind::Tucker, d, dim, rank, 604);

    // direct evaluation of the Tucker sum for every entry
    const BooleanTensor& core = net.nodes[0].tensor;
    BooleanTensor direct(Dims(d, dim));
    for (std::size_t i0 = 0; i0 < dim; ++i0)
        for (std::size_t i1 = 0; i1 < dim; ++i1)
            for (std::size_t i2 = 0; i2 < dim; ++i2) {
                bool v = false;
                for (std::size_t a = 0; a < rank && !v; ++a)
                    for (std::size_t b = 0; b < rank && !v; ++b)
                        for (std::size_t c = 0; c < rank && !v; ++c) {
                            const std::size_t core_idx[] = {a, b, c};
                            const std::size_t f1[] = {i0, a}, f2[] = {i1, b}, f3[] = {i2, c};
                            v = core.at(core_idx) && net.nodes[1].tensor.at(f1) &&
                                net.nodes[2].tensor.at(f2) && net.nodes[3].tensor.at(f3);
                        }
                const std::size_t idx[] = {i0, i1, i2};
                direct.put(idx, v);
            }
    CHECK(t == direct);
}

TEST_CASE("re-contracting a generated network is stable") {
    for (const NetworkKind kind : {NetworkKind::TT, NetworkKind::Tucker, NetworkKind::HT}) {
        auto [net, t] = generate_ground_truth(kind, 4, 3, 2, 605);
        CHECK(contract(net) == t);
        CHECK(contract(net) == t); // idempotent
    }
}

TEST_CASE("error rate definition") {
    Rng rng(607);
    const BooleanTensor t = random_tensor({4, 4, 4, 4}, rng);
    CHECK(error_rate(t, t) == 0.0);

    BooleanTensor complement = t;
    for (std::size_t i = 0; i < t.size(); ++i) complement.mutable_data().flip(i);
    CHECK(error_rate(t, complement) == 1.0);

    BooleanTensor one_off = t;
    one_off.mutable_data().flip(17);
    CHECK(error_rate(t, one_off) == 1.0 / 256.0);

    CHECK_THROWS_AS(error_rate(t, BooleanTensor({2, 2})), ShapeError);
}

TEST_CASE("validation rejects inconsistent topologies") {
    Rng rng(611);
    TensorNetwork net;
    net.kind = NetworkKind::TT;
    net.nodes.push_back({NodeRole::TTCar, random_tensor({3, 2}, rng)});
    net.nodes.push_back({NodeRole::TTCar, random_tensor({4, 5}, rng)});
    net.target_dims = {3, 5};

    SECTION("edge joining modes of different sizes") {
        net.edges.push_back({{0, 1}, {1, 0}}); // 2 vs 4
        CHECK_THROWS_AS(contract(net), NetworkError);
    }
    SECTION("mode used by two edges") {
        net.nodes[1] = {NodeRole::TTCar, random_tensor({2, 5}, rng)};
        net.edges.push_back({{0, 1}, {1, 0}});
        net.edges.push_back({{0, 1}, {1, 1}});
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
    SECTION("reference out of range") {
        net.edges.push_back({{0, 1}, {2, 0}});
        CHECK_THROWS_AS(validate(net), NetworkError);
    }
    SECTION("contracted shape must match the target") {
        net.edges.clear();
        net.nodes.pop_back();
        net.target_dims = {9, 9};
        CHECK_THROWS_AS(contract(net), NetworkError);
    }
}

TEST_CASE("btnet serialization round-trips bit-exactly") {
    for (const NetworkKind kind : {NetworkKind::TT, NetworkKind::Tucker, NetworkKind::HT}) {
        auto [net, t] = generate_ground_truth(kind, 4, 4, 3, 613);
        const std::string path = "roundtrip_test.btnet";
        write_btnet_file(net, path);
        const TensorNetwork back = read_btnet_file(path);
        std::remove(path.c_str());

        REQUIRE(back.nodes.size() == net.nodes.size());
        for (std::size_t k = 0; k < net.nodes.size(); ++k) {
            CHECK(back.nodes[k].role == net.nodes[k].role);
            CHECK(back.nodes[k].tensor == net.nodes[k].tensor);
        }
        CHECK(back.edges.size() == net.edges.size());
        CHECK(back.target_dims == net.target_dims);
        CHECK(back.kind == net.kind);
        CHECK(network_to_json(back).dump() == network_to_json(net).dump());
        CHECK(contract(back) == t);
    }
}

TEST_CASE("btnet reader rejects malformed documents") {
    CHECK_THROWS_AS(network_from_json(nlohmann::json::object()), IoError);
    nlohmann::json j;
    j["kind"] = "tt";
    j["target_dims"] = {2, 2};
    j["nodes"] = nlohmann::json::array();
    j["nodes"].push_back({{"role", "tt-car"}, {"dims", {2, 2}}, {"bits", "????"}});
    j["topology"] = nlohmann::json::array();
    CHECK_THROWS(network_from_json(j));
    CHECK_THROWS_AS(read_btnet_file("missing.btnet"), IoError);
}

TEST_CASE("error rate is invariant under simultaneous mode permutations") {
    Rng rng(617);
    auto [net, t] = generate_ground_truth(NetworkKind::Tucker, 4, 3, 2, 619);
    BooleanTensor approx = t;
    for (int k = 0; k < 9; ++k) approx.mutable_data().flip(rng.below(approx.size()));
    const double base = error_rate(t, approx);

    const std::vector<std::size_t> perm{2, 0, 3, 1};
    CHECK(error_rate(permute_axes(t, perm), permute_axes(approx, perm)) == base);
}

TEST_CASE("contraction handles a cycle via the trace") {
    // two matrices bonded on both mode pairs: OR_ab X[a,b] Y[b,a]
    Rng rng(621);
    const BooleanTensor x = random_tensor({2, 3}, rng);
    const BooleanTensor y = random_tensor({3, 2}, rng);
    TensorNetwork net;
    net.kind = NetworkKind::TT;
    net.nodes.push_back({NodeRole::TTCar, x});
    net.nodes.push_back({NodeRole::TTCar, y});
    net.edges.push_back({{0, 1}, {1, 0}});
    net.edges.push_back({{0, 0}, {1, 1}});
    net.target_dims = {1};
    bool expected = false;
    for (std::size_t a = 0; a < 2 && !expected; ++a)
        for (std::size_t b = 0; b < 3 && !expected; ++b) {
            const std::size_t xi[] = {a, b}, yi[] = {b, a};
            expected = x.at(xi) && y.at(yi);
        }
    const BooleanTensor out = contract(net);
    CHECK(out.get(0) == expected);
}
