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

#include <catch2/catch_amalgamated.hpp>

#include "btn/random.hpp"
#include "btn/tensor.hpp"

using namespace btn;

namespace {

BooleanMatrix matrix_from(std::initializer_list<std::initializer_list<int>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = rows.begin()->size();
    BooleanMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (int v : row) m.set(i, j++, v != 0);
        ++i;
    }
    return m;
}

// Reference product straight from the definition, independent of the
// bit-parallel implementation.
BooleanMatrix reference_matmul(const BooleanMatrix& a, const BooleanMatrix& b) {
    BooleanMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            bool v = false;
            for (std::size_t l = 0; l < a.cols() && !v; ++l) v = a.get(i, l) && b.get(l, j);
            out.set(i, j, v);
        }
    return out;
}

BooleanMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double p = 0.5) {
    BooleanMatrix m(r, c);
    for (std::size_t i = 0; i < r * c; ++i) m.mutable_data().set(i, rng.bernoulli(p));
    return m;
}

BooleanTensor random_tensor(const Dims& dims, Rng& rng, double p = 0.5) {
    BooleanTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) t.set(i, rng.bernoulli(p));
    return t;
}

} // namespace

TEST_CASE("BitVec basics") {
    BitVec b(70);
    CHECK(b.count() == 0);
    b.set(0, true);
    b.set(69, true);
    CHECK(b.count() == 2);
    CHECK(b.get(69));
    b.flip(69);
    CHECK_FALSE(b.get(69));
    BitVec c(70);
    c.set(0, true);
    CHECK(b == c);
    CHECK(b.hamming(c) == 0);
    c.set(1, true);
    CHECK(b.hamming(c) == 1);
    CHECK(b.lex_less(c) == false); // equal until bit 1 where b has 0... b < c
    CHECK(c.lex_less(b) == false);
    CHECK(b.lex_less(c) == false);
}

TEST_CASE("BitVec lexicographic order") {
    BitVec a(3), b(3);
    b.set(0, true); // a = 000, b = 100
    CHECK(a.lex_less(b));
    CHECK_FALSE(b.lex_less(a));
    a.set(0, true);
    a.set(2, true); // a = 101, b = 100
    CHECK(b.lex_less(a));
}

TEST_CASE("tensor construction invariants") {
    CHECK_THROWS_AS(BooleanTensor(Dims{}), ValueError);
    CHECK_THROWS_AS(BooleanTensor({2, 0, 3}), ValueError);
    CHECK_THROWS_AS(BooleanTensor({2, 2}, BitVec(3)), ShapeError);
    BooleanTensor t({2, 3, 4});
    CHECK(t.order() == 3);
    CHECK(t.size() == 24);
}

TEST_CASE("bool_matmul identity and annihilator") {
    Rng rng(7);
    const BooleanMatrix b = random_matrix(2, 5, rng);
    CHECK(bool_matmul(BooleanMatrix::identity(2), b) == b);

    const BooleanMatrix zeros(2, 2);
    BooleanMatrix ones(2, 2, BitVec(4, true));
    CHECK(bool_matmul(zeros, ones) == BooleanMatrix(2, 2));
}

TEST_CASE("bool_matmul worked example") {
    const BooleanMatrix a = matrix_from({{1, 1}, {0, 1}});
    const BooleanMatrix b = matrix_from({{1, 0}, {1, 1}});
    const BooleanMatrix expected = matrix_from({{1, 1}, {1, 1}});
    CHECK(bool_matmul(a, b) == expected);
    CHECK(bool_matmul(a, b) == reference_matmul(a, b));
}

TEST_CASE("bool_matmul dimension mismatch names both shapes") {
    const BooleanMatrix a(2, 3), b(2, 2);
    try {
        bool_matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("2x2") != std::string::npos);
    }
}

TEST_CASE("bool_matmul matches reference on random inputs") {
    Rng rng(11);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 1 + rng.below(9), k = 1 + rng.below(9), m = 1 + rng.below(90);
        const BooleanMatrix a = random_matrix(n, k, rng, 0.4);
        const BooleanMatrix b = random_matrix(k, m, rng, 0.4);
        CHECK(bool_matmul(a, b) == reference_matmul(a, b));
    }
}

TEST_CASE("bool_matmul is associative") {
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const BooleanMatrix a = random_matrix(3, 4, rng);
        const BooleanMatrix b = random_matrix(4, 2, rng);
        const BooleanMatrix c = random_matrix(2, 5, rng);
        CHECK(bool_matmul(bool_matmul(a, b), c) == bool_matmul(a, bool_matmul(b, c)));
    }
}

TEST_CASE("bool_matmul is monotone under 0->1 flips") {
    Rng rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        BooleanMatrix a = random_matrix(4, 3, rng, 0.3);
        const BooleanMatrix b = random_matrix(3, 4, rng, 0.3);
        const BooleanMatrix before = bool_matmul(a, b);
        // flip one zero of A to one
        std::size_t pos = rng.below(a.size());
        for (std::size_t tries = 0; tries < a.size() && a.data().get(pos); ++tries)
            pos = (pos + 1) % a.size();
        if (a.data().get(pos)) continue; // all-ones matrix
        a.mutable_data().set(pos, true);
        const BooleanMatrix after = bool_matmul(a, b);
        for (std::size_t i = 0; i < before.size(); ++i)
            if (before.data().get(i)) CHECK(after.data().get(i));
    }
}

TEST_CASE("hamming basics") {
    Rng rng(19);
    const BooleanTensor x = random_tensor({2, 3}, rng);
    CHECK(hamming(x, x) == 0);

    BooleanTensor a({3});
    a.set(0, true);
    a.set(2, true); // [1,0,1]
    BooleanTensor b({3});
    b.set(2, true); // [0,0,1]
    CHECK(hamming(a, b) == 1);
    CHECK(hamming(b, a) == 1);

    const BooleanTensor ones({2, 2}, BitVec(4, true));
    CHECK(hamming(ones, BooleanTensor({2, 2})) == 4);

    CHECK_THROWS_AS(hamming(BooleanTensor({2, 2}), BooleanTensor({4})), ShapeError);
}

TEST_CASE("hamming triangle inequality") {
    Rng rng(23);
    for (int rep = 0; rep < 50; ++rep) {
        const BooleanTensor x = random_tensor({3, 3}, rng);
        const BooleanTensor y = random_tensor({3, 3}, rng);
        const BooleanTensor z = random_tensor({3, 3}, rng);
        CHECK(hamming(x, z) <= hamming(x, y) + hamming(y, z));
    }
}

TEST_CASE("unfold order-3 split after axis 1") {
    Rng rng(29);
    const BooleanTensor t = random_tensor({2, 2, 2}, rng);
    const BooleanMatrix m = unfold_split(t, 1);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                const std::size_t idx[] = {i, j, k};
                CHECK(m.get(i, 2 * j + k) == t.at(idx));
            }
}

TEST_CASE("unfold of a matrix is the identity") {
    Rng rng(31);
    const BooleanTensor t = random_tensor({3, 5}, rng);
    const BooleanMatrix m = unfold_split(t, 1);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 5);
    CHECK(m.data() == t.data());
}

TEST_CASE("unfold then reshape round-trips") {
    Rng rng(37);
    for (int rep = 0; rep < 20; ++rep) {
        const Dims dims = {1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(3),
                           1 + rng.below(3)};
        const BooleanTensor t = random_tensor(dims, rng);
        for (std::size_t s = 1; s < dims.size(); ++s) {
            const BooleanMatrix m = unfold_split(t, s);
            CHECK(reshape(m, dims) == t);
            CHECK(m.data().count() == t.data().count()); // bits conserved
        }
    }
}

TEST_CASE("unfold rejects empty and full selections") {
    const BooleanTensor t({2, 2, 2});
    CHECK_THROWS_AS(unfold_split(t, 0), ShapeError);
    CHECK_THROWS_AS(unfold_split(t, 3), ShapeError);
    const std::vector<std::size_t> none{};
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK_THROWS_AS(unfold(t, none), ShapeError);
    CHECK_THROWS_AS(unfold(t, all), ShapeError);
    const std::vector<std::size_t> non_prefix{1};
    CHECK_THROWS_AS(unfold(t, non_prefix), ShapeError);
    const std::vector<std::size_t> prefix{0, 1};
    CHECK(unfold(t, prefix).rows() == 4);
}

TEST_CASE("reshape worked example") {
    BooleanTensor v({4});
    v.set(0, true);
    v.set(2, true);
    v.set(3, true); // [1,0,1,1]
    const BooleanTensor m = reshape(v, {2, 2});
    const std::size_t i00[] = {0, 0}, i01[] = {0, 1}, i10[] = {1, 0}, i11[] = {1, 1};
    CHECK(m.at(i00) == true);
    CHECK(m.at(i01) == false);
    CHECK(m.at(i10) == true);
    CHECK(m.at(i11) == true);
}

TEST_CASE("reshape identity and round trip") {
    Rng rng(41);
    const BooleanTensor t = random_tensor({2, 3, 2}, rng);
    CHECK(reshape(t, t.dims()) == t);
    CHECK(reshape(reshape(t, {6, 2}), t.dims()) == t);
    CHECK(reshape(reshape(t, {12}), t.dims()) == t);
    CHECK_THROWS_AS(reshape(t, {5, 2}), ShapeError);
}

TEST_CASE("matrix to order-3 reshape round-trips") {
    Rng rng(43);
    const BooleanMatrix m = random_matrix(6, 5, rng); // rows 6 = 2*3
    const BooleanTensor t = reshape(m, {2, 3, 5});
    CHECK(BooleanMatrix::from_tensor(reshape(t, {6, 5})) == m);
}

TEST_CASE("transpose involution") {
    Rng rng(47);
    const BooleanMatrix m = random_matrix(4, 7, rng);
    CHECK(transpose(transpose(m)) == m);
}

TEST_CASE("permute_axes agrees with manual indexing") {
    Rng rng(53);
    const BooleanTensor t = random_tensor({2, 3, 4}, rng);
    const std::vector<std::size_t> perm{2, 0, 1};
    const BooleanTensor p = permute_axes(t, perm);
    REQUIRE(p.dims() == Dims{4, 2, 3});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) {
                const std::size_t src[] = {i, j, k};
                const std::size_t dst[] = {k, i, j};
                CHECK(t.at(src) == p.at(dst));
            }
}

TEST_CASE("move_axis round trip") {
    Rng rng(59);
    const BooleanTensor t = random_tensor({2, 3, 4, 2}, rng);
    const BooleanTensor moved = move_axis(t, 3, 0);
    CHECK(moved.dims() == Dims{2, 2, 3, 4});
    CHECK(move_axis(moved, 0, 3) == t);
}

TEST_CASE("matrix columns") {
    const BooleanMatrix m = matrix_from({{1, 0}, {0, 1}, {1, 1}});
    const BitVec c0 = matrix_column(m, 0);
    CHECK(c0.get(0));
    CHECK_FALSE(c0.get(1));
    CHECK(c0.get(2));
    CHECK_THROWS_AS(matrix_column(m, 2), ShapeError);
}
