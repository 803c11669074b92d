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

#include <cmath>
#include <utility>
#include <vector>

#include "btn/tensor.hpp"

namespace btn {
namespace detail {

/// Minimal dense real matrix, row-major. Only what the truncated SVD needs.
struct DMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    DMat() = default;
    DMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline DMat to_real(const BooleanMatrix& m) {
    DMat d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.get(i, j)) d.at(i, j) = 1.0;
    return d;
}

// out = M * V  (rows x k)
inline DMat mat_mul(const DMat& m, const DMat& v) {
    DMat out(m.rows, v.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t l = 0; l < m.cols; ++l) {
            const double x = m.at(i, l);
            if (x == 0.0) continue;
            for (std::size_t j = 0; j < v.cols; ++j) out.at(i, j) += x * v.at(l, j);
        }
    return out;
}

// out = M^T * V  (cols x k)
inline DMat mat_tmul(const DMat& m, const DMat& v) {
    DMat out(m.cols, v.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t l = 0; l < m.cols; ++l) {
            const double x = m.at(i, l);
            if (x == 0.0) continue;
            for (std::size_t j = 0; j < v.cols; ++j) out.at(l, j) += x * v.at(i, j);
        }
    return out;
}

/// In-place modified Gram-Schmidt. Columns that collapse numerically are
/// replaced by a deterministic jittered basis vector and re-orthogonalized.
inline void orthonormalize(DMat& v) {
    const std::size_t n = v.rows, k = v.cols;
    for (std::size_t j = 0; j < k; ++j) {
        for (int attempt = 0; attempt < 2; ++attempt) {
            for (std::size_t p = 0; p < j; ++p) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += v.at(i, p) * v.at(i, j);
                for (std::size_t i = 0; i < n; ++i) v.at(i, j) -= dot * v.at(i, p);
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += v.at(i, j) * v.at(i, j);
            norm = std::sqrt(norm);
            if (norm > 1e-12) {
                for (std::size_t i = 0; i < n; ++i) v.at(i, j) /= norm;
                break;
            }
            // Deterministic replacement column.
            for (std::size_t i = 0; i < n; ++i)
                v.at(i, j) = (i == (j % n) ? 1.0 : 0.0) +
                             1e-4 * std::sin(static_cast<double>(i * 31 + j * 7 + 1));
        }
    }
}

/// Jacobi eigendecomposition of a small symmetric matrix. Returns
/// eigenvalues (descending, stable order for ties) and column eigenvectors.
inline void jacobi_eigen(DMat s, std::vector<double>& values, DMat& vectors) {
    const std::size_t k = s.rows;
    vectors = DMat(k, k);
    for (std::size_t i = 0; i < k; ++i) vectors.at(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) off += s.at(p, q) * s.at(p, q);
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = s.at(p, q);
                if (std::fabs(apq) < 1e-18) continue;
                const double theta = (s.at(q, q) - s.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t i = 0; i < k; ++i) {
                    const double sip = s.at(i, p), siq = s.at(i, q);
                    s.at(i, p) = c * sip - sn * siq;
                    s.at(i, q) = sn * sip + c * siq;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double spi = s.at(p, i), sqi = s.at(q, i);
                    s.at(p, i) = c * spi - sn * sqi;
                    s.at(q, i) = sn * spi + c * sqi;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double vip = vectors.at(i, p), viq = vectors.at(i, q);
                    vectors.at(i, p) = c * vip - sn * viq;
                    vectors.at(i, q) = sn * vip + c * viq;
                }
            }
    }

    values.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) values[i] = s.at(i, i);
    // Stable descending sort of eigenpairs.
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> sorted_vals(k);
    DMat sorted_vecs(k, k);
    for (std::size_t j = 0; j < k; ++j) {
        sorted_vals[j] = values[order[j]];
        for (std::size_t i = 0; i < k; ++i) sorted_vecs.at(i, j) = vectors.at(i, order[j]);
    }
    values = std::move(sorted_vals);
    vectors = std::move(sorted_vecs);
}

struct TruncatedSvd {
    DMat u;                    // rows x k
    std::vector<double> sigma; // k
    DMat v;                    // cols x k
};

/// Rank-k truncated SVD by subspace iteration on the right singular
/// subspace: V <- orth(M^T (M V)), then a Rayleigh-Ritz step for the
/// singular pairs. Deterministic start near the leading standard basis.
inline TruncatedSvd svd_truncated(const DMat& m, std::size_t k, double tol = 1e-8,
                                  int max_iter = 500) {
    const std::size_t n = m.rows, c = m.cols;

    DMat v(c, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < c; ++i)
            v.at(i, j) = (i == j ? 1.0 : 0.0) +
                         1e-3 * std::sin(static_cast<double>(i * 13 + j * 5 + 2));
    orthonormalize(v);

    DMat prev = v;
    for (int iter = 0; iter < max_iter; ++iter) {
        DMat z = mat_tmul(m, mat_mul(m, v)); // M^T M V
        orthonormalize(z);
        double change = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < c; ++i) dot += z.at(i, j) * prev.at(i, j);
            change = std::max(change, std::fabs(1.0 - std::fabs(dot)));
        }
        v = z;
        prev = v;
        if (change < tol && iter > 0) break;
    }

    // Rayleigh-Ritz: eigen-decompose (MV)^T (MV) = V^T M^T M V.
    DMat mv = mat_mul(m, v); // n x k
    DMat gram(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += mv.at(i, a) * mv.at(i, b);
            gram.at(a, b) = dot;
        }
    std::vector<double> lambda;
    DMat w;
    jacobi_eigen(gram, lambda, w);

    TruncatedSvd out;
    out.sigma.assign(k, 0.0);
    out.v = DMat(c, k);
    out.u = DMat(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        out.sigma[j] = lambda[j] > 0 ? std::sqrt(lambda[j]) : 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += v.at(i, l) * w.at(l, j);
            out.v.at(i, j) = s;
        }
    }
    DMat uv = mat_mul(m, out.v); // columns are sigma_j * u_j
    for (std::size_t j = 0; j < k; ++j) {
        if (out.sigma[j] < 1e-10) continue;
        for (std::size_t i = 0; i < n; ++i) out.u.at(i, j) = uv.at(i, j) / out.sigma[j];
    }
    return out;
}

} // namespace detail

/// Boolean initial factors from a nonnegative double-SVD construction: the
/// rank-r truncated SVD of M (viewed as a real 0/1 matrix) is split into
/// nonnegative parts per component, scaled, and thresholded at 0.5.
/// Transpose-symmetric by construction: the factors of M^T are the swapped
/// transposes of the factors of M.
inline std::pair<BooleanMatrix, BooleanMatrix> boolean_nnsvd(const BooleanMatrix& m,
                                                             std::size_t r) {
    if (r == 0) throw ValueError("boolean_nnsvd: rank must be >= 1");
    if (r > std::min(m.rows(), m.cols()))
        throw ValueError("boolean_nnsvd: rank " + std::to_string(r) +
                         " exceeds min dimension of " + m.shape_string());

    // Canonical orientation so that M and M^T produce mirrored results.
    const bool flip = m.rows() > m.cols() ||
                      (m.rows() == m.cols() && transpose(m).data().lex_less(m.data()));
    const BooleanMatrix work = flip ? transpose(m) : m;

    const detail::DMat real = detail::to_real(work);
    const detail::TruncatedSvd svd = detail::svd_truncated(real, r);

    const std::size_t n = work.rows(), c = work.cols();
    detail::DMat wa(n, r), hb(r, c);
    for (std::size_t j = 0; j < r; ++j) {
        const double sigma = svd.sigma[j];
        if (sigma < 1e-10) continue;
        if (j == 0) {
            // Leading component of a nonnegative matrix: use magnitudes.
            const double scale = std::sqrt(sigma);
            for (std::size_t i = 0; i < n; ++i) wa.at(i, 0) = scale * std::fabs(svd.u.at(i, 0));
            for (std::size_t i = 0; i < c; ++i) hb.at(0, i) = scale * std::fabs(svd.v.at(i, 0));
            continue;
        }
        double xp = 0, xn = 0, yp = 0, yn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = svd.u.at(i, j);
            (x > 0 ? xp : xn) += x * x;
        }
        for (std::size_t i = 0; i < c; ++i) {
            const double y = svd.v.at(i, j);
            (y > 0 ? yp : yn) += y * y;
        }
        xp = std::sqrt(xp), xn = std::sqrt(xn), yp = std::sqrt(yp), yn = std::sqrt(yn);
        const double mp = xp * yp, mn = xn * yn;
        const bool positive = mp >= mn;
        const double mass = positive ? mp : mn;
        const double unorm = positive ? xp : xn;
        const double vnorm = positive ? yp : yn;
        if (mass <= 0 || unorm <= 0 || vnorm <= 0) continue;
        const double scale = std::sqrt(sigma * mass);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = svd.u.at(i, j);
            const double part = positive ? std::max(x, 0.0) : std::max(-x, 0.0);
            wa.at(i, j) = scale * part / unorm;
        }
        for (std::size_t i = 0; i < c; ++i) {
            const double y = svd.v.at(i, j);
            const double part = positive ? std::max(y, 0.0) : std::max(-y, 0.0);
            hb.at(j, i) = scale * part / vnorm;
        }
    }

    BooleanMatrix a(n, r), b(r, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (wa.at(i, j) >= 0.5) a.set(i, j, true);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < c; ++i)
            if (hb.at(j, i) >= 0.5) b.set(j, i, true);

    if (flip) return {transpose(b), transpose(a)};
    return {a, b};
}

} // namespace btn
