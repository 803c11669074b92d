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

#include <fstream>
#include <sstream>
#include <string>

#include "btn/tensor.hpp"

namespace btn {

/// .btn text format, bit-exact:
///   "BTN1 <d> <dim_1> ... <dim_d>\n" then prod(dims) characters from {0,1}
///   in row-major order, then "\n". The reader rejects any other byte.
inline std::string to_btn_string(const BooleanTensor& t) {
    std::ostringstream os;
    os << "BTN1 " << t.order();
    for (std::size_t d : t.dims()) os << ' ' << d;
    os << '\n';
    std::string bits(t.size(), '0');
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.get(i)) bits[i] = '1';
    os << bits << '\n';
    return os.str();
}

inline BooleanTensor from_btn_string(const std::string& text, const std::string& origin = "") {
    const std::string where = origin.empty() ? "" : origin + ": ";
    auto fail = [&](const std::string& why) -> BooleanTensor {
        throw IoError(where + "invalid .btn data: " + why);
    };

    const std::size_t nl = text.find('\n');
    if (nl == std::string::npos) return fail("missing header line");
    const std::string header = text.substr(0, nl);

    // Header tokens: "BTN1", order, dims. Single spaces, plain digits.
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos <= header.size()) {
        const std::size_t sp = header.find(' ', pos);
        tokens.push_back(header.substr(pos, sp == std::string::npos ? sp : sp - pos));
        if (sp == std::string::npos) break;
        pos = sp + 1;
    }
    if (tokens.size() < 3 || tokens[0] != "BTN1") return fail("bad magic or header");
    auto parse_uint = [&](const std::string& s) -> std::size_t {
        if (s.empty()) fail("empty header field");
        std::size_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') fail("non-numeric header field '" + s + "'");
            v = v * 10 + static_cast<std::size_t>(c - '0');
        }
        return v;
    };
    const std::size_t order = parse_uint(tokens[1]);
    if (order == 0 || tokens.size() != order + 2) return fail("dimension count mismatch");
    Dims dims(order);
    for (std::size_t k = 0; k < order; ++k) {
        dims[k] = parse_uint(tokens[k + 2]);
        if (dims[k] == 0) return fail("zero dimension");
    }

    const std::size_t n = dims_product(dims);
    const std::size_t body = nl + 1;
    if (text.size() != body + n + 1) return fail("payload length mismatch");
    if (text[body + n] != '\n') return fail("missing trailing newline");
    BooleanTensor t(dims);
    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[body + i];
        if (c == '1')
            t.set(i, true);
        else if (c != '0')
            return fail("payload byte is not '0' or '1'");
    }
    return t;
}

inline void write_btn_file(const BooleanTensor& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const std::string s = to_btn_string(t);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw IoError("write failed: " + path);
}

inline BooleanTensor read_btn_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_btn_string(buf.str(), path);
}

} // namespace btn
