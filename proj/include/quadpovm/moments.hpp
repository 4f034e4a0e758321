// Copyright 2026 The quadpovm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact averages of amplitude monomials over the unitarily invariant
// distribution of pure states.

#ifndef QUADPOVM_MOMENTS_HPP
#define QUADPOVM_MOMENTS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "quadpovm/core.hpp"
#include "quadpovm/symmetric_space.hpp"

namespace quadpovm {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Addresses <c_{i_1} c*_{j_1} ... c_{i_l} c*_{j_l}>. Indices are 0-based.
struct MomentIndex {
    std::vector<int> i;
    std::vector<int> j;
};

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned k = 2; k <= n; ++k) {
        r *= k;
    }
    return r;
}

/// Number of bijections sigma with i_k = j_{sigma(k)}: prod_v m_v! when the
/// multisets agree, 0 otherwise.
inline BigInt contraction_count(const MomentIndex &idx) {
    if (idx.i.size() != idx.j.size()) {
        return 0;
    }
    std::map<int, unsigned> mult;
    for (int v : idx.i) {
        ++mult[v];
    }
    for (int v : idx.j) {
        auto it = mult.find(v);
        if (it == mult.end() || it->second == 0) {
            return 0;
        }
        --it->second;
    }
    std::map<int, unsigned> counts;
    for (int v : idx.i) {
        ++counts[v];
    }
    BigInt r = 1;
    for (const auto &[value, m] : counts) {
        r *= factorial(m);
    }
    return r;
}

/// (d-1)!/(d+l-1)! times the contraction count; exactly zero when the numbers
/// of c and c* differ.
inline Rational moment_value(int d, const MomentIndex &idx) {
    if (d < 2) {
        throw InputError("moment_value requires d >= 2");
    }
    for (const auto *tuple : {&idx.i, &idx.j}) {
        for (int v : *tuple) {
            if (v < 0 || v >= d) {
                throw InputError("moment index " + std::to_string(v) + " outside 0.." + std::to_string(d - 1));
            }
        }
    }
    if (idx.i.size() != idx.j.size()) {
        return Rational(0);
    }
    unsigned l = static_cast<unsigned>(idx.i.size());
    BigInt count = contraction_count(idx);
    return Rational(factorial(d - 1) * count, factorial(d + l - 1));
}

/// <rho^{(x)N}> restricted to the symmetric subspace: I / d_N in the occupation basis.
inline SymmetricMatrix mean_tensor_power(int d, int N) {
    auto dim = static_cast<Eigen::Index>(sym_dim(d, N));
    return {d, N, CMatrix::Identity(dim, dim) / static_cast<double>(dim)};
}

/// Always "p/q", including integers ("0/1", "1/1").
inline std::string to_string(const Rational &r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline double to_double(const Rational &r) {
    return r.convert_to<double>();
}

}  // namespace quadpovm

#endif
