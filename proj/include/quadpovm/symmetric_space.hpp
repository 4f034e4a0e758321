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

#ifndef QUADPOVM_SYMMETRIC_SPACE_HPP
#define QUADPOVM_SYMMETRIC_SPACE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "quadpovm/core.hpp"

namespace quadpovm {

using Engine = std::mt19937_64;

/// Unit vector in C^d. The global phase is kept but carries no meaning;
/// compare rays with fidelity().
class PureState {
   public:
    explicit PureState(CVector amplitudes) : c_(std::move(amplitudes)) {
        if (c_.size() < 2) {
            throw InputError("PureState needs dimension >= 2, got " + std::to_string(c_.size()));
        }
        double n = c_.squaredNorm();
        if (!(std::abs(n - 1.0) <= tol::kNormalization)) {
            throw InputError("PureState amplitudes not normalized: |c|^2 = " + std::to_string(n));
        }
    }

    /// Rescales `raw` to unit norm.
    static PureState normalized(CVector raw) {
        double n = raw.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw InputError("cannot normalize a zero or non-finite vector");
        }
        raw /= n;
        return PureState(std::move(raw));
    }

    static PureState basis(int d, int k) {
        if (k < 0 || k >= d) {
            throw InputError("basis index out of range");
        }
        CVector v = CVector::Zero(d);
        v(k) = 1.0;
        return PureState(std::move(v));
    }

    int dim() const {
        return static_cast<int>(c_.size());
    }
    const CVector &amplitudes() const {
        return c_;
    }
    Complex operator[](int i) const {
        return c_(i);
    }

   private:
    CVector c_;
};

inline Complex overlap(const PureState &a, const PureState &b) {
    if (a.dim() != b.dim()) {
        throw InputError("overlap: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
    }
    return a.amplitudes().dot(b.amplitudes());  // conjugates the left operand
}

/// |<a|b>|^2
inline double fidelity(const PureState &a, const PureState &b) {
    return std::norm(overlap(a, b));
}

/// Exact binomial coefficient; throws ResourceError when the value leaves 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) {
            throw ResourceError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                                ") exceeds 64-bit range");
        }
    }
    return static_cast<std::uint64_t>(r);
}

/// Dimension of the totally symmetric subspace of (C^d)^{(x)N}: C(N+d-1, d-1).
inline std::uint64_t sym_dim(int d, int N) {
    if (d < 1 || N < 0) {
        throw InputError("sym_dim requires d >= 1 and N >= 0");
    }
    return binomial(static_cast<std::uint64_t>(N + d - 1), static_cast<std::uint64_t>(d - 1));
}

/// Occupation numbers (n_1..n_d) with sum N.
using OccupationVector = std::vector<int>;

namespace detail {
inline void enumerate_occupations(int d, int remaining, OccupationVector &prefix,
                                  std::vector<OccupationVector> &out) {
    int slot = static_cast<int>(prefix.size());
    if (slot == d - 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        prefix.push_back(v);
        enumerate_occupations(d, remaining - v, prefix, out);
        prefix.pop_back();
    }
}
}  // namespace detail

/// All occupation vectors of N particles in d modes, in lexicographically
/// descending order: (N,0,..,0) first, (0,..,0,N) last.
inline std::vector<OccupationVector> occupation_basis(int d, int N) {
    if (d < 1 || N < 0) {
        throw InputError("occupation_basis requires d >= 1 and N >= 0");
    }
    std::vector<OccupationVector> out;
    out.reserve(sym_dim(d, N));
    OccupationVector prefix;
    detail::enumerate_occupations(d, N, prefix, out);
    return out;
}

/// Position of `n` within occupation_basis(n.size(), sum(n)).
inline std::size_t occupation_rank(const OccupationVector &n) {
    int d = static_cast<int>(n.size());
    int remaining = 0;
    for (int v : n) {
        remaining += v;
    }
    std::size_t rank = 0;
    for (int k = 0; k + 1 < d; ++k) {
        // Entries sharing the prefix but with a larger value in slot k come first.
        for (int v = n[k] + 1; v <= remaining; ++v) {
            rank += sym_dim(d - k - 1, remaining - v);
        }
        remaining -= n[k];
    }
    return rank;
}

/// sqrt(N! / prod n_i!)
inline double multinomial_sqrt(const OccupationVector &n) {
    int remaining = 0;
    for (int v : n) {
        remaining += v;
    }
    double m = 1.0;
    for (int v : n) {
        // C(remaining, v) accumulated in floating point; exact below 2^53.
        double b = 1.0;
        for (int i = 1; i <= v; ++i) {
            b = b * (remaining - v + i) / i;
        }
        m *= b;
        remaining -= v;
    }
    return std::sqrt(m);
}

/// Coordinates of a vector of the symmetric subspace in the occupation basis.
struct SymmetricVector {
    int d = 0;
    int N = 0;
    CVector coords;
};

/// Operator restricted to the symmetric subspace, in the occupation basis.
struct SymmetricMatrix {
    int d = 0;
    int N = 0;
    CMatrix entries;
};

/// Cached occupation basis for repeated embeddings at fixed (d, N).
class SymmetricBasis {
   public:
    SymmetricBasis(int d, int N) : d_(d), N_(N), occupations_(occupation_basis(d, N)) {
        coefficients_.reserve(occupations_.size());
        for (const auto &n : occupations_) {
            coefficients_.push_back(multinomial_sqrt(n));
        }
    }

    int d() const {
        return d_;
    }
    int N() const {
        return N_;
    }
    std::size_t size() const {
        return occupations_.size();
    }
    const std::vector<OccupationVector> &occupations() const {
        return occupations_;
    }

    /// Coordinates of |phi>^{(x)N}: sqrt(N!/prod n_i!) prod c_i^{n_i}.
    CVector embed(const CVector &c) const {
        if (c.size() != d_) {
            throw InputError("embed: dimension mismatch");
        }
        // powers(i, k) = c_i^k
        CMatrix powers(d_, N_ + 1);
        for (int i = 0; i < d_; ++i) {
            powers(i, 0) = 1.0;
            for (int k = 1; k <= N_; ++k) {
                powers(i, k) = powers(i, k - 1) * c(i);
            }
        }
        CVector out(static_cast<Eigen::Index>(occupations_.size()));
        for (std::size_t r = 0; r < occupations_.size(); ++r) {
            Complex p = coefficients_[r];
            for (int i = 0; i < d_; ++i) {
                p *= powers(i, occupations_[r][i]);
            }
            out(static_cast<Eigen::Index>(r)) = p;
        }
        return out;
    }

    CVector embed(const PureState &state) const {
        return embed(state.amplitudes());
    }

   private:
    int d_;
    int N_;
    std::vector<OccupationVector> occupations_;
    std::vector<double> coefficients_;
};

inline SymmetricVector sym_embed(const PureState &state, int N) {
    SymmetricBasis basis(state.dim(), N);
    return {state.dim(), N, basis.embed(state)};
}

/// Dimension d^M of the full tensor product, checked against `guard`.
inline std::size_t full_dim(int d, int M, std::uint64_t guard) {
    if (d < 1 || M < 0) {
        throw InputError("full_dim requires d >= 1 and M >= 0");
    }
    std::uint64_t dim = 1;
    for (int k = 0; k < M; ++k) {
        dim *= static_cast<std::uint64_t>(d);
        if (dim > guard) {
            throw ResourceError("full space dimension " + std::to_string(d) + "^" +
                                std::to_string(M) + " exceeds guard " + std::to_string(guard));
        }
    }
    return static_cast<std::size_t>(dim);
}

/// Digits of `index` in base d, most significant first (particle 0 first).
inline std::vector<int> full_index_digits(std::size_t index, int d, int M) {
    std::vector<int> digits(M);
    for (int k = M - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(index % d);
        index /= d;
    }
    return digits;
}

/// For every full-space basis index, the occupation rank it belongs to.
inline std::vector<std::size_t> full_index_classes(int d, int M, std::uint64_t guard) {
    std::size_t dim = full_dim(d, M, guard);
    std::vector<std::size_t> cls(dim);
    OccupationVector n(d);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        std::fill(n.begin(), n.end(), 0);
        for (int digit : full_index_digits(idx, d, M)) {
            ++n[digit];
        }
        cls[idx] = occupation_rank(n);
    }
    return cls;
}

/// Projector onto the symmetric subspace of (C^d)^{(x)M} as a dense d^M x d^M matrix.
/// Entry (s, t) is 1/K when s and t share an occupation class of size K, else 0,
/// which equals the average of all M! permutation operators.
inline RMatrix symmetric_projector_full(int d, int M, std::uint64_t guard = default_fullspace_guard()) {
    std::size_t dim = full_dim(d, M, guard);
    auto cls = full_index_classes(d, M, guard);
    std::vector<std::size_t> class_size(sym_dim(d, M), 0);
    for (auto c : cls) {
        ++class_size[c];
    }
    RMatrix S = RMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        for (std::size_t t = 0; t < dim; ++t) {
            if (cls[s] == cls[t]) {
                S(s, t) = 1.0 / static_cast<double>(class_size[cls[s]]);
            }
        }
    }
    return S;
}

/// Applies the symmetric projector to a full-space vector without forming it.
inline CVector symmetrize_full(const CVector &v, int d, int M, std::uint64_t guard = default_fullspace_guard()) {
    auto cls = full_index_classes(d, M, guard);
    if (static_cast<std::size_t>(v.size()) != cls.size()) {
        throw InputError("symmetrize_full: vector length does not match d^M");
    }
    std::size_t n_classes = sym_dim(d, M);
    std::vector<Complex> sums(n_classes, 0.0);
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t i = 0; i < cls.size(); ++i) {
        sums[cls[i]] += v(static_cast<Eigen::Index>(i));
        ++counts[cls[i]];
    }
    CVector out(v.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = sums[cls[i]] / static_cast<double>(counts[cls[i]]);
    }
    return out;
}

/// |phi>^{(x)M} in the full d^M-dimensional space (Kronecker order, particle 0 most significant).
inline CVector tensor_power_full(const PureState &state, int M, std::uint64_t guard = default_fullspace_guard()) {
    full_dim(state.dim(), M, guard);
    CVector v = CVector::Ones(1);
    for (int k = 0; k < M; ++k) {
        CVector next(v.size() * state.dim());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            for (int j = 0; j < state.dim(); ++j) {
                next(i * state.dim() + j) = v(i) * state[j];
            }
        }
        v = std::move(next);
    }
    return v;
}

/// Haar-random pure state: d independent standard complex Gaussians, normalized.
inline PureState haar_random_state(int d, Engine &rng) {
    if (d < 2) {
        throw InputError("haar_random_state requires d >= 2");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector v(d);
    for (int i = 0; i < d; ++i) {
        double re = gauss(rng);
        double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return PureState::normalized(std::move(v));
}

inline PureState haar_random_state(int d, std::uint64_t seed) {
    Engine rng(seed);
    return haar_random_state(d, rng);
}

/// Haar-random unitary by Gram-Schmidt on a complex Gaussian matrix.
inline CMatrix haar_random_unitary(int d, Engine &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(d, d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    }
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < j; ++k) {
            g.col(j) -= g.col(k).dot(g.col(j)) * g.col(k);
        }
        g.col(j).normalize();
    }
    return g;
}

inline PureState apply_unitary(const CMatrix &U, const PureState &state) {
    return PureState::normalized(U * state.amplitudes());
}

}  // namespace quadpovm

#endif
