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

// Optimal symmetric N -> M cloner of pure states,
//   T(rho^N) = (d_N / d_M) S_M (rho^N (x) 1^{M-N}) S_M,
// as a dense full-space reference computation.

#ifndef QUADPOVM_CLONER_HPP
#define QUADPOVM_CLONER_HPP

#include <cmath>
#include <string>
#include <vector>

#include "quadpovm/core.hpp"
#include "quadpovm/povm.hpp"
#include "quadpovm/symmetric_space.hpp"

namespace quadpovm {

struct ClonerOutput {
    int d = 0;
    int N = 0;
    int M = 0;
    CMatrix density;  // d^M x d^M, particle 0 most significant
};

inline ClonerOutput clone(const PureState &state, int N, int M, std::uint64_t guard = default_fullspace_guard()) {
    if (N < 1 || M < N) {
        throw InputError("clone requires M >= N >= 1");
    }
    const int d = state.dim();
    const std::size_t dim = full_dim(d, M, guard);
    const std::size_t extra = full_dim(d, M - N, guard);
    const CVector psi = tensor_power_full(state, N, guard);
    const auto cls = full_index_classes(d, M, guard);
    const std::size_t n_classes = sym_dim(d, M);

    // rho^N (x) 1 = sum_k |psi, k><psi, k|; column k of W is S_M |psi, k>.
    CMatrix W(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(extra));
    std::vector<Complex> sums(n_classes);
    std::vector<std::size_t> counts(n_classes);
    for (std::size_t k = 0; k < extra; ++k) {
        std::fill(sums.begin(), sums.end(), Complex(0.0));
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < dim; ++s) {
            ++counts[cls[s]];
            if (s % extra == k) {
                sums[cls[s]] += psi(static_cast<Eigen::Index>(s / extra));
            }
        }
        for (std::size_t s = 0; s < dim; ++s) {
            W(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) =
                sums[cls[s]] / static_cast<double>(counts[cls[s]]);
        }
    }
    double scale = static_cast<double>(sym_dim(d, N)) / static_cast<double>(sym_dim(d, M));
    ClonerOutput out{d, N, M, CMatrix()};
    out.density.noalias() = scale * (W * W.adjoint());
    return out;
}

/// Partial trace over every particle except `which` (0-based).
inline CMatrix single_particle_reduced(const ClonerOutput &out, int which) {
    if (which < 0 || which >= out.M) {
        throw InputError("particle index " + std::to_string(which) + " outside 0.." + std::to_string(out.M - 1));
    }
    const std::size_t d = static_cast<std::size_t>(out.d);
    std::size_t stride = 1;  // d^{M-1-which}
    for (int k = which + 1; k < out.M; ++k) {
        stride *= d;
    }
    std::size_t rest = 1;
    for (int k = 0; k + 1 < out.M; ++k) {
        rest *= d;
    }
    CMatrix rho = CMatrix::Zero(out.d, out.d);
    for (std::size_t r = 0; r < rest; ++r) {
        std::size_t high = r / stride;
        std::size_t low = r % stride;
        std::size_t base = high * stride * d + low;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                rho(i, j) += out.density(base + i * stride, base + j * stride);
            }
        }
    }
    return rho;
}

/// tr[rho R_rho^{(1)}]: the one-particle reduced fidelity.
inline double single_particle_fidelity(const ClonerOutput &out, const PureState &state, int which = 0) {
    CMatrix r = single_particle_reduced(out, which);
    return state.amplitudes().dot(r * state.amplitudes()).real();
}

/// tr[rho^{(x)M} T(rho^N)]
inline double full_fidelity(const ClonerOutput &out, const PureState &state) {
    CVector v = tensor_power_full(state, out.M, static_cast<std::uint64_t>(out.density.rows()));
    return v.dot(out.density * v).real();
}

struct TwoStepResult {
    double full_space = 0.0;   // sum_a tr[E_a T(rho^N)] |<phi_a|phi>|^2
    double closed_form = 0.0;  // d_N sum_a w_a |<phi_a|phi>|^{2(N+1)}
};

/// Clone N -> M, then estimate with an M-copy optimal-form POVM. Both routes are
/// evaluated; a disagreement above 1e-8 raises ConstructionError.
inline TwoStepResult two_step_estimate(const PureState &state, int N, int M, const Povm &povm_M,
                                       std::uint64_t guard = default_fullspace_guard()) {
    if (povm_M.N != M || povm_M.d != state.dim()) {
        throw InputError("two_step_estimate: POVM must act on M=" + std::to_string(M) + " copies in dimension " +
                         std::to_string(state.dim()));
    }
    ClonerOutput t = clone(state, N, M, guard);
    const double dM = static_cast<double>(sym_dim(state.dim(), M));
    const double dN = static_cast<double>(sym_dim(state.dim(), N));
    TwoStepResult r;
    for (const auto &e : povm_M.elements) {
        CVector big = tensor_power_full(e.guess, M, guard);
        double tr = dM * e.weight * big.dot(t.density * big).real();
        double f = fidelity(e.guess, state);
        r.full_space += tr * f;
        r.closed_form += e.weight * std::pow(f, N + 1);
    }
    r.closed_form *= dN;
    double gap = std::abs(r.full_space - r.closed_form);
    if (!(gap <= 1e-8)) {
        throw ConstructionError("two-step routes disagree", gap);
    }
    return r;
}

}  // namespace quadpovm

#endif
