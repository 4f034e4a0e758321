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

#ifndef QUADPOVM_ESTIMATION_HPP
#define QUADPOVM_ESTIMATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "quadpovm/core.hpp"
#include "quadpovm/moments.hpp"
#include "quadpovm/povm.hpp"
#include "quadpovm/symmetric_space.hpp"

namespace quadpovm {

struct OutcomeDistribution {
    RVector probs;
};

/// General estimator on the symmetric subspace: arbitrary PSD elements (occupation
/// basis, d_N x d_N) with one guess per outcome. Only the product-form Povm has a
/// closed-form mean fidelity; this type is evaluated pointwise or by Monte Carlo.
struct DensePovm {
    int d = 0;
    int N = 0;
    std::vector<CMatrix> elements;
    std::vector<PureState> guesses;

    std::size_t size() const {
        return elements.size();
    }
};

enum class FidelityMethod { Analytic, MonteCarlo, Pointwise };

inline const char *to_string(FidelityMethod m) {
    switch (m) {
        case FidelityMethod::Analytic:
            return "analytic";
        case FidelityMethod::MonteCarlo:
            return "monte-carlo";
        case FidelityMethod::Pointwise:
            return "pointwise";
    }
    return "?";
}

struct FidelityReport {
    double value = 0.0;
    double std_error = 0.0;
    double sample_variance = 0.0;
    FidelityMethod method = FidelityMethod::Analytic;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {
inline void require_same_dim(int povm_d, const PureState &state) {
    if (state.dim() != povm_d) {
        throw InputError("state dimension " + std::to_string(state.dim()) + " does not match POVM dimension " +
                         std::to_string(povm_d));
    }
}
}  // namespace detail

/// p_a = d_N w_a |<phi_a|phi>|^{2N}
inline OutcomeDistribution outcome_probs(const Povm &povm, const PureState &state) {
    detail::require_same_dim(povm.d, state);
    double dn = static_cast<double>(sym_dim(povm.d, povm.N));
    OutcomeDistribution out{RVector(static_cast<Eigen::Index>(povm.size()))};
    for (std::size_t a = 0; a < povm.size(); ++a) {
        double f = fidelity(povm.elements[a].guess, state);
        out.probs(static_cast<Eigen::Index>(a)) = dn * povm.elements[a].weight * std::pow(f, povm.N);
    }
    return out;
}

/// p_a = <phi^N| E_a |phi^N>
inline OutcomeDistribution outcome_probs(const DensePovm &povm, const PureState &state) {
    detail::require_same_dim(povm.d, state);
    CVector v = SymmetricBasis(povm.d, povm.N).embed(state);
    OutcomeDistribution out{RVector(static_cast<Eigen::Index>(povm.size()))};
    for (std::size_t a = 0; a < povm.size(); ++a) {
        out.probs(static_cast<Eigen::Index>(a)) = v.dot(povm.elements[a] * v).real();
    }
    return out;
}

/// Multinomial draw by sequential conditional binomials; deterministic per seed.
inline std::vector<std::uint64_t> sample_counts(const OutcomeDistribution &dist, std::uint64_t shots,
                                                std::uint64_t seed) {
    Engine rng(seed);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(dist.probs.size()), 0);
    double remaining_mass = 0.0;
    for (Eigen::Index a = 0; a < dist.probs.size(); ++a) {
        remaining_mass += std::max(0.0, dist.probs(a));
    }
    std::uint64_t remaining = shots;
    for (Eigen::Index a = 0; a < dist.probs.size() && remaining > 0; ++a) {
        double p = std::max(0.0, dist.probs(a));
        if (a + 1 == dist.probs.size() || remaining_mass <= 0.0) {
            counts[a] = remaining;
            break;
        }
        double q = std::clamp(p / remaining_mass, 0.0, 1.0);
        std::uint64_t k = 0;
        if (q >= 1.0) {
            k = remaining;
        } else if (q > 0.0) {
            std::binomial_distribution<std::uint64_t> binom(remaining, q);
            k = binom(rng);
        }
        counts[a] = k;
        remaining -= k;
        remaining_mass -= p;
    }
    return counts;
}

template <typename Estimator>
std::vector<std::uint64_t> sample_outcomes(const Estimator &povm, const PureState &state, std::uint64_t shots,
                                           std::uint64_t seed) {
    if (shots < 1) {
        throw InputError("sample_outcomes requires shots >= 1");
    }
    return sample_counts(outcome_probs(povm, state), shots, seed);
}

/// Unaveraged fidelity of an optimal-form estimator: d_N sum_a w_a |<phi_a|phi>|^{2(N+1)}.
inline double pointwise_fidelity(const Povm &povm, const PureState &state) {
    detail::require_same_dim(povm.d, state);
    double dn = static_cast<double>(sym_dim(povm.d, povm.N));
    double s = 0.0;
    for (const auto &e : povm.elements) {
        s += e.weight * std::pow(fidelity(e.guess, state), povm.N + 1);
    }
    return dn * s;
}

/// sum_a tr[E_a rho^N] |<phi_a|phi>|^2
inline double pointwise_fidelity(const DensePovm &povm, const PureState &state) {
    OutcomeDistribution p = outcome_probs(povm, state);
    double s = 0.0;
    for (std::size_t a = 0; a < povm.size(); ++a) {
        s += p.probs(static_cast<Eigen::Index>(a)) * fidelity(povm.guesses[a], state);
    }
    return s;
}

/// d_N / d_{N+1}, exact.
inline Rational fidelity_prefactor(int N, int d) {
    return Rational(BigInt(sym_dim(d, N)), BigInt(sym_dim(d, N + 1)));
}

/// (N+1)/(N+d)
inline Rational optimal_fidelity(int N, int d) {
    if (N < 1 || d < 2) {
        throw InputError("optimal_fidelity requires N >= 1 and d >= 2");
    }
    return Rational(N + 1, N + d);
}

/// Mean fidelity of an optimal-form POVM: (d_N/d_{N+1}) sum_a w_a.
inline FidelityReport mean_fidelity_exact(const Povm &povm) {
    FidelityReport r;
    r.value = to_double(fidelity_prefactor(povm.N, povm.d)) * povm.weight_sum();
    r.method = FidelityMethod::Analytic;
    return r;
}

namespace detail {

struct RunningMoments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    // Chan et al. pairwise combination.
    void merge(const RunningMoments &o) {
        if (o.n == 0) {
            return;
        }
        std::uint64_t total = n + o.n;
        double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        n = total;
    }
};

inline constexpr std::uint64_t kMonteCarloBlock = 1024;

inline Engine block_engine(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return Engine(seq);
}

}  // namespace detail

/// Average of pointwise_fidelity over Haar-random inputs.
///
/// Samples are drawn in blocks of 1024, block b from its own engine derived from
/// (seed, b); block statistics are merged in block order, so the result does not
/// depend on `threads`.
template <typename Estimator>
FidelityReport mean_fidelity_mc(const Estimator &povm, std::uint64_t samples, std::uint64_t seed,
                                unsigned threads = 1) {
    if (samples < 100) {
        throw InputError("mean_fidelity_mc requires at least 100 samples");
    }
    std::uint64_t blocks = (samples + detail::kMonteCarloBlock - 1) / detail::kMonteCarloBlock;
    std::vector<detail::RunningMoments> stats(blocks);
    auto run_block = [&](std::uint64_t b) {
        Engine rng = detail::block_engine(seed, b);
        std::uint64_t begin = b * detail::kMonteCarloBlock;
        std::uint64_t end = std::min(samples, begin + detail::kMonteCarloBlock);
        for (std::uint64_t s = begin; s < end; ++s) {
            stats[b].add(pointwise_fidelity(povm, haar_random_state(povm.d, rng)));
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) {
            run_block(b);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::uint64_t b = t; b < blocks; b += threads) {
                    run_block(b);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    detail::RunningMoments total;
    for (const auto &s : stats) {
        total.merge(s);
    }
    FidelityReport r;
    r.value = total.mean;
    r.sample_variance = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    r.std_error = std::sqrt(r.sample_variance / static_cast<double>(total.n));
    r.method = FidelityMethod::MonteCarlo;
    r.samples = samples;
    r.seed = seed;
    return r;
}

/// Applies U to every guess: E_a -> U^{(x)N} E_a U^{dagger (x)N}.
inline Povm rotate_povm(const Povm &povm, const CMatrix &U) {
    Povm out = povm;
    for (auto &e : out.elements) {
        e.guess = apply_unitary(U, e.guess);
    }
    return out;
}

/// Qubit baseline: measure each copy in the computational basis and guess the
/// majority outcome (ties guess |0>). Outcome k = number of 1s; restricted to the
/// symmetric subspace its element is the projector onto occupation (N-k, k).
inline DensePovm separate_measurement_baseline(int N) {
    if (N < 1) {
        throw InputError("separate_measurement_baseline requires N >= 1");
    }
    DensePovm povm;
    povm.d = 2;
    povm.N = N;
    auto dim = static_cast<Eigen::Index>(sym_dim(2, N));
    for (int k = 0; k <= N; ++k) {
        CMatrix e = CMatrix::Zero(dim, dim);
        e(occupation_rank({N - k, k}), occupation_rank({N - k, k})) = 1.0;
        povm.elements.push_back(std::move(e));
        povm.guesses.push_back(PureState::basis(2, 2 * k > N ? 1 : 0));
    }
    return povm;
}

/// Dense copy of a product-form POVM, optionally with replaced guesses.
inline DensePovm to_dense(const Povm &povm) {
    DensePovm out;
    out.d = povm.d;
    out.N = povm.N;
    for (std::size_t a = 0; a < povm.size(); ++a) {
        out.elements.push_back(element_matrix(povm, a));
        out.guesses.push_back(povm.elements[a].guess);
    }
    return out;
}

/// || sum_a E_a - I ||_inf
inline double check_completeness(const DensePovm &povm) {
    auto dim = static_cast<Eigen::Index>(sym_dim(povm.d, povm.N));
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (const auto &e : povm.elements) {
        sum += e;
    }
    return max_abs(sum - CMatrix::Identity(dim, dim));
}

}  // namespace quadpovm

#endif
