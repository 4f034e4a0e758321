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

#include "quadpovm/cloner.hpp"

#include "gtest/gtest.h"

#include "oracles.hpp"

using namespace quadpovm;

namespace {

// rho (x) 1_rest
CMatrix kron_identity(const CMatrix &a, std::size_t rest) {
    CMatrix out = CMatrix::Zero(a.rows() * rest, a.cols() * rest);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < rest; ++k) {
                out(i * rest + k, j * rest + k) = a(i, j);
            }
        }
    }
    return out;
}

// (d_N/d_M) S (rho^N (x) 1) S with every factor formed explicitly.
CMatrix cloner_by_definition(const PureState &s, int N, int M) {
    int d = s.dim();
    CMatrix S = oracle::permutation_sum_projector(d, M).cast<Complex>();
    CVector psi = oracle::tensor_power(s.amplitudes(), N);
    CMatrix in = CMatrix(psi * psi.adjoint());
    std::size_t rest = oracle::ipow(d, M - N);
    CMatrix full = kron_identity(in, rest);
    double scale = static_cast<double>(sym_dim(d, N)) / static_cast<double>(sym_dim(d, M));
    return scale * S * full * S;
}

}  // namespace


TEST(clone, matches_definition) {
    Engine rng(2);
    for (auto [d, N, M] : {std::tuple{2, 1, 2}, {2, 1, 3}, {2, 2, 3}, {3, 1, 2}}) {
        PureState s = haar_random_state(d, rng);
        ClonerOutput out = clone(s, N, M);
        EXPECT_LE(max_abs(out.density - cloner_by_definition(s, N, M)), 1e-12) << d << N << M;
    }
}

TEST(clone, identity_when_no_extra_copies) {
    PureState s = haar_random_state(3, std::uint64_t{7});
    ClonerOutput out = clone(s, 2, 2);
    CVector v = tensor_power_full(s, 2);
    EXPECT_LE(max_abs(out.density - v * v.adjoint()), 1e-12);
}

TEST(clone, output_is_a_symmetric_density_matrix) {
    Engine rng(13);
    for (auto [d, N, M] : {std::tuple{2, 1, 3}, {2, 2, 4}, {3, 1, 2}, {3, 1, 3}}) {
        ClonerOutput out = clone(haar_random_state(d, rng), N, M);
        EXPECT_NEAR(out.density.trace().real(), 1.0, 1e-10);
        EXPECT_LE(max_abs(out.density - out.density.adjoint()), 1e-10);
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.density);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
        CMatrix S = symmetric_projector_full(d, M).cast<Complex>();
        EXPECT_LE(max_abs(S * out.density * S - out.density), 1e-10);
    }
}

TEST(clone, guard_and_arguments) {
    PureState s = PureState::basis(2, 0);
    EXPECT_THROW(clone(s, 1, 13), ResourceError);
    EXPECT_THROW(clone(s, 2, 1), InputError);
    EXPECT_THROW(clone(s, 0, 1), InputError);
}

TEST(single_particle_reduced, examples) {
    PureState s = haar_random_state(2, std::uint64_t{1});
    CMatrix rho = s.amplitudes() * s.amplitudes().adjoint();
    EXPECT_LE(max_abs(single_particle_reduced(clone(s, 1, 1), 0) - rho), 1e-14);

    // Frozen from cloner_by_definition at |0>, traced by hand: diag(5/6, 1/6).
    ClonerOutput out = clone(PureState::basis(2, 0), 1, 2);
    CMatrix r = single_particle_reduced(out, 0);
    EXPECT_NEAR(r(0, 0).real(), 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(r(1, 1).real(), 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-12);
    EXPECT_THROW(single_particle_reduced(out, 2), InputError);
    EXPECT_THROW(single_particle_reduced(out, -1), InputError);
}

TEST(single_particle_reduced, five_sixths_for_random_states) {
    Engine rng(20);
    for (int t = 0; t < 20; ++t) {
        PureState s = haar_random_state(2, rng);
        ClonerOutput out = clone(s, 1, 2);
        EXPECT_NEAR(single_particle_fidelity(out, s), 5.0 / 6.0, 1e-10);
        EXPECT_LE(max_abs(single_particle_reduced(out, 0) - single_particle_reduced(out, 1)), 1e-10);
    }
}

TEST(single_particle_reduced, agrees_with_explicit_partial_trace) {
    PureState s = haar_random_state(3, std::uint64_t{8});
    ClonerOutput out = clone(s, 1, 3);
    for (int which = 0; which < 3; ++which) {
        CMatrix expected = CMatrix::Zero(3, 3);
        for (std::size_t a = 0; a < 27; ++a) {
            for (std::size_t b = 0; b < 27; ++b) {
                auto ta = oracle::digits_of(a, 3, 3);
                auto tb = oracle::digits_of(b, 3, 3);
                bool others_equal = true;
                for (int k = 0; k < 3; ++k) {
                    if (k != which && ta[k] != tb[k]) {
                        others_equal = false;
                    }
                }
                if (others_equal) {
                    expected(ta[which], tb[which]) += out.density(a, b);
                }
            }
        }
        EXPECT_LE(max_abs(single_particle_reduced(out, which) - expected), 1e-14);
    }
}

TEST(single_particle_fidelity, decreases_towards_estimation_optimum) {
    for (int d : {2, 3}) {
        PureState s = haar_random_state(d, static_cast<std::uint64_t>(50 + d));
        for (int N : {1, 2}) {
            double prev = 2.0;
            double limit = to_double(Rational(N + 1, N + d));
            for (int M = N; M <= N + 4; ++M) {
                if (std::pow(d, M) > 4096) {
                    break;
                }
                double f = single_particle_fidelity(clone(s, N, M), s);
                EXPECT_LE(f, prev + 1e-10) << d << " " << N << " " << M;
                EXPECT_GT(f, limit);
                prev = f;
            }
        }
    }
}

TEST(clone, covariance) {
    Engine rng(77);
    for (auto [d, N, M] : {std::tuple{2, 1, 3}, {3, 1, 2}}) {
        PureState s = haar_random_state(d, rng);
        CMatrix U = haar_random_unitary(d, rng);
        CMatrix UM = CMatrix::Ones(1, 1);
        for (int k = 0; k < M; ++k) {
            CMatrix next(UM.rows() * d, UM.cols() * d);
            for (Eigen::Index i = 0; i < UM.rows(); ++i) {
                for (Eigen::Index j = 0; j < UM.cols(); ++j) {
                    next.block(i * d, j * d, d, d) = UM(i, j) * U;
                }
            }
            UM = next;
        }
        CMatrix lhs = clone(apply_unitary(U, s), N, M).density;
        CMatrix rhs = UM * clone(s, N, M).density * UM.adjoint();
        EXPECT_LE(max_abs(lhs - rhs), 1e-9);
    }
}

TEST(two_step_estimate, optimal_and_universal) {
    Engine rng(91);
    for (auto [d, N, M] : {std::tuple{2, 1, 2}, {2, 1, 3}, {3, 1, 2}}) {
        Povm povm = build_povm(d, M);
        double target = to_double(Rational(N + 1, N + d));
        for (int t = 0; t < 20; ++t) {
            TwoStepResult r = two_step_estimate(haar_random_state(d, rng), N, M, povm);
            EXPECT_NEAR(r.full_space, target, 1e-8);
            EXPECT_NEAR(r.closed_form, target, 1e-8);
        }
    }
}

TEST(two_step_estimate, rejects_mismatched_povm) {
    Povm povm = build_povm(2, 2);
    EXPECT_THROW(two_step_estimate(PureState::basis(2, 0), 1, 3, povm), InputError);
    EXPECT_THROW(two_step_estimate(PureState::basis(3, 0), 1, 2, povm), InputError);
}
