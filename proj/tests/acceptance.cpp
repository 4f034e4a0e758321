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

// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quadpovm/quadpovm.hpp"

using namespace quadpovm;

namespace {

struct Criterion {
    std::string id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const char *fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        if (!ok) {
            pass = false;
            notes.push_back(std::string("FAILED: ") + buf);
        } else {
            notes.push_back(buf);
        }
    }
    void note(const std::string &s) { notes.push_back(s); }
};

std::vector<Criterion> g_results;

template <typename Fn>
void run_criterion(const std::string &id, const std::string &title, Fn body) {
    Criterion c{id, title, true, {}};
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception &e) {
        c.pass = false;
        c.notes.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), secs);
    for (const auto &n : c.notes) {
        std::printf("       %s\n", n.c_str());
    }
    std::fflush(stdout);
    g_results.push_back(c);
}

const std::vector<std::pair<int, int>> kPairs = {{1, 2}, {2, 2}, {3, 2}, {1, 3}, {2, 3}, {1, 4}};  // (N, d)

void ac1(Criterion &c) {
    auto start = std::chrono::steady_clock::now();
    for (auto [N, d] : kPairs) {
        Povm p = build_povm(d, N);
        double exact = mean_fidelity_exact(p).value;
        double target = to_double(optimal_fidelity(N, d));
        FidelityReport mc = mean_fidelity_mc(p, 20000, 1000 + 10 * d + N);
        double dev = std::abs(mc.value - target);
        c.require(std::abs(exact - target) <= 1e-12 && dev <= 3 * mc.std_error,
                  "N=%d d=%d exact=%.15f target=%s mc=%.6f stderr=%.2e |mc-target|/stderr=%.2f", N, d, exact,
                  to_string(optimal_fidelity(N, d)).c_str(), mc.value, mc.std_error, dev / mc.std_error);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 60.0, "runtime %.2f s < 60 s", secs);
}

void ac2(Criterion &c) {
    for (auto [N, d] : kPairs) {
        QuadratureRule r = sphere_grid(d, N);
        double res = verify_exactness(r, N);
        c.require(res <= 1e-10, "N=%d d=%d A=%zu residual=%.2e", N, d, r.weights.size(), res);
    }
    // Negative control: halve the phase (phi) rule.
    for (auto [N, d] : kPairs) {
        GridCounts counts = default_grid_counts(d, N);
        int full = counts.phase;
        counts.phase = full / 2;
        double res = verify_exactness(product_grid(d, N, counts), N);
        c.require(res > 1e-3, "negative control N=%d d=%d phase nodes %d->%d residual=%.2e (required > 1e-3)", N, d,
                  full, counts.phase, res);
    }
    // Supplementary control, reported only: halving a polar rule.
    for (auto [N, d] : kPairs) {
        GridCounts counts = default_grid_counts(d, N);
        counts.theta[0] = std::max(1, counts.theta[0] / 2);
        char buf[160];
        std::snprintf(buf, sizeof buf, "info: polar rule 0 halved N=%d d=%d residual=%.2e", N, d,
                      verify_exactness(product_grid(d, N, counts), N));
        c.note(buf);
    }
}

void ac3(Criterion &c) {
    for (auto [N, d] : kPairs) {
        Povm p = build_povm(d, N);
        double comp = check_completeness(p);
        double sum = p.weight_sum();
        double min_w = 1.0;
        for (const auto &e : p.elements) {
            min_w = std::min(min_w, e.weight);
        }
        c.require(comp <= 1e-10 && std::abs(sum - 1.0) <= 1e-12 && min_w > 0.0,
                  "N=%d d=%d completeness=%.2e |sum w - 1|=%.2e min w=%.3e", N, d, comp, std::abs(sum - 1.0), min_w);
    }
}

void ac4(Criterion &c) {
    Engine rng(4004);
    for (auto [N, d] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {1, 3}}) {
        Povm p = restrict_povm(build_povm(d, N + 1), N);
        double uni = check_universality(p);
        double target = to_double(optimal_fidelity(N, d));
        std::vector<double> values;
        for (int s = 0; s < 100; ++s) {
            values.push_back(pointwise_fidelity(p, haar_random_state(d, rng)));
        }
        double mean = 0.0;
        for (double v : values) {
            mean += v;
        }
        mean /= values.size();
        double var = 0.0;
        double worst = 0.0;
        for (double v : values) {
            var += (v - mean) * (v - mean);
            worst = std::max(worst, std::abs(v - target));
        }
        var /= values.size() - 1;
        c.require(uni <= 1e-10 && var <= 1e-20 && worst <= 1e-8,
                  "N=%d d=%d universality=%.2e variance=%.2e max|F-target|=%.2e", N, d, uni, var, worst);
    }
}

void ac5(Criterion &c) {
    for (int N = 2; N <= 4; ++N) {
        DensePovm base = separate_measurement_baseline(N);
        FidelityReport mc = mean_fidelity_mc(base, 100000, 5000 + N);
        double bound = to_double(optimal_fidelity(N, 2));
        double gap = bound - mc.value;
        c.require(gap > 3 * mc.std_error, "N=%d baseline mc=%.5f (exact %s) optimum=%s gap=%.4f = %.0f stderr", N,
                  mc.value, to_string(oracle::baseline_fidelity_exact(N)).c_str(),
                  to_string(optimal_fidelity(N, 2)).c_str(), gap, gap / mc.std_error);
    }
}

void ac6(Criterion &c) {
    Engine rng(6006);
    {
        double worst = 0.0;
        for (int s = 0; s < 20; ++s) {
            PureState psi = haar_random_state(2, rng);
            worst = std::max(worst, std::abs(single_particle_fidelity(clone(psi, 1, 2), psi) - 5.0 / 6.0));
        }
        c.require(worst <= 1e-10, "d=2 N=1 M=2 single-particle max|F-5/6|=%.2e over 20 states", worst);
    }
    for (auto [N, d, M] : std::vector<std::tuple<int, int, int>>{{1, 2, 2}, {1, 2, 3}, {1, 3, 2}}) {
        Povm p = build_povm(d, M);
        double target = to_double(optimal_fidelity(N, d));
        double worst = 0.0;
        double worst_trace = 0.0;
        double min_eig = 1.0;
        double worst_support = 0.0;
        CMatrix S = oracle::permutation_sum_projector(d, M).cast<Complex>();
        for (int s = 0; s < 50; ++s) {
            PureState psi = haar_random_state(d, rng);
            TwoStepResult r = two_step_estimate(psi, N, M, p);
            worst = std::max({worst, std::abs(r.full_space - target), std::abs(r.closed_form - target)});
            CMatrix T = clone(psi, N, M).density;
            worst_trace = std::max(worst_trace, std::abs(T.trace() - 1.0));
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(T);
            min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
            worst_support = std::max(worst_support, max_abs(S * T * S - T));
        }
        c.require(worst <= 1e-8, "N=%d d=%d M=%d two-step max|F-%s|=%.2e over 50 states", N, d, M,
                  to_string(optimal_fidelity(N, d)).c_str(), worst);
        c.require(worst_trace <= 1e-10 && min_eig >= -1e-10 && worst_support <= 1e-10,
                  "N=%d d=%d M=%d |tr-1|=%.2e min eigenvalue=%.2e |STS-T|=%.2e", N, d, M, worst_trace, min_eig,
                  worst_support);
    }
}

// Index multiset of a tuple, as occupation counts.
std::vector<int> counts_of(const std::vector<int> &t, int d) {
    std::vector<int> n(static_cast<std::size_t>(d), 0);
    for (int v : t) {
        ++n[v];
    }
    return n;
}

void ac7(Criterion &c) {
    for (int d = 2; d <= 3; ++d) {
        // Distinct monomials c^alpha conj(c)^beta with |alpha|, |beta| <= 3.
        std::vector<std::vector<int>> reps;
        std::map<std::vector<int>, std::size_t> rep_of;
        for (int l = 0; l <= 3; ++l) {
            for (const auto &t : oracle::all_tuples(d, l)) {
                auto key = counts_of(t, d);
                if (!rep_of.count(key)) {
                    rep_of[key] = reps.size();
                    reps.push_back(t);
                }
            }
        }
        std::size_t R = reps.size();
        auto monomial = [&](const CVector &cv, const std::vector<int> &t) {
            Complex m = 1.0;
            for (int v : t) {
                m *= cv(v);
            }
            return m;
        };

        // Hypersphere integration oracle.
        CMatrix quad = CMatrix::Zero(R, R);
        oracle::sphere_integrate(d, 8, [&](const CVector &cv, double w) {
            std::vector<Complex> mono(R);
            for (std::size_t r = 0; r < R; ++r) {
                mono[r] = monomial(cv, reps[r]);
            }
            for (std::size_t a = 0; a < R; ++a) {
                for (std::size_t b = 0; b < R; ++b) {
                    quad(a, b) += w * mono[a] * std::conj(mono[b]);
                }
            }
        });

        // Monte Carlo, 1e6 Haar samples.
        const int samples = 1000000;
        Engine rng(7000 + d);
        CMatrix sum = CMatrix::Zero(R, R);
        RMatrix sq_re = RMatrix::Zero(R, R);
        RMatrix sq_im = RMatrix::Zero(R, R);
        std::vector<Complex> mono(R);
        for (int s = 0; s < samples; ++s) {
            CVector cv = haar_random_state(d, rng).amplitudes();
            for (std::size_t r = 0; r < R; ++r) {
                mono[r] = monomial(cv, reps[r]);
            }
            for (std::size_t a = 0; a < R; ++a) {
                for (std::size_t b = 0; b < R; ++b) {
                    Complex v = mono[a] * std::conj(mono[b]);
                    sum(a, b) += v;
                    sq_re(a, b) += v.real() * v.real();
                    sq_im(a, b) += v.imag() * v.imag();
                }
            }
        }

        double worst_quad = 0.0;
        double worst_z = 0.0;
        std::size_t checked = 0;
        for (int li = 0; li <= 3; ++li) {
            for (int lj = 0; lj <= 3; ++lj) {
                if (li + lj == 0) {
                    continue;
                }
                for (const auto &i : oracle::all_tuples(d, li)) {
                    for (const auto &j : oracle::all_tuples(d, lj)) {
                        std::size_t a = rep_of.at(counts_of(i, d));
                        std::size_t b = rep_of.at(counts_of(j, d));
                        double exact = to_double(moment_value(d, {i, j}));
                        worst_quad = std::max(worst_quad, std::abs(quad(a, b) - exact));
                        Complex mean = sum(a, b) / static_cast<double>(samples);
                        double se_re =
                            std::sqrt(std::max(0.0, sq_re(a, b) / samples - mean.real() * mean.real()) / samples);
                        double se_im =
                            std::sqrt(std::max(0.0, sq_im(a, b) / samples - mean.imag() * mean.imag()) / samples);
                        double z_re = se_re > 0 ? std::abs(mean.real() - exact) / se_re
                                                : (std::abs(mean.real() - exact) <= 1e-12 ? 0.0 : 1e9);
                        double z_im = se_im > 0 ? std::abs(mean.imag()) / se_im
                                                : (std::abs(mean.imag()) <= 1e-12 ? 0.0 : 1e9);
                        worst_z = std::max({worst_z, z_re, z_im});
                        ++checked;
                    }
                }
            }
        }
        c.require(worst_quad <= 1e-6, "d=%d %zu tuple pairs, max|integration-exact|=%.2e", d, checked, worst_quad);
        c.require(worst_z <= 4.0, "d=%d %zu distinct monomials, Monte Carlo max deviation %.2f stderr", d, R * R,
                  worst_z);
    }
}

void ac8(Criterion &c) {
    // Mean tensor power from moments, quadrature Gram and the permutation-sum projector all give I/d_N.
    double worst_moments = 0.0;
    double worst_gram = 0.0;
    double worst_projector = 0.0;
    for (int d = 2; d <= 3; ++d) {
        for (int N = 1; N <= 4; ++N) {
            auto dn = static_cast<Eigen::Index>(sym_dim(d, N));
            CMatrix target = CMatrix::Identity(dn, dn) / static_cast<double>(dn);
            worst_moments = std::max(worst_moments, max_abs(mean_tensor_power(d, N).entries - target));
            QuadratureRule r = sphere_grid(d, N);
            SymmetricBasis basis(d, N);
            CMatrix gram = CMatrix::Zero(dn, dn);
            for (Eigen::Index a = 0; a < r.weights.size(); ++a) {
                CVector v = basis.embed(rule_amplitudes(r, static_cast<std::size_t>(a)));
                gram += r.weights(a) * v * v.adjoint();
            }
            worst_gram = std::max(worst_gram, max_abs(gram - target));
            // <n|S|m> in the occupation basis from the explicit permutation sum.
            RMatrix S = oracle::permutation_sum_projector(d, N);
            auto occ = occupation_basis(d, N);
            CMatrix S_occ(dn, dn);
            for (Eigen::Index m = 0; m < dn; ++m) {
                CVector col = CVector::Zero(static_cast<Eigen::Index>(oracle::ipow(d, N)));
                // Build |m> in the full space from its occupation number.
                std::vector<int> t;
                for (int k = 0; k < d; ++k) {
                    t.insert(t.end(), occ[m][k], k);
                }
                col(static_cast<Eigen::Index>(oracle::index_of(t, d))) = 1.0;
                CVector sym = S.cast<Complex>() * col;
                sym /= sym.norm();
                S_occ.col(m) = oracle::occupation_coordinates(sym, d, N);
            }
            worst_projector = std::max(worst_projector, max_abs(S_occ / static_cast<double>(dn) - target));
        }
    }
    c.require(worst_moments <= 1e-10 && worst_gram <= 1e-10 && worst_projector <= 1e-10,
              "mean tensor power = I/d_N for d<=3, N<=4: moments %.2e, quadrature Gram %.2e, permutation sum %.2e",
              worst_moments, worst_gram, worst_projector);

    // Covariance of outcome probabilities.
    Engine rng(8008);
    double worst_cov = 0.0;
    for (auto [d, N] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {3, 2}}) {
        Povm p = build_povm(d, N);
        for (int t = 0; t < 10; ++t) {
            CMatrix U = haar_random_unitary(d, rng);
            PureState psi = haar_random_state(d, rng);
            RVector lhs = outcome_probs(rotate_povm(p, U), apply_unitary(U, psi)).probs;
            RVector rhs = outcome_probs(p, psi).probs;
            worst_cov = std::max(worst_cov, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    c.require(worst_cov <= 1e-10, "outcome_probs(U P U^dag, U psi) vs outcome_probs(P, psi): max deviation %.2e",
              worst_cov);

    // Symmetric embedding against the brute-force tensor power.
    double worst_embed = 0.0;
    for (int d = 2; d <= 3; ++d) {
        for (int N = 1; N <= 4; ++N) {
            for (int t = 0; t < 10; ++t) {
                PureState psi = haar_random_state(d, rng);
                CVector brute = oracle::occupation_coordinates(oracle::tensor_power(psi.amplitudes(), N), d, N);
                worst_embed = std::max(worst_embed, max_abs(sym_embed(psi, N).coords - brute));
            }
        }
    }
    c.require(worst_embed <= 1e-10, "sym_embed vs brute-force tensor power, d<=3 N<=4: max deviation %.2e",
              worst_embed);
}

}  // namespace

int main() {
    run_criterion("AC1", "optimal mean fidelity (N+1)/(N+d): exact and Monte Carlo", ac1);
    run_criterion("AC2", "quadrature exactness with half-phase negative control", ac2);
    run_criterion("AC3", "completeness, normalized and positive weights", ac3);
    run_criterion("AC4", "universality of restricted estimators", ac4);
    run_criterion("AC5", "separate-measurement baseline below the joint optimum", ac5);
    run_criterion("AC6", "optimal cloner and two-step estimation", ac6);
    run_criterion("AC7", "exact moments vs hypersphere integration and Monte Carlo", ac7);
    run_criterion("AC8", "property suites: mean tensor power, covariance, embedding", ac8);

    int failed = 0;
    for (const auto &c : g_results) {
        failed += c.pass ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", g_results.size(), failed);
    return failed == 0 ? 0 : 1;
}
