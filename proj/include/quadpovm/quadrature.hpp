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

// Product quadratures on the unit sphere S^{2d-1} of amplitude vectors.
//
// A point chi in R^{2d} (m = 2d) is parametrized by polar angles
// theta_1..theta_{m-2} in [0, pi] and a phase phi in [0, 2pi):
//
//   chi_k = sin(theta_1)..sin(theta_{k-1}) cos(theta_k),   k <= m-2
//   chi_{m-1}, chi_m = sin(theta_1)..sin(theta_{m-2}) (cos phi, sin phi)
//
// with measure prod_k sin^{m-1-k}(theta_k) dtheta_k dphi. Writing i = m - k
// for the position of theta_k, the angle at position i carries sin^{i-1}.
// For monomials of total degree 2N:
//   * phi uses the trapezoidal rule with 2N+1 nodes;
//   * even positions use Gauss-Legendre in x = cos(theta), odd positions use
//     the Chebyshev-angle midpoint rule; in both cases the integrand is a
//     polynomial in x of degree <= 2N + i - 1, so N + ceil(i/2) nodes suffice.
// All 1-D weights are positive, hence so are the product weights.

#ifndef QUADPOVM_QUADRATURE_HPP
#define QUADPOVM_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "quadpovm/core.hpp"
#include "quadpovm/moments.hpp"
#include "quadpovm/symmetric_space.hpp"

namespace quadpovm {

enum class RuleKind {
    GaussLegendre,       // x in [-1, 1]
    TrapezoidPhase,      // phi in [0, 2pi)
    GaussLegendreTheta,  // theta in (0, pi), nodes arccos of Legendre roots
    MidpointTheta,       // theta in (0, pi), Chebyshev angles
};

inline const char *to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::GaussLegendre:
            return "gauss-legendre";
        case RuleKind::TrapezoidPhase:
            return "trapezoid-phase";
        case RuleKind::GaussLegendreTheta:
            return "gauss-legendre-theta";
        case RuleKind::MidpointTheta:
            return "midpoint-theta";
    }
    return "?";
}

/// One-dimensional rule sum_k weights[k] f(nodes[k]).
///
/// `degree` certifies exactness: for GaussLegendre, polynomials in x of that
/// degree; for TrapezoidPhase, trigonometric polynomials of that degree; for the
/// theta rules, integrands f(theta) sin^p(theta) (p = sin_power) that are
/// polynomials of that degree in cos(theta) once divided by sin(theta) (GL) or
/// as they stand (midpoint).
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    RuleKind kind = RuleKind::GaussLegendre;
    int degree = 0;
    int sin_power = 0;

    std::size_t size() const {
        return nodes.size();
    }

    double apply(const std::function<double(double)> &f) const {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            s += weights[k] * f(nodes[k]);
        }
        return s;
    }
};

namespace detail {

/// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        return {1.0, 0.0};
    }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1); roots are interior so x^2 != 1.
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1], nodes in descending order.
///
/// The k-th root satisfies (k-1/2)pi/(n+1/2) < arccos(x_k) < k pi/(n+1/2);
/// Newton starts inside that bracket and falls back to bisection whenever a
/// step leaves it.
inline Rule1D gauss_legendre(int n) {
    if (n < 1) {
        throw InputError("gauss_legendre requires n >= 1");
    }
    constexpr double pi = std::numbers::pi;
    constexpr int kMaxIter = 200;
    Rule1D rule;
    rule.kind = RuleKind::GaussLegendre;
    rule.degree = 2 * n - 1;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    for (int k = 1; k <= (n + 1) / 2; ++k) {
        double x = 0.0;
        bool middle = (n % 2 == 1) && (k == (n + 1) / 2);
        if (!middle) {
            double lo = std::cos(k * pi / (n + 0.5));
            double hi = std::cos((k - 0.5) * pi / (n + 0.5));
            double f_lo = detail::legendre_with_derivative(n, lo).first;
            x = std::cos((k - 0.25) * pi / (n + 0.5));
            bool converged = false;
            for (int it = 0; it < kMaxIter; ++it) {
                auto [f, df] = detail::legendre_with_derivative(n, x);
                if (f == 0.0) {
                    converged = true;
                    break;
                }
                if ((f < 0.0) == (f_lo < 0.0)) {
                    lo = x;
                    f_lo = f;
                } else {
                    hi = x;
                }
                double next = x - f / df;
                if (!(next > lo && next < hi)) {
                    next = 0.5 * (lo + hi);
                }
                double step = std::abs(next - x);
                x = next;
                if (step <= 1e-15 || hi - lo <= 1e-15) {
                    converged = true;
                    break;
                }
            }
            if (converged) {
                auto [f, df] = detail::legendre_with_derivative(n, x);
                converged = std::abs(f / df) <= 1e-14;
            }
            if (!converged) {
                throw ConstructionError("Legendre root " + std::to_string(k) + " of degree " +
                                        std::to_string(n) + " did not converge");
            }
        }
        double dp = detail::legendre_with_derivative(n, x).second;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[k - 1] = x;
        rule.weights[k - 1] = w;
        rule.nodes[n - k] = -x;
        rule.weights[n - k] = w;
    }
    return rule;
}

/// Trapezoidal rule on [0, 2pi): nodes 2pi k/n, weights 2pi/n; exact for e^{i j phi}, |j| < n.
inline Rule1D trapezoid_phase(int n) {
    if (n < 1) {
        throw InputError("trapezoid_phase requires n >= 1");
    }
    Rule1D rule;
    rule.kind = RuleKind::TrapezoidPhase;
    rule.degree = n - 1;
    for (int k = 0; k < n; ++k) {
        rule.nodes.push_back(2.0 * std::numbers::pi * k / n);
        rule.weights.push_back(2.0 * std::numbers::pi / n);
    }
    return rule;
}

/// Gauss-Legendre transplanted to theta = arccos(x): weights w_k sin^{p-1}(theta_k),
/// so that sum_k weights[k] f(theta_k) = int_0^pi f sin^p dtheta whenever
/// f sin^{p-1} is a polynomial in cos(theta) of degree <= 2n-1.
inline Rule1D theta_rule_gl(int n, int sin_power) {
    if (sin_power < 0) {
        throw InputError("theta_rule_gl requires sin_power >= 0");
    }
    Rule1D base = gauss_legendre(n);
    Rule1D rule;
    rule.kind = RuleKind::GaussLegendreTheta;
    rule.degree = base.degree;
    rule.sin_power = sin_power;
    for (std::size_t k = 0; k < base.size(); ++k) {
        double x = base.nodes[k];
        double s = std::sqrt((1.0 - x) * (1.0 + x));
        rule.nodes.push_back(std::acos(x));
        rule.weights.push_back(base.weights[k] * std::pow(s, sin_power - 1));
    }
    return rule;
}

/// Midpoint rule in theta: nodes pi(2k-1)/(2n), weights (pi/n) sin^p(theta_k).
/// In x = cos(theta) this is Gauss-Chebyshev, so int_0^pi f sin^p dtheta is exact
/// whenever f sin^p is a polynomial in cos(theta) of degree <= 2n-1.
inline Rule1D theta_rule_midpoint(int n, int sin_power = 0) {
    if (n < 1) {
        throw InputError("theta_rule_midpoint requires n >= 1");
    }
    if (sin_power < 0) {
        throw InputError("theta_rule_midpoint requires sin_power >= 0");
    }
    constexpr double pi = std::numbers::pi;
    Rule1D rule;
    rule.kind = RuleKind::MidpointTheta;
    rule.degree = 2 * n - 1;
    rule.sin_power = sin_power;
    for (int k = 1; k <= n; ++k) {
        double theta = pi * (2.0 * k - 1.0) / (2.0 * n);
        rule.nodes.push_back(theta);
        rule.weights.push_back(pi / n * std::pow(std::sin(theta), sin_power));
    }
    return rule;
}

/// Node counts of a product grid: one per polar angle theta_1..theta_{2d-2}, plus phi.
struct GridCounts {
    std::vector<int> theta;
    int phase = 0;

    std::size_t total() const {
        std::size_t a = static_cast<std::size_t>(phase);
        for (int n : theta) {
            a *= static_cast<std::size_t>(n);
        }
        return a;
    }
};

/// Counts sufficient for exactness on all monomials of degree 2N.
inline GridCounts default_grid_counts(int d, int N) {
    if (d < 2 || N < 1) {
        throw InputError("sphere grid requires d >= 2 and N >= 1");
    }
    int m = 2 * d;
    GridCounts counts;
    counts.phase = 2 * N + 1;
    for (int k = 1; k <= m - 2; ++k) {
        int position = m - k;
        counts.theta.push_back(N + (position + 1) / 2);
    }
    return counts;
}

/// Finite point set on S^{2d-1} with positive weights summing to one.
struct QuadratureRule {
    int d = 0;
    RMatrix points;  // 2d x A, column a is chi_a
    RVector weights;
    int n_exact = 0;
    GridCounts counts;
    bool deduplicated = false;

    std::size_t size() const {
        return static_cast<std::size_t>(weights.size());
    }
};

/// c_i = chi_{2i} + i chi_{2i+1} (0-based). Rejects points off the sphere by more than 1e-10.
inline PureState chi_to_state(const RVector &chi) {
    if (chi.size() < 4 || chi.size() % 2 != 0) {
        throw InputError("chi must have even length >= 4");
    }
    double norm = chi.norm();
    if (!(std::abs(norm - 1.0) <= 1e-10)) {
        throw InputError("chi is not on the unit sphere: |chi| = " + std::to_string(norm));
    }
    CVector c(chi.size() / 2);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c(i) = Complex(chi(2 * i), chi(2 * i + 1));
    }
    return PureState::normalized(std::move(c));
}

/// Polar parametrization: angles theta_1..theta_{m-2}, then phi.
inline RVector polar_point(const std::vector<double> &theta, double phi) {
    Eigen::Index m = static_cast<Eigen::Index>(theta.size()) + 2;
    RVector chi(m);
    double prefix = 1.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        chi(static_cast<Eigen::Index>(k)) = prefix * std::cos(theta[k]);
        prefix *= std::sin(theta[k]);
    }
    chi(m - 2) = prefix * std::cos(phi);
    chi(m - 1) = prefix * std::sin(phi);
    return chi;
}

/// Product grid with explicit node counts. `n_exact` is recorded as given and
/// is only a claim until verify_exactness confirms it.
inline QuadratureRule product_grid(int d, int n_exact, const GridCounts &counts) {
    int m = 2 * d;
    if (d < 2 || static_cast<int>(counts.theta.size()) != m - 2 || counts.phase < 1) {
        throw InputError("product_grid: counts do not match dimension");
    }
    std::vector<Rule1D> rules;
    for (int k = 1; k <= m - 2; ++k) {
        int position = m - k;
        int n = counts.theta[k - 1];
        rules.push_back(position % 2 == 0 ? theta_rule_gl(n, position - 1)
                                          : theta_rule_midpoint(n, position - 1));
    }
    rules.push_back(trapezoid_phase(counts.phase));

    std::size_t total = counts.total();
    QuadratureRule rule;
    rule.d = d;
    rule.n_exact = n_exact;
    rule.counts = counts;
    rule.points.resize(m, static_cast<Eigen::Index>(total));
    rule.weights.resize(static_cast<Eigen::Index>(total));

    std::vector<std::size_t> digit(rules.size(), 0);
    std::vector<double> theta(m - 2);
    for (std::size_t a = 0; a < total; ++a) {
        double w = 1.0;
        for (std::size_t r = 0; r + 1 < rules.size(); ++r) {
            theta[r] = rules[r].nodes[digit[r]];
            w *= rules[r].weights[digit[r]];
        }
        double phi = rules.back().nodes[digit.back()];
        w *= rules.back().weights[digit.back()];
        rule.points.col(static_cast<Eigen::Index>(a)) = polar_point(theta, phi);
        rule.weights(static_cast<Eigen::Index>(a)) = w;
        // odometer, phi fastest
        for (std::size_t r = rules.size(); r-- > 0;) {
            if (++digit[r] < rules[r].size()) {
                break;
            }
            digit[r] = 0;
        }
    }
    rule.weights /= rule.weights.sum();
    return rule;
}

inline QuadratureRule sphere_grid(int d, int N) {
    return product_grid(d, N, default_grid_counts(d, N));
}

inline CVector rule_amplitudes(const QuadratureRule &rule, std::size_t a) {
    const auto col = rule.points.col(static_cast<Eigen::Index>(a));
    CVector c(rule.d);
    for (int i = 0; i < rule.d; ++i) {
        c(i) = Complex(col(2 * i), col(2 * i + 1));
    }
    return c;
}

/// sum_a w_a v_a v_a^dagger with v_a the level-N embedding of amplitude(a).
/// Columns are processed in fixed-size chunks in index order.
template <typename AmplitudeFn, typename WeightFn>
CMatrix weighted_gram(const SymmetricBasis &basis, std::size_t count, AmplitudeFn amplitude,
                      WeightFn weight) {
    constexpr std::size_t kChunk = 2048;
    auto dim = static_cast<Eigen::Index>(basis.size());
    CMatrix gram = CMatrix::Zero(dim, dim);
    CMatrix block;
    for (std::size_t start = 0; start < count; start += kChunk) {
        std::size_t len = std::min(kChunk, count - start);
        block.resize(dim, static_cast<Eigen::Index>(len));
        for (std::size_t k = 0; k < len; ++k) {
            block.col(static_cast<Eigen::Index>(k)) =
                std::sqrt(weight(start + k)) * basis.embed(amplitude(start + k));
        }
        gram.noalias() += block * block.adjoint();
    }
    return gram;
}

/// max |(sum_a w_a v_a v_a^dagger - I/d_N)_{rs}| at level N.
inline double verify_exactness(const QuadratureRule &rule, int N) {
    SymmetricBasis basis(rule.d, N);
    CMatrix gram = weighted_gram(
        basis, rule.size(), [&](std::size_t a) { return rule_amplitudes(rule, a); },
        [&](std::size_t a) { return rule.weights(static_cast<Eigen::Index>(a)); });
    return max_abs(gram - mean_tensor_power(rule.d, N).entries);
}

/// sum_a w_a prod_k c^a_{i_k} conj(c^a_{j_k})
inline Complex rule_moment(const QuadratureRule &rule, const MomentIndex &idx) {
    Complex total = 0.0;
    for (std::size_t a = 0; a < rule.size(); ++a) {
        CVector c = rule_amplitudes(rule, a);
        Complex p = rule.weights(static_cast<Eigen::Index>(a));
        for (int v : idx.i) {
            p *= c(v);
        }
        for (int v : idx.j) {
            p *= std::conj(c(v));
        }
        total += p;
    }
    return total;
}

/// Largest |sum_a w_a prod c^alpha conj(c)^beta| over monomials of total degree
/// `degree` with |alpha| != |beta|. The exact average of each such monomial is 0.
inline double cross_moment_residual(const QuadratureRule &rule, int degree) {
    int vars = 2 * rule.d;  // c_0..c_{d-1}, then conj(c_0)..conj(c_{d-1})
    std::vector<int> exps(vars, 0);
    double worst = 0.0;
    std::function<void(int, int)> rec = [&](int slot, int remaining) {
        if (slot == vars - 1) {
            exps[slot] = remaining;
            int holo = 0;
            for (int i = 0; i < rule.d; ++i) {
                holo += exps[i];
            }
            if (2 * holo == degree) {
                return;
            }
            Complex total = 0.0;
            for (std::size_t a = 0; a < rule.size(); ++a) {
                CVector c = rule_amplitudes(rule, a);
                Complex p = rule.weights(static_cast<Eigen::Index>(a));
                for (int i = 0; i < rule.d; ++i) {
                    for (int e = 0; e < exps[i]; ++e) {
                        p *= c(i);
                    }
                    for (int e = 0; e < exps[rule.d + i]; ++e) {
                        p *= std::conj(c(i));
                    }
                }
                total += p;
            }
            worst = std::max(worst, std::abs(total));
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            exps[slot] = e;
            rec(slot + 1, remaining - e);
        }
    };
    rec(0, degree);
    return worst;
}

/// Merges points whose rays coincide (fidelity >= 1 - 1e-12), summing weights.
/// The first point of each class is kept as representative.
inline QuadratureRule dedupe(const QuadratureRule &rule) {
    std::vector<CVector> reps;
    std::vector<Eigen::Index> rep_cols;
    std::vector<double> rep_weights;
    for (std::size_t a = 0; a < rule.size(); ++a) {
        CVector c = rule_amplitudes(rule, a);
        double cn = c.squaredNorm();
        bool merged = false;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            double f = std::norm(reps[r].dot(c)) / (reps[r].squaredNorm() * cn);
            if (f >= 1.0 - tol::kRayMerge) {
                rep_weights[r] += rule.weights(static_cast<Eigen::Index>(a));
                merged = true;
                break;
            }
        }
        if (!merged) {
            reps.push_back(std::move(c));
            rep_cols.push_back(static_cast<Eigen::Index>(a));
            rep_weights.push_back(rule.weights(static_cast<Eigen::Index>(a)));
        }
    }
    QuadratureRule out;
    out.d = rule.d;
    out.n_exact = rule.n_exact;
    out.counts = rule.counts;
    out.deduplicated = true;
    out.points.resize(rule.points.rows(), static_cast<Eigen::Index>(reps.size()));
    out.weights.resize(static_cast<Eigen::Index>(reps.size()));
    for (std::size_t r = 0; r < reps.size(); ++r) {
        out.points.col(static_cast<Eigen::Index>(r)) = rule.points.col(rep_cols[r]);
        out.weights(static_cast<Eigen::Index>(r)) = rep_weights[r];
    }
    return out;
}

}  // namespace quadpovm

#endif
