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

#ifndef QUADPOVM_POVM_HPP
#define QUADPOVM_POVM_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quadpovm/core.hpp"
#include "quadpovm/moments.hpp"
#include "quadpovm/quadrature.hpp"
#include "quadpovm/symmetric_space.hpp"

namespace quadpovm {

/// E_a = d_N w_a (|phi_a><phi_a|)^{(x)N}, stored as (w_a, phi_a).
struct PovmElement {
    double weight;
    PureState guess;
};

struct Provenance {
    std::string method = "unknown";  // "sphere_grid", "restricted", "unknown", ...
    int rule_level = 0;              // level the underlying rule was built for
    int phase_nodes = 0;
    std::vector<int> theta_nodes;
    bool deduplicated = false;
};

struct Povm {
    int d = 0;
    int N = 0;
    std::vector<PovmElement> elements;
    Provenance provenance;

    std::size_t size() const {
        return elements.size();
    }

    double weight_sum() const {
        double s = 0.0;
        for (const auto &e : elements) {
            s += e.weight;
        }
        return s;
    }
};

struct BuildOptions {
    bool dedupe = false;
    std::uint64_t guard = default_povm_guard();  // bound on A * d_N^2
};

inline std::uint64_t povm_cost(std::size_t elements, int d, int N) {
    std::uint64_t dn = sym_dim(d, N);
    return static_cast<std::uint64_t>(elements) * dn * dn;
}

/// Gram sum_a w_a v_a v_a^dagger of the guesses embedded at `level`.
inline CMatrix povm_gram(const Povm &povm, int level) {
    SymmetricBasis basis(povm.d, level);
    return weighted_gram(
        basis, povm.size(), [&](std::size_t a) -> const CVector & { return povm.elements[a].guess.amplitudes(); },
        [&](std::size_t a) { return povm.elements[a].weight; });
}

/// || sum_a E_a - I ||_inf on the symmetric subspace.
inline double check_completeness(const Povm &povm) {
    CMatrix g = povm_gram(povm, povm.N);
    double dn = static_cast<double>(sym_dim(povm.d, povm.N));
    return max_abs(dn * g - CMatrix::Identity(g.rows(), g.cols()));
}

/// || sum_a w_a rho_a^{(x)N} - I/d_N ||_inf
inline double check_optimality(const Povm &povm) {
    CMatrix g = povm_gram(povm, povm.N);
    return max_abs(g - mean_tensor_power(povm.d, povm.N).entries);
}

/// Same moment condition one level up: || sum_a w_a rho_a^{(x)(N+1)} - I/d_{N+1} ||_inf
inline double check_universality(const Povm &povm) {
    CMatrix g = povm_gram(povm, povm.N + 1);
    return max_abs(g - mean_tensor_power(povm.d, povm.N + 1).entries);
}

/// Dense d_N x d_N matrix of element a in the occupation basis.
inline CMatrix element_matrix(const Povm &povm, std::size_t a) {
    SymmetricBasis basis(povm.d, povm.N);
    CVector v = basis.embed(povm.elements.at(a).guess);
    double dn = static_cast<double>(basis.size());
    return dn * povm.elements[a].weight * (v * v.adjoint());
}

inline Povm povm_from_rule(const QuadratureRule &rule, int N) {
    Povm povm;
    povm.d = rule.d;
    povm.N = N;
    povm.elements.reserve(rule.size());
    for (std::size_t a = 0; a < rule.size(); ++a) {
        povm.elements.push_back({rule.weights(static_cast<Eigen::Index>(a)), chi_to_state(rule.points.col(static_cast<Eigen::Index>(a)))});
    }
    povm.provenance.method = "sphere_grid";
    povm.provenance.rule_level = rule.n_exact;
    povm.provenance.phase_nodes = rule.counts.phase;
    povm.provenance.theta_nodes = rule.counts.theta;
    povm.provenance.deduplicated = rule.deduplicated;
    return povm;
}

/// Builds a certified optimal POVM for N copies in dimension d.
inline Povm build_povm(int d, int N, const BuildOptions &options = {}) {
    if (d < 2 || N < 1) {
        throw InputError("build_povm requires d >= 2 and N >= 1");
    }
    GridCounts counts = default_grid_counts(d, N);
    std::uint64_t cost = povm_cost(counts.total(), d, N);
    if (cost > options.guard) {
        throw ResourceError("POVM for d=" + std::to_string(d) + ", N=" + std::to_string(N) + " needs A*d_N^2 = " +
                            std::to_string(cost) + " > guard " + std::to_string(options.guard));
    }
    QuadratureRule rule = product_grid(d, N, counts);
    double residual = verify_exactness(rule, N);
    if (!(residual <= tol::kCertify)) {
        throw ConstructionError("quadrature failed certification", residual);
    }
    if (options.dedupe) {
        rule = dedupe(rule);
        residual = verify_exactness(rule, N);
        if (!(residual <= tol::kCertify)) {
            throw ConstructionError("deduplicated quadrature failed certification", residual);
        }
    }
    return povm_from_rule(rule, N);
}

/// Reuses the (w_a, phi_a) of an M-copy POVM for N <= M copies.
inline Povm restrict_povm(const Povm &povm, int N) {
    if (N < 1 || N > povm.N) {
        throw InputError("restrict_povm: need 1 <= N <= " + std::to_string(povm.N) + ", got " + std::to_string(N));
    }
    Povm out = povm;
    if (N == povm.N) {
        return out;
    }
    out.N = N;
    out.provenance.method = "restricted";
    return out;
}

// --- serialization -------------------------------------------------------

inline constexpr int kPovmFormatVersion = 1;

/// Shortest-round-trip-safe decimal: 17 significant digits.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::json to_json(const Povm &povm) {
    using nlohmann::json;
    json elements = json::array();
    for (const auto &e : povm.elements) {
        json c = json::array();
        for (int i = 0; i < povm.d; ++i) {
            c.push_back({format_real(e.guess[i].real()), format_real(e.guess[i].imag())});
        }
        elements.push_back({{"c", std::move(c)}, {"w", format_real(e.weight)}});
    }
    json prov = {
        {"deduplicated", povm.provenance.deduplicated},
        {"method", povm.provenance.method},
        {"phase_nodes", povm.provenance.phase_nodes},
        {"rule_level", povm.provenance.rule_level},
        {"theta_nodes", povm.provenance.theta_nodes},
    };
    return {{"format_version", kPovmFormatVersion},
            {"d", povm.d},
            {"N", povm.N},
            {"elements", std::move(elements)},
            {"provenance", std::move(prov)}};
}

/// Canonical text: compact JSON, keys sorted, trailing newline.
inline std::string serialize_povm(const Povm &povm) {
    return to_json(povm).dump() + "\n";
}

namespace detail {

inline double parse_real(const nlohmann::json &v, const std::string &field) {
    if (!v.is_string()) {
        throw ParseError(field + ": expected a decimal string");
    }
    const std::string &s = v.get_ref<const std::string &>();
    char *end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x)) {
        throw ParseError(field + ": invalid number '" + s + "'");
    }
    return x;
}

inline int parse_int(const nlohmann::json &doc, const char *key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) {
        throw ParseError(std::string(key) + ": missing or not an integer");
    }
    return doc[key].get<int>();
}

}  // namespace detail

/// Parses and re-verifies a POVM document. Rejects non-positive weights,
/// non-normalized guesses and completeness residuals above 1e-8.
inline Povm parse_povm(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("top level: expected an object");
    }
    if (doc.contains("format_version") && detail::parse_int(doc, "format_version") != kPovmFormatVersion) {
        throw ParseError("format_version: unsupported version " + doc["format_version"].dump());
    }
    Povm povm;
    povm.d = detail::parse_int(doc, "d");
    povm.N = detail::parse_int(doc, "N");
    if (povm.d < 2 || povm.N < 1) {
        throw ParseError("d/N: need d >= 2 and N >= 1");
    }
    if (!doc.contains("elements") || !doc["elements"].is_array() || doc["elements"].empty()) {
        throw ParseError("elements: missing or empty array");
    }
    const json &elements = doc["elements"];
    if (povm_cost(elements.size(), povm.d, povm.N) > default_povm_guard()) {
        throw ResourceError("POVM file exceeds the A*d_N^2 guard");
    }
    for (std::size_t a = 0; a < elements.size(); ++a) {
        std::string where = "elements[" + std::to_string(a) + "]";
        const json &e = elements[a];
        if (!e.is_object() || !e.contains("w") || !e.contains("c")) {
            throw ParseError(where + ": expected {\"c\", \"w\"}");
        }
        double w = detail::parse_real(e["w"], where + ".w");
        if (!(w > 0.0)) {
            throw ParseError(where + ".w: weight must be positive, got " + format_real(w));
        }
        const json &c = e["c"];
        if (!c.is_array() || c.size() != static_cast<std::size_t>(povm.d)) {
            throw ParseError(where + ".c: expected " + std::to_string(povm.d) + " [re, im] pairs");
        }
        CVector amp(povm.d);
        for (int i = 0; i < povm.d; ++i) {
            std::string at = where + ".c[" + std::to_string(i) + "]";
            if (!c[i].is_array() || c[i].size() != 2) {
                throw ParseError(at + ": expected [re, im]");
            }
            amp(i) = Complex(detail::parse_real(c[i][0], at + "[0]"), detail::parse_real(c[i][1], at + "[1]"));
        }
        try {
            povm.elements.push_back({w, PureState(std::move(amp))});
        } catch (const InputError &err) {
            throw ParseError(where + ".c: " + err.what());
        }
    }
    if (doc.contains("provenance") && doc["provenance"].is_object()) {
        const json &p = doc["provenance"];
        povm.provenance.method = p.value("method", std::string("unknown"));
        povm.provenance.rule_level = p.value("rule_level", 0);
        povm.provenance.phase_nodes = p.value("phase_nodes", 0);
        povm.provenance.theta_nodes = p.value("theta_nodes", std::vector<int>{});
        povm.provenance.deduplicated = p.value("deduplicated", false);
    }
    double residual = check_completeness(povm);
    if (!(residual <= tol::kLoad)) {
        throw ParseError("completeness residual " + format_real(residual) + " exceeds " + format_real(tol::kLoad));
    }
    return povm;
}

inline void save_povm(const Povm &povm, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    out << serialize_povm(povm);
    if (!out) {
        throw InputError("write to '" + path + "' failed");
    }
}

inline Povm load_povm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_povm(ss.str());
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace quadpovm

#endif
