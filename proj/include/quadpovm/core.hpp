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

#ifndef QUADPOVM_CORE_HPP
#define QUADPOVM_CORE_HPP

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace quadpovm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Default numerical tolerances shared by the verification routines.
namespace tol {
inline constexpr double kNormalization = 1e-12;
inline constexpr double kCertify = 1e-10;
inline constexpr double kLoad = 1e-8;
inline constexpr double kRayMerge = 1e-12;
}  // namespace tol

/// Caller supplied a value outside an operation's domain.
class InputError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A size guard was exceeded.
class ResourceError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A numerical construction failed (non-convergence) or failed certification.
class ConstructionError : public std::runtime_error {
   public:
    ConstructionError(const std::string &what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {
    }
    double residual() const noexcept {
        return residual_;
    }

   private:
    double residual_;
};

/// Malformed or invariant-violating serialized data.
class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Reads an integer guard from the environment, falling back to `fallback`.
inline std::uint64_t env_guard(const char *name, std::uint64_t fallback) {
    const char *raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') {
        return fallback;
    }
    char *end = nullptr;
    unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || v == 0) {
        throw InputError(std::string("invalid value for ") + name + ": '" + raw + "'");
    }
    return static_cast<std::uint64_t>(v);
}

/// Maximum full-space dimension d^M for dense tensor-product operators.
inline std::uint64_t default_fullspace_guard() {
    return env_guard("QUADPOVM_FULLSPACE_GUARD", 4096);
}

/// Maximum A * d_N^2 accumulated when building or checking a POVM.
inline std::uint64_t default_povm_guard() {
    return env_guard("QUADPOVM_POVM_GUARD", 100'000'000);
}

/// Entrywise max-modulus norm.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived> &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace quadpovm

#endif
