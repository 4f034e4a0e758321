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

// quadpovm: build, verify and exercise quadrature POVMs from the shell.
//
// Exit codes: 0 success, 1 certification failure, 2 input error, 3 resource guard.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadpovm/quadpovm.hpp"

namespace {

using namespace quadpovm;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kCertifyFailed = 1, kInputError = 2, kResourceError = 3 };

std::string num(double x) { return format_real(x); }

// RFC-4180: quote when the field carries a separator, quote or line break.
std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream &os) : os_(os) {}
    void row(const std::vector<std::string> &fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            os_ << (k ? "," : "") << csv_field(fields[k]);
        }
        os_ << "\r\n";
    }

  private:
    std::ostream &os_;
};

// Writes to --out when given, stdout otherwise.
class Sink {
  public:
    explicit Sink(const std::string &path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw InputError("cannot open output file '" + path + "'");
            }
        }
    }
    std::ostream &stream() { return file_.is_open() ? static_cast<std::ostream &>(file_) : std::cout; }

  private:
    std::ofstream file_;
};

std::string exact_pass(double residual, double tol) { return residual <= tol ? "pass" : "FAIL"; }

// ---------------------------------------------------------------- build

struct BuildArgs {
    int d = 2;
    int N = 1;
    std::string out;
    bool dedupe = false;
    bool as_json = false;
    double tol = tol::kCertify;
};

int cmd_build(const BuildArgs &a) {
    BuildOptions opts;
    opts.dedupe = a.dedupe;
    Povm povm = build_povm(a.d, a.N, opts);
    double completeness = check_completeness(povm);
    double optimality = check_optimality(povm);
    double universality = check_universality(povm);
    bool certified = completeness <= a.tol * static_cast<double>(sym_dim(a.d, a.N)) && optimality <= a.tol;
    std::string path = a.out.empty() ? "povm_d" + std::to_string(a.d) + "_N" + std::to_string(a.N) + ".json" : a.out;
    save_povm(povm, path);

    if (a.as_json) {
        json report = {{"d", a.d},
                       {"N", a.N},
                       {"elements", povm.size()},
                       {"completeness_residual", completeness},
                       {"optimality_residual", optimality},
                       {"universality_residual", universality},
                       {"deduplicated", a.dedupe},
                       {"certified", certified},
                       {"output", path}};
        std::cout << report.dump() << "\n";
    } else {
        std::cout << "povm d=" << a.d << " N=" << a.N << " elements=" << povm.size()
                  << (a.dedupe ? " (deduplicated)" : "") << "\n"
                  << "completeness_residual  " << num(completeness) << "\n"
                  << "optimality_residual    " << num(optimality) << "  " << exact_pass(optimality, a.tol) << "\n"
                  << "universality_residual  " << num(universality) << "\n"
                  << "wrote " << path << "\n";
    }
    return certified ? kOk : kCertifyFailed;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string path;
    std::string level = "all";
    bool as_json = false;
    double tol = tol::kCertify;
};

int cmd_verify(const VerifyArgs &a) {
    Povm povm = load_povm(a.path);
    bool check_opt = a.level == "optimality" || a.level == "all";
    bool check_uni = a.level == "universality" || a.level == "all";
    bool pass = true;
    json report = {{"path", a.path}, {"d", povm.d}, {"N", povm.N}, {"elements", povm.size()}, {"tolerance", a.tol}};
    std::ostringstream text;
    text << "povm " << a.path << " d=" << povm.d << " N=" << povm.N << " elements=" << povm.size() << "\n";
    if (check_opt) {
        double r = check_optimality(povm);
        pass = pass && r <= a.tol;
        report["optimality_residual"] = r;
        report["optimality_pass"] = r <= a.tol;
        text << "optimality_residual    " << num(r) << "  " << exact_pass(r, a.tol) << "\n";
    }
    if (check_uni) {
        double r = check_universality(povm);
        pass = pass && r <= a.tol;
        report["universality_residual"] = r;
        report["universality_pass"] = r <= a.tol;
        text << "universality_residual  " << num(r) << "  " << exact_pass(r, a.tol) << "\n";
    }
    report["pass"] = pass;
    if (a.as_json) {
        std::cout << report.dump() << "\n";
    } else {
        std::cout << text.str();
    }
    return pass ? kOk : kCertifyFailed;
}

// ---------------------------------------------------------------- fidelity

struct FidelityArgs {
    std::string path;
    bool sweep = false;
    std::vector<int> d_values{2};
    std::vector<int> N_values{1, 2, 3, 4};
    std::uint64_t samples = 20000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string format = "text";
    std::string out;
};

struct FidelityRow {
    int d;
    int N;
    double analytic;
    double mc;
    double stderr_;
    Rational optimal;
};

FidelityRow fidelity_row(const Povm &povm, const FidelityArgs &a) {
    FidelityRow row{povm.d, povm.N, mean_fidelity_exact(povm).value, 0.0, 0.0, optimal_fidelity(povm.N, povm.d)};
    if (a.samples > 0) {
        FidelityReport mc = mean_fidelity_mc(povm, a.samples, *a.seed, a.threads);
        row.mc = mc.value;
        row.stderr_ = mc.std_error;
    }
    return row;
}

int cmd_fidelity(const FidelityArgs &a) {
    if (a.sweep == !a.path.empty()) {
        throw InputError("fidelity needs either a POVM file or --sweep");
    }
    if (a.samples > 0 && !a.seed) {
        throw InputError("fidelity with --samples > 0 requires --seed");
    }
    std::vector<FidelityRow> rows;
    if (a.sweep) {
        for (int d : a.d_values) {
            for (int N : a.N_values) {
                rows.push_back(fidelity_row(build_povm(d, N), a));
            }
        }
    } else {
        rows.push_back(fidelity_row(load_povm(a.path), a));
    }

    Sink sink(a.out);
    std::ostream &os = sink.stream();
    if (a.format == "json") {
        json arr = json::array();
        for (const auto &r : rows) {
            json rec = {{"operation", "mean_fidelity"},
                        {"inputs", {{"d", r.d}, {"N", r.N}}},
                        {"value", a.samples > 0 ? r.mc : r.analytic},
                        {"stderr", r.stderr_},
                        {"samples", a.samples},
                        {"d", r.d},
                        {"N", r.N},
                        {"analytic", r.analytic},
                        {"mc_estimate", r.mc},
                        {"optimal", to_double(r.optimal)},
                        {"optimal_exact", to_string(r.optimal)}};
            if (a.seed) {
                rec["seed"] = *a.seed;
            }
            arr.push_back(rec);
        }
        json doc = {{"rows", arr}};
        os << doc.dump() << "\n";
    } else if (a.format == "csv") {
        CsvWriter csv(os);
        csv.row({"d", "N", "analytic", "mc_estimate", "stderr", "optimal", "optimal_exact"});
        for (const auto &r : rows) {
            csv.row({std::to_string(r.d), std::to_string(r.N), num(r.analytic), num(r.mc), num(r.stderr_),
                     num(to_double(r.optimal)), to_string(r.optimal)});
        }
    } else {
        char line[160];
        std::snprintf(line, sizeof line, "%3s %3s %20s %20s %12s %10s\n", "d", "N", "analytic", "mc_estimate",
                      "stderr", "optimal");
        os << line;
        for (const auto &r : rows) {
            std::snprintf(line, sizeof line, "%3d %3d %20.15f %20.15f %12.3e %10s\n", r.d, r.N, r.analytic, r.mc,
                          r.stderr_, to_string(r.optimal).c_str());
            os << line;
        }
    }
    return kOk;
}

// ---------------------------------------------------------------- simulate

// "basis:K", "haar", or "amp:re,im;re,im;..." (normalized on read).
PureState parse_state(const std::string &source, int d, std::uint64_t seed) {
    if (source == "haar") {
        return haar_random_state(d, seed);
    }
    if (source.rfind("basis:", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(source.substr(6));
        } catch (const std::exception &) {
            throw InputError("bad basis index in state '" + source + "'");
        }
        if (k < 0 || k >= d) {
            throw InputError("basis index out of range in state '" + source + "'");
        }
        return PureState::basis(d, k);
    }
    if (source.rfind("amp:", 0) == 0) {
        CVector v(d);
        std::stringstream ss(source.substr(4));
        std::string pair;
        int k = 0;
        while (std::getline(ss, pair, ';')) {
            double re = 0.0;
            double im = 0.0;
            if (k >= d || std::sscanf(pair.c_str(), "%lf,%lf", &re, &im) < 1) {
                throw InputError("bad amplitude list in state '" + source + "'");
            }
            v(k++) = Complex(re, im);
        }
        if (k != d) {
            throw InputError("state '" + source + "' has " + std::to_string(k) + " amplitudes, expected " +
                             std::to_string(d));
        }
        return PureState::normalized(v);
    }
    throw InputError("unknown state source '" + source + "'");
}

struct SimulateArgs {
    std::string path;
    std::string state = "haar";
    std::uint64_t shots = 1000;
    std::optional<std::uint64_t> seed;
    bool as_json = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs &a) {
    if (!a.seed) {
        throw InputError("simulate requires --seed");
    }
    if (a.shots < 1) {
        throw InputError("--shots must be >= 1");
    }
    Povm povm = load_povm(a.path);
    std::seed_seq ss{*a.seed, std::uint64_t{1}};
    std::uint64_t state_seed = 0;
    {
        std::array<std::uint32_t, 2> s{};
        ss.generate(s.begin(), s.end());
        state_seed = (std::uint64_t{s[0]} << 32) | s[1];
    }
    PureState psi = parse_state(a.state, povm.d, state_seed);
    OutcomeDistribution dist = outcome_probs(povm, psi);
    std::vector<std::uint64_t> counts = sample_counts(dist, a.shots, *a.seed);
    double tv = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        tv += std::abs(static_cast<double>(counts[k]) / static_cast<double>(a.shots) -
                       dist.probs(static_cast<Eigen::Index>(k)));
    }
    tv *= 0.5;

    json amps = json::array();
    for (Eigen::Index k = 0; k < psi.dim(); ++k) {
        amps.push_back({psi[k].real(), psi[k].imag()});
    }
    json doc = {{"counts", counts}, {"seed", *a.seed},      {"shots", a.shots},
                {"state", amps},    {"tv_distance", tv}, {"elements", povm.size()}};
    if (!a.out.empty()) {
        Sink sink(a.out);
        sink.stream() << doc.dump() << "\n";
    }
    if (a.as_json) {
        std::cout << doc.dump() << "\n";
    } else {
        std::size_t hit = 0;
        for (auto c : counts) {
            hit += c > 0;
        }
        std::cout << "shots " << a.shots << " over " << povm.size() << " outcomes (" << hit << " observed)\n"
                  << "tv_distance " << num(tv) << "\n";
        if (!a.out.empty()) {
            std::cout << "wrote " << a.out << "\n";
        }
    }
    return kOk;
}

// ---------------------------------------------------------------- clone

struct CloneArgs {
    int d = 2;
    int N = 1;
    std::vector<int> M_values;
    int states = 5;
    std::optional<std::uint64_t> seed;
    bool as_json = false;
    std::string out;
};

int cmd_clone(const CloneArgs &a) {
    if (!a.seed) {
        throw InputError("clone requires --seed");
    }
    if (a.states < 1) {
        throw InputError("--states must be >= 1");
    }
    std::vector<int> Ms = a.M_values;
    if (Ms.empty()) {
        Ms = {a.N, a.N + 1, a.N + 2};
    }
    Engine rng(*a.seed);
    std::vector<PureState> inputs;
    for (int s = 0; s < a.states; ++s) {
        inputs.push_back(haar_random_state(a.d, rng));
    }

    struct Row {
        int M;
        int state;
        double single;
        double full;
        double two_step;
    };
    std::vector<Row> rows;
    for (int M : Ms) {
        Povm povm = build_povm(a.d, M);
        for (int s = 0; s < a.states; ++s) {
            ClonerOutput out = clone(inputs[s], a.N, M);
            TwoStepResult ts = two_step_estimate(inputs[s], a.N, M, povm);
            rows.push_back({M, s, single_particle_fidelity(out, inputs[s]), full_fidelity(out, inputs[s]),
                            ts.full_space});
        }
    }

    Sink sink(a.out);
    std::ostream &os = sink.stream();
    if (a.as_json) {
        json arr = json::array();
        for (const auto &r : rows) {
            arr.push_back({{"M", r.M},
                           {"state", r.state},
                           {"single_particle", r.single},
                           {"full", r.full},
                           {"two_step", r.two_step}});
        }
        os << json{{"d", a.d}, {"N", a.N}, {"seed", *a.seed}, {"rows", arr}}.dump() << "\n";
    } else {
        CsvWriter csv(os);
        csv.row({"d", "N", "M", "state", "single_particle", "full", "two_step"});
        for (const auto &r : rows) {
            csv.row({std::to_string(a.d), std::to_string(a.N), std::to_string(r.M), std::to_string(r.state),
                     num(r.single), num(r.full), num(r.two_step)});
        }
    }
    return kOk;
}

// ---------------------------------------------------------------- moments

struct MomentsArgs {
    int d = 2;
    std::vector<int> i;
    std::vector<int> j;
    int l = -1;
    bool as_json = false;
};

std::vector<int> to_zero_based(const std::vector<int> &idx, int d) {
    std::vector<int> out;
    for (int v : idx) {
        if (v < 1 || v > d) {
            throw InputError("moment index " + std::to_string(v) + " outside 1.." + std::to_string(d));
        }
        out.push_back(v - 1);
    }
    return out;
}

std::string tuple_text(const std::vector<int> &v) {
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) {
        s += (k ? "," : "") + std::to_string(v[k] + 1);
    }
    return s + ")";
}

// All index tuples of length l over 0..d-1, first coordinate slowest.
std::vector<std::vector<int>> tuples(int d, int l) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(l), 0);
    while (true) {
        out.push_back(cur);
        int k = l - 1;
        while (k >= 0 && ++cur[k] == d) {
            cur[k--] = 0;
        }
        if (k < 0) {
            break;
        }
    }
    return out;
}

int cmd_moments(const MomentsArgs &a) {
    if (a.d < 2) {
        throw InputError("--d must be >= 2");
    }
    std::vector<MomentIndex> queries;
    if (a.l >= 0) {
        if (a.l > 6) {
            throw InputError("--l above 6 is not supported");
        }
        for (const auto &i : tuples(a.d, a.l)) {
            for (const auto &j : tuples(a.d, a.l)) {
                queries.push_back({i, j});
            }
        }
    } else {
        queries.push_back({to_zero_based(a.i, a.d), to_zero_based(a.j, a.d)});
    }
    json arr = json::array();
    for (const auto &q : queries) {
        std::string value = to_string(moment_value(a.d, q));
        if (a.as_json) {
            std::vector<int> i1 = q.i;
            std::vector<int> j1 = q.j;
            for (auto &v : i1) {
                ++v;
            }
            for (auto &v : j1) {
                ++v;
            }
            arr.push_back({{"i", i1}, {"j", j1}, {"value", value}});
        } else {
            std::cout << "i=" << tuple_text(q.i) << " j=" << tuple_text(q.j) << " " << value << "\n";
        }
    }
    if (a.as_json) {
        std::cout << json{{"d", a.d}, {"moments", arr}}.dump() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quadrature POVMs for pure-state estimation and cloning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "quadpovm 1.0.0");

    BuildArgs build;
    auto *b = app.add_subcommand("build", "Construct, certify and save a POVM");
    b->add_option("--d", build.d, "Single-system dimension")->required()->check(CLI::Range(2, 64));
    b->add_option("--N", build.N, "Number of copies")->required()->check(CLI::Range(1, 1000));
    b->add_option("-o,--out", build.out, "Output JSON path (default povm_d<d>_N<N>.json)");
    b->add_flag("--dedupe", build.dedupe, "Merge grid points on the same ray");
    b->add_flag("--json", build.as_json, "Machine-readable report");
    b->add_option("--tol", build.tol, "Certification tolerance")->check(CLI::PositiveNumber);

    VerifyArgs verify;
    auto *v = app.add_subcommand("verify", "Check a saved POVM");
    v->add_option("path", verify.path, "POVM JSON file")->required();
    v->add_option("--level", verify.level, "optimality, universality or all")
        ->check(CLI::IsMember({"optimality", "universality", "all"}));
    v->add_flag("--json", verify.as_json, "Machine-readable report");
    v->add_option("--tol", verify.tol, "Pass/fail tolerance")->check(CLI::PositiveNumber);

    FidelityArgs fid;
    auto *f = app.add_subcommand("fidelity", "Mean fidelity: analytic and Monte Carlo");
    f->add_option("path", fid.path, "POVM JSON file");
    f->add_flag("--sweep", fid.sweep, "Build and evaluate every (d, N) in --d x --N");
    f->add_option("--d", fid.d_values, "Dimensions for --sweep")->delimiter(',')->check(CLI::Range(2, 64));
    f->add_option("--N", fid.N_values, "Copy numbers for --sweep")->delimiter(',')->check(CLI::Range(1, 1000));
    f->add_option("--samples", fid.samples, "Monte Carlo samples (0 disables)");
    f->add_option("--seed", fid.seed, "RNG seed");
    f->add_option("--threads", fid.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    f->add_option("--format", fid.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    f->add_flag_callback("--json", [&] { fid.format = "json"; }, "Same as --format json");
    f->add_flag_callback("--csv", [&] { fid.format = "csv"; }, "Same as --format csv");
    f->add_option("-o,--out", fid.out, "Write the table here instead of stdout");

    SimulateArgs sim;
    auto *s = app.add_subcommand("simulate", "Sample measurement outcomes on N copies of a state");
    s->add_option("path", sim.path, "POVM JSON file")->required();
    s->add_option("--state", sim.state, "haar | basis:K | amp:re,im;re,im;...");
    s->add_option("--shots", sim.shots, "Number of measurement runs")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 48));
    s->add_option("--seed", sim.seed, "RNG seed")->required();
    s->add_flag("--json", sim.as_json, "Print the full JSON report");
    s->add_option("-o,--out", sim.out, "Write the JSON report here");

    CloneArgs cl;
    auto *c = app.add_subcommand("clone", "Optimal cloner and two-step estimation table");
    c->add_option("--d", cl.d, "Single-system dimension")->check(CLI::Range(2, 64));
    c->add_option("--N", cl.N, "Input copies")->check(CLI::Range(1, 64));
    c->add_option("--M", cl.M_values, "Output copies (default N, N+1, N+2)")->delimiter(',')->check(CLI::Range(1, 64));
    c->add_option("--states", cl.states, "Number of Haar-random inputs");
    c->add_option("--seed", cl.seed, "RNG seed")->required();
    c->add_flag("--json", cl.as_json, "JSON instead of CSV");
    c->add_option("-o,--out", cl.out, "Write the table here instead of stdout");

    MomentsArgs mom;
    auto *m = app.add_subcommand("moments", "Exact Haar moments <c_i... c*_j...> as p/q");
    m->add_option("--d", mom.d, "Dimension")->required()->check(CLI::Range(2, 64));
    m->add_option("--i", mom.i, "Unconjugated indices, 1-based")->delimiter(',');
    m->add_option("--j", mom.j, "Conjugated indices, 1-based")->delimiter(',');
    m->add_option("--l", mom.l, "Enumerate every pair of index tuples of this length")->excludes("--i")->excludes("--j");
    m->add_flag("--json", mom.as_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*b) {
            return cmd_build(build);
        }
        if (*v) {
            return cmd_verify(verify);
        }
        if (*f) {
            return cmd_fidelity(fid);
        }
        if (*s) {
            return cmd_simulate(sim);
        }
        if (*c) {
            return cmd_clone(cl);
        }
        if (*m) {
            return cmd_moments(mom);
        }
    } catch (const ResourceError &e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kResourceError;
    } catch (const ConstructionError &e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return kCertifyFailed;
    } catch (const ParseError &e) {
        std::cerr << "invalid POVM: " << e.what() << "\n";
        return kInputError;
    } catch (const InputError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
