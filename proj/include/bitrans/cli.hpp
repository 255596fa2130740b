#pragma once

// Configuration parsing and the four command workflows behind the bitrans executable.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bitrans/io.hpp"
#include "bitrans/oracle.hpp"
#include "bitrans/sequences.hpp"
#include "bitrans/solver.hpp"

namespace bitrans::cli {

using io::json;

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_gate = 2,
    exit_contraction = 3,
    exit_convergence = 4,
};

/// Malformed configuration; the message names the offending field or line.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct SequenceConfig {
    std::string family = "scaling";
    double c = 1.0;
    std::vector<int> m_list;
    /// Perturbation family only: the kernel D.
    std::function<double(double)> perturbation;
};

struct OracleConfig {
    std::optional<double> p_max;
    std::size_t samples = 1000000;
    double doubling_tol = 1e-6;
};

struct RunConfig {
    DomainSpec domain;
    OperatorParams params;
    std::string kernel_name;
    std::function<double(double)> kernel_fn;
    NonlinearSpec nonlinearity;
    double epsilon_margin = 0.5;
    double tol = 1e-12;
    std::size_t max_iter = 500;
    SolverOptions options;
    URange u_range;
    std::size_t verify_samples = 10000;
    std::optional<SequenceConfig> sequence;
    OracleConfig oracle;
    std::string output_dir = ".";

    oracle::ProblemRecipe recipe() const {
        return {domain, params, kernel_fn, nonlinearity, epsilon_margin, options};
    }
    Kernel kernel() const { return Kernel::sample(build_grid(domain), kernel_fn); }
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(path + "." + key + ": missing required field");
    return *it;
}

inline double number(const json& obj, const std::string& key, const std::string& path,
                     std::optional<double> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ConfigError(path + "." + key + ": missing required field");
    }
    if (!it->is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return it->get<double>();
}

inline std::size_t count(const json& obj, const std::string& key, const std::string& path,
                         std::optional<std::size_t> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ConfigError(path + "." + key + ": missing required field");
    }
    if (!it->is_number_unsigned()) throw ConfigError(path + "." + key + ": expected a non-negative integer");
    return it->get<std::size_t>();
}

inline std::string text(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

/// sum over periodic images g(x + 2 pi n), |n| <= 3
inline std::function<double(double)> periodize(std::function<double(double)> g) {
    return [g](double x) {
        double s = 0.0;
        for (int n = -3; n <= 3; ++n) s += g(x + two_pi * n);
        return s;
    };
}

/// Trigonometric interpolant through uniformly spaced samples, zero outside the sampled span.
inline std::function<double(double)> band_limited_interpolant(std::vector<double> xs, std::vector<double> vs,
                                                              bool periodic, const std::string& path) {
    const std::size_t m = xs.size();
    if (m < 4) throw ConfigError(path + ": need at least 4 samples");
    const double h = (xs.back() - xs.front()) / static_cast<double>(m - 1);
    if (!(h > 0.0)) throw ConfigError(path + ": x must be increasing");
    for (std::size_t k = 1; k < m; ++k) {
        if (std::abs(xs[k] - xs[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw ConfigError(path + ": x must be uniformly spaced (row " + std::to_string(k + 1) + ")");
        }
    }
    const double x0 = xs.front();
    const double period = h * static_cast<double>(m);
    if (periodic && std::abs(period - two_pi) > 1e-6) {
        throw ConfigError(path + ": interval kernels must sample one period [0, 2 pi) uniformly");
    }
    // c_j = (1/m) sum_k v_k exp(-2 pi i j k / m)
    const long half = static_cast<long>(m / 2);
    std::vector<complex> c;
    std::vector<long> js;
    for (long j = -half; j <= half; ++j) {
        if (m % 2 == 1 && j == half + 1) break;
        complex acc{};
        for (std::size_t k = 0; k < m; ++k) {
            acc += vs[k] * std::polar(1.0, -two_pi * static_cast<double>(j) * static_cast<double>(k) / static_cast<double>(m));
        }
        acc /= static_cast<double>(m);
        // an even count leaves an unpaired Nyquist term; split it across +-m/2
        if (m % 2 == 0 && std::abs(j) == half) acc *= 0.5;
        c.push_back(acc);
        js.push_back(j);
    }
    return [=](double x) {
        if (!periodic && (x < x0 || x >= x0 + period)) return 0.0;
        const double t = (x - x0) / period;
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            s += (c[i] * std::polar(1.0, two_pi * static_cast<double>(js[i]) * t)).real();
        }
        return s;
    };
}

inline std::function<double(double)> parse_source(const json& j, const std::string& path) {
    const std::string type = text(j, "type", path);
    if (type == "none") return source::none();
    if (type == "cosine") {
        return source::cosine(number(j, "amplitude", path, 1.0),
                              static_cast<int>(number(j, "mode", path, 1.0)));
    }
    if (type == "gaussian") return source::gaussian(number(j, "amplitude", path, 1.0), number(j, "width", path, 1.0));
    throw ConfigError(path + ".type: unknown source '" + type + "' (none | cosine | gaussian)");
}

inline std::function<double(double)> parse_kernel(const json& j, const std::string& path, bool periodic,
                                                  const std::filesystem::path& base_dir, std::string* name) {
    const std::string type = text(j, "type", path);
    if (name) *name = type;
    const double amp = number(j, "amplitude", path, 1.0);
    std::function<double(double)> g;
    if (type == "gaussian") {
        const double w = number(j, "width", path, 1.0);
        if (!(w > 0.0)) throw ConfigError(path + ".width: must be positive");
        g = [amp, w](double x) { return amp * std::exp(-(x * x) / (w * w)); };
    } else if (type == "gaussian_derivative") {
        const double w = number(j, "width", path, 1.0);
        if (!(w > 0.0)) throw ConfigError(path + ".width: must be positive");
        g = [amp, w](double x) { return amp * x * std::exp(-(x * x) / (w * w)); };
    } else if (type == "cosine") {
        const int mode = static_cast<int>(number(j, "mode", path, 1.0));
        return [amp, mode](double x) { return amp * std::cos(mode * x); };
    } else if (type == "custom_csv") {
        std::filesystem::path file = text(j, "path", path);
        if (file.is_relative()) file = base_dir / file;
        std::ifstream in(file);
        if (!in) throw ConfigError(path + ".path: cannot open " + file.string());
        auto [xs, vs] = io::read_csv_columns(in);
        return band_limited_interpolant(std::move(xs), std::move(vs), periodic, path);
    } else {
        throw ConfigError(path + ".type: unknown kernel '" + type +
                          "' (gaussian | gaussian_derivative | cosine | custom_csv)");
    }
    return periodic ? periodize(g) : g;
}

inline NonlinearSpec parse_nonlinearity(const json& j, const std::string& path) {
    const std::string type = text(j, "type", path);
    const auto h = j.contains("source") ? parse_source(j.at("source"), path + ".source") : source::none();
    NonlinearSpec spec;
    if (type == "zero") {
        spec = zero_nonlinearity();
    } else if (type == "source") {
        spec = source_nonlinearity(h);
    } else if (type == "sine") {
        spec = sine_nonlinearity(number(j, "mu", path), h);
    } else if (type == "saturating") {
        spec = saturating_nonlinearity(number(j, "mu", path), h);
    } else {
        throw ConfigError(path + ".type: unknown nonlinearity '" + type + "' (zero | source | sine | saturating)");
    }
    // declared constants may be overridden; the audit in the report shows whether they hold
    if (j.contains("lipschitz_l")) {
        spec.lipschitz_l = number(j, "lipschitz_l", path);
        if (!(spec.lipschitz_l >= 0.0)) throw ConfigError(path + ".lipschitz_l: must be >= 0");
    }
    if (j.contains("growth_k")) {
        spec.growth_k = number(j, "growth_k", path);
        if (!(spec.growth_k >= 0.0)) throw ConfigError(path + ".growth_k: must be >= 0");
    }
    return spec;
}

inline std::string line_diagnostic(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline RunConfig parse_config(const json& root, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    RunConfig c;
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    const auto& dom = require(root, "domain", "config");
    const std::string dtype = text(dom, "type", "domain");
    const std::size_t n = count(dom, "N", "domain");
    if (dtype == "whole_line") {
        const double l = number(dom, "L", "domain");
        if (!(l > 0.0)) throw ConfigError("domain.L: must be positive");
        c.domain = WholeLine{l, n};
    } else if (dtype == "interval") {
        c.domain = PeriodicInterval{n};
    } else {
        throw ConfigError("domain.type: unknown domain '" + dtype + "' (whole_line | interval)");
    }
    try {
        build_grid(c.domain);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("domain.N: ") + e.what());
    }
    const bool periodic = !is_whole_line(c.domain);

    const auto& params = require(root, "params", "config");
    c.params.a = number(params, "a", "params", 0.0);
    c.params.b = number(params, "b", "params");
    try {
        c.params.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    c.kernel_fn = parse_kernel(require(root, "kernel", "config"), "kernel", periodic, base_dir, &c.kernel_name);
    c.nonlinearity = parse_nonlinearity(require(root, "nonlinearity", "config"), "nonlinearity");

    c.epsilon_margin = number(root, "epsilon_margin", "config", 0.5);
    if (!(c.epsilon_margin > 0.0 && c.epsilon_margin < 1.0)) throw ConfigError("epsilon_margin: must lie in (0, 1)");
    c.tol = number(root, "tol", "config", 1e-12);
    if (!(c.tol > 0.0)) throw ConfigError("tol: must be positive");
    c.max_iter = count(root, "max_iter", "config", 500);
    if (c.max_iter == 0) throw ConfigError("max_iter: must be positive");
    if (root.contains("dealias")) {
        if (!root.at("dealias").is_boolean()) throw ConfigError("dealias: expected a boolean");
        c.options.dealias = root.at("dealias").get<bool>();
    }
    c.options.decay_threshold = number(root, "decay_threshold", "config", 1e-10);

    if (root.contains("u_range")) {
        const auto& r = root.at("u_range");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw ConfigError("u_range: expected [lo, hi]");
        }
        c.u_range = {r[0].get<double>(), r[1].get<double>()};
        if (!(c.u_range.lo < c.u_range.hi)) throw ConfigError("u_range: lo must be below hi");
    }
    c.verify_samples = count(root, "verify_samples", "config", 10000);
    if (c.verify_samples < 1000) throw ConfigError("verify_samples: must be >= 1000");

    if (root.contains("sequence")) {
        const auto& s = root.at("sequence");
        SequenceConfig sc;
        sc.family = text(s, "family", "sequence");
        sc.c = number(s, "c", "sequence", 1.0);
        const auto& ml = require(s, "m_list", "sequence");
        if (!ml.is_array() || ml.empty()) throw ConfigError("sequence.m_list: expected a nonempty array");
        for (std::size_t i = 0; i < ml.size(); ++i) {
            if (!ml[i].is_number_integer() || ml[i].get<long>() < 1) {
                throw ConfigError("sequence.m_list[" + std::to_string(i) + "]: expected a positive integer");
            }
            sc.m_list.push_back(ml[i].get<int>());
        }
        if (sc.family == "perturbation") {
            sc.perturbation = parse_kernel(require(s, "perturbation", "sequence"), "sequence.perturbation", periodic,
                                           base_dir, nullptr);
        } else if (sc.family != "scaling" && sc.family != "mollification") {
            throw ConfigError("sequence.family: unknown family '" + sc.family +
                              "' (scaling | mollification | perturbation)");
        }
        c.sequence = std::move(sc);
    }

    if (root.contains("oracle")) {
        const auto& o = root.at("oracle");
        if (o.contains("p_max")) c.oracle.p_max = number(o, "p_max", "oracle");
        c.oracle.samples = count(o, "samples", "oracle", c.oracle.samples);
        if (c.oracle.samples < 100000) throw ConfigError("oracle.samples: must be >= 100000");
        c.oracle.doubling_tol = number(o, "doubling_tol", "oracle", c.oracle.doubling_tol);
    }

    if (root.contains("output_dir")) c.output_dir = text(root, "output_dir", "config");
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    json root;
    try {
        root = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON at " + detail::line_diagnostic(content, e.byte > 0 ? e.byte - 1 : 0));
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_config(root, base);
}

struct RunOptions {
    std::string command;
    std::filesystem::path config_path;
    std::optional<std::filesystem::path> out_dir;
    unsigned parallel = 1;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline json verification_json(const RunConfig& c, std::uint64_t seed) {
    const auto grid = build_grid(c.domain);
    return io::to_json(verify_assumption1(c.nonlinearity, *grid, c.u_range, c.verify_samples, seed));
}

inline json config_echo(const RunConfig& c) {
    json j = {{"domain", domain_name(c.domain)},
              {"N", domain_points(c.domain)},
              {"a", io::sig15(c.params.a)},
              {"b", io::sig15(c.params.b)},
              {"kernel", c.kernel_name},
              {"nonlinearity", c.nonlinearity.name},
              {"lipschitz_l", io::sig15(c.nonlinearity.lipschitz_l)},
              {"epsilon_margin", io::sig15(c.epsilon_margin)},
              {"tol", io::sig15(c.tol)},
              {"max_iter", c.max_iter}};
    if (const auto* w = std::get_if<WholeLine>(&c.domain)) j["L"] = io::sig15(w->half_width);
    return j;
}

inline double rel_error(double approx, double exact) {
    const double scale = std::abs(exact);
    return scale > 0.0 ? std::abs(approx - exact) / scale : std::abs(approx);
}

inline double rel_max_error(const Field& approx, const Field& exact) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < approx.size(); ++k) {
        num = std::max(num, std::abs(approx.values[k] - exact.values[k]));
        den = std::max(den, std::abs(exact.values[k]));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace detail

/// Analyze: multiplier constants, solvability gate and the Lipschitz audit; no iteration.
inline int run_analyze(const RunConfig& c, const RunOptions& opt, json& report) {
    const Kernel g = c.kernel();
    const auto mr = compute_N(g, c.params);
    report["multiplier"] = io::to_json(mr);
    report["q_bound"] = io::sig15(contraction_constant(mr.n_value, c.nonlinearity.lipschitz_l));
    report["verification"] = detail::verification_json(c, opt.seed);
    if (!mr.solvable) {
        report["status"] = "solvability_failed";
        return exit_gate;
    }
    report["status"] = "ok";
    return exit_ok;
}

/// Solve: Picard iteration on the configured problem; writes solution.csv.
inline int run_solve(const RunConfig& c, const RunOptions& opt, json& report, const std::filesystem::path& out) {
    report["verification"] = detail::verification_json(c, opt.seed);
    const Problem problem = c.recipe().build();
    report["multiplier"] = io::to_json(problem.multiplier_report());
    report["q_bound"] = io::sig15(problem.q_bound());
    const auto r = fixed_point_solve(problem, c.tol, c.max_iter);
    report["solve"] = io::to_json(r);
    io::write_text((out / "solution.csv").string(), io::to_csv(r.solution));
    report["status"] = "ok";
    return exit_ok;
}

/// Sequence: solves the limit problem and each G_m problem; writes sequence.csv.
inline int run_sequence(const RunConfig& c, const RunOptions& opt, json& report, const std::filesystem::path& out) {
    if (!c.sequence) throw ConfigError("sequence: required for the sequence command");
    const auto& sc = *c.sequence;
    const Kernel g = c.kernel();
    KernelSequence seq = [&] {
        if (sc.family == "scaling") return scaling_family(g, sc.c);
        if (sc.family == "mollification") return mollification_family(g);
        return perturbation_family(g, Kernel::sample(g.grid(), sc.perturbation));
    }();
    SequenceSettings settings;
    settings.epsilon_margin = c.epsilon_margin;
    settings.tol = c.tol;
    settings.max_iter = c.max_iter;
    settings.options = c.options;
    settings.parallel = opt.parallel;

    const auto uniform = uniform_contraction_check(seq, c.params, c.nonlinearity.lipschitz_l, c.epsilon_margin, sc.m_list);
    json q = json::array();
    for (double v : uniform.q_values) q.push_back(io::sig15(v));
    report["uniform_contraction"] = {{"pass", uniform.pass},
                                     {"q_values", std::move(q)},
                                     {"q_limit", io::sig15(uniform.q_limit)},
                                     {"limit_pass", uniform.limit_pass}};
    if (uniform.first_violation) report["uniform_contraction"]["first_violation"] = *uniform.first_violation;

    const auto r = sequence_solve(c.params, c.nonlinearity, seq, sc.m_list, settings);
    report["sequence"] = io::to_json(r);
    io::write_text((out / "sequence.csv").string(), io::to_csv(r));
    io::write_text((out / "solution.csv").string(), io::to_csv(r.limit_solution.solution));
    report["status"] = "ok";
    return exit_ok;
}

/// Oracle: brute-force cross-checks of convolution, fourth derivative, N and resolution.
inline int run_oracle(const RunConfig& c, const RunOptions&, json& report) {
    if (domain_points(c.domain) > 1024) throw ConfigError("domain.N: the oracle command is capped at N <= 1024");
    const Kernel g = c.kernel();
    const auto grid = g.grid();
    json checks;

    // probe field: F evaluated at a smooth bump, so the check exercises the configured F
    const Field probe = Field::sample(grid, [&](double x) {
        return grid->whole_line() ? std::exp(-0.5 * x * x) : std::sin(x) + 0.5 * std::cos(2.0 * x);
    });
    const Field f = evaluate_field(c.nonlinearity, probe);
    checks["convolution_rel_error"] = io::sig15(detail::rel_max_error(convolve(g, f), oracle::direct_convolution(g, f)));
    if (grid->size() >= 64) {
        checks["fourth_derivative_rel_error"] =
            io::sig15(detail::rel_max_error(oracle::fd_fourth_derivative(probe), derivative(probe, 4)));
    }

    const auto mr = compute_N(c.params.a == 0.0 && check_solvability(g, c.params).solvable ? g.projected_zero_mean() : g,
                              c.params);
    const double p_max = c.oracle.p_max.value_or(grid->max_frequency());
    const double dense = oracle::dense_sup_search(g, c.params, p_max, c.oracle.samples);
    checks["n_value"] = io::sig15(mr.n_value);
    checks["dense_sup"] = io::sig15(dense);
    checks["dense_p_max"] = io::sig15(p_max);
    checks["n_value_rel_error"] = io::sig15(detail::rel_error(dense, mr.n_value));

    if (mr.solvable) {
        const auto rr = oracle::resolution_doubling_check(c.recipe(), c.oracle.doubling_tol, c.tol, c.max_iter);
        checks["resolution_doubling"] = io::to_json(rr);
    }
    report["oracle"] = std::move(checks);
    if (!mr.solvable) {
        report["status"] = "solvability_failed";
        return exit_gate;
    }
    report["status"] = "ok";
    return exit_ok;
}

/// Parses the config, runs one command and writes report.json. Returns the process exit code.
inline int run(const RunOptions& opt, std::ostream& err = std::cerr) {
    json report;
    report["command"] = opt.command;
    report["seed"] = opt.seed;
    std::filesystem::path out = opt.out_dir.value_or(".");
    int code = exit_ok;
    auto fail = [&](const char* status, int c, const std::string& msg) {
        report["status"] = status;
        report["error"] = msg;
        err << "bitrans " << opt.command << ": " << msg << '\n';
        code = c;
    };
    try {
        const RunConfig c = load_config(opt.config_path);
        if (!opt.out_dir) out = c.output_dir;
        std::filesystem::create_directories(out);
        report["config"] = detail::config_echo(c);
        if (opt.command == "analyze") {
            code = run_analyze(c, opt, report);
        } else if (opt.command == "solve") {
            code = run_solve(c, opt, report, out);
        } else if (opt.command == "sequence") {
            code = run_sequence(c, opt, report, out);
        } else if (opt.command == "oracle") {
            code = run_oracle(c, opt, report);
        } else {
            throw ConfigError("unknown command '" + opt.command + "' (analyze | solve | sequence | oracle)");
        }
    } catch (const SolvabilityError& e) {
        fail("solvability_failed", exit_gate, e.what());
    } catch (const ContractionError& e) {
        fail("contraction_failed", exit_contraction, e.what());
    } catch (const ConvergenceError& e) {
        fail("not_converged", exit_convergence, e.what());
    } catch (const NumericalError& e) {
        fail("numerical_failure", exit_convergence, e.what());
    } catch (const std::exception& e) {
        fail("config_error", exit_config, e.what());
    }
    report["exit_code"] = code;
    report["timestamp"] = detail::utc_timestamp();
    try {
        std::filesystem::create_directories(out);
        io::write_text((out / "report.json").string(), report.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "bitrans: " << e.what() << '\n';
        if (code == exit_ok) code = exit_config;
    }
    return code;
}

}  // namespace bitrans::cli
