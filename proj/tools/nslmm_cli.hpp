/*
 * Copyright (C) 2026 The nslmm authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef NSLMM_TOOLS_CLI_HPP
#define NSLMM_TOOLS_CLI_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nslmm/nslmm.hpp"

namespace nslmm::cli
{

enum ExitCode
{
    exit_ok = 0,
    exit_violation = 1,
    exit_config = 2,
};

/// Parsed flag values for every subcommand.
struct Options
{
    // shared
    std::string problem = "logistic";
    std::vector<std::string> params;
    std::string method = "sspms64";
    std::string phi;
    bool standard = false;
    std::string startup;
    std::string coefficients = "computed";
    std::vector<double> y0;
    double phi_bound = 0.0;
    double t_end = 0.0;
    std::string output;

    // solve
    double dt = 0.0;
    std::vector<std::string> checks;
    bool strict = false;

    // convergence
    std::vector<double> dt_list;
    double dt_base = 0.0;
    int halvings = 0;
    std::string reference = "exact";
    std::string norm = "max";

    // sharpness
    std::string property = "both";
    double y0_min = 0.0;
    double y0_max = 0.0;
    std::size_t y0_count = 100;
    double dt_min = 0.0;
    double dt_max = 0.0;
    std::size_t dt_count = 100;
    std::string dt_spacing = "log";
    double horizon = 0.0;
    double tolerance = 1e-4;
    double lo_factor = 1e-4;
    double hi_factor = 10.0;
    bool paper_exact = false;

    // bench
    std::vector<std::string> phis;
    std::size_t evals = 10000000;
    double x = 0.5;
    double bound = 1.0;
    int repetitions = 5;

    // verify-phi
    int max_order = 5;
};

struct App
{
    std::unique_ptr<CLI::App> app;
    Options opts;
};

inline void add_problem_flags(CLI::App* sub, Options& o)
{
    sub->add_option("--problem", o.problem, "problem id: logistic | seir")->capture_default_str();
    sub->add_option("--params", o.params, "parameters as name=value, comma separated (c, influx)")
        ->delimiter(',');
}

inline void add_output_flag(CLI::App* sub, Options& o)
{
    sub->add_option("--output", o.output, "output file (default: standard output)");
}

inline void add_method_flags(CLI::App* sub, Options& o)
{
    sub->add_option("--method", o.method, "method id (see `list`)")->capture_default_str();
    sub->add_option("--phi", o.phi, "phi1..phi8, phi-general:<p>, identity (default: order matched)");
    sub->add_flag("--standard", o.standard, "use the identity denominator (standard method)");
    sub->add_option("--startup", o.startup, "exact | rk | rk:<method>:<phi>");
    sub->add_option("--coefficients", o.coefficients, "SSP coefficient used for the bound: computed | stated")
        ->capture_default_str();
    sub->add_option("--bound", o.phi_bound, "explicit bound for phi (default: C * B_FE(y0))");
}

/// Builds the command tree. Flags bind into the returned Options.
inline std::unique_ptr<App> build_app()
{
    auto out = std::make_unique<App>();
    out->app = std::make_unique<CLI::App>("Nonstandard SSP linear multistep integrators", "nslmm");
    auto& app = *out->app;
    auto& o = out->opts;
    app.require_subcommand(1, 1);

    auto* solve = app.add_subcommand("solve", "integrate one problem and write the trajectory as CSV");
    add_problem_flags(solve, o);
    add_method_flags(solve, o);
    solve->add_option("--dt", o.dt, "time step")->required();
    solve->add_option("--t-end", o.t_end, "final time")->required();
    solve->add_option("--y0", o.y0, "initial value, comma separated")->delimiter(',')->required();
    solve->add_option("--check", o.checks,
                      "property to monitor: bound-below:<v>[@k] | bound-above:<v>[@k] | weak-increase[@k] | "
                      "weak-decrease[@k] | invariant | auto");
    solve->add_flag("--strict", o.strict, "exit with code 1 when a checked property is violated");
    add_output_flag(solve, o);

    auto* conv = app.add_subcommand("convergence", "error and observed order over a step-size grid");
    add_problem_flags(conv, o);
    add_method_flags(conv, o);
    conv->add_option("--y0", o.y0, "initial value, comma separated")->delimiter(',')->required();
    conv->add_option("--t-end", o.t_end, "final time")->required();
    auto* dt_list = conv->add_option("--dt-list", o.dt_list, "time steps, comma separated")->delimiter(',');
    auto* dt_base = conv->add_option("--dt-base", o.dt_base, "coarsest time step of a halving grid");
    conv->add_option("--halvings", o.halvings, "number of halvings of --dt-base")->needs(dt_base);
    dt_list->excludes(dt_base);
    conv->add_option("--reference", o.reference, "exact | rk4:<dt_ref>")->capture_default_str();
    conv->add_option("--norm", o.norm, "abs | max | euclidean")->capture_default_str();
    add_output_flag(conv, o);

    auto* sharp = app.add_subcommand("sharpness", "bisect the largest phi bound preserving a property");
    add_problem_flags(sharp, o);
    sharp->add_option("--method", o.method, "multistep method id")->capture_default_str();
    sharp->add_option("--phi", o.phi, "denominator kind (default: order matched)");
    sharp->add_option("--coefficients", o.coefficients, "computed | stated")->capture_default_str();
    sharp->add_option("--property", o.property, "boundedness | weak-monotonicity | both")->capture_default_str();
    sharp->add_option("--y0-min", o.y0_min, "smallest swept initial value (SEIR: I0)");
    sharp->add_option("--y0-max", o.y0_max, "largest swept initial value");
    sharp->add_option("--y0-count", o.y0_count, "number of initial values")->capture_default_str();
    sharp->add_option("--dt-min", o.dt_min, "smallest time step");
    sharp->add_option("--dt-max", o.dt_max, "largest time step");
    sharp->add_option("--dt-count", o.dt_count, "number of time steps")->capture_default_str();
    sharp->add_option("--dt-spacing", o.dt_spacing, "log | linear")->capture_default_str();
    sharp->add_option("--horizon", o.horizon, "length of the integration interval");
    sharp->add_option("--tolerance", o.tolerance, "bisection tolerance")->capture_default_str();
    sharp->add_option("--lo-factor", o.lo_factor, "lower search end as a multiple of the sufficient bound")
        ->capture_default_str();
    sharp->add_option("--hi-factor", o.hi_factor, "upper search end as a multiple of the sufficient bound")
        ->capture_default_str();
    sharp->add_flag("--paper-exact", o.paper_exact, "1000 initial values and 1000 linearly spaced time steps");
    add_output_flag(sharp, o);

    auto* bench = app.add_subcommand("bench", "time repeated evaluation of the denominator functions");
    bench->add_option("--phis", o.phis, "denominators to time, comma separated (default: all)")->delimiter(',');
    bench->add_option("--evals", o.evals, "evaluations per timing")->capture_default_str();
    bench->add_option("--x", o.x, "argument")->capture_default_str();
    bench->add_option("--bound", o.bound, "bound B")->capture_default_str();
    bench->add_option("--repetitions", o.repetitions, "repetitions (median reported)")->capture_default_str();
    add_output_flag(bench, o);

    app.add_subcommand("list", "list catalog methods and denominator functions");

    auto* vphi = app.add_subcommand("verify-phi", "check phi(x) = x + O(x^{p+1}), positivity and the bound");
    vphi->add_option("--phis", o.phis, "denominators to check, comma separated (default: all)")->delimiter(',');
    vphi->add_option("--max-order", o.max_order, "largest order p tested")->capture_default_str();
    vphi->add_option("--bound", o.bound, "bound B")->capture_default_str();
    add_output_flag(vphi, o);
    return out;
}

// ---------------------------------------------------------------------------
// Argument handling

inline std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Replaces every `@file` argument by the flags in that file, one per line.
/// A line `--flag value` becomes two arguments; blank lines and lines
/// starting with '#' are skipped.
inline std::vector<std::string> expand_flag_files(const std::vector<std::string>& args)
{
    std::vector<std::string> out;
    for (const auto& arg : args) {
        if (arg.size() < 2 || arg[0] != '@') {
            out.push_back(arg);
            continue;
        }
        std::ifstream in(arg.substr(1));
        if (!in) {
            throw configuration_error("cannot read flag file '" + arg.substr(1) + "'");
        }
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') {
                continue;
            }
            const auto space = line.find_first_of(" \t");
            if (space == std::string::npos) {
                out.push_back(line);
            }
            else {
                out.push_back(line.substr(0, space));
                out.push_back(trim(line.substr(space)));
            }
        }
    }
    return out;
}

inline double parse_real(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    }
    catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size()) {
        throw configuration_error("invalid " + what + " '" + text + "'");
    }
    return v;
}

inline std::map<std::string, double> parse_params(const std::vector<std::string>& items)
{
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw configuration_error("parameter '" + item + "' is not of the form name=value");
        }
        out[trim(item.substr(0, eq))] = parse_real(trim(item.substr(eq + 1)), "parameter value");
    }
    return out;
}

template <std::size_t M>
State<M> to_state(const std::vector<double>& values)
{
    if (values.size() != M) {
        throw configuration_error("--y0 needs " + std::to_string(M) + " value(s), got " +
                                  std::to_string(values.size()));
    }
    State<M> s{};
    std::copy(values.begin(), values.end(), s.begin());
    return s;
}

inline CoefficientSource parse_coefficients(const std::string& s)
{
    if (s == "computed") {
        return CoefficientSource::Computed;
    }
    if (s == "stated") {
        return CoefficientSource::Stated;
    }
    throw configuration_error("--coefficients must be computed or stated");
}

/// The denominator kind requested by --phi/--standard, defaulting to the
/// order-matched function of the method.
inline PhiName resolve_phi(const Options& o, const AnyMethod& method)
{
    if (o.standard) {
        return {};
    }
    if (o.phi.empty()) {
        const int p = design_order(method);
        return {order_matched_kind(p), p >= 5 ? p : 0};
    }
    return parse_phi_name(o.phi);
}

template <OdeProblem P>
StartupPolicy resolve_startup(const Options& o, const P& problem, const AnyMethod& method,
                              const State<P::dimension>& y0)
{
    std::string s = o.startup;
    if (s.empty()) {
        s = HasExactSolution<P> ? "exact" : "rk";
    }
    if (s == "exact") {
        return StartupPolicy::exact();
    }
    if (s == "rk") {
        return make_startup(problem, method, y0, StartupChoice::OrderMatchedRK, o.standard);
    }
    if (s.rfind("rk:", 0) == 0) {
        const auto rest = s.substr(3);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) {
            throw configuration_error("--startup rk:<method>:<phi> is missing the phi");
        }
        const std::string id = rest.substr(0, colon);
        const auto* rk = MethodCatalog::instance().find_runge_kutta(id);
        if (rk == nullptr) {
            throw configuration_error("unknown Runge-Kutta startup method '" + id + "'");
        }
        const auto name = parse_phi_name(rest.substr(colon + 1));
        return StartupPolicy::runge_kutta(
            id, make_phi_for_method(*rk, fe_property_bound(problem, y0), name.kind, name.general_order));
    }
    throw configuration_error("--startup must be exact, rk or rk:<method>:<phi>");
}

/// Parses one --check item into problem properties.
template <OdeProblem P>
std::vector<QualitativeProperty> parse_check(const std::string& spec, const P& problem,
                                             const State<P::dimension>& y0)
{
    if (spec == "auto") {
        return property_set(problem, y0);
    }
    if (spec == "invariant") {
        std::vector<QualitativeProperty> out;
        for (const auto& p : property_set(problem, y0)) {
            if (p.kind == PropertyKind::LinearInvariant) {
                out.push_back(p);
            }
        }
        if (out.empty()) {
            throw configuration_error("problem '" + std::string(P::id) + "' has no linear invariant");
        }
        return out;
    }
    std::string body = spec;
    std::size_t component = 0;
    if (const auto at = body.find('@'); at != std::string::npos) {
        const double k = parse_real(body.substr(at + 1), "component");
        if (k < 1 || k > static_cast<double>(P::dimension) || k != std::floor(k)) {
            throw configuration_error("component in '" + spec + "' must be in 1.." + std::to_string(P::dimension));
        }
        component = static_cast<std::size_t>(k) - 1;
        body = body.substr(0, at);
    }
    QualitativeProperty prop;
    prop.component = component;
    const auto colon = body.find(':');
    const std::string head = body.substr(0, colon);
    if (head == "bound-below" || head == "bound-above") {
        if (colon == std::string::npos) {
            throw configuration_error("check '" + spec + "' needs a level, e.g. " + head + ":0");
        }
        prop.kind = head == "bound-below" ? PropertyKind::BoundBelow : PropertyKind::BoundAbove;
        prop.level = parse_real(body.substr(colon + 1), "bound level");
    }
    else if (head == "weak-increase" && colon == std::string::npos) {
        prop.kind = PropertyKind::WeakMonotoneIncrease;
    }
    else if (head == "weak-decrease" && colon == std::string::npos) {
        prop.kind = PropertyKind::WeakMonotoneDecrease;
    }
    else {
        throw configuration_error("unknown check '" + spec + "'");
    }
    return {prop};
}

/// Opens --output or falls back to `fallback`.
class OutputTarget
{
public:
    OutputTarget(const std::string& path, std::ostream& fallback)
        : stream_(&fallback)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw configuration_error("cannot open output file '" + path + "'");
            }
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

// ---------------------------------------------------------------------------
// Subcommands

inline int run_solve(const Options& o, std::ostream& out, std::ostream& err)
{
    const AnyProblem any = make_problem(o.problem, parse_params(o.params));
    const AnyMethod method = MethodCatalog::instance().get(o.method);
    return std::visit(
        [&](const auto& problem) {
            using P = std::decay_t<decltype(problem)>;
            const auto y0 = to_state<P::dimension>(o.y0);
            const auto name = resolve_phi(o, method);
            const double b_fe = fe_property_bound(problem, y0);
            if (o.phi_bound < 0.0) {
                throw configuration_error("--bound must be positive");
            }
            RunConfig<P> cfg{problem,
                             method,
                             o.phi_bound > 0.0 && name.kind != PhiKind::Identity
                                 ? DenominatorSpec::make(name.kind, o.phi_bound, name.general_order)
                                 : make_phi_for_method(method, b_fe, name.kind, name.general_order,
                                                       parse_coefficients(o.coefficients)),
                             o.dt,
                             o.t_end,
                             y0,
                             resolve_startup(o, problem, method, y0),
                             Recording::FullTrajectory};
            std::vector<QualitativeProperty> props;
            for (const auto& c : o.checks) {
                const auto more = parse_check(c, problem, y0);
                props.insert(props.end(), more.begin(), more.end());
            }
            const auto traj = integrate(cfg);
            OutputTarget target(o.output, out);
            write_trajectory_csv(target.stream(), traj);

            bool all_hold = true;
            if (!props.empty()) {
                auto reports = nlohmann::json::array();
                const auto window = static_cast<std::size_t>(steps(method));
                for (const auto& prop : props) {
                    const auto report = check_property(traj, prop, window);
                    all_hold = all_hold && report.holds;
                    reports.push_back(to_json(report));
                }
                err << reports.dump() << '\n';
            }
            return (!all_hold && o.strict) ? exit_violation : exit_ok;
        },
        any);
}

inline ReferencePolicy parse_reference(const std::string& s)
{
    if (s == "exact") {
        return ExactReference{};
    }
    if (s.rfind("rk4:", 0) == 0) {
        const double dt_ref = parse_real(s.substr(4), "reference step");
        if (!(dt_ref > 0.0)) {
            throw configuration_error("reference step must be positive");
        }
        return Rk4Reference{dt_ref, true};
    }
    throw configuration_error("--reference must be exact or rk4:<dt_ref>");
}

inline ErrorNorm parse_norm(const std::string& s)
{
    if (s == "abs") {
        return ErrorNorm::Abs;
    }
    if (s == "max") {
        return ErrorNorm::MaxComponent;
    }
    if (s == "euclidean") {
        return ErrorNorm::Euclidean;
    }
    throw configuration_error("--norm must be abs, max or euclidean");
}

inline int run_convergence(const Options& o, std::ostream& out, std::ostream& err)
{
    std::vector<double> dts = o.dt_list;
    if (dts.empty()) {
        if (!(o.dt_base > 0.0)) {
            throw configuration_error("give --dt-list or --dt-base with --halvings");
        }
        if (o.halvings < 0) {
            throw configuration_error("--halvings must be nonnegative");
        }
        dts = halving_grid(o.dt_base, o.halvings);
    }
    const AnyProblem any = make_problem(o.problem, parse_params(o.params));
    const AnyMethod method = MethodCatalog::instance().get(o.method);
    return std::visit(
        [&](const auto& problem) {
            using P = std::decay_t<decltype(problem)>;
            const auto y0 = to_state<P::dimension>(o.y0);
            const auto name = resolve_phi(o, method);
            StudyOptions study;
            study.coefficients = parse_coefficients(o.coefficients);
            study.general_order = name.general_order;
            if (o.phi_bound < 0.0) {
                throw configuration_error("--bound must be positive");
            }
            if (o.phi_bound > 0.0) {
                study.phi_bound = o.phi_bound;
            }
            std::string startup = o.startup.empty() ? (HasExactSolution<P> ? "exact" : "rk") : o.startup;
            if (startup == "exact") {
                study.startup = StartupChoice::Exact;
            }
            else if (startup == "rk") {
                study.startup = StartupChoice::OrderMatchedRK;
            }
            else {
                throw configuration_error("--startup for convergence must be exact or rk");
            }
            const auto report = convergence_study(problem, method, name.kind, dts, o.t_end, y0,
                                                  parse_reference(o.reference), parse_norm(o.norm), study);
            if (!report.bound_proven) {
                err << "note: the forward-Euler bound is not proven for this parameter set\n";
            }
            if (report.reference_self_consistency) {
                err << "reference self-consistency: " << format_real(*report.reference_self_consistency) << '\n';
            }
            OutputTarget target(o.output, out);
            write_convergence_csv(target.stream(), report);
            return exit_ok;
        },
        any);
}

inline int run_sharpness(const Options& o, std::ostream& out, std::ostream&)
{
    const AnyProblem any = make_problem(o.problem, parse_params(o.params));
    const AnyMethod method = MethodCatalog::instance().get(o.method);
    if (!std::holds_alternative<MultistepMethod>(method)) {
        throw configuration_error("sharpness sweeps need a multistep method");
    }
    SharpnessOptions sh;
    sh.method_id = o.method;
    const auto name = resolve_phi(o, method);
    if (name.kind == PhiKind::Identity || name.kind == PhiKind::GeneralP) {
        throw configuration_error("sharpness sweeps need one of phi1..phi8");
    }
    sh.phi_kind = name.kind;
    sh.coefficients = parse_coefficients(o.coefficients);
    sh.tolerance = o.tolerance;
    sh.lo_factor = o.lo_factor;
    sh.hi_factor = o.hi_factor;
    if (o.property == "both") {
        sh.properties = {SharpnessProperty::Boundedness, SharpnessProperty::WeakMonotonicity};
    }
    else if (o.property == "boundedness") {
        sh.properties = {SharpnessProperty::Boundedness};
    }
    else if (o.property == "weak-monotonicity") {
        sh.properties = {SharpnessProperty::WeakMonotonicity};
    }
    else {
        throw configuration_error("--property must be boundedness, weak-monotonicity or both");
    }

    // Defaults: the published ranges, with time scales shrunk by 2/c for
    // the logistic problem.
    double scale = 1.0;
    double y0_lo = 0.001;
    double y0_hi = 0.999;
    if (const auto* lg = std::get_if<Logistic>(&any)) {
        scale = 2.0 / lg->c();
        y0_lo = 1e-3;
        y0_hi = 2.5 * lg->c();
    }
    const double y0_min = o.y0_min > 0.0 ? o.y0_min : y0_lo;
    const double y0_max = o.y0_max > 0.0 ? o.y0_max : y0_hi;
    const double dt_min = o.dt_min > 0.0 ? o.dt_min : 0.5 * scale;
    const double dt_max = o.dt_max > 0.0 ? o.dt_max : 3.0 * scale;
    sh.horizon = o.horizon > 0.0 ? o.horizon : 100.0 * scale;
    const std::size_t y0_count = o.paper_exact ? 1000 : o.y0_count;
    const std::size_t dt_count = o.paper_exact ? 1000 : o.dt_count;
    const bool linear = o.paper_exact || o.dt_spacing == "linear";
    if (!linear && o.dt_spacing != "log") {
        throw configuration_error("--dt-spacing must be log or linear");
    }
    if (y0_count < 1 || dt_count < 1 || !(y0_min <= y0_max) || !(dt_min <= dt_max)) {
        throw configuration_error("empty or inverted sweep range");
    }
    sh.y0_grid = linear_grid(y0_min, y0_max, y0_count);
    sh.dt_grid = linear ? linear_grid(dt_min, dt_max, dt_count) : log_grid(dt_min, dt_max, dt_count);

    const auto report = std::visit([&](const auto& problem) { return sharpness_bisection(problem, sh); }, any);
    OutputTarget target(o.output, out);
    write_sharpness_csv(target.stream(), report);
    return exit_ok;
}

inline std::vector<DenominatorSpec> selected_phis(const Options& o, bool with_identity)
{
    std::vector<DenominatorSpec> specs;
    if (o.phis.empty()) {
        if (with_identity) {
            specs.push_back(DenominatorSpec::identity());
        }
        for (auto kind : catalog_phi_kinds()) {
            specs.push_back(DenominatorSpec::make(kind, o.bound));
        }
        return specs;
    }
    for (const auto& p : o.phis) {
        const auto name = parse_phi_name(p);
        specs.push_back(name.kind == PhiKind::Identity ? DenominatorSpec::identity()
                                                       : DenominatorSpec::make(name.kind, o.bound, name.general_order));
    }
    return specs;
}

inline int run_bench(const Options& o, std::ostream& out, std::ostream&)
{
    if (o.evals < 1000000) {
        throw configuration_error("--evals must be at least 1000000");
    }
    if (o.repetitions < 1) {
        throw configuration_error("--repetitions must be positive");
    }
    const auto rows = phi_benchmark(selected_phis(o, true), o.evals, o.x, o.repetitions);
    OutputTarget target(o.output, out);
    write_benchmark_csv(target.stream(), rows);
    return exit_ok;
}

inline std::string coefficient_text(const std::optional<Rational>& exact, double value)
{
    if (value >= unbounded_step) {
        return "inf";
    }
    if (exact) {
        return exact->den == 1 ? std::to_string(exact->num)
                               : std::to_string(exact->num) + "/" + std::to_string(exact->den);
    }
    return format_real(value);
}

inline int run_list(std::ostream& out)
{
    const auto& cat = MethodCatalog::instance();
    out << "methods\n";
    out << "id,s,p,stated_C,computed_C\n";
    for (const auto& id : cat.ids()) {
        const AnyMethod m = cat.get(id);
        const auto exact = ssp_coefficient_exact(m);
        const double computed = ssp_coefficient(m);
        std::string stated = "-";
        if (const auto v = stated_ssp(m)) {
            stated = exact && std::abs(*v - computed) <= 1e-12 ? coefficient_text(exact, computed)
                                                                : format_real(*v);
        }
        out << id << ',' << steps(m) << ',' << design_order(m) << ',' << stated << ','
            << coefficient_text(exact, computed) << '\n';
    }
    out << "denominators\n";
    out << "id,enabled_order\n";
    out << "identity,unbounded\n";
    for (auto kind : catalog_phi_kinds()) {
        out << to_string(kind) << ',' << DenominatorSpec::make(kind, 1.0).enabled_order() << '\n';
    }
    out << "phi-general:<p>,p\n";
    return exit_ok;
}

inline int run_verify_phi(const Options& o, std::ostream& out, std::ostream&)
{
    if (o.max_order < 1) {
        throw configuration_error("--max-order must be positive");
    }
    if (!(o.bound > 0.0)) {
        throw configuration_error("--bound must be positive");
    }
    OutputTarget target(o.output, out);
    auto& os = target.stream();
    os << "phi,p,slope,order_ok,bounded,positive,pass\n";
    for (const auto& spec : selected_phis(o, false)) {
        for (int p = 1; p <= o.max_order; ++p) {
            const auto r = verify_phi_conditions(spec, p);
            os << to_string(spec) << ',' << p << ',' << format_real(r.slope) << ',' << r.order_ok << ','
               << r.bounded << ',' << r.positive << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
        }
    }
    return exit_ok;
}

/// Entry point. `args` excludes the program name. Returns 0, 1 or 2.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    auto built = build_app();
    auto& app = *built->app;
    const auto& o = built->opts;
    try {
        auto expanded = expand_flag_files(args);
        std::reverse(expanded.begin(), expanded.end());
        app.parse(expanded);
    }
    catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* sub : app.get_subcommands()) {
            target = sub;
        }
        out << target->help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "solve") {
            return run_solve(o, out, err);
        }
        if (sub == "convergence") {
            return run_convergence(o, out, err);
        }
        if (sub == "sharpness") {
            return run_sharpness(o, out, err);
        }
        if (sub == "bench") {
            return run_bench(o, out, err);
        }
        if (sub == "list") {
            return run_list(out);
        }
        return run_verify_phi(o, out, err);
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

} // namespace nslmm::cli

#endif // NSLMM_TOOLS_CLI_HPP
