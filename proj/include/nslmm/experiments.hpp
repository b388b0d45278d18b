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
#ifndef NSLMM_EXPERIMENTS_HPP
#define NSLMM_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "nslmm/denominator.hpp"
#include "nslmm/errors.hpp"
#include "nslmm/format.hpp"
#include "nslmm/integrate.hpp"
#include "nslmm/methods.hpp"
#include "nslmm/problems.hpp"
#include "nslmm/qualprops.hpp"

namespace nslmm
{

// ---------------------------------------------------------------------------
// Parallel map

/// Worker count: NSLMM_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NSLMM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            n = static_cast<unsigned>(v);
        }
    }
    return n;
}

/// results[i] = fn(i) for i < n. Assembly is by index, so the output does
/// not depend on scheduling. The first exception thrown is rethrown.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& fn, unsigned workers = worker_count())
{
    std::vector<std::optional<R>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                slots[i].emplace(fn(i));
            }
            catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (threads <= 1) {
        work();
    }
    else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Errors and orders

enum class ErrorNorm
{
    Abs,          ///< |e| for scalar problems
    MaxComponent, ///< max_k |e_k|
    Euclidean,    ///< sqrt(sum_k e_k^2)
};

inline std::string to_string(ErrorNorm norm)
{
    switch (norm) {
    case ErrorNorm::Abs:
        return "abs";
    case ErrorNorm::MaxComponent:
        return "max";
    case ErrorNorm::Euclidean:
        return "euclidean";
    }
    return "unknown";
}

template <std::size_t M>
double error_norm(const State<M>& a, const State<M>& b, ErrorNorm norm)
{
    if (norm == ErrorNorm::Abs && M != 1) {
        throw argument_error("abs norm is only defined for scalar problems");
    }
    double out = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        const double d = std::abs(a[k] - b[k]);
        out = norm == ErrorNorm::Euclidean ? out + d * d : std::max(out, d);
    }
    return norm == ErrorNorm::Euclidean ? std::sqrt(out) : out;
}

/// order_k = log(e_{k-1}/e_k) / log(dt_{k-1}/dt_k), which is log2 of the
/// error ratio on a halving grid (the default when `dts` is empty). The
/// first entry, and any entry touching a zero or non-finite error, is
/// absent.
inline std::vector<std::optional<double>> observed_order(const std::vector<double>& errors,
                                                         const std::vector<double>& dts = {})
{
    if (errors.empty()) {
        throw argument_error("observed_order: no errors given");
    }
    if (!dts.empty() && dts.size() != errors.size()) {
        throw argument_error("observed_order: dt list and error list differ in length");
    }
    std::vector<std::optional<double>> out(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double prev = errors[k - 1];
        const double cur = errors[k];
        if (!(prev > 0.0) || !(cur > 0.0) || !std::isfinite(prev) || !std::isfinite(cur)) {
            continue;
        }
        if (dts.empty()) {
            out[k] = std::log2(prev / cur);
        }
        else {
            out[k] = std::log(prev / cur) / std::log(dts[k - 1] / dts[k]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convergence study

struct ExactReference
{
};

struct Rk4Reference
{
    double dt_ref = 0.1 * 0x1p-10 * 1e-3;
    bool certify = true; ///< also run at dt_ref/2 and record the discrepancy
};

using ReferencePolicy = std::variant<ExactReference, Rk4Reference>;

inline std::string describe(const ReferencePolicy& ref)
{
    if (std::holds_alternative<ExactReference>(ref)) {
        return "exact";
    }
    return "rk4:" + format_real(std::get<Rk4Reference>(ref).dt_ref);
}

template <std::size_t M>
struct ReferenceState
{
    State<M> state{};
    std::optional<double> self_consistency; ///< max |u(dt_ref) - u(dt_ref/2)|
};

template <OdeProblem P>
ReferenceState<P::dimension> compute_reference(const P& problem, const State<P::dimension>& y0, double t_end,
                                               const ReferencePolicy& policy)
{
    ReferenceState<P::dimension> out;
    if (std::holds_alternative<ExactReference>(policy)) {
        if constexpr (HasExactSolution<P>) {
            out.state = problem.exact(t_end, y0);
            return out;
        }
        else {
            throw configuration_error("problem '" + std::string(P::id) +
                                      "' has no exact solution; use an rk4 reference");
        }
    }
    const auto& rk4 = std::get<Rk4Reference>(policy);
    out.state = reference_solution(problem, y0, t_end, rk4.dt_ref);
    if (rk4.certify) {
        const auto fine = reference_solution(problem, y0, t_end, rk4.dt_ref / 2.0);
        out.self_consistency = error_norm(out.state, fine, ErrorNorm::MaxComponent);
    }
    return out;
}

struct ConvergenceRow
{
    double dt = 0.0;
    double error = 0.0;
    std::optional<double> order;
};

struct ConvergenceReport
{
    std::vector<ConvergenceRow> rows;
    RunSummary config; ///< of the first (coarsest) run
    ErrorNorm norm = ErrorNorm::MaxComponent;
    std::string reference;
    std::optional<double> reference_self_consistency;
    bool bound_proven = true; ///< false when the forward-Euler bound is outside its proven range
};

/// How multistep startup values are produced in a study.
enum class StartupChoice
{
    Exact,          ///< closed-form solution
    OrderMatchedRK, ///< nonstandard SSPRK(2,2)/phi5, (3,3)/phi7, (10,4)/phi8 by method order
};

struct StudyOptions
{
    StartupChoice startup = StartupChoice::Exact;
    CoefficientSource coefficients = CoefficientSource::Computed;
    int general_order = 0; ///< p when the phi kind is GeneralP
    std::optional<double> phi_bound; ///< explicit bound for phi instead of C * B_FE(y0)
};

/// The Runge-Kutta starter of matching order, with its own denominator
/// bounded by C_RK * b_fe (identity for standard runs).
inline StartupPolicy order_matched_startup(int order, double b_fe, bool standard)
{
    const char* id = order <= 2 ? "ssprk22" : order == 3 ? "ssprk33" : "ssprk104";
    const auto& rk = *MethodCatalog::instance().find_runge_kutta(id);
    if (standard) {
        return StartupPolicy::runge_kutta(id, DenominatorSpec::identity());
    }
    const PhiKind kind = order <= 2 ? PhiKind::Phi5 : order == 3 ? PhiKind::Phi7 : PhiKind::Phi8;
    return StartupPolicy::runge_kutta(id, make_phi_for_method(rk, b_fe, kind));
}

template <OdeProblem P>
StartupPolicy make_startup(const P& problem, const AnyMethod& method, const State<P::dimension>& y0,
                           StartupChoice choice, bool standard)
{
    if (choice == StartupChoice::Exact) {
        return StartupPolicy::exact();
    }
    return order_matched_startup(design_order(method), fe_property_bound(problem, y0), standard);
}

template <OdeProblem P>
bool fe_bound_is_proven(const P& problem)
{
    if constexpr (requires { problem.fe_bound_proven(); }) {
        return problem.fe_bound_proven();
    }
    else {
        return true;
    }
}

/// Runs the method at every dt in `dts` (strictly decreasing) with phi of
/// the given kind bounded by C * B_FE(y0), and reports the error at t_end
/// against the reference together with observed orders.
template <OdeProblem P>
ConvergenceReport convergence_study(const P& problem, const AnyMethod& method, PhiKind kind,
                                    const std::vector<double>& dts, double t_end, const State<P::dimension>& y0,
                                    const ReferencePolicy& reference, ErrorNorm norm, const StudyOptions& options = {})
{
    if (dts.empty()) {
        throw argument_error("convergence_study: empty dt list");
    }
    for (std::size_t i = 1; i < dts.size(); ++i) {
        if (!(dts[i] < dts[i - 1])) {
            throw argument_error("convergence_study: dt list must be strictly decreasing");
        }
    }
    for (double dt : dts) {
        step_count(0.0, t_end, dt);
    }
    if (norm == ErrorNorm::Abs && P::dimension != 1) {
        throw argument_error("abs norm is only defined for scalar problems");
    }

    const double b_fe = fe_property_bound(problem, y0);
    const bool standard = kind == PhiKind::Identity;
    RunConfig<P> base{problem,
                      method,
                      options.phi_bound && kind != PhiKind::Identity
                          ? DenominatorSpec::make(kind, *options.phi_bound, options.general_order)
                          : make_phi_for_method(method, b_fe, kind, options.general_order, options.coefficients),
                      dts.front(),
                      t_end,
                      y0,
                      make_startup(problem, method, y0, options.startup, standard),
                      Recording::FinalStateOnly};
    if (options.startup == StartupChoice::Exact && std::holds_alternative<MultistepMethod>(method) &&
        !HasExactSolution<P>) {
        throw configuration_error("exact startup requested but problem '" + std::string(P::id) +
                                  "' has no closed-form solution");
    }

    const auto ref = compute_reference(problem, y0, t_end, reference);

    const auto errors = parallel_map<double>(dts.size(), [&](std::size_t i) {
        RunConfig<P> cfg = base;
        cfg.dt = dts[i];
        const auto traj = integrate(cfg);
        return error_norm(traj.final_state(), ref.state, norm);
    });
    const auto orders = observed_order(errors);

    ConvergenceReport report;
    report.config = summarize(base);
    report.norm = norm;
    report.reference = describe(reference);
    report.reference_self_consistency = ref.self_consistency;
    report.bound_proven = fe_bound_is_proven(problem);
    for (std::size_t i = 0; i < dts.size(); ++i) {
        report.rows.push_back({dts[i], errors[i], orders[i]});
    }
    return report;
}

/// dt_base * 2^{-k}, k = 0..halvings.
inline std::vector<double> halving_grid(double dt_base, int halvings)
{
    std::vector<double> out;
    for (int k = 0; k <= halvings; ++k) {
        out.push_back(std::ldexp(dt_base, -k));
    }
    return out;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& report)
{
    os << "dt,error,order\n";
    for (const auto& row : report.rows) {
        os << format_real(row.dt) << ',' << format_real(row.error) << ',';
        if (row.order) {
            os << format_real(*row.order);
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Bound sharpness

enum class BisectionStatus
{
    Converged,
    BelowRange, ///< predicate already false at the lower end
    AtUpperEnd, ///< predicate still true at the upper end
};

inline std::string to_string(BisectionStatus s)
{
    switch (s) {
    case BisectionStatus::Converged:
        return "converged";
    case BisectionStatus::BelowRange:
        return "below-range";
    case BisectionStatus::AtUpperEnd:
        return "at-upper-end";
    }
    return "unknown";
}

struct BisectionResult
{
    double value = 0.0;
    BisectionStatus status = BisectionStatus::Converged;
    int iterations = 0;
};

/// Largest bound in [lo, hi] for which `holds` is true, assuming it is true
/// below some threshold and false above. Returns the midpoint of the final
/// bracket once its width is at most `tol`.
inline BisectionResult bisect_bound(const std::function<bool(double)>& holds, double lo, double hi, double tol,
                                    int max_iterations = 60)
{
    if (!(lo < hi) || !(tol > 0.0)) {
        throw argument_error("bisect_bound: need lo < hi and a positive tolerance");
    }
    if (!holds(lo)) {
        return {lo, BisectionStatus::BelowRange, 0};
    }
    if (holds(hi)) {
        return {hi, BisectionStatus::AtUpperEnd, 0};
    }
    int it = 0;
    while (hi - lo > tol && it < max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid)) {
            lo = mid;
        }
        else {
            hi = mid;
        }
        ++it;
    }
    return {0.5 * (lo + hi), BisectionStatus::Converged, it};
}

enum class SharpnessProperty
{
    Boundedness,      ///< empirical bound B*
    WeakMonotonicity, ///< empirical bound B~
};

inline std::string to_string(SharpnessProperty p)
{
    return p == SharpnessProperty::Boundedness ? "boundedness" : "weak-monotonicity";
}

struct SharpnessRow
{
    double y0 = 0.0; ///< the swept initial value (logistic y0, SEIR I0)
    double sufficient_bound = 0.0;
    double empirical_bound = 0.0;
    SharpnessProperty property = SharpnessProperty::Boundedness;
    BisectionStatus status = BisectionStatus::Converged;
};

struct SharpnessReport
{
    std::vector<SharpnessRow> rows;
};

struct SharpnessOptions
{
    std::string method_id = "sspms64";
    PhiKind phi_kind = PhiKind::Phi8;
    std::vector<double> y0_grid;
    std::vector<double> dt_grid;
    double horizon = 100.0;
    std::vector<SharpnessProperty> properties{SharpnessProperty::Boundedness, SharpnessProperty::WeakMonotonicity};
    double lo_factor = 1e-4; ///< search interval [lo_factor, hi_factor] * C * B_FE
    double hi_factor = 10.0;
    double tolerance = 1e-4;
    int max_iterations = 60;
    CoefficientSource coefficients = CoefficientSource::Computed;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

namespace detail
{
/// Initial state for a swept scalar: logistic y0, SEIR (1 - I0, 0, I0, 0).
template <OdeProblem P>
State<P::dimension> sweep_state(double v)
{
    if constexpr (std::is_same_v<P, Logistic>) {
        return {v};
    }
    else if constexpr (std::is_same_v<P, Seir>) {
        return {1.0 - v, 0.0, v, 0.0};
    }
    else {
        static_assert(P::dimension == 0, "no sweep parameterization for this problem");
    }
}

template <OdeProblem P>
bool property_holds(const P& problem, const Trajectory<P::dimension>& traj, const State<P::dimension>& y0,
                    SharpnessProperty which, std::size_t window)
{
    if (which == SharpnessProperty::Boundedness) {
        if constexpr (std::is_same_v<P, Seir>) {
            // Every compartment stays in [0, M].
            const double total = y0[0] + y0[1] + y0[2] + y0[3];
            for (std::size_t k = 0; k < 4; ++k) {
                if (!check_bounds(traj, k, total, 0.0).holds) {
                    return false;
                }
            }
            return true;
        }
    }
    for (const auto& prop : property_set(problem, y0)) {
        const bool is_bound = prop.kind == PropertyKind::BoundAbove || prop.kind == PropertyKind::BoundBelow;
        const bool is_mono =
            prop.kind == PropertyKind::WeakMonotoneIncrease || prop.kind == PropertyKind::WeakMonotoneDecrease;
        if ((which == SharpnessProperty::Boundedness && is_bound) ||
            (which == SharpnessProperty::WeakMonotonicity && is_mono)) {
            if (traj.states.size() <= window && is_mono) {
                continue;
            }
            if (!check_property(traj, prop, window).holds) {
                return false;
            }
        }
    }
    return true;
}
} // namespace detail

/// For every initial value, bisects on the denominator bound for the
/// largest value under which the property holds for all time steps in the
/// dt grid over [0, horizon]. Runs use floor(horizon/dt) steps.
template <OdeProblem P>
SharpnessReport sharpness_bisection(const P& problem, const SharpnessOptions& opt)
{
    if (opt.y0_grid.empty() || opt.dt_grid.empty()) {
        throw argument_error("sharpness_bisection: empty initial-value or time-step grid");
    }
    const AnyMethod method = MethodCatalog::instance().get(opt.method_id);
    const double ssp = ssp_coefficient_for_bound(method, opt.coefficients);
    const auto window = static_cast<std::size_t>(steps(method));

    struct Job
    {
        std::size_t y0_index;
        SharpnessProperty property;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < opt.y0_grid.size(); ++i) {
        for (auto p : opt.properties) {
            jobs.push_back({i, p});
        }
    }

    auto rows = parallel_map<SharpnessRow>(jobs.size(), [&](std::size_t j) {
        const Job job = jobs[j];
        const double v = opt.y0_grid[job.y0_index];
        const auto y0 = detail::sweep_state<P>(v);
        const double b_fe = fe_property_bound(problem, y0);
        const double sufficient = b_fe >= unbounded_step ? unbounded_step : ssp * b_fe;
        const StartupPolicy startup = HasExactSolution<P>
                                          ? StartupPolicy::exact()
                                          : order_matched_startup(design_order(method), b_fe, false);

        auto holds = [&](double bound) {
            for (double dt : opt.dt_grid) {
                const auto n = static_cast<std::size_t>(std::floor(opt.horizon / dt + 1e-9));
                if (n < 1) {
                    continue;
                }
                RunConfig<P> cfg{problem,
                                 method,
                                 DenominatorSpec::make(opt.phi_kind, bound),
                                 dt,
                                 static_cast<double>(n) * dt,
                                 y0,
                                 startup,
                                 Recording::FullTrajectory};
                const auto traj = integrate(cfg);
                if (!detail::property_holds(problem, traj, y0, job.property, window)) {
                    return false;
                }
            }
            return true;
        };
        SharpnessRow row;
        row.y0 = v;
        row.sufficient_bound = sufficient;
        row.property = job.property;
        if (sufficient >= unbounded_step) {
            row.empirical_bound = unbounded_step;
            row.status = BisectionStatus::AtUpperEnd;
            return row;
        }
        const auto result =
            bisect_bound(holds, opt.lo_factor * sufficient, opt.hi_factor * sufficient, opt.tolerance, opt.max_iterations);
        row.empirical_bound = result.value;
        row.status = result.status;
        return row;
    });
    return {std::move(rows)};
}

inline void write_sharpness_csv(std::ostream& os, const SharpnessReport& report)
{
    os << "y0,sufficient_bound,empirical_bound,property\n";
    for (const auto& row : report.rows) {
        os << format_real(row.y0) << ',' << format_real(row.sufficient_bound) << ','
           << format_real(row.empirical_bound) << ',' << to_string(row.property) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Denominator evaluation cost

struct BenchmarkRow
{
    std::string phi;
    std::size_t evals = 0;
    double seconds = 0.0; ///< median over repetitions
};

/// Times n_evals evaluations of each denominator at x. The argument is
/// re-read through a volatile each iteration and the results are summed
/// into a volatile sink so the loop cannot be folded away.
inline std::vector<BenchmarkRow> phi_benchmark(const std::vector<DenominatorSpec>& specs, std::size_t n_evals,
                                               double x, int repetitions = 5)
{
    if (n_evals < 1000000) {
        throw argument_error("phi_benchmark: at least 10^6 evaluations are required");
    }
    if (repetitions < 1) {
        throw argument_error("phi_benchmark: repetitions must be positive");
    }
    std::vector<BenchmarkRow> rows;
    volatile double input = x;
    volatile double sink = 0.0;
    for (const auto& spec : specs) {
        std::vector<double> times;
        for (int r = 0; r < repetitions; ++r) {
            double acc = 0.0;
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t i = 0; i < n_evals; ++i) {
                acc += eval_phi(spec, static_cast<double>(input));
            }
            const auto stop = std::chrono::steady_clock::now();
            sink = sink + acc;
            times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::sort(times.begin(), times.end());
        rows.push_back({to_string(spec), n_evals, times[times.size() / 2]});
    }
    return rows;
}

inline void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows)
{
    os << "phi,evals,seconds\n";
    for (const auto& row : rows) {
        os << row.phi << ',' << row.evals << ',' << format_real(row.seconds) << '\n';
    }
}

} // namespace nslmm

#endif // NSLMM_EXPERIMENTS_HPP
