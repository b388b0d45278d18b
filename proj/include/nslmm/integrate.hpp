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
#ifndef NSLMM_INTEGRATE_HPP
#define NSLMM_INTEGRATE_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nslmm/denominator.hpp"
#include "nslmm/errors.hpp"
#include "nslmm/format.hpp"
#include "nslmm/methods.hpp"
#include "nslmm/problems.hpp"

namespace nslmm
{

enum class StartupKind
{
    ExactSolution,
    NonstandardRK,
};

/// How u^1..u^{s-1} of an s-step method are produced.
struct StartupPolicy
{
    StartupKind kind = StartupKind::ExactSolution;
    std::string rk_id;
    DenominatorSpec phi;

    static StartupPolicy exact() { return {}; }
    static StartupPolicy runge_kutta(std::string rk_id, DenominatorSpec phi)
    {
        return {StartupKind::NonstandardRK, std::move(rk_id), phi};
    }
};

inline std::string describe(const StartupPolicy& p)
{
    if (p.kind == StartupKind::ExactSolution) {
        return "exact";
    }
    return "rk:" + p.rk_id + ":" + to_string(p.phi);
}

enum class Recording
{
    FullTrajectory,
    FinalStateOnly,
};

template <OdeProblem P>
struct RunConfig
{
    P problem;
    AnyMethod method;
    DenominatorSpec phi;
    double dt = 0.0;
    double t_end = 0.0;
    State<P::dimension> y0{};
    StartupPolicy startup;
    Recording record = Recording::FullTrajectory;
    double t0 = 0.0;
};

/// Snapshot of the configuration that produced a trajectory.
struct RunSummary
{
    std::string problem;
    std::map<std::string, double> params;
    std::string method;
    std::string phi;
    double phi_bound = 0.0;
    double dt = 0.0;
    double t0 = 0.0;
    double t_end = 0.0;
    std::vector<double> y0;
    std::string startup;
};

/// Uniform-grid solution. With FullTrajectory, states[n] approximates
/// y(t0 + n dt) for n = 0..steps; with FinalStateOnly, states holds u^steps.
template <std::size_t M>
struct Trajectory
{
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    bool full = true;
    std::vector<State<M>> states;
    RunSummary provenance;

    /// Grid index of states[i].
    std::size_t index(std::size_t i) const noexcept { return full ? i : steps; }
    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(index(i)) * dt; }
    const State<M>& final_state() const { return states.back(); }
};

/// Alignment rule for the final time: (t_end - t0)/dt must be within 1e-8
/// of a positive integer.
inline std::size_t step_count(double t0, double t_end, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw configuration_error("time step must be positive and finite");
    }
    if (!(t_end > t0)) {
        throw configuration_error("final time must exceed the initial time");
    }
    const double ratio = (t_end - t0) / dt;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-8 || n < 1.0) {
        throw configuration_error("(t_end - t0)/dt = " + format_real(ratio) + " is not an integer step count");
    }
    return static_cast<std::size_t>(n);
}

namespace detail
{
/// sum_j ( alpha_j u_j + (phi_dt beta_j) f_j ), ascending lag, accumulated
/// left to right. `u(j)` and `f(j)` return the lag-j history entries.
template <std::size_t M, class U, class F>
State<M> combine_multistep(const MultistepMethod& method, double phi_dt, U&& u, F&& f)
{
    State<M> acc{};
    for (const auto& term : method.terms) {
        const State<M>& uj = u(term.lag);
        const double a = term.alpha.value;
        const double b = phi_dt * term.beta.value;
        if (b != 0.0) {
            const State<M>& fj = f(term.lag);
            for (std::size_t k = 0; k < M; ++k) {
                acc[k] += a * uj[k] + b * fj[k];
            }
        }
        else {
            for (std::size_t k = 0; k < M; ++k) {
                acc[k] += a * uj[k];
            }
        }
    }
    return acc;
}

template <OdeProblem P>
State<P::dimension> runge_kutta_scaled(const RungeKuttaMethod& rk, double h, const P& problem,
                                       const State<P::dimension>& u)
{
    constexpr std::size_t M = P::dimension;
    std::vector<State<M>> values(rk.stages.size() + 1);
    std::vector<State<M>> slopes(rk.stages.size() + 1);
    std::vector<char> have_slope(rk.stages.size() + 1, 0);
    values[0] = u;
    for (std::size_t i = 0; i < rk.stages.size(); ++i) {
        State<M> acc{};
        for (const auto& term : rk.stages[i]) {
            const State<M>& src = values[term.source];
            const double a = term.a.value;
            const double b = h * term.b.value;
            if (b != 0.0) {
                if (!have_slope[term.source]) {
                    slopes[term.source] = problem.rhs(src);
                    have_slope[term.source] = 1;
                }
                const State<M>& f = slopes[term.source];
                for (std::size_t k = 0; k < M; ++k) {
                    acc[k] += a * src[k] + b * f[k];
                }
            }
            else {
                for (std::size_t k = 0; k < M; ++k) {
                    acc[k] += a * src[k];
                }
            }
        }
        values[i + 1] = acc;
    }
    return values.back();
}
} // namespace detail

/// One step of the nonstandard multistep method
///   u^{n+1} = sum_j ( alpha_j u^{n+1-j} + phi(dt) beta_j f(u^{n+1-j}) ).
/// `history` holds the last s states, newest first (history[0] = u^n).
template <OdeProblem P>
State<P::dimension> nslmm_step(const MultistepMethod& method, const DenominatorSpec& phi, const P& problem,
                               std::span<const State<P::dimension>> history, double dt)
{
    if (history.size() != static_cast<std::size_t>(method.steps)) {
        throw argument_error("nslmm_step: history has " + std::to_string(history.size()) + " states, method needs " +
                             std::to_string(method.steps));
    }
    if (!(dt > 0.0)) {
        throw argument_error("nslmm_step: dt must be positive");
    }
    const double h = eval_phi(phi, dt);
    auto u = [&](int lag) -> const State<P::dimension>& { return history[static_cast<std::size_t>(lag - 1)]; };
    std::vector<State<P::dimension>> f(history.size());
    auto fetch = [&](int lag) -> const State<P::dimension>& {
        auto& slot = f[static_cast<std::size_t>(lag - 1)];
        slot = problem.rhs(u(lag));
        return slot;
    };
    return detail::combine_multistep<P::dimension>(method, h, u, fetch);
}

/// One step of a Shu-Osher Runge-Kutta method with dt replaced by phi(dt)
/// in every stage.
template <OdeProblem P>
State<P::dimension> nsrk_step(const RungeKuttaMethod& rk, const DenominatorSpec& phi, const P& problem,
                              const State<P::dimension>& u, double dt)
{
    if (!(dt > 0.0)) {
        throw argument_error("nsrk_step: dt must be positive");
    }
    return detail::runge_kutta_scaled(rk, eval_phi(phi, dt), problem, u);
}

template <OdeProblem P>
RunSummary summarize(const RunConfig<P>& config)
{
    RunSummary s;
    s.problem = std::string(P::id);
    s.params = config.problem.parameters();
    s.method = method_id(config.method);
    s.phi = to_string(config.phi);
    s.phi_bound = config.phi.kind == PhiKind::Identity ? 0.0 : config.phi.bound;
    s.dt = config.dt;
    s.t0 = config.t0;
    s.t_end = config.t_end;
    s.y0.assign(config.y0.begin(), config.y0.end());
    s.startup = std::holds_alternative<MultistepMethod>(config.method) ? describe(config.startup) : "none";
    return s;
}

/// Runs the configured method from t0 to t_end on the uniform grid.
/// Multistep methods get u^1..u^{s-1} from the startup policy.
template <OdeProblem P>
Trajectory<P::dimension> integrate(const RunConfig<P>& config)
{
    constexpr std::size_t M = P::dimension;
    const std::size_t n_steps = step_count(config.t0, config.t_end, config.dt);
    const P& problem = config.problem;

    Trajectory<M> traj;
    traj.t0 = config.t0;
    traj.dt = config.dt;
    traj.steps = n_steps;
    traj.full = config.record == Recording::FullTrajectory;
    traj.provenance = summarize(config);
    if (traj.full) {
        traj.states.reserve(n_steps + 1);
        traj.states.push_back(config.y0);
    }
    auto record = [&](const State<M>& u) {
        if (traj.full) {
            traj.states.push_back(u);
        }
    };

    const double h = eval_phi(config.phi, config.dt);

    if (const auto* rk = std::get_if<RungeKuttaMethod>(&config.method)) {
        State<M> u = config.y0;
        for (std::size_t n = 0; n < n_steps; ++n) {
            u = detail::runge_kutta_scaled(*rk, h, problem, u);
            record(u);
        }
        if (!traj.full) {
            traj.states.push_back(u);
        }
        return traj;
    }

    const auto& method = std::get<MultistepMethod>(config.method);
    const auto s = static_cast<std::size_t>(method.steps);

    // Ring buffer of the last s states and their slopes; slot `head` is u^n.
    std::vector<State<M>> ring(s);
    std::vector<State<M>> slope(s);
    std::size_t head = 0;
    ring[0] = config.y0;
    slope[0] = problem.rhs(config.y0);
    auto push = [&](const State<M>& u) {
        head = (head + 1) % s;
        ring[head] = u;
        slope[head] = problem.rhs(u);
        record(u);
    };

    const std::size_t n_start = std::min(s - 1, n_steps);
    if (n_start > 0) {
        if (config.startup.kind == StartupKind::ExactSolution) {
            if constexpr (HasExactSolution<P>) {
                for (std::size_t n = 1; n <= n_start; ++n) {
                    push(problem.exact(static_cast<double>(n) * config.dt, config.y0));
                }
            }
            else {
                throw configuration_error("exact startup requested but problem '" + std::string(P::id) +
                                          "' has no closed-form solution");
            }
        }
        else {
            const auto* starter = MethodCatalog::instance().find_runge_kutta(config.startup.rk_id);
            if (starter == nullptr) {
                throw configuration_error("startup method '" + config.startup.rk_id + "' is not a Runge-Kutta method");
            }
            const double h_start = eval_phi(config.startup.phi, config.dt);
            for (std::size_t n = 1; n <= n_start; ++n) {
                push(detail::runge_kutta_scaled(*starter, h_start, problem, ring[head]));
            }
        }
    }

    auto lagged = [&](std::vector<State<M>>& buf) {
        return [data = &buf, &head, s](int lag) -> const State<M>& {
            return (*data)[(head + s - static_cast<std::size_t>(lag - 1)) % s];
        };
    };
    auto u_at = lagged(ring);
    auto f_at = lagged(slope);
    for (std::size_t n = n_start; n < n_steps; ++n) {
        push(detail::combine_multistep<M>(method, h, u_at, f_at));
    }
    if (!traj.full) {
        traj.states.push_back(ring[head]);
    }
    return traj;
}

/// Classical fourth-order Runge-Kutta integration to t_end, final state only.
template <OdeProblem P>
State<P::dimension> reference_solution(const P& problem, const State<P::dimension>& y0, double t_end, double dt_ref,
                                       double t0 = 0.0)
{
    constexpr std::size_t M = P::dimension;
    const std::size_t n_steps = step_count(t0, t_end, dt_ref);
    const double half = 0.5 * dt_ref;
    const double sixth = dt_ref / 6.0;
    State<M> u = y0;
    State<M> tmp{};
    for (std::size_t n = 0; n < n_steps; ++n) {
        const auto k1 = problem.rhs(u);
        for (std::size_t k = 0; k < M; ++k) {
            tmp[k] = u[k] + half * k1[k];
        }
        const auto k2 = problem.rhs(tmp);
        for (std::size_t k = 0; k < M; ++k) {
            tmp[k] = u[k] + half * k2[k];
        }
        const auto k3 = problem.rhs(tmp);
        for (std::size_t k = 0; k < M; ++k) {
            tmp[k] = u[k] + dt_ref * k3[k];
        }
        const auto k4 = problem.rhs(tmp);
        for (std::size_t k = 0; k < M; ++k) {
            u[k] += sixth * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
    }
    return u;
}

/// CSV with header `t,u1,...,um` and one row per recorded state.
template <std::size_t M>
void write_trajectory_csv(std::ostream& os, const Trajectory<M>& traj)
{
    os << 't';
    for (std::size_t k = 1; k <= M; ++k) {
        os << ",u" << k;
    }
    os << '\n';
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        os << format_real(traj.time(i));
        for (double v : traj.states[i]) {
            os << ',' << format_real(v);
        }
        os << '\n';
    }
}

} // namespace nslmm

#endif // NSLMM_INTEGRATE_HPP
