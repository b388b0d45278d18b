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
#ifndef NSLMM_PROBLEMS_HPP
#define NSLMM_PROBLEMS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nslmm/errors.hpp"

namespace nslmm
{

/// Dense state vector of an m-dimensional autonomous system.
template <std::size_t M>
using State = std::array<double, M>;

/// Stands in for "no forward-Euler restriction" (the logistic problem
/// with a negative initial value preserves its properties for any step).
inline constexpr double unbounded_step = std::numeric_limits<double>::max();

enum class PropertyKind
{
    BoundAbove,
    BoundBelow,
    WeakMonotoneIncrease,
    WeakMonotoneDecrease,
    LinearInvariant,
};

/// A qualitative property of the continuous solution that a scheme should
/// inherit. `component` is used by the bound and monotonicity kinds,
/// `weights` by LinearInvariant, whose value at time t is level + drift*t.
struct QualitativeProperty
{
    PropertyKind kind = PropertyKind::BoundBelow;
    std::size_t component = 0;
    std::vector<double> weights;
    double level = 0.0;
    double drift = 0.0;
};

inline std::string to_string(PropertyKind kind);
inline std::string describe(const QualitativeProperty& property);

template <class P>
concept OdeProblem = requires(const P& p, const State<P::dimension>& u) {
    { P::dimension } -> std::convertible_to<std::size_t>;
    { P::id } -> std::convertible_to<std::string_view>;
    { p.rhs(u) } -> std::same_as<State<P::dimension>>;
    { p.parameters() } -> std::same_as<std::map<std::string, double>>;
};

template <class P>
concept HasExactSolution = OdeProblem<P> && requires(const P& p, double t, const State<P::dimension>& y0) {
    { p.exact(t, y0) } -> std::same_as<State<P::dimension>>;
};

template <class P>
concept HasForwardEulerBound = OdeProblem<P> && requires(const P& p, const State<P::dimension>& y0) {
    { p.fe_bound(y0) } -> std::convertible_to<double>;
};

template <class P>
concept HasPropertySet = OdeProblem<P> && requires(const P& p, const State<P::dimension>& y0) {
    { p.properties(y0) } -> std::same_as<std::vector<QualitativeProperty>>;
};

// ---------------------------------------------------------------------------

/// y' = y (c - y).
class Logistic
{
public:
    static constexpr std::size_t dimension = 1;
    static constexpr std::string_view id = "logistic";

    explicit Logistic(double c)
        : c_(c)
    {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw argument_error("logistic: c must be a positive finite number");
        }
    }

    double c() const noexcept { return c_; }

    State<1> rhs(const State<1>& u) const noexcept { return {u[0] * (c_ - u[0])}; }

    /// Closed form, with t measured from the initial time. Written as
    /// c y0 / (y0 + (c - y0) e^{-ct}) so that large c*t stays finite.
    State<1> exact(double t, const State<1>& y0) const
    {
        const double y = y0[0];
        if (y == 0.0 || y == c_) {
            return {y};
        }
        return {c_ * y / (y + (c_ - y) * std::exp(-c_ * t))};
    }

    /// Largest forward-Euler step that keeps boundedness and monotonicity:
    /// min{1/c, 1/y0} for y0 >= 0, unconditional for y0 < 0.
    double fe_bound(const State<1>& y0) const noexcept
    {
        if (y0[0] < 0.0) {
            return unbounded_step;
        }
        if (y0[0] == 0.0) {
            return 1.0 / c_;
        }
        return std::min(1.0 / c_, 1.0 / y0[0]);
    }

    std::vector<QualitativeProperty> properties(const State<1>& y0) const
    {
        const double y = y0[0];
        if (y < 0.0) {
            return {{PropertyKind::BoundAbove, 0, {}, 0.0, 0.0},
                    {PropertyKind::WeakMonotoneDecrease, 0, {}, 0.0, 0.0}};
        }
        if (y <= c_) {
            return {{PropertyKind::BoundBelow, 0, {}, 0.0, 0.0},
                    {PropertyKind::BoundAbove, 0, {}, c_, 0.0},
                    {PropertyKind::WeakMonotoneIncrease, 0, {}, 0.0, 0.0}};
        }
        return {{PropertyKind::BoundBelow, 0, {}, c_, 0.0},
                {PropertyKind::WeakMonotoneDecrease, 0, {}, 0.0, 0.0}};
    }

    std::map<std::string, double> parameters() const { return {{"c", c_}}; }

private:
    double c_;
};

/// SEIR model with influx Pi:
///   S' = Pi - 5 S I,  E' = 5 S I - E,  I' = E - I,  R' = I.
class Seir
{
public:
    static constexpr std::size_t dimension = 4;
    static constexpr std::string_view id = "seir";
    static constexpr double contact_rate = 5.0;

    explicit Seir(double influx = 0.0)
        : influx_(influx)
    {
        if (!(influx >= 0.0) || !std::isfinite(influx)) {
            throw argument_error("seir: influx must be a nonnegative finite number");
        }
    }

    double influx() const noexcept { return influx_; }

    State<4> rhs(const State<4>& u) const noexcept
    {
        const double infection = contact_rate * u[0] * u[2];
        return {influx_ - infection, infection - u[1], u[1] - u[2], u[2]};
    }

    /// min{1/(5M), 1} with M the component sum of y0. For Pi > 0 the same
    /// formula is applied although positivity is only proven for Pi = 0.
    double fe_bound(const State<4>& y0) const
    {
        double total = 0.0;
        for (double v : y0) {
            if (v < 0.0) {
                throw argument_error("seir: forward-Euler bound needs a nonnegative state");
            }
            total += v;
        }
        if (total == 0.0) {
            return 1.0;
        }
        return std::min(1.0 / (contact_rate * total), 1.0);
    }

    bool fe_bound_proven() const noexcept { return influx_ == 0.0; }

    std::vector<QualitativeProperty> properties(const State<4>& y0) const
    {
        std::vector<QualitativeProperty> out;
        for (std::size_t k = 0; k < dimension; ++k) {
            out.push_back({PropertyKind::BoundBelow, k, {}, 0.0, 0.0});
        }
        out.push_back({PropertyKind::WeakMonotoneDecrease, 0, {}, 0.0, 0.0});
        out.push_back({PropertyKind::WeakMonotoneIncrease, 3, {}, 0.0, 0.0});
        out.push_back({PropertyKind::LinearInvariant, 0, {1.0, 1.0, 1.0, 1.0},
                       y0[0] + y0[1] + y0[2] + y0[3], influx_});
        return out;
    }

    std::map<std::string, double> parameters() const { return {{"influx", influx_}}; }

private:
    double influx_;
};

/// Runtime selection of a built-in problem.
using AnyProblem = std::variant<Logistic, Seir>;

/// Builds "logistic" (parameter c, default 2) or "seir" (parameter influx,
/// alias Pi, default 0).
inline AnyProblem make_problem(std::string_view name, const std::map<std::string, double>& params)
{
    auto take = [&](std::initializer_list<const char*> keys, double fallback) {
        double value = fallback;
        for (const auto& [key, v] : params) {
            bool known = false;
            for (const char* k : keys) {
                known = known || key == k;
            }
            if (known) {
                value = v;
            }
        }
        return value;
    };
    auto reject_unknown = [&](std::initializer_list<const char*> keys) {
        for (const auto& [key, v] : params) {
            bool known = false;
            for (const char* k : keys) {
                known = known || key == k;
            }
            if (!known) {
                throw argument_error("unknown parameter '" + key + "' for problem " + std::string(name));
            }
        }
    };
    if (name == Logistic::id) {
        reject_unknown({"c"});
        return Logistic(take({"c"}, 2.0));
    }
    if (name == Seir::id) {
        reject_unknown({"influx", "Pi", "pi"});
        return Seir(take({"influx", "Pi", "pi"}, 0.0));
    }
    throw argument_error("unknown problem '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

template <OdeProblem P>
State<P::dimension> eval_rhs(const P& problem, const State<P::dimension>& u)
{
    return problem.rhs(u);
}

/// Dimension-checked entry point for untyped data.
template <OdeProblem P>
State<P::dimension> eval_rhs(const P& problem, std::span<const double> u)
{
    if (u.size() != P::dimension) {
        throw argument_error("eval_rhs: state has length " + std::to_string(u.size()) + ", problem dimension is " +
                             std::to_string(P::dimension));
    }
    State<P::dimension> s{};
    std::copy(u.begin(), u.end(), s.begin());
    return problem.rhs(s);
}

template <OdeProblem P>
State<P::dimension> exact_solution(const P& problem, double t, const State<P::dimension>& y0)
{
    if constexpr (HasExactSolution<P>) {
        if (t < 0.0) {
            throw argument_error("exact_solution: t must not precede the initial time");
        }
        return problem.exact(t, y0);
    }
    else {
        throw unsupported_error("problem '" + std::string(P::id) + "' has no closed-form solution");
    }
}

template <OdeProblem P>
constexpr bool has_exact_solution(const P&) noexcept
{
    return HasExactSolution<P>;
}

template <OdeProblem P>
double fe_property_bound(const P& problem, const State<P::dimension>& y0)
{
    if constexpr (HasForwardEulerBound<P>) {
        return problem.fe_bound(y0);
    }
    else {
        throw unsupported_error("problem '" + std::string(P::id) + "' has no forward-Euler bound rule");
    }
}

template <OdeProblem P>
std::vector<QualitativeProperty> property_set(const P& problem, const State<P::dimension>& y0)
{
    if constexpr (HasPropertySet<P>) {
        return problem.properties(y0);
    }
    else {
        return {};
    }
}

/// u + dt f(u). A zero step returns u unchanged.
template <OdeProblem P>
State<P::dimension> forward_euler_step(const P& problem, const State<P::dimension>& u, double dt)
{
    if (!(dt >= 0.0)) {
        throw argument_error("forward_euler_step: dt must be nonnegative");
    }
    const auto f = problem.rhs(u);
    State<P::dimension> out{};
    for (std::size_t k = 0; k < P::dimension; ++k) {
        out[k] = u[k] + dt * f[k];
    }
    return out;
}

inline std::string to_string(PropertyKind kind)
{
    switch (kind) {
    case PropertyKind::BoundAbove:
        return "bound-above";
    case PropertyKind::BoundBelow:
        return "bound-below";
    case PropertyKind::WeakMonotoneIncrease:
        return "weak-increase";
    case PropertyKind::WeakMonotoneDecrease:
        return "weak-decrease";
    case PropertyKind::LinearInvariant:
        return "linear-invariant";
    }
    return "unknown";
}

inline std::string describe(const QualitativeProperty& property)
{
    char buf[96];
    switch (property.kind) {
    case PropertyKind::BoundAbove:
    case PropertyKind::BoundBelow:
        std::snprintf(buf, sizeof buf, "%s:%.17g@%zu", to_string(property.kind).c_str(), property.level,
                      property.component);
        return buf;
    case PropertyKind::WeakMonotoneIncrease:
    case PropertyKind::WeakMonotoneDecrease:
        std::snprintf(buf, sizeof buf, "%s@%zu", to_string(property.kind).c_str(), property.component);
        return buf;
    case PropertyKind::LinearInvariant:
        std::snprintf(buf, sizeof buf, "linear-invariant:%.17g+%.17gt", property.level, property.drift);
        return buf;
    }
    return "unknown";
}

} // namespace nslmm

#endif // NSLMM_PROBLEMS_HPP
