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
#ifndef NSLMM_QUALPROPS_HPP
#define NSLMM_QUALPROPS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nslmm/errors.hpp"
#include "nslmm/format.hpp"
#include "nslmm/integrate.hpp"
#include "nslmm/problems.hpp"

namespace nslmm
{

struct Violation
{
    std::size_t n = 0; ///< grid index
    std::size_t k = 0; ///< component
    double value = 0.0;
    double bound = 0.0;
};

/// Result of scanning a trajectory for one property. `worst_margin` is the
/// smallest slack seen (bound minus value, oriented so that negative means
/// violated).
struct PropertyReport
{
    std::string property;
    bool holds = true;
    std::optional<Violation> first_violation;
    double worst_margin = std::numeric_limits<double>::infinity();
};

inline constexpr double violation_rtol = 1e-12;

enum class Direction
{
    Increasing,
    Decreasing,
};

namespace detail
{
template <std::size_t M>
void require_scannable(const Trajectory<M>& traj, std::size_t k)
{
    if (traj.states.empty()) {
        throw argument_error("empty trajectory");
    }
    if (!traj.full) {
        throw argument_error("property checks need a full trajectory");
    }
    if (k >= M) {
        throw argument_error("component " + std::to_string(k) + " out of range");
    }
}

inline void note(PropertyReport& report, double margin, const Violation& v, bool violated)
{
    report.worst_margin = std::min(report.worst_margin, margin);
    if (violated && report.holds) {
        report.holds = false;
        report.first_violation = v;
    }
}
} // namespace detail

/// lower - tol <= u_k^n <= upper + tol for every n, tol = 1e-12 max(1, |bound|).
/// Attaining a bound exactly is not a violation.
template <std::size_t M>
PropertyReport check_bounds(const Trajectory<M>& traj, std::size_t k, std::optional<double> upper,
                            std::optional<double> lower)
{
    detail::require_scannable(traj, k);
    PropertyReport report;
    report.property = "bounds@" + std::to_string(k) + ":[" + (lower ? format_real(*lower) : std::string("-inf")) +
                      "," + (upper ? format_real(*upper) : std::string("inf")) + "]";
    const double tol_up = upper ? violation_rtol * std::max(1.0, std::abs(*upper)) : 0.0;
    const double tol_lo = lower ? violation_rtol * std::max(1.0, std::abs(*lower)) : 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const double v = traj.states[n][k];
        if (upper) {
            detail::note(report, *upper - v, {n, k, v, *upper}, !(v <= *upper + tol_up));
        }
        if (lower) {
            detail::note(report, v - *lower, {n, k, v, *lower}, !(v >= *lower - tol_lo));
        }
    }
    return report;
}

/// Windowed monotonicity: for increasing, min of the previous s values is
/// at most u_k^{n+1}; for decreasing, their max is at least u_k^{n+1}.
template <std::size_t M>
PropertyReport check_weak_monotonicity(const Trajectory<M>& traj, std::size_t k, std::size_t window,
                                       Direction direction)
{
    detail::require_scannable(traj, k);
    if (window == 0 || traj.states.size() <= window) {
        throw argument_error("weak monotonicity window must be positive and shorter than the trajectory");
    }
    PropertyReport report;
    report.property = std::string(direction == Direction::Increasing ? "weak-increase" : "weak-decrease") + "@" +
                      std::to_string(k) + ":s=" + std::to_string(window);
    for (std::size_t next = window; next < traj.states.size(); ++next) {
        double extreme = traj.states[next - window][k];
        for (std::size_t i = next - window + 1; i < next; ++i) {
            const double v = traj.states[i][k];
            extreme = direction == Direction::Increasing ? std::min(extreme, v) : std::max(extreme, v);
        }
        const double v = traj.states[next][k];
        const double tol = violation_rtol * std::max(1.0, std::abs(extreme));
        if (direction == Direction::Increasing) {
            detail::note(report, v - extreme, {next, k, v, extreme}, !(v >= extreme - tol));
        }
        else {
            detail::note(report, extreme - v, {next, k, v, extreme}, !(v <= extreme + tol));
        }
    }
    return report;
}

/// Step-to-step monotonicity u^{n+1} >= u^n (or <=). Stricter than the
/// windowed property; reported separately.
template <std::size_t M>
PropertyReport check_strict_monotonicity(const Trajectory<M>& traj, std::size_t k, Direction direction)
{
    detail::require_scannable(traj, k);
    PropertyReport report;
    report.property = std::string(direction == Direction::Increasing ? "strict-increase" : "strict-decrease") + "@" +
                      std::to_string(k);
    for (std::size_t n = 1; n < traj.states.size(); ++n) {
        const double prev = traj.states[n - 1][k];
        const double v = traj.states[n][k];
        const double tol = violation_rtol * std::max(1.0, std::abs(prev));
        const double margin = direction == Direction::Increasing ? v - prev : prev - v;
        detail::note(report, margin, {n, k, v, prev}, !(margin >= -tol));
    }
    return report;
}

/// sum_l weights_l u_l^n == level + drift (t_n - t0) for every n, within
/// 1e-12 times the step count.
template <std::size_t M>
PropertyReport check_linear_invariant(const Trajectory<M>& traj, std::span<const double> weights, double drift,
                                      double level)
{
    detail::require_scannable(traj, 0);
    if (weights.size() != M) {
        throw argument_error("linear invariant needs " + std::to_string(M) + " weights");
    }
    PropertyReport report;
    report.property = "linear-invariant:" + format_real(level) + "+" + format_real(drift) + "t";
    const double tol = violation_rtol * static_cast<double>(std::max<std::size_t>(traj.steps, 1));
    double max_dev = 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        double total = 0.0;
        for (std::size_t l = 0; l < M; ++l) {
            total += weights[l] * traj.states[n][l];
        }
        const double expected = level + drift * (traj.time(n) - traj.t0);
        const double dev = std::abs(total - expected);
        max_dev = std::max(max_dev, dev);
        if (!(dev <= tol) && report.holds) {
            report.holds = false;
            report.first_violation = Violation{n, 0, total, expected};
        }
    }
    report.worst_margin = tol - max_dev;
    return report;
}

/// Dispatches a problem-level property. `window` is the step count s used
/// for the monotonicity kinds.
template <std::size_t M>
PropertyReport check_property(const Trajectory<M>& traj, const QualitativeProperty& property, std::size_t window)
{
    switch (property.kind) {
    case PropertyKind::BoundAbove:
        return check_bounds(traj, property.component, property.level, std::nullopt);
    case PropertyKind::BoundBelow:
        return check_bounds(traj, property.component, std::nullopt, property.level);
    case PropertyKind::WeakMonotoneIncrease:
        return check_weak_monotonicity(traj, property.component, window, Direction::Increasing);
    case PropertyKind::WeakMonotoneDecrease:
        return check_weak_monotonicity(traj, property.component, window, Direction::Decreasing);
    case PropertyKind::LinearInvariant:
        return check_linear_invariant(traj, std::span<const double>(property.weights), property.drift,
                                      property.level);
    }
    throw argument_error("unknown property kind");
}

inline nlohmann::json to_json(const PropertyReport& report)
{
    nlohmann::json j;
    j["property"] = report.property;
    j["holds"] = report.holds;
    if (report.first_violation) {
        const auto& v = *report.first_violation;
        j["first_violation"] = {{"n", v.n}, {"k", v.k}, {"value", v.value}, {"bound", v.bound}};
    }
    else {
        j["first_violation"] = nullptr;
    }
    if (std::isfinite(report.worst_margin)) {
        j["worst_margin"] = report.worst_margin;
    }
    else {
        j["worst_margin"] = nullptr;
    }
    return j;
}

} // namespace nslmm

#endif // NSLMM_QUALPROPS_HPP
