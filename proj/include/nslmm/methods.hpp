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
#ifndef NSLMM_METHODS_HPP
#define NSLMM_METHODS_HPP

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nslmm/errors.hpp"
#include "nslmm/problems.hpp"

namespace nslmm
{

/// Exact rational used for catalog coefficients given as fractions.
struct Rational
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1)
        : num(n)
        , den(d)
    {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    constexpr double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend constexpr Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend constexpr bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
};

inline std::string to_string(Rational r)
{
    return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

/// A nonnegative method coefficient. `value` is the double used in
/// stepping; `exact` is kept when the source gives a fraction.
struct Coefficient
{
    double value = 0.0;
    std::optional<Rational> exact;

    constexpr Coefficient() = default;
    constexpr Coefficient(Rational r)
        : value(r.value())
        , exact(r)
    {
    }
    constexpr Coefficient(std::int64_t n, std::int64_t d)
        : Coefficient(Rational(n, d))
    {
    }
    constexpr explicit Coefficient(double v)
        : value(v)
    {
    }
};

/// One term j of  u^{n+1} = sum_j ( alpha_j u^{n+1-j} + phi(dt) beta_j f(u^{n+1-j}) ).
struct MultistepTerm
{
    int lag = 1;
    Coefficient alpha;
    Coefficient beta;
};

/// Explicit SSP multistep method in Shu-Osher form. Only nonzero lags
/// are stored, in increasing order.
struct MultistepMethod
{
    std::string id;
    std::string name;
    int steps = 1;
    std::vector<MultistepTerm> terms;
    int design_order = 1;
    std::optional<double> stated_ssp;
};

/// Contribution a * u^(source) + b * dt * f(u^(source)) to a stage.
struct StageTerm
{
    std::size_t source = 0;
    Coefficient a;
    Coefficient b;
};

/// Explicit SSP Runge-Kutta method in Shu-Osher form. Stage i (1-based)
/// combines stage values 0..i-1, where stage 0 is u^n; the last stage is
/// u^{n+1}.
struct RungeKuttaMethod
{
    std::string id;
    std::string name;
    std::vector<std::vector<StageTerm>> stages;
    int design_order = 1;
    std::optional<double> stated_ssp;
};

using AnyMethod = std::variant<MultistepMethod, RungeKuttaMethod>;

// ---------------------------------------------------------------------------
// SSP coefficient

namespace detail
{
template <class Visit>
void for_each_ratio_term(const MultistepMethod& m, Visit&& visit)
{
    for (const auto& t : m.terms) {
        visit(t.alpha, t.beta);
    }
}

template <class Visit>
void for_each_ratio_term(const RungeKuttaMethod& m, Visit&& visit)
{
    for (const auto& stage : m.stages) {
        for (const auto& t : stage) {
            visit(t.a, t.b);
        }
    }
}
} // namespace detail

/// min alpha/beta over the terms with beta > 0; `unbounded_step` when no
/// term carries an f-evaluation.
template <class Method>
double ssp_coefficient(const Method& method)
{
    double c = unbounded_step;
    detail::for_each_ratio_term(method, [&](const Coefficient& a, const Coefficient& b) {
        if (b.value > 0.0) {
            c = std::min(c, a.value / b.value);
        }
    });
    return c;
}

inline double ssp_coefficient(const AnyMethod& method)
{
    return std::visit([](const auto& m) { return ssp_coefficient(m); }, method);
}

/// The same minimum in rational arithmetic; empty if a participating
/// coefficient is only known in decimal.
template <class Method>
std::optional<Rational> ssp_coefficient_exact(const Method& method)
{
    std::optional<Rational> best;
    bool all_exact = true;
    detail::for_each_ratio_term(method, [&](const Coefficient& a, const Coefficient& b) {
        if (b.value <= 0.0) {
            return;
        }
        if (!a.exact || !b.exact) {
            all_exact = false;
            return;
        }
        const Rational r = *a.exact / *b.exact;
        if (!best || r < *best) {
            best = r;
        }
    });
    if (!all_exact) {
        return std::nullopt;
    }
    return best;
}

inline std::optional<Rational> ssp_coefficient_exact(const AnyMethod& method)
{
    return std::visit([](const auto& m) { return ssp_coefficient_exact(m); }, method);
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport
{
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string what)
    {
        ok = false;
        failures.push_back(std::move(what));
    }
};

inline constexpr double consistency_tolerance = 1e-9;

namespace detail
{
/// Sum of values, or nullopt-free exact sum when every term is rational.
inline bool sums_to_one(const std::vector<Coefficient>& coeffs)
{
    bool all_exact = true;
    Rational exact_sum(0);
    double sum = 0.0;
    for (const auto& c : coeffs) {
        sum += c.value;
        if (c.exact) {
            exact_sum = exact_sum + *c.exact;
        }
        else {
            all_exact = false;
        }
    }
    if (all_exact) {
        return exact_sum == Rational(1);
    }
    return std::abs(sum - 1.0) <= consistency_tolerance;
}
} // namespace detail

inline ValidationReport validate_method(const MultistepMethod& m)
{
    ValidationReport report;
    if (m.steps < 1) {
        report.fail("steps must be at least 1");
    }
    std::vector<Coefficient> alphas;
    int previous_lag = 0;
    for (const auto& t : m.terms) {
        if (t.lag < 1 || t.lag > m.steps) {
            report.fail("lag " + std::to_string(t.lag) + " outside 1.." + std::to_string(m.steps));
        }
        if (t.lag <= previous_lag) {
            report.fail("lags must be strictly increasing");
        }
        previous_lag = t.lag;
        if (t.alpha.value < 0.0 || t.beta.value < 0.0) {
            report.fail("negative coefficient at lag " + std::to_string(t.lag));
        }
        if (t.beta.value > 0.0 && t.alpha.value == 0.0) {
            report.fail("zero-pairing: beta > 0 with alpha = 0 at lag " + std::to_string(t.lag));
        }
        alphas.push_back(t.alpha);
    }
    if (!detail::sums_to_one(alphas)) {
        report.fail("consistency: alpha coefficients do not sum to 1");
    }
    return report;
}

inline ValidationReport validate_method(const RungeKuttaMethod& m)
{
    ValidationReport report;
    if (m.stages.empty()) {
        report.fail("no stages");
    }
    for (std::size_t i = 0; i < m.stages.size(); ++i) {
        const std::string where = "stage " + std::to_string(i + 1);
        std::vector<Coefficient> as;
        for (const auto& t : m.stages[i]) {
            if (t.source > i) {
                report.fail(where + " reads stage " + std::to_string(t.source) + " before it exists");
            }
            if (t.a.value < 0.0 || t.b.value < 0.0) {
                report.fail(where + ": negative coefficient");
            }
            if (t.b.value > 0.0 && t.a.value == 0.0) {
                report.fail(where + ": zero-pairing: b > 0 with a = 0");
            }
            as.push_back(t.a);
        }
        if (!detail::sums_to_one(as)) {
            report.fail(where + ": consistency: a coefficients do not sum to 1");
        }
    }
    return report;
}

inline ValidationReport validate_method(const AnyMethod& method)
{
    return std::visit([](const auto& m) { return validate_method(m); }, method);
}

// ---------------------------------------------------------------------------
// Catalog

inline MultistepMethod sspms42()
{
    return {"sspms42", "SSPMS(4,2)", 4, {{1, {8, 9}, {4, 3}}, {4, {1, 9}, {}}}, 2, 2.0 / 3.0};
}

// beta_1 = 16/9: u^{n+1} = 16/27 (u^n + 3 dt f(u^n)) + 11/27 (u^{n-3} + 12/11 dt f(u^{n-3})).
inline MultistepMethod sspms43()
{
    return {"sspms43", "SSPMS(4,3)", 4, {{1, {16, 27}, {16, 9}}, {4, {11, 27}, {4, 9}}}, 3, 1.0 / 3.0};
}

inline MultistepMethod sspms64()
{
    return {"sspms64",
            "SSPMS(6,4)",
            6,
            {{1, Coefficient(0.342460855717007), Coefficient(2.078553105578060)},
             {4, Coefficient(0.191798259434736), Coefficient(1.164112222279710)},
             {5, Coefficient(0.093562124939008), Coefficient(0.567871749748709)},
             {6, Coefficient(0.372178759909247), {}}},
            4,
            0.1648};
}

inline RungeKuttaMethod ssprk22()
{
    return {"ssprk22",
            "SSPRK(2,2)",
            {{{0, {1, 1}, {1, 1}}},                    //
             {{0, {1, 2}, {}}, {1, {1, 2}, {1, 2}}}},  //
            2,
            1.0};
}

inline RungeKuttaMethod ssprk33()
{
    return {"ssprk33",
            "SSPRK(3,3)",
            {{{0, {1, 1}, {1, 1}}},
             {{0, {3, 4}, {}}, {1, {1, 4}, {1, 4}}},
             {{0, {1, 3}, {}}, {2, {2, 3}, {2, 3}}}},
            3,
            1.0};
}

inline RungeKuttaMethod ssprk104()
{
    RungeKuttaMethod m{"ssprk104", "SSPRK(10,4)", {}, 4, 6.0};
    const Coefficient sixth(1, 6);
    for (std::size_t i = 0; i < 4; ++i) {
        m.stages.push_back({{i, {1, 1}, sixth}});
    }
    m.stages.push_back({{0, {3, 5}, {}}, {4, {2, 5}, {1, 15}}});
    for (std::size_t i = 5; i < 9; ++i) {
        m.stages.push_back({{i, {1, 1}, sixth}});
    }
    m.stages.push_back({{0, {1, 25}, {}}, {4, {9, 25}, {3, 50}}, {9, {3, 5}, {1, 10}}});
    return m;
}

/// Registry of the built-in methods, built once.
class MethodCatalog
{
public:
    static const MethodCatalog& instance()
    {
        static const MethodCatalog catalog;
        return catalog;
    }

    const std::vector<MultistepMethod>& multistep() const noexcept { return multistep_; }
    const std::vector<RungeKuttaMethod>& runge_kutta() const noexcept { return runge_kutta_; }

    std::vector<std::string> ids() const
    {
        std::vector<std::string> out;
        for (const auto& m : multistep_) {
            out.push_back(m.id);
        }
        for (const auto& m : runge_kutta_) {
            out.push_back(m.id);
        }
        return out;
    }

    const MultistepMethod* find_multistep(std::string_view id) const noexcept
    {
        for (const auto& m : multistep_) {
            if (m.id == id) {
                return &m;
            }
        }
        return nullptr;
    }

    const RungeKuttaMethod* find_runge_kutta(std::string_view id) const noexcept
    {
        for (const auto& m : runge_kutta_) {
            if (m.id == id) {
                return &m;
            }
        }
        return nullptr;
    }

    AnyMethod get(std::string_view id) const
    {
        if (const auto* m = find_multistep(id)) {
            return *m;
        }
        if (const auto* m = find_runge_kutta(id)) {
            return *m;
        }
        throw argument_error("unknown method '" + std::string(id) + "'");
    }

private:
    MethodCatalog()
        : multistep_{sspms42(), sspms43(), sspms64()}
        , runge_kutta_{ssprk22(), ssprk33(), ssprk104()}
    {
    }

    std::vector<MultistepMethod> multistep_;
    std::vector<RungeKuttaMethod> runge_kutta_;
};

inline const std::string& method_id(const AnyMethod& m)
{
    return std::visit([](const auto& x) -> const std::string& { return x.id; }, m);
}

inline const std::string& method_name(const AnyMethod& m)
{
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, m);
}

inline int design_order(const AnyMethod& m)
{
    return std::visit([](const auto& x) { return x.design_order; }, m);
}

inline std::optional<double> stated_ssp(const AnyMethod& m)
{
    return std::visit([](const auto& x) { return x.stated_ssp; }, m);
}

/// Number of back values a method needs (1 for one-step methods).
inline int steps(const AnyMethod& m)
{
    if (const auto* ms = std::get_if<MultistepMethod>(&m)) {
        return ms->steps;
    }
    return 1;
}

} // namespace nslmm

#endif // NSLMM_METHODS_HPP
