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
#ifndef NSLMM_DENOMINATOR_HPP
#define NSLMM_DENOMINATOR_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nslmm/errors.hpp"
#include "nslmm/methods.hpp"

namespace nslmm
{

/// Denominator functions replacing the raw step dt. Every non-identity
/// kind satisfies 0 < phi(x) <= bound for x > 0 and phi(x) = x + O(x^{p+1})
/// with p the kind's enabled order.
enum class PhiKind
{
    Identity,
    Phi1, ///< B (1 - e^{-x/B})
    Phi2, ///< x e^{-x/(B e)}
    Phi3, ///< B x / (B + x)
    Phi4, ///< (2B/pi) atan(pi x / (2B))
    Phi5, ///< B tanh(x/B)
    Phi6, ///< B x / (B^2 + x^2)^{1/2}
    Phi7, ///< B x / (B^3 + x^3)^{1/3}
    Phi8, ///< B x / (B^4 + x^4)^{1/4}
    GeneralP, ///< B x / (B^p + x^p)^{1/p}, p >= 5
};

inline constexpr int unbounded_order = std::numeric_limits<int>::max();

struct DenominatorSpec
{
    PhiKind kind = PhiKind::Identity;
    double bound = 0.0;
    int general_order = 0; ///< p for GeneralP, unused otherwise

    static DenominatorSpec identity() { return {}; }

    static DenominatorSpec make(PhiKind kind, double bound, int general_order = 0)
    {
        if (kind == PhiKind::Identity) {
            return identity();
        }
        if (!(bound > 0.0) || !std::isfinite(bound)) {
            throw argument_error("denominator bound must be positive and finite");
        }
        if (kind == PhiKind::GeneralP && general_order < 5) {
            throw argument_error("phi-general needs p >= 5");
        }
        return {kind, bound, kind == PhiKind::GeneralP ? general_order : 0};
    }

    /// Largest p for which phi(x) = x + O(x^{p+1}).
    int enabled_order() const noexcept
    {
        switch (kind) {
        case PhiKind::Identity:
            return unbounded_order;
        case PhiKind::Phi1:
        case PhiKind::Phi2:
        case PhiKind::Phi3:
            return 1;
        case PhiKind::Phi4:
        case PhiKind::Phi5:
        case PhiKind::Phi6:
            return 2;
        case PhiKind::Phi7:
            return 3;
        case PhiKind::Phi8:
            return 4;
        case PhiKind::GeneralP:
            return general_order;
        }
        return 0;
    }

    friend bool operator==(const DenominatorSpec&, const DenominatorSpec&) = default;
};

namespace detail
{
template <class T>
T root(const T& v, int n)
{
    using std::cbrt;
    using std::pow;
    using std::sqrt;
    if (n == 2) {
        return sqrt(v);
    }
    if (n == 4) {
        return sqrt(sqrt(v));
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (n == 3) {
            return cbrt(v);
        }
    }
    return pow(v, T(1) / T(n));
}

template <class T>
T euler()
{
    if constexpr (std::is_floating_point_v<T>) {
        return std::numbers::e_v<T>;
    }
    else {
        return boost::math::constants::e<T>();
    }
}

template <class T>
T pi()
{
    if constexpr (std::is_floating_point_v<T>) {
        return std::numbers::pi_v<T>;
    }
    else {
        return boost::math::constants::pi<T>();
    }
}

template <class T>
T int_pow(T v, int n)
{
    T r = 1;
    while (n > 0) {
        if (n & 1) {
            r *= v;
        }
        v *= v;
        n >>= 1;
    }
    return r;
}
} // namespace detail

/// phi(x) evaluated in scalar type T (double, or a multiprecision type
/// for certification residuals).
template <class T>
T eval_phi(const DenominatorSpec& spec, const T& x)
{
    using std::atan;
    using std::exp;
    using std::tanh;
    if (x < 0) {
        throw argument_error("eval_phi: x must be nonnegative");
    }
    const T b = spec.bound;
    switch (spec.kind) {
    case PhiKind::Identity:
        return x;
    case PhiKind::Phi1:
        if constexpr (std::is_floating_point_v<T>) {
            return -b * std::expm1(-x / b);
        }
        else {
            return b * (1 - exp(-x / b));
        }
    case PhiKind::Phi2:
        return x * exp(-x / (b * detail::euler<T>()));
    case PhiKind::Phi3:
        return b * x / (b + x);
    case PhiKind::Phi4: {
        const T pi = detail::pi<T>();
        return b * 2 / pi * atan(x * pi / (2 * b));
    }
    case PhiKind::Phi5:
        return b * tanh(x / b);
    case PhiKind::Phi6:
        return b * x / detail::root(b * b + x * x, 2);
    case PhiKind::Phi7:
        return b * x / detail::root(b * b * b + x * x * x, 3);
    case PhiKind::Phi8:
        return b * x / detail::root(b * b * b * b + x * x * x * x, 4);
    case PhiKind::GeneralP: {
        // Scaled so that neither x^p nor B^p overflows.
        const int p = spec.general_order;
        if (x <= b) {
            return x / detail::root(1 + detail::int_pow(T(x / b), p), p);
        }
        return b / detail::root(1 + detail::int_pow(T(b / x), p), p);
    }
    }
    return x;
}

inline double eval_phi(const DenominatorSpec& spec, double x)
{
    return eval_phi<double>(spec, x);
}

/// The bound B with phi(x) <= B for all x > 0.
inline double phi_bound(const DenominatorSpec& spec)
{
    if (spec.kind == PhiKind::Identity) {
        throw unsupported_error("identity denominator is unbounded");
    }
    return spec.bound;
}

/// Which SSP coefficient is used when scaling the forward-Euler bound.
enum class CoefficientSource
{
    Computed, ///< min alpha/beta from the stored coefficients
    Stated,   ///< the catalog's declared (possibly rounded) value
};

inline double ssp_coefficient_for_bound(const AnyMethod& method, CoefficientSource source)
{
    if (source == CoefficientSource::Stated) {
        if (auto stated = stated_ssp(method)) {
            return *stated;
        }
    }
    return ssp_coefficient(method);
}

/// Denominator with bound C(method) * b_fe. An unbounded b_fe (the
/// `unbounded_step` sentinel) yields the identity.
inline DenominatorSpec make_phi_for_method(const AnyMethod& method, double b_fe, PhiKind kind, int general_order = 0,
                                           CoefficientSource source = CoefficientSource::Computed)
{
    if (!(b_fe > 0.0)) {
        throw argument_error("make_phi_for_method: forward-Euler bound must be positive");
    }
    if (kind == PhiKind::Identity || b_fe >= unbounded_step) {
        return DenominatorSpec::identity();
    }
    return DenominatorSpec::make(kind, ssp_coefficient_for_bound(method, source) * b_fe, general_order);
}

/// Denominator kind whose enabled order matches a method of order p
/// (phi2, phi5, phi7, phi8, then the general family).
inline DenominatorSpec order_matched_phi(int order, double bound)
{
    switch (order) {
    case 1:
        return DenominatorSpec::make(PhiKind::Phi2, bound);
    case 2:
        return DenominatorSpec::make(PhiKind::Phi5, bound);
    case 3:
        return DenominatorSpec::make(PhiKind::Phi7, bound);
    case 4:
        return DenominatorSpec::make(PhiKind::Phi8, bound);
    default:
        return DenominatorSpec::make(PhiKind::GeneralP, bound, order);
    }
}

inline PhiKind order_matched_kind(int order)
{
    return order_matched_phi(order, 1.0).kind;
}

// ---------------------------------------------------------------------------
// Names

struct PhiName
{
    PhiKind kind = PhiKind::Identity;
    int general_order = 0;
};

inline std::string to_string(PhiKind kind, int general_order = 0)
{
    switch (kind) {
    case PhiKind::Identity:
        return "identity";
    case PhiKind::GeneralP:
        return "phi-general:" + std::to_string(general_order);
    default:
        return "phi" + std::to_string(static_cast<int>(kind) - static_cast<int>(PhiKind::Phi1) + 1);
    }
}

inline std::string to_string(const DenominatorSpec& spec)
{
    return to_string(spec.kind, spec.general_order);
}

/// Parses `phi1`..`phi8`, `phi-general:<p>` and `identity`.
inline PhiName parse_phi_name(std::string_view name)
{
    if (name == "identity") {
        return {};
    }
    constexpr std::string_view general = "phi-general:";
    if (name.substr(0, general.size()) == general) {
        const std::string digits(name.substr(general.size()));
        std::size_t used = 0;
        int p = 0;
        try {
            p = std::stoi(digits, &used);
        }
        catch (const std::exception&) {
            used = 0;
        }
        if (digits.empty() || used != digits.size() || p < 5) {
            throw argument_error("phi-general needs an integer order p >= 5, got '" + digits + "'");
        }
        return {PhiKind::GeneralP, p};
    }
    if (name.size() == 4 && name.substr(0, 3) == "phi" && name[3] >= '1' && name[3] <= '8') {
        return {static_cast<PhiKind>(static_cast<int>(PhiKind::Phi1) + (name[3] - '1')), 0};
    }
    throw argument_error("unknown denominator '" + std::string(name) + "'");
}

inline std::vector<PhiKind> catalog_phi_kinds()
{
    return {PhiKind::Phi1, PhiKind::Phi2, PhiKind::Phi3, PhiKind::Phi4,
            PhiKind::Phi5, PhiKind::Phi6, PhiKind::Phi7, PhiKind::Phi8};
}

// ---------------------------------------------------------------------------
// Certification

/// Sample points x = scale * B (scale * 1 for the identity).
struct SamplingPlan
{
    std::vector<double> scales;

    /// 2^{-k} for k = k_min..k_max.
    static SamplingPlan dyadic(int k_min = 4, int k_max = 18)
    {
        SamplingPlan plan;
        for (int k = k_min; k <= k_max; ++k) {
            plan.scales.push_back(std::ldexp(1.0, -k));
        }
        return plan;
    }
};

struct CertificationReport
{
    int order = 0;
    double slope = 0.0; ///< +inf when phi(x) - x vanishes on the grid
    bool order_ok = false;
    double max_phi = 0.0;
    bool bounded = false;
    bool positive = false;
    bool pass = false;
};

inline constexpr double slope_margin = 0.1;
inline constexpr double bound_slack = 1e-12;

/// Checks phi(x) = x + O(x^{p+1}) by a least-squares fit of
/// log|phi(x) - x| against log x, plus positivity and phi <= B on the grid
/// and on a tail x = 2^k B, k = 0..6. The residual is evaluated with 50
/// significant digits; in double it drowns in round-off for p >= 3.
inline CertificationReport verify_phi_conditions(const DenominatorSpec& spec, int p,
                                                 const SamplingPlan& plan = SamplingPlan::dyadic())
{
    using wide = boost::multiprecision::cpp_bin_float_50;
    if (p < 1) {
        throw argument_error("verify_phi_conditions: order p must be at least 1");
    }
    if (plan.scales.empty()) {
        throw argument_error("verify_phi_conditions: empty sampling plan");
    }
    const double scale_ref = spec.kind == PhiKind::Identity ? 1.0 : spec.bound;

    CertificationReport report;
    report.order = p;

    std::vector<double> xs;
    std::vector<double> ys;
    for (double s : plan.scales) {
        if (!(s > 0.0)) {
            throw argument_error("verify_phi_conditions: sample scales must be positive");
        }
        const wide x = wide(s) * wide(scale_ref);
        const wide residual = abs(eval_phi<wide>(spec, x) - x);
        if (residual > 0) {
            xs.push_back(std::log(s * scale_ref));
            ys.push_back(static_cast<double>(log(residual)));
        }
    }

    if (xs.empty()) {
        report.slope = std::numeric_limits<double>::infinity();
    }
    else if (xs.size() == 1) {
        report.slope = std::numeric_limits<double>::quiet_NaN();
    }
    else {
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(ys.size());
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        report.slope = sxy / sxx;
    }
    report.order_ok = report.slope >= static_cast<double>(p + 1) - slope_margin;

    std::vector<double> probe = plan.scales;
    for (int k = 0; k <= 6; ++k) {
        probe.push_back(std::ldexp(1.0, k));
    }
    report.positive = true;
    report.max_phi = 0.0;
    for (double s : probe) {
        const double v = eval_phi(spec, s * scale_ref);
        report.positive = report.positive && v > 0.0;
        report.max_phi = std::max(report.max_phi, v);
    }
    report.bounded = spec.kind == PhiKind::Identity || report.max_phi <= spec.bound * (1.0 + bound_slack);
    report.pass = report.order_ok && report.bounded && report.positive;
    return report;
}

} // namespace nslmm

#endif // NSLMM_DENOMINATOR_HPP
