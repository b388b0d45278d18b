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
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nslmm/denominator.hpp"

using namespace nslmm;

namespace
{

/// The formulas written out independently of the library.
double reference_phi(PhiKind kind, double b, double x, int p = 0)
{
    const double pi = std::numbers::pi;
    const double e = std::numbers::e;
    switch (kind) {
    case PhiKind::Identity:
        return x;
    case PhiKind::Phi1:
        return b * (1.0 - std::exp(-x / b));
    case PhiKind::Phi2:
        return x * std::exp(-x / (b * e));
    case PhiKind::Phi3:
        return b * x / (b + x);
    case PhiKind::Phi4:
        return 2.0 * b / pi * std::atan(pi * x / (2.0 * b));
    case PhiKind::Phi5:
        return b * std::tanh(x / b);
    case PhiKind::Phi6:
        return b * x / std::sqrt(b * b + x * x);
    case PhiKind::Phi7:
        return b * x / std::cbrt(b * b * b + x * x * x);
    case PhiKind::Phi8:
        return b * x / std::pow(std::pow(b, 4) + std::pow(x, 4), 0.25);
    case PhiKind::GeneralP:
        return b * x / std::pow(std::pow(b, p) + std::pow(x, p), 1.0 / p);
    }
    return 0.0;
}

} // namespace

TEST(Phi, MatchesClosedForms)
{
    for (auto kind : catalog_phi_kinds()) {
        for (double b : {0.1, 0.5, 3.0}) {
            const auto spec = DenominatorSpec::make(kind, b);
            for (double x : {1e-3, 0.05, 0.1, 0.7, 2.0, 10.0}) {
                EXPECT_NEAR(eval_phi(spec, x), reference_phi(kind, b, x), 1e-14 * (1.0 + x))
                    << to_string(kind) << " B=" << b << " x=" << x;
            }
        }
    }
    const auto g = DenominatorSpec::make(PhiKind::GeneralP, 0.4, 6);
    EXPECT_NEAR(eval_phi(g, 0.3), reference_phi(PhiKind::GeneralP, 0.4, 0.3, 6), 1e-15);
    EXPECT_NEAR(eval_phi(g, 3.0), reference_phi(PhiKind::GeneralP, 0.4, 3.0, 6), 1e-15);
}

TEST(Phi, ZeroAtZeroAndRejectsNegative)
{
    for (auto kind : catalog_phi_kinds()) {
        const auto spec = DenominatorSpec::make(kind, 1.0);
        EXPECT_EQ(eval_phi(spec, 0.0), 0.0);
        EXPECT_THROW(eval_phi(spec, -1e-3), argument_error);
    }
}

TEST(Phi, PositiveAndBoundedOnRandomArguments)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> logx(-8.0, 8.0);
    std::uniform_real_distribution<double> logb(-4.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, logx(rng));
        const double b = std::pow(10.0, logb(rng));
        for (auto kind : catalog_phi_kinds()) {
            const double v = eval_phi(DenominatorSpec::make(kind, b), x);
            EXPECT_GE(v, 0.0);
            if (x <= 100.0 * b) {
                EXPECT_GT(v, 0.0);
            }
            EXPECT_LE(v, b * (1.0 + 1e-15));
            EXPECT_LE(v, x * (1.0 + 1e-15));
        }
    }
}

TEST(Phi, MonotoneIncreasing)
{
    // phi2 = x e^{-x/(Be)} peaks at x = B e and is only checked up to there.
    for (auto kind : catalog_phi_kinds()) {
        const double b = 0.5;
        const auto spec = DenominatorSpec::make(kind, b);
        const double x_max = kind == PhiKind::Phi2 ? b * std::numbers::e : 50.0;
        double prev = 0.0;
        for (int i = 1; i <= 2000; ++i) {
            const double x = x_max * i / 2000.0;
            const double v = eval_phi(spec, x);
            EXPECT_GE(v, prev) << to_string(kind) << " x=" << x;
            prev = v;
        }
    }
}

TEST(Phi, GeneralFamilyIsOverflowSafe)
{
    const auto spec = DenominatorSpec::make(PhiKind::GeneralP, 2.0, 9);
    EXPECT_NEAR(eval_phi(spec, 1e300), 2.0, 1e-14);
    EXPECT_NEAR(eval_phi(spec, 1e-300), 1e-300, 1e-314);
}

TEST(Phi, IdentityIsUnbounded)
{
    const auto id = DenominatorSpec::identity();
    EXPECT_DOUBLE_EQ(eval_phi(id, 123.0), 123.0);
    EXPECT_EQ(id.enabled_order(), unbounded_order);
    EXPECT_THROW(phi_bound(id), unsupported_error);
}

TEST(DenominatorSpec, Validation)
{
    EXPECT_THROW(DenominatorSpec::make(PhiKind::Phi5, 0.0), argument_error);
    EXPECT_THROW(DenominatorSpec::make(PhiKind::Phi5, -1.0), argument_error);
    EXPECT_THROW(DenominatorSpec::make(PhiKind::Phi5, INFINITY), argument_error);
    EXPECT_THROW(DenominatorSpec::make(PhiKind::GeneralP, 1.0, 4), argument_error);
    EXPECT_DOUBLE_EQ(phi_bound(DenominatorSpec::make(PhiKind::Phi3, 0.25)), 0.25);
}

TEST(DenominatorSpec, EnabledOrders)
{
    const std::vector<int> expected{1, 1, 1, 2, 2, 2, 3, 4};
    const auto kinds = catalog_phi_kinds();
    ASSERT_EQ(kinds.size(), expected.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        EXPECT_EQ(DenominatorSpec::make(kinds[i], 1.0).enabled_order(), expected[i]);
    }
    EXPECT_EQ(DenominatorSpec::make(PhiKind::GeneralP, 1.0, 7).enabled_order(), 7);
}

TEST(Names, RoundTrip)
{
    for (auto kind : catalog_phi_kinds()) {
        EXPECT_EQ(parse_phi_name(to_string(kind)).kind, kind);
    }
    EXPECT_EQ(parse_phi_name("identity").kind, PhiKind::Identity);
    const auto g = parse_phi_name("phi-general:6");
    EXPECT_EQ(g.kind, PhiKind::GeneralP);
    EXPECT_EQ(g.general_order, 6);
    EXPECT_EQ(to_string(PhiKind::GeneralP, 6), "phi-general:6");
}

TEST(Names, RejectsUnknown)
{
    EXPECT_THROW(parse_phi_name("phi9"), argument_error);
    EXPECT_THROW(parse_phi_name("phi0"), argument_error);
    EXPECT_THROW(parse_phi_name("phi-general:4"), argument_error);
    EXPECT_THROW(parse_phi_name("phi-general:x"), argument_error);
    EXPECT_THROW(parse_phi_name(""), argument_error);
}

TEST(BoundForMethod, ScalesForwardEulerBound)
{
    const auto& cat = MethodCatalog::instance();
    const auto spec = make_phi_for_method(cat.get("sspms42"), 0.5, PhiKind::Phi5);
    EXPECT_EQ(spec.kind, PhiKind::Phi5);
    EXPECT_NEAR(spec.bound, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(make_phi_for_method(cat.get("ssprk104"), 0.2, PhiKind::Phi8).bound, 1.2, 1e-15);
    EXPECT_NEAR(make_phi_for_method(cat.get("sspms64"), 0.5, PhiKind::Phi8, 0, CoefficientSource::Stated).bound,
                0.0824, 1e-15);
    EXPECT_EQ(make_phi_for_method(cat.get("sspms64"), unbounded_step, PhiKind::Phi8).kind, PhiKind::Identity);
    EXPECT_EQ(make_phi_for_method(cat.get("sspms64"), 0.5, PhiKind::Identity).kind, PhiKind::Identity);
    EXPECT_THROW(make_phi_for_method(cat.get("sspms64"), 0.0, PhiKind::Phi8), argument_error);
}

TEST(BoundForMethod, OrderMatchedKinds)
{
    EXPECT_EQ(order_matched_phi(1, 1.0).kind, PhiKind::Phi2);
    EXPECT_EQ(order_matched_phi(2, 1.0).kind, PhiKind::Phi5);
    EXPECT_EQ(order_matched_phi(3, 1.0).kind, PhiKind::Phi7);
    EXPECT_EQ(order_matched_phi(4, 1.0).kind, PhiKind::Phi8);
    const auto g = order_matched_phi(6, 1.0);
    EXPECT_EQ(g.kind, PhiKind::GeneralP);
    EXPECT_EQ(g.general_order, 6);
}

TEST(Certification, PassesExactlyUpToEnabledOrder)
{
    for (double b : {1.0, 0.1, 7.0}) {
        for (auto kind : catalog_phi_kinds()) {
            const auto spec = DenominatorSpec::make(kind, b);
            for (int p = 1; p <= 5; ++p) {
                const auto r = verify_phi_conditions(spec, p);
                EXPECT_EQ(r.pass, p <= spec.enabled_order())
                    << to_string(kind) << " B=" << b << " p=" << p << " slope=" << r.slope;
                EXPECT_TRUE(r.bounded);
                EXPECT_TRUE(r.positive);
            }
        }
    }
}

TEST(Certification, SlopesAreIntegers)
{
    const std::vector<double> expected{2, 2, 2, 3, 3, 3, 4, 5};
    const auto kinds = catalog_phi_kinds();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto r = verify_phi_conditions(DenominatorSpec::make(kinds[i], 1.0), 1);
        EXPECT_NEAR(r.slope, expected[i], 0.02) << to_string(kinds[i]);
    }
}

TEST(Certification, GeneralFamily)
{
    for (int p : {5, 6, 8}) {
        const auto spec = DenominatorSpec::make(PhiKind::GeneralP, 1.0, p);
        EXPECT_TRUE(verify_phi_conditions(spec, p).pass) << p;
        EXPECT_FALSE(verify_phi_conditions(spec, p + 1).pass) << p;
    }
}

TEST(Certification, IdentityHasNoResidual)
{
    const auto r = verify_phi_conditions(DenominatorSpec::identity(), 9);
    EXPECT_TRUE(std::isinf(r.slope));
    EXPECT_TRUE(r.pass);
}

TEST(Certification, RejectsBadArguments)
{
    const auto spec = DenominatorSpec::make(PhiKind::Phi5, 1.0);
    EXPECT_THROW(verify_phi_conditions(spec, 0), argument_error);
    EXPECT_THROW(verify_phi_conditions(spec, 1, SamplingPlan{}), argument_error);
}
