#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace schwarz;
using testing_support::Rng;

// ---------------------------------------------------------------------------
// Truncated Taylor series

TEST(Taylor, ArithmeticMatchesKnownSeries) {
    const auto t = TaylorScalar::identity(0.0, 6);
    const TaylorScalar geom = TaylorScalar(1.0, 0.0, 6) / (1.0 + (-t));
    for (int k = 0; k <= 6; ++k) EXPECT_DOUBLE_EQ(geom[k], 1.0);

    const TaylorScalar e = exp(t);
    double fact = 1.0;
    for (int k = 0; k <= 6; ++k) {
        if (k) fact *= k;
        EXPECT_NEAR(e[k], 1.0 / fact, 1e-15);
    }
    const TaylorScalar sq = pow(1.0 + t, 2);
    EXPECT_DOUBLE_EQ(sq[0], 1.0);
    EXPECT_DOUBLE_EQ(sq[1], 2.0);
    EXPECT_DOUBLE_EQ(sq[2], 1.0);
    EXPECT_DOUBLE_EQ(sq[3], 0.0);
}

TEST(Taylor, ElementaryFunctionsAgreeWithLibm) {
    for (double x0 : {-1.2, -0.3, 0.0, 0.4, 1.1}) {
        const auto t = TaylorScalar::identity(x0, 5);
        EXPECT_NEAR(sin(t).derivative(1), std::cos(x0), 1e-14);
        EXPECT_NEAR(sin(t).derivative(2), -std::sin(x0), 1e-14);
        EXPECT_NEAR(cos(t).derivative(3), std::sin(x0), 1e-14);
        EXPECT_NEAR(exp(t).derivative(4), std::exp(x0), 1e-12);
        const auto oracle = testing_support::tan_derivatives(x0);
        for (int k = 0; k <= 4; ++k) EXPECT_NEAR(tan(t).derivative(k), oracle[k], 1e-11 * std::max(1.0, std::abs(oracle[k])));
        const auto s = 2.0 + t;
        EXPECT_NEAR(log(s).derivative(1), 1.0 / (2.0 + x0), 1e-14);
        EXPECT_NEAR(log(s).derivative(3), 2.0 / std::pow(2.0 + x0, 3), 1e-13);
    }
}

TEST(Taylor, NegativePowerIsReciprocal) {
    const auto t = TaylorScalar::identity(0.7, 5);
    const auto a = pow(2.0 + t, -3);
    const auto b = TaylorScalar(1.0, 0.7, 5) / pow(2.0 + t, 3);
    for (int k = 0; k <= 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-14);
}

TEST(Taylor, EvaluateSumsThePolynomial) {
    const auto t = TaylorScalar::identity(0.2, 12);
    EXPECT_NEAR(exp(t).evaluate(0.05), std::exp(0.25), 1e-15);
}

TEST(Taylor, ErrorPaths) {
    const auto a = TaylorScalar::identity(0.0, 4);
    const auto b = TaylorScalar::identity(1.0, 4);
    const auto c = TaylorScalar::identity(0.0, 3);
    EXPECT_THROW(a + b, SeriesMismatchError);
    EXPECT_THROW(a * c, SeriesMismatchError);
    EXPECT_THROW(TaylorScalar(1.0, 0.0, 4) / a, DomainError);
    EXPECT_THROW(log(a), DomainError);
    EXPECT_THROW(tan(TaylorScalar::identity(M_PI / 2, 3)), DomainError);
}

// ---------------------------------------------------------------------------
// Expressions

TEST(Expr, ParsePrintRoundTrip) {
    for (const char* text : {"-3*q^3/p^2 + 4*q*r/p", "r/p - 1.5*(q/p)^2", "sin(t)^2 + cos(t)^2", "-(u - p)^3",
                             "exp(-t)*ln(p)", "p^(-2)", "2^3", "1e-3*t"}) {
        const Expr e = parse(text);
        const Expr back = parse(to_string(e));
        EXPECT_EQ(to_string(back), to_string(e)) << text;
    }
}

TEST(Expr, ConstantFoldingAndPrecedence) {
    EXPECT_EQ(to_string(parse("2*3 + 1")), "7");
    EXPECT_EQ(to_string(parse("0*q + p")), "p");
    EXPECT_DOUBLE_EQ(eval_scalar(parse("-2^2"), {}), -4.0);
    EXPECT_DOUBLE_EQ(eval_scalar(parse("2^-1"), {}), 0.5);
    EXPECT_DOUBLE_EQ(eval_scalar(parse("8/4/2"), {}), 1.0);
    EXPECT_DOUBLE_EQ(eval_scalar(parse("8-4-2"), {}), 2.0);
}

TEST(Expr, ParseErrorsReportPosition) {
    try {
        parse("q^0.5");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 2u);
        EXPECT_NE(std::string(e.what()).find("non-integer exponent"), std::string::npos);
    }
    EXPECT_THROW(parse("w + 1"), UnknownIdentifierError);
    EXPECT_THROW(parse("foo(t)"), UnknownIdentifierError);
    EXPECT_THROW(parse("(t + 1"), ParseError);
    EXPECT_THROW(parse("t +"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("t 1"), ParseError);
    EXPECT_THROW(parse("1/0"), ParseError);
}

TEST(Expr, EvaluationErrors) {
    EXPECT_THROW(eval_scalar(parse("1/p"), {0, 0, 0, 0, 0}), DomainError);
    EXPECT_THROW(eval_scalar(parse("ln(u)"), {0, -1, 1, 0, 0}), DomainError);
    EXPECT_THROW(taylor_eval(parse("u + t"), {{Var::t, TaylorScalar::identity(0.0, 3)}}), Error);
    EXPECT_THROW(taylor_eval(parse("1"), {}), Error);
}

TEST(Expr, RandomTreesSurvivePrintAndParse) {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const Expr e = testing_support::random_expr(rng, 4);
        const Expr back = parse(to_string(e));
        for (int k = 0; k < 10; ++k) {
            const Jet4 j{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
                         rng.uniform(-2, 2)};
            const double a = eval_scalar(e, j), b = eval_scalar(back, j);
            EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a))) << to_string(e);
        }
    }
}

TEST(Expr, SymbolicDerivativeMatchesCentralDifference) {
    Rng rng(12);
    for (int i = 0; i < 60; ++i) {
        const Expr e = testing_support::random_expr(rng, 3);
        const Var v = kAllVars[rng.integer(0, 4)];
        const Expr de = differentiate(e, v);
        const Jet4 j{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                     rng.uniform(-1.5, 1.5)};
        auto shifted = [&](double x) {
            auto a = to_array(j);
            a[static_cast<int>(v)] = x;
            return eval_scalar(e, jet_from_array(a));
        };
        const double fd = testing_support::central_difference(shifted, jet_value(j, v));
        const double sym = eval_scalar(de, j);
        EXPECT_LE(std::abs(sym - fd), 1e-6 * std::max(1.0, std::abs(sym))) << to_string(e) << " d/d" << var_name(v);
    }
}

TEST(Expr, TaylorEvaluationMatchesRepeatedDifferentiation) {
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        Expr e = testing_support::random_expr(rng, 3);
        const double t0 = rng.uniform(-1, 1);
        TaylorEnv env{{Var::t, TaylorScalar::identity(t0, 3)}};
        for (Var v : {Var::u, Var::p, Var::q, Var::r}) env[v] = TaylorScalar(0.3, t0, 3);
        const TaylorScalar s = taylor_eval(e, env);
        Expr d = e;
        for (int k = 0; k <= 3; ++k) {
            const double exact = eval_scalar(d, {t0, 0.3, 0.3, 0.3, 0.3});
            EXPECT_LE(std::abs(s.derivative(k) - exact), 1e-10 * std::max(1.0, std::abs(exact))) << to_string(e);
            d = differentiate(d, Var::t);
        }
    }
}

// ---------------------------------------------------------------------------
// Formal solutions

TEST(Formal, ExponentialJetGivesExponentialSeries) {
    // u = e^t solves u'''' = u (F = u) and also the Euler-Lagrange equation.
    for (const Expr& F : {parse("u"), el_field()}) {
        const FormalSolution sol = formal_solution(F, {0, 1, 1, 1, 1}, 8);
        double fact = 1.0;
        for (int k = 0; k <= 8; ++k) {
            if (k) fact *= k;
            EXPECT_NEAR(sol.u[k], 1.0 / fact, 1e-14);
        }
    }
}

TEST(Formal, SeriesSatisfiesTheEquationToOrder) {
    Rng rng(14);
    const Expr F = el_field();
    for (int i = 0; i < 20; ++i) {
        const Jet4 j = testing_support::random_jet(rng, 0.5, 2.0);
        const FormalSolution sol = formal_solution(F, j, 6);
        EXPECT_DOUBLE_EQ(sol.u[0], j.u);
        EXPECT_DOUBLE_EQ(sol.p[0], j.p);
        EXPECT_DOUBLE_EQ(sol.q[0], j.q);
        EXPECT_DOUBLE_EQ(sol.r[0], j.r);
        const TaylorScalar rhs = taylor_eval(F, sol.env());
        const TaylorScalar u4 = sol.r.differentiated();
        for (int k = 0; k + 1 <= 6; ++k) EXPECT_NEAR(u4[k], rhs[k], 1e-9 * std::max(1.0, std::abs(rhs[k])));
    }
}

TEST(Formal, TotalDerivative) {
    const FormalSolution sol = formal_solution(parse("0"), {0, 0, 1, 0, 6}, 6);  // u = t + t^3
    EXPECT_NEAR(total_derivative(parse("u"), sol, 3), 6.0, 1e-14);
    EXPECT_NEAR(total_derivative(parse("q*t"), sol, 1), 0.0, 1e-14);
    EXPECT_NEAR(total_derivative(parse("q*t"), sol, 2), 12.0, 1e-13);
    EXPECT_THROW(formal_solution(parse("0"), {}, 3), InvalidArgument);
}
