#include <doctest.h>

#include "whitwave/errors.hpp"
#include "whitwave/expression.hpp"
#include "whitwave/model.hpp"
#include "whitwave/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace whitwave;
using doctest::Approx;

namespace {

// Finite-difference second derivative at a point, independent of the library fallback.
double fd2(const ScalarFn& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

const HypothesisCheck& find_check(const VerificationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return r.checks.front();
}

} // namespace

TEST_CASE("whitham symbol values") {
    CHECK(whitham_symbol(0.0) == 1.0);
    CHECK(whitham_symbol(-1.3) == whitham_symbol(1.3));
    // 40-digit reference values
    CHECK(std::fabs(whitham_symbol(2.0) - 0.694272129671001874916804665443076) <= 1e-12);
    CHECK(std::fabs(whitham_symbol(1.3) - 0.814164583301523474682420563539709) <= 1e-12);
    // series branch and direct branch meet smoothly
    for (double k : {0.99e-4, 1.01e-4, 5e-5, 1e-3}) {
        const double direct = std::sqrt(std::tanh(k) / k);
        CHECK(whitham_symbol(k) == Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("whitham symbol is even and decreasing on [0, 200]") {
    double prev = whitham_symbol(0.0);
    for (int i = 1; i <= 4000; ++i) {
        const double k = 200.0 * i / 4000.0;
        const double v = whitham_symbol(k);
        CHECK(v < prev);
        CHECK(v == whitham_symbol(-k));
        CHECK(v > 0.0);
        prev = v;
    }
}

TEST_CASE("whitham second derivative against finite differences and series") {
    CHECK(whitham_symbol_deriv2(0.0) == Approx(-1.0 / 3.0).epsilon(1e-15));
    for (double k : {0.01, 0.049, 0.051, 0.2, 0.7, 1.0, 3.0, 10.0}) {
        // h = 1e-4: truncation ~1e-9, roundoff ~1e-16/h^2 = 1e-8
        const double fd = fd2(whitham_symbol, k, 1e-4);
        CHECK(std::fabs(whitham_symbol_deriv2(k) - fd) <= 1e-7);
    }
}

TEST_CASE("verify bundled Whitham model") {
    const VerificationReport r = verify_model(whitham_model());
    CHECK(r.passed());
    CHECK(r.gamma == Approx(6.0).epsilon(1e-9));
    CHECK(r.mpp0 == Approx(-1.0 / 3.0).epsilon(1e-10));
    CHECK(r.m0 == 1.0);
    CHECK(r.m2 < 0.0);
    CHECK(r.m1 < r.m0);
    CHECK(r.samples == 400);
    CHECK(r.tail_path == "sampled");
}

TEST_CASE("verify KdV symbol gives gamma 2") {
    const VerificationReport r = verify_model(kdv_model());
    CHECK(r.passed());
    CHECK(r.gamma == Approx(2.0).epsilon(1e-9));
    CHECK(gamma_of(kdv_model()) == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("convex symbol fails m2 < 0 and gamma_of refuses it") {
    const SymbolModel convex(convex_multiplier(), quadratic_nonlinearity());
    const VerificationReport r = verify_model(convex);
    CHECK_FALSE(r.passed());
    CHECK_FALSE(find_check(r, "m2<0").passed);
    CHECK(find_check(r, "m2<0").witness == Approx(2.0).epsilon(1e-6));
    CHECK_THROWS_AS(gamma_of(convex), NumericalError);
}

TEST_CASE("gamma arithmetic") {
    Multiplier m;
    m.name = "third";
    m.eval = [](double k) { return 1.0 - k * k / 6.0; };
    Nonlinearity n;
    n.name = "half";
    n.eval = [](double u) { return 0.5 * u * u; };
    const SymbolModel model(m, n);
    CHECK(gamma_of(model) == Approx(3.0).epsilon(1e-6));
    CHECK(gamma_of(whitham_model()) == Approx(6.0).epsilon(1e-9));
}

TEST_CASE("verify_model argument and evaluator errors") {
    CHECK_THROWS_AS(verify_model(whitham_model(), 99), InputError);
    Multiplier bad;
    bad.name = "bad";
    bad.eval = [](double k) { return k > 5.0 ? std::nan("") : 1.0 - k * k / 2.0; };
    CHECK_THROWS_AS(verify_model(SymbolModel(bad, quadratic_nonlinearity())), NumericalError);
}

TEST_CASE("tabulated symbols flag regularity as assumed") {
    const auto dir = std::filesystem::temp_directory_path() / "whitwave_test_table";
    std::filesystem::create_directories(dir);
    const auto path = dir / "whitham.txt";
    {
        std::ofstream out(path);
        out << "# k m\n";
        for (int i = 0; i <= 800; ++i) {
            const double k = 0.05 * i;
            out.precision(17);
            out << k << " " << whitham_symbol(k) << "\n";
        }
    }
    const Multiplier tab = table_multiplier(path, 1.0, 200.0);
    CHECK(tab.tabulated);
    CHECK(tab.value(0.731) == Approx(whitham_symbol(0.731)).epsilon(1e-7));
    CHECK(tab.value(-0.731) == tab.value(0.731));
    CHECK(tab.value(100.0) == tab.value(40.0));
    const VerificationReport r = verify_model(SymbolModel(tab, quadratic_nonlinearity()));
    CHECK(r.passed());
    CHECK(r.regularity == "assumed (tabulated)");
    CHECK(r.gamma == Approx(6.0).epsilon(1e-3));
}

TEST_CASE("g_eps quadratic is the exact square") {
    const SymbolModel model = whitham_model();
    std::vector<double> W = {0.25, -0.1, 0.0, 1.0 / 3.0, 3.7, 1e-9};
    for (double eps : {0.5, 0.1, 1e-3}) {
        const auto g = g_eps(model, eps, W);
        for (std::size_t i = 0; i < W.size(); ++i) CHECK(g[i] == W[i] * W[i]);
    }
}

TEST_CASE("g_eps quadratic-cubic values") {
    const SymbolModel model(whitham_multiplier(), quadratic_cubic_nonlinearity());
    const std::vector<double> one(5, 1.0), two(5, 2.0);
    for (double v : g_eps(model, 0.1, one)) CHECK(v == Approx(1.01).epsilon(1e-12));
    for (double v : g_eps(model, 0.1, two)) CHECK(v == Approx(4.08).epsilon(1e-12));
}

TEST_CASE("g_eps validity radius") {
    const SymbolModel model(whitham_multiplier(), quadratic_cubic_nonlinearity(1.0));
    const std::vector<double> big(3, 200.0);
    CHECK_THROWS_AS(g_eps(model, 0.1, big), InputError);
}

TEST_CASE("g_eps remainder is cubic with an eps-independent constant") {
    const SymbolModel model(whitham_multiplier(), quadratic_cubic_nonlinearity());
    const std::vector<double> W = {0.3, -0.7, 1.2, 2.0};
    double wmax = 2.0;
    std::vector<double> ratios;
    for (double eps : {1e-3, 1e-2, 0.05, 0.2}) {
        const auto g = g_eps(model, eps, W);
        double err = 0.0;
        for (std::size_t i = 0; i < W.size(); ++i) err = std::max(err, std::fabs(g[i] - W[i] * W[i]));
        ratios.push_back(err / (eps * eps * wmax * wmax * wmax));
    }
    // upper bound with an eps-independent constant; at eps = 1e-3 the small-amplitude
    // guard substitutes the quadratic term and the remainder is exactly zero
    for (double r : ratios) CHECK(r <= 1.0 + 1e-6);
    CHECK(ratios[0] == 0.0);
    for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] > 0.1);
}

TEST_CASE("nu of eps") {
    const SymbolModel model = whitham_model();
    CHECK(nu_of_eps(model, 0.3) == Approx(1.015).epsilon(1e-12));
    CHECK(nu_of_eps(model, 0.6) == Approx(1.06).epsilon(1e-12));
    CHECK(nu_of_eps(model, 1e-8) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expression parser") {
    CHECK(Expression("1 + 2*3", "k")(0.0) == 7.0);
    CHECK(Expression("2^3^2", "k")(0.0) == 512.0);
    CHECK(Expression("-k^2", "k")(3.0) == -9.0);
    CHECK(Expression("sqrt(tanh(k)/k)", "k")(2.0) == Approx(whitham_symbol(2.0)).epsilon(1e-15));
    CHECK(Expression("cos(pi*u)", "u")(1.0) == Approx(-1.0));
    CHECK(Expression("abs(u) + exp(0) + log(exp(2))", "u")(-1.5) == Approx(4.5));
    CHECK_THROWS_AS(Expression("1 +", "k"), InputError);
    CHECK_THROWS_AS(Expression("foo(k)", "k"), InputError);
    CHECK_THROWS_AS(Expression("(k", "k"), InputError);
    CHECK_THROWS_AS(Expression("x", "k"), InputError);
}

TEST_CASE("model configs") {
    const LoadedModel w = model_from_json(preset_model_config("whitham"));
    CHECK(w.model.gamma() == Approx(6.0).epsilon(1e-9));
    const LoadedModel c = model_from_json(preset_model_config("convex"));
    CHECK_FALSE(verify_model(c.model).passed());
    nlohmann::json expr = {{"symbol", {{"kind", "expression"}, {"expression", "sqrt(tanh(k)/k)"}}},
                           {"nonlinearity", {{"kind", "expression"}, {"expression", "u^2 + u^3"}}}};
    // The k = 0 singularity of the expression is 0/0; give it a k_star-safe expression instead.
    expr["symbol"]["expression"] = "1 - k^2/2";
    const LoadedModel e = model_from_json(expr);
    CHECK(e.model.gamma() == Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(preset_model_config("nope"), InputError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"symbol", {{"kind", "whitham"}}}}), InputError);
    CHECK_THROWS_AS(model_from_json({{"symbol", {{"kind", "what"}}}, {"nonlinearity", {{"kind", "quadratic"}}}}),
                    InputError);
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), InputError);
}
