#include "whitwave/model_io.hpp"

#include "whitwave/errors.hpp"
#include "whitwave/expression.hpp"

#include <boost/math/interpolators/barycentric_rational.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace whitwave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw InputError(std::string("model key '") + key + "' must be a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw InputError(std::string("model key '") + key + "' is not finite");
    return v;
}

std::string string_at(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw InputError(std::string("model key '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

} // namespace

Multiplier table_multiplier(const fs::path& table_file, double k_star, double k_max) {
    std::ifstream in(table_file);
    if (!in) throw InputError("cannot open symbol table " + table_file.string());
    std::vector<double> ks;
    std::vector<double> ms;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        double k = 0.0;
        double m = 0.0;
        if (!(row >> k)) continue;
        if (!(row >> m))
            throw InputError(table_file.string() + ":" + std::to_string(lineno) + ": expected two columns");
        if (k < 0.0 || (!ks.empty() && k <= ks.back()))
            throw InputError(table_file.string() + ":" + std::to_string(lineno) +
                             ": k must be >= 0 and strictly increasing");
        ks.push_back(k);
        ms.push_back(m);
    }
    if (ks.size() < 4) throw InputError("symbol table " + table_file.string() + " needs at least 4 rows");

    // Mirror the data so the interpolant is even by construction.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = ks.size(); i-- > 0;) {
        if (ks[i] == 0.0) continue;
        xs.push_back(-ks[i]);
        ys.push_back(ms[i]);
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        xs.push_back(ks[i]);
        ys.push_back(ms[i]);
    }
    const double k_last = ks.back();
    const double m_last = ms.back();
    auto interp = std::make_shared<boost::math::barycentric_rational<double>>(
        std::move(xs), std::move(ys), 3);

    Multiplier mult;
    mult.name = "table:" + table_file.filename().string();
    mult.eval = [interp, k_last, m_last](double k) {
        const double a = std::fabs(k);
        if (a >= k_last) return m_last;
        return (*interp)(a);
    };
    mult.k_star = k_star;
    mult.k_max = k_max;
    mult.tabulated = true;
    return mult;
}

LoadedModel model_from_json(const json& config, const fs::path& base_dir) {
    if (!config.is_object()) throw InputError("model configuration must be a JSON object");
    if (!config.contains("symbol") || !config.contains("nonlinearity"))
        throw InputError("model configuration needs 'symbol' and 'nonlinearity' sections");
    json resolved = config;
    const json& sym = config.at("symbol");
    const json& nl = config.at("nonlinearity");

    const double k_star = number_or(sym, "k_star", 1.0);
    const double k_max = number_or(sym, "k_max", 200.0);
    if (!(k_star > 0.0) || !(k_max > k_star)) throw InputError("symbol needs 0 < k_star < k_max");

    const std::string skind = string_at(sym, "kind");
    Multiplier mult;
    if (skind == "whitham") {
        mult = whitham_multiplier(k_star, k_max);
    } else if (skind == "kdv") {
        mult = kdv_multiplier(k_star, k_max);
    } else if (skind == "expression") {
        auto expr = std::make_shared<Expression>(string_at(sym, "expression"), "k");
        mult.name = "expr:" + expr->text();
        mult.eval = [expr](double k) { return (*expr)(k); };
        mult.k_star = k_star;
        mult.k_max = k_max;
    } else if (skind == "table") {
        fs::path table = string_at(sym, "table");
        if (table.is_relative() && !base_dir.empty()) table = base_dir / table;
        table = fs::absolute(table).lexically_normal();
        resolved["symbol"]["table"] = table.string();
        mult = table_multiplier(table, k_star, k_max);
    } else {
        throw InputError("unknown symbol.kind '" + skind + "'");
    }
    if (sym.contains("monotone_tail")) mult.monotone_tail = sym.at("monotone_tail").get<bool>();
    if (sym.contains("name")) mult.name = string_at(sym, "name");

    const std::string nkind = string_at(nl, "kind");
    Nonlinearity nonlin;
    if (nkind == "quadratic") {
        nonlin = quadratic_nonlinearity(number_or(nl, "delta_star", 1e6));
    } else if (nkind == "quadratic_cubic") {
        nonlin = quadratic_cubic_nonlinearity(number_or(nl, "delta_star", 1.0));
    } else if (nkind == "expression") {
        auto expr = std::make_shared<Expression>(string_at(nl, "expression"), "u");
        nonlin.name = "expr:" + expr->text();
        nonlin.eval = [expr](double u) { return (*expr)(u); };
        nonlin.delta_star = number_or(nl, "delta_star", 1.0);
    } else {
        throw InputError("unknown nonlinearity.kind '" + nkind + "'");
    }
    if (!(nonlin.delta_star > 0.0)) throw InputError("nonlinearity.delta_star must be positive");

    return LoadedModel{SymbolModel(std::move(mult), std::move(nonlin)), std::move(resolved)};
}

LoadedModel load_model_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file " + path.string());
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw InputError("model file " + path.string() + ": " + e.what());
    }
    try {
        return model_from_json(config, fs::absolute(path).parent_path());
    } catch (const json::exception& e) {
        throw InputError("model file " + path.string() + ": " + e.what());
    }
}

json preset_model_config(const std::string& name) {
    if (name == "whitham")
        return {{"name", "whitham"},
                {"symbol", {{"kind", "whitham"}, {"k_star", 1.0}, {"k_max", 200.0}}},
                {"nonlinearity", {{"kind", "quadratic"}, {"delta_star", 1e6}}}};
    if (name == "kdv")
        return {{"name", "kdv"},
                {"symbol", {{"kind", "kdv"}, {"k_star", 1.0}, {"k_max", 200.0}}},
                {"nonlinearity", {{"kind", "quadratic"}, {"delta_star", 1e6}}}};
    if (name == "convex")
        return {{"name", "convex"},
                {"symbol", {{"kind", "expression"}, {"expression", "1 + k^2"}, {"k_star", 1.0},
                            {"k_max", 200.0}}},
                {"nonlinearity", {{"kind", "quadratic"}, {"delta_star", 1e6}}}};
    throw InputError("unknown model preset '" + name + "' (expected whitham, kdv or convex)");
}

} // namespace whitwave
