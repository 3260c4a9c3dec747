#pragma once

// Loading symbol models from JSON configuration files.
//
//   {
//     "name": "whitham",
//     "symbol": {"kind": "whitham" | "kdv" | "table" | "expression",
//                "k_star": 1.0, "k_max": 200.0, "monotone_tail": false,
//                "expression": "sqrt(tanh(k)/k)",      // kind = expression
//                "table": "symbol.txt"},               // kind = table
//     "nonlinearity": {"kind": "quadratic" | "quadratic_cubic" | "expression",
//                      "delta_star": 1e6,
//                      "expression": "u^2 + u^3"}      // kind = expression
//   }
//
// Table files hold two whitespace-separated columns (k, m(k)) with strictly
// increasing k >= 0; the symbol is extended evenly and held constant past
// the last row.

#include "whitwave/model.hpp"

#include <filesystem>
#include <string>

#include <json.hpp>

namespace whitwave {

struct LoadedModel {
    SymbolModel model;
    // Resolved configuration (table paths made absolute); embedded in
    // result metadata so a model can be rebuilt from outputs alone.
    nlohmann::json config;
};

LoadedModel model_from_json(const nlohmann::json& config,
                            const std::filesystem::path& base_dir = {});
LoadedModel load_model_file(const std::filesystem::path& path);

/// Bundled presets: "whitham", "kdv", "convex" (the m'' > 0 anti-example).
nlohmann::json preset_model_config(const std::string& name);

Multiplier table_multiplier(const std::filesystem::path& table_file, double k_star, double k_max);

} // namespace whitwave
