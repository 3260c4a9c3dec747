#pragma once

// File formats: CSV for arrays, JSON for structured results. Every file is
// written to a temporary sibling and renamed into place.

#include "whitwave/model_io.hpp"
#include "whitwave/solver.hpp"
#include "whitwave/stability.hpp"

#include <json.hpp>

#include <chrono>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace whitwave::io {

namespace fs = std::filesystem;

/// 17 significant digits.
std::string format_double(double v);

void write_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

/// x,value
void write_field_csv(const fs::path& path, const SpectralField& f);
/// k,|f^(k)| over modes 0..N/2
void write_field_spectrum_csv(const fs::path& path, const SpectralField& f);
/// x,W,u_physical  (x and W rescaled; u_physical = eps^2 W at x/eps)
void write_profile_csv(const fs::path& path, const WaveSolution& solution);
/// index,eigenvalue
void write_spectrum_csv(const fs::path& path, const std::vector<double>& eigenvalues);
/// re,im
void write_complex_spectrum_csv(const fs::path& path, const std::vector<std::complex<double>>& eigenvalues);

/// Columns of a numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    const std::vector<double>& column(const std::string& name) const;
};
CsvTable read_csv(const fs::path& path);

nlohmann::json solution_meta(const WaveSolution& solution, const nlohmann::json& model_config);

struct StoredSolution {
    LoadedModel model;
    WaveSolution solution;
    nlohmann::json meta;
};

/// Rebuilds a solution from `<prefix>_meta.json`; the profile CSV is taken
/// from the "profile" entry, resolved next to the meta file.
StoredSolution load_solution(const fs::path& meta_path);

nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const VerificationReport& report);

/// Run manifest: tool version, resolved config, model hash, stage timings,
/// verdict summary and a checksum for every output file.
class Manifest {
public:
    explicit Manifest(std::string command);

    void set_config(nlohmann::json config) { config_ = std::move(config); }
    void set_model(const nlohmann::json& model_config);
    void add_timing(const std::string& stage, double seconds);
    void add_verdict(const std::string& key, nlohmann::json value);
    void add_output(const fs::path& path);

    nlohmann::json to_json() const;
    void write(const fs::path& path) const;

private:
    std::string command_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json model_ = nullptr;
    std::string model_hash_;
    nlohmann::json timings_ = nlohmann::json::object();
    nlohmann::json verdicts_ = nlohmann::json::object();
    nlohmann::json outputs_ = nlohmann::json::array();
};

/// Wall-clock stopwatch for manifest timings.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline constexpr const char* kToolVersion = "0.3.0";

} // namespace whitwave::io
