#include "whitwave/io.hpp"

#include "whitwave/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <unistd.h>

namespace whitwave::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path() && !fs::exists(path.parent_path()))
        throw InputError("output directory does not exist: " + path.parent_path().string());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw InputError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw Error("sha256 computation failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_field_csv(const fs::path& path, const SpectralField& f) {
    std::string s = "x,value\n";
    for (int j = 0; j < f.size(); ++j) s += format_double(f.grid().node(j)) + "," + format_double(f[j]) + "\n";
    write_atomic(path, s);
}

void write_field_spectrum_csv(const fs::path& path, const SpectralField& f) {
    std::string s = "k,abs_coefficient\n";
    const auto& c = f.coefficients();
    for (std::size_t j = 0; j < c.size(); ++j)
        s += format_double(f.grid().wavenumber(static_cast<int>(j))) + "," + format_double(std::abs(c[j])) + "\n";
    write_atomic(path, s);
}

void write_profile_csv(const fs::path& path, const WaveSolution& solution) {
    const double e2 = solution.eps * solution.eps;
    std::string s = "x,W,u_physical\n";
    const SpectralField& W = solution.W;
    for (int j = 0; j < W.size(); ++j)
        s += format_double(W.grid().node(j)) + "," + format_double(W[j]) + "," + format_double(e2 * W[j]) + "\n";
    write_atomic(path, s);
}

void write_spectrum_csv(const fs::path& path, const std::vector<double>& eigenvalues) {
    std::string s = "index,eigenvalue\n";
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        s += std::to_string(i) + "," + format_double(eigenvalues[i]) + "\n";
    write_atomic(path, s);
}

void write_complex_spectrum_csv(const fs::path& path, const std::vector<std::complex<double>>& eigenvalues) {
    std::string s = "re,im\n";
    for (const auto& l : eigenvalues) s += format_double(l.real()) + "," + format_double(l.imag()) + "\n";
    write_atomic(path, s);
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw InputError("CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty CSV");
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= t.columns.size())
                throw InputError(path.string() + ":" + std::to_string(lineno) + ": too many columns");
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + cell);
            t.columns[c++].push_back(v);
        }
        if (c != t.columns.size())
            throw InputError(path.string() + ":" + std::to_string(lineno) + ": too few columns");
    }
    return t;
}

json solution_meta(const WaveSolution& s, const json& model_config) {
    const PeriodicGrid& g = s.W.grid();
    json j = {{"eps", s.eps},
              {"nu", s.nu},
              {"mode", to_string(s.mode)},
              {"half_period", g.half_period()},
              {"n_points", g.size()},
              {"residual", s.residual_sup},
              {"iterations", s.iterations},
              {"parity_defect", s.parity_defect},
              {"newton_tol", s.newton_tol},
              {"model_name", s.model_name},
              {"model", model_config}};
    if (s.mode == WaveMode::Solitary) j["decay_check"] = decay_check(s);
    return j;
}

StoredSolution load_solution(const fs::path& meta_path) {
    json meta;
    try {
        meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
        throw InputError(meta_path.string() + ": " + e.what());
    }
    try {
        LoadedModel model = model_from_json(meta.at("model"));
        fs::path profile = meta.at("profile").get<std::string>();
        if (profile.is_relative()) profile = meta_path.parent_path() / profile;
        const CsvTable table = read_csv(profile);
        const PeriodicGrid grid(meta.at("half_period").get<double>(), meta.at("n_points").get<int>());
        const std::vector<double>& W = table.column("W");
        if (static_cast<int>(W.size()) != grid.size())
            throw InputError(profile.string() + ": row count does not match n_points");
        WaveSolution s{meta.value("model_name", model.model.name()),
                       parse_wave_mode(meta.at("mode").get<std::string>()),
                       meta.at("eps").get<double>(),
                       meta.at("nu").get<double>(),
                       SpectralField(grid, W),
                       meta.at("residual").get<double>(),
                       meta.at("iterations").get<int>(),
                       meta.at("parity_defect").get<double>(),
                       meta.value("newton_tol", 1e-11)};
        return StoredSolution{std::move(model), std::move(s), std::move(meta)};
    } catch (const json::exception& e) {
        throw InputError(meta_path.string() + ": " + e.what());
    }
}

json to_json(const StabilityReport& r) {
    json j = {{"eps", r.eps},
              {"eigenvalues", r.eigenvalues},
              {"morse_index", r.morse_index},
              {"kernel_dim", r.kernel_dim},
              {"kernel_tolerance", r.kernel_tolerance},
              {"kernel_alignment", r.kernel_alignment},
              {"kernel_residual", r.kernel_residual},
              {"vk_value", r.vk_value},
              {"vk_scaled", r.vk_scaled},
              {"vk_residual", r.vk_residual},
              {"vk_asymptote", r.vk_asymptote},
              {"k_unstable_bound", r.k_unstable_bound},
              {"verdict", to_string(r.verdict)},
              {"diagnostics", r.diagnostics},
              {"symmetry_defect", r.symmetry_defect},
              {"parity_offblock", r.parity_offblock}};
    if (r.resolvent_gap) j["resolvent_gap"] = *r.resolvent_gap;
    if (r.full_spectrum) {
        j["full_spectrum"] = {{"max_real", r.full_spectrum->max_real},
                              {"quadruple_defect", r.full_spectrum->quadruple_defect},
                              {"count", r.full_spectrum->eigenvalues.size()}};
    }
    return j;
}

json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}, {"detail", c.detail}});
    return {{"passed", r.passed()},
            {"checks", checks},
            {"m0", r.m0},
            {"m2", r.m2},
            {"m1", r.m1},
            {"mpp0", r.mpp0},
            {"npp0", r.npp0},
            {"gamma", std::isfinite(r.gamma) ? json(r.gamma) : json(nullptr)},
            {"samples", r.samples},
            {"n_sample_radius", r.n_sample_radius},
            {"tail_path", r.tail_path},
            {"regularity", r.regularity}};
}

Manifest::Manifest(std::string command) : command_(std::move(command)) {}

void Manifest::set_model(const json& model_config) {
    model_ = model_config;
    model_hash_ = sha256_hex(model_config.dump());
}

void Manifest::add_timing(const std::string& stage, double seconds) {
    timings_[stage] = timings_.value(stage, 0.0) + seconds;
}

void Manifest::add_verdict(const std::string& key, json value) { verdicts_[key] = std::move(value); }

void Manifest::add_output(const fs::path& path) {
    outputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

json Manifest::to_json() const {
    return {{"tool", "whitwave"},
            {"version", kToolVersion},
            {"command", command_},
            {"config", config_},
            {"model", model_},
            {"model_sha256", model_hash_},
            {"timings_seconds", timings_},
            {"verdicts", verdicts_},
            {"outputs", outputs_}};
}

void Manifest::write(const fs::path& path) const { write_atomic(path, to_json().dump(2) + "\n"); }

} // namespace whitwave::io
