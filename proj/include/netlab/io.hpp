#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace netlab {

inline constexpr const char* kVersion = "1.0.0";

// Deterministic CSV accumulator: fixed header, one formatted line per row,
// written in one shot so output bytes depend only on the data.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells);
    std::string str() const;

    static std::string fmt(double v);       // shortest round-trip decimal
    static std::string fmt(std::int64_t v);
    static std::string fmt(std::uint64_t v);

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string sha256_hex(const std::string& data);

struct ManifestOutput {
    std::string path; // relative to the manifest's directory
    std::string sha256;
};

struct RunManifest {
    std::string version;
    std::string experiment;
    nlohmann::json config;
    std::uint64_t seed0 = 0;
    std::uint64_t replica_count = 0;
    std::string started_at; // UTC ISO-8601
    double elapsed_s = 0.0;
    std::vector<ManifestOutput> outputs;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

std::string utc_timestamp();

} // namespace netlab
