#include "netlab/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "netlab/error.hpp"

namespace netlab {

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        throw Error(ErrorCode::bad_config, "csv row width does not match header");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

std::string CsvTable::fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string CsvTable::fmt(std::int64_t v) { return std::to_string(v); }
std::string CsvTable::fmt(std::uint64_t v) { return std::to_string(v); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::bad_config, "cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::bad_config, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::bad_config, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["experiment"] = experiment;
    j["config"] = config;
    j["seed0"] = seed0;
    j["replica_count"] = replica_count;
    j["started_at"] = started_at;
    j["elapsed_s"] = elapsed_s;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}});
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.experiment = j.at("experiment").get<std::string>();
    m.config = j.at("config");
    m.seed0 = j.at("seed0").get<std::uint64_t>();
    m.replica_count = j.at("replica_count").get<std::uint64_t>();
    m.started_at = j.at("started_at").get<std::string>();
    m.elapsed_s = j.at("elapsed_s").get<double>();
    for (const auto& o : j.at("outputs"))
        m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
    return m;
}

void RunManifest::save(const std::string& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::load(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::bad_config, "bad manifest " + path + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::bad_config, "bad manifest " + path + ": " + e.what());
    }
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace netlab
