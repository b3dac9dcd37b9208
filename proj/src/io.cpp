#include "sfflab/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sfflab/error.hpp"

namespace sfflab::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string curve_csv(const Curve& c) {
    c.check();
    std::string out = "t,value\n";
    for (std::size_t j = 0; j < c.size(); ++j) out += format_double(c.t[j]) + ',' + format_double(c.values[j]) + '\n';
    return out;
}

std::string curves_csv(std::span<const Curve> curves, std::span<const std::string> names) {
    require(!curves.empty(), "curves_csv: nothing to write");
    require(names.size() == curves.size(), "curves_csv: one name per curve");
    std::string out = "t";
    for (const auto& n : names) out += ',' + n;
    out += '\n';
    for (const auto& c : curves)
        if (c.t != curves.front().t) fail(ErrorCode::Mismatch, "curves_csv: curves on different grids");
    for (std::size_t j = 0; j < curves.front().size(); ++j) {
        out += format_double(curves.front().t[j]);
        for (const auto& c : curves) out += ',' + format_double(c.values[j]);
        out += '\n';
    }
    return out;
}

std::string levels_csv(std::span<const double> levels) {
    std::string out = "index,energy\n";
    for (std::size_t i = 0; i < levels.size(); ++i) out += std::to_string(i) + ',' + format_double(levels[i]) + '\n';
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < h.densities.size(); ++i)
        out += format_double(h.edges[i]) + ',' + format_double(h.edges[i + 1]) + ',' + format_double(h.densities[i]) + '\n';
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::Io, "sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) fail(ErrorCode::Io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputSet::write(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    files_.push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
}

void OutputSet::write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

void OutputSet::write_manifest(nlohmann::json manifest) {
    manifest["files"] = files_;
    write_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace sfflab::io
