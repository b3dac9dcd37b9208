#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sfflab/curve.hpp"
#include "sfflab/spacings.hpp"

namespace sfflab::io {

/// 17 significant digits; "nan" for undefined samples.
std::string format_double(double v);

std::string curve_csv(const Curve& c);
/// Shared-grid export: header `t,<name_1>,...,<name_M>`.
std::string curves_csv(std::span<const Curve> curves, std::span<const std::string> names);
std::string levels_csv(std::span<const double> levels);
std::string histogram_csv(const Histogram& h);

std::string sha256_hex(std::string_view data);

/// Writes to a temporary sibling, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Collects the files of one run so the manifest can list them with checksums.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);

    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& j);
    /// Adds "files" to the manifest and writes manifest.json last.
    void write_manifest(nlohmann::json manifest);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    const nlohmann::json& files() const noexcept { return files_; }

private:
    std::filesystem::path dir_;
    nlohmann::json files_ = nlohmann::json::array();
};

}  // namespace sfflab::io
