#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfflab/curve.hpp"
#include "sfflab/ensembles.hpp"
#include "sfflab/knsff.hpp"

namespace sfflab::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

struct RunConfig {
    std::string command;
    std::optional<EnsembleKind> ensemble;
    std::optional<int> dim;
    int realizations = 100;
    bool realizations_given = false;
    std::vector<int> k_list;
    std::optional<int> K;
    TimeGrid grid;
    std::optional<double> epsilon;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string format = "csv";
    KnsffMode mode = KnsffMode::Auto;
    std::string unfolding = "auto";  // auto, analytic, polynomial, identity
    int eta = 3;
    int bins = 50;
    // xxz
    std::optional<int> length;
    double jz = 1.0;
    double disorder = 1.0;
    int window = 200;
    bool open_chain = false;
    // autocorr
    std::string op = "identity";
    bool record_timing = false;

    /// Epsilon in effect: explicit value, else 0.2 for xxz, 0.25 for GSE, 0.1 otherwise.
    double effective_epsilon() const;
    nlohmann::json to_json() const;
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
    std::string message;  // usage or help text when no config was produced
};

/// args excludes the program name.
ParseOutcome parse_args(const std::vector<std::string>& args);

/// Executes a validated config; returns the process exit code.
int run(const RunConfig& cfg);

int main_entry(int argc, char** argv);

}  // namespace sfflab::cli
