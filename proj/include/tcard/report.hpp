#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcard/balance.hpp"
#include "tcard/design.hpp"
#include "tcard/optimizer.hpp"

namespace tcard {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Count/criterion diagnostics (v1, v2, phi_bcd, B1/B2 + efficiencies, UE(s^2),
// distance scores) with the weights and exponent echoed.
nlohmann::json diagnostics_report(const Design& x, const Weights& w, double mm_exponent);

// Spectral block: traces, log pseudo-determinant, Bayes-D over an alpha list,
// Frobenius sandwich, gap bound, projected log-determinants per q.
nlohmann::json spectral_report(const Design& x, const std::vector<double>& alpha_list, double rho,
                               const std::vector<int>& q_list, int proj_subsets,
                               std::uint64_t seed);

// Balance certificate: NB flags, structural parameters, regime, necessary
// existence conditions, BIBD parameters when fully balanced.
nlohmann::json balance_report(const Design& x);

// JSON sidecar written next to every design file.
nlohmann::json design_sidecar(const Design& x, std::uint64_t seed, const std::string& provenance);

// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

struct ManifestInput {
    std::string command;
    std::vector<std::string> args;
    std::uint64_t seed = 0;
    std::vector<std::string> input_files;
    std::vector<std::string> output_files;
    double wall_clock_ms = 0.0;
};

nlohmann::json run_manifest(const ManifestInput& m);
void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace tcard
