#pragma once

// Artifact serialization. Every number is written in shortest round-trip
// decimal form, so identical runs produce identical bytes.

#include <string>
#include <utility>
#include <vector>

#include "sonic/pipeline.hpp"

namespace sonic {

/// RFC-4180 style CSV with a header row.
std::string trace_csv(const TraceResult& trace);
std::string mesh_csv(const CharacteristicMesh& mesh);
std::string field_csv(const RTField& field);

std::string diagnostics_json(const SolverConfig& config, const MarchRun& run,
                             const DiagnoseReport& report);
std::string verify_json(const VerifyReport& report);

/// Two-column key,value summary printed by `diagnose`.
std::string diagnostics_summary_csv(const DiagnoseReport& report);
/// One row per residual report printed by `verify`.
std::string verify_summary_csv(const VerifyReport& report);

using Artifact = std::pair<std::string, std::string>;  // file name, bytes

/// Plain-text manifest: config hash, canonical config and the SHA-256 of
/// every artifact. Contains no timestamp.
std::string manifest_text(const SolverConfig& config, const std::string& subcommand,
                          int refine, const std::vector<Artifact>& artifacts);

/// Writes `bytes` to dir/name, creating dir. Throws std::runtime_error.
void write_file(const std::string& dir, const std::string& name, const std::string& bytes);

}  // namespace sonic
