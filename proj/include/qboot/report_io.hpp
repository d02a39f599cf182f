#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qboot/study.hpp"

namespace qboot {

// Shortest exact decimal representation (round-trips to the same double).
std::string format_double(double v);

// Flat key = value serialization of a study configuration; parsing collects
// unknown keys into a ConfigError. The canonical text (sorted keys) feeds
// the config hash embedded in every output artifact.
std::string study_config_to_text(const StudyConfig& cfg);
StudyConfig study_config_from_text(const std::string& text);
std::string study_config_hash(const StudyConfig& cfg);

// CSV table: one row per method x alpha plus one row per two-sided pair,
// columns (method, alpha, coverage, se, mean_length, var_length, n, q,
// model, seed). One-sided rows leave the length columns empty; a two-sided
// row carries alpha = 1 - nominal and filled lengths. The CSV is the flat
// table view; parsing it back recovers the table exactly (two-sided pairs
// are reconstructed symmetrically) while the JSON form is full fidelity.
std::string report_to_csv(const CoverageReport& report);
CoverageReport report_from_csv(const std::string& csv);

// Lossless JSON form, including per-replication containment indicators
// ('0'/'1', '2' for failed replications) and their digests. runtime_seconds
// is deliberately left out so reruns are byte-identical.
nlohmann::json report_to_json(const CoverageReport& report);
CoverageReport report_from_json(const nlohmann::json& j);

// Everything except runtime_seconds.
bool reports_equal(const CoverageReport& a, const CoverageReport& b);

// Run manifest: version, seed, config hash and verbatim config text, worker
// count, elapsed time, output files. Informational; not byte-stable.
std::string run_manifest(const CoverageReport& report,
                         const std::vector<std::string>& outputs,
                         double elapsed_seconds);

}  // namespace qboot
