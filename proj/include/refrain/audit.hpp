#pragma once

#include "refrain/infer.hpp"

#include <string>
#include <vector>

namespace refrain {

// One (score, performance, annotation) triple to check. Relative paths are
// resolved against the manifest's directory.
struct ManifestEntry {
    std::string id; // defaults to the performance file stem
    std::string score_path;
    std::string performance_path;
    std::string annotation;
};

struct AuditRecord {
    std::string performance_id;
    std::string predicted;
    std::string annotated;
    bool agree = false;
    double global_gain = 0.0;
};

struct AuditFailure {
    std::string performance_id;
    std::string error;
};

struct AuditReport {
    std::vector<AuditRecord> records; // manifest order
    std::vector<AuditFailure> failures;

    int total() const { return static_cast<int>(records.size() + failures.size()); }
    int agreed() const;
    double agreement_percent() const; // 100 * agreed / records, 0 when empty
};

// Manifest JSON: [{"score": path, "performance": path, "annotation": string,
//                  "id": string?}, ...]
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Runs inference for every entry; per-entry errors become failures instead
// of aborting the batch.
AuditReport run_audit(const std::vector<ManifestEntry>& entries, const InferConfig& config);

// Audit JSON: {"summary", "mismatches" (sorted by id), "records" (manifest
// order), "failures"}.
std::string audit_to_json(const AuditReport& report);

} // namespace refrain
