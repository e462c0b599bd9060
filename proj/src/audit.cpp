#include "refrain/audit.hpp"

#include "refrain/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace refrain {

int AuditReport::agreed() const {
    return static_cast<int>(
        std::count_if(records.begin(), records.end(),
                      [](const AuditRecord& r) { return r.agree; }));
}

double AuditReport::agreement_percent() const {
    if (records.empty())
        return 0.0;
    return 100.0 * agreed() / static_cast<double>(records.size());
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open manifest: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw ValidationError("manifest JSON: top level must be an array");

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&base](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    std::vector<ManifestEntry> entries;
    for (const nlohmann::json& item : doc) {
        if (!item.is_object() || !item.contains("score") || !item["score"].is_string() ||
            !item.contains("performance") || !item["performance"].is_string() ||
            !item.contains("annotation") || !item["annotation"].is_string())
            throw ValidationError(
                "manifest JSON: entries need string fields 'score', 'performance', 'annotation'");
        ManifestEntry e;
        e.score_path = resolve(item["score"].get<std::string>());
        e.performance_path = resolve(item["performance"].get<std::string>());
        e.annotation = item["annotation"].get<std::string>();
        if (item.contains("id")) {
            if (!item["id"].is_string())
                throw ValidationError("manifest JSON: field 'id' must be a string");
            e.id = item["id"].get<std::string>();
        } else {
            e.id = std::filesystem::path(item["performance"].get<std::string>())
                       .stem()
                       .string();
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

AuditReport run_audit(const std::vector<ManifestEntry>& entries, const InferConfig& config) {
    AuditReport report;
    for (const ManifestEntry& entry : entries) {
        try {
            const Score score = load_score_file(entry.score_path);
            const Performance performance = load_performance_file(entry.performance_path);
            const Inference inf = infer_structure(score, performance, config);

            AuditRecord rec;
            rec.performance_id = entry.id;
            rec.predicted = inf.best.version.structure;
            rec.annotated = entry.annotation;
            rec.agree = rec.predicted == rec.annotated;
            rec.global_gain = inf.best.global_gain;
            report.records.push_back(std::move(rec));
        } catch (const Error& e) {
            report.failures.push_back({entry.id, e.what()});
        }
    }
    return report;
}

std::string audit_to_json(const AuditReport& report) {
    using ordered = nlohmann::ordered_json;

    auto record_json = [](const AuditRecord& r) {
        ordered entry;
        entry["performance_id"] = r.performance_id;
        entry["predicted"] = r.predicted;
        entry["annotated"] = r.annotated;
        entry["agree"] = r.agree;
        entry["global_gain"] = r.global_gain;
        return entry;
    };

    std::vector<const AuditRecord*> mismatches;
    for (const AuditRecord& r : report.records)
        if (!r.agree)
            mismatches.push_back(&r);
    std::sort(mismatches.begin(), mismatches.end(),
              [](const AuditRecord* a, const AuditRecord* b) {
                  return a->performance_id < b->performance_id;
              });

    ordered doc;
    doc["summary"] = {
        {"total", report.total()},
        {"agreed", report.agreed()},
        {"mismatched", static_cast<int>(mismatches.size())},
        {"failed", static_cast<int>(report.failures.size())},
        {"agreement_percent", report.agreement_percent()},
    };
    doc["mismatches"] = ordered::array();
    for (const AuditRecord* r : mismatches)
        doc["mismatches"].push_back(record_json(*r));
    doc["records"] = ordered::array();
    for (const AuditRecord& r : report.records)
        doc["records"].push_back(record_json(r));
    doc["failures"] = ordered::array();
    for (const AuditFailure& f : report.failures) {
        ordered entry;
        entry["performance_id"] = f.performance_id;
        entry["error"] = f.error;
        doc["failures"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace refrain
