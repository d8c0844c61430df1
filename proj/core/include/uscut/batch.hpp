#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uscut/error.hpp"
#include "uscut/metrics.hpp"
#include "uscut/radial_graph.hpp"
#include "uscut/segmenter.hpp"

namespace uscut {

struct CaseManifestEntry {
    std::string id;
    std::filesystem::path image;
    std::optional<std::filesystem::path> gt_mask;
    SeedPoint seed;
    std::optional<double> spacing_mm;
    TemplateParams params;
    std::vector<HelperSeed> helpers;
};

/// A case failed to load or segment; the batch is aborted.
class BatchCaseError : public Error {
public:
    BatchCaseError(std::string case_id, const std::string& what)
        : Error("case '" + case_id + "': " + what), case_id_(std::move(case_id)) {}

    const std::string& case_id() const noexcept { return case_id_; }

private:
    std::string case_id_;
};

/// Parses a JSON array of cases. Relative paths resolve against `base_dir`.
/// Template parameters not given in an entry keep their defaults.
std::vector<CaseManifestEntry> parse_manifest(std::string_view json_text,
                                              const std::filesystem::path& base_dir);
std::vector<CaseManifestEntry> load_manifest(const std::filesystem::path& path);

struct BatchOptions {
    int parallel = 1;
    /// Adds an elapsed_us column; off by default so reruns are byte-identical.
    bool include_timing = false;
};

struct CaseReport {
    std::string id;
    CaseMetrics metrics;
    std::int64_t elapsed_us = 0;
};

struct BatchReport {
    std::vector<CaseReport> rows;
    SummaryStats summary;
};

/// Segments and scores every case. Rows come back in manifest order however
/// many workers run. Throws BatchCaseError naming the first failing case and
/// InvalidArgument for an empty manifest.
BatchReport run_batch(const std::vector<CaseManifestEntry>& cases, const BatchOptions& options = {});

/// CSV with fixed column order and 4-decimal floats, then summary rows.
void write_report_csv(std::ostream& os, const BatchReport& report, const BatchOptions& options = {});

/// Loads the manifest, runs it and writes the CSV report.
SummaryStats run_batch(const std::filesystem::path& manifest, const std::filesystem::path& report,
                       const BatchOptions& options = {});

} // namespace uscut
