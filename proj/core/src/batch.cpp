#include "uscut/batch.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

#include "uscut/image_io.hpp"

namespace uscut {
namespace {

using nlohmann::json;

SeedPoint parse_point(const json& j, const char* what) {
    if (j.is_array() && j.size() == 2) {
        return SeedPoint{j[0].get<double>(), j[1].get<double>()};
    }
    if (j.is_object()) {
        return SeedPoint{j.at("x").get<double>(), j.at("y").get<double>()};
    }
    throw InvalidArgument(std::string(what) + " must be [x, y] or {\"x\":..,\"y\":..}");
}

HelperKind parse_helper_kind(const std::string& s) {
    if (s == "inside") {
        return HelperKind::inside;
    }
    if (s == "outside") {
        return HelperKind::outside;
    }
    throw InvalidArgument("helper kind must be 'inside' or 'outside', got '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fmt4(const std::optional<double>& v) {
    return v ? fmt4(*v) : std::string();
}

CaseReport run_case(const CaseManifestEntry& c) {
    GrayImage img = load_gray_image(c.image).with_spacing(c.spacing_mm);
    std::optional<BinaryMask> gt;
    if (c.gt_mask) {
        gt = load_mask(*c.gt_mask);
    }
    const SegmentationResult seg = segment(img, c.seed, c.params, c.helpers);
    CaseReport row;
    row.id = c.id;
    row.metrics = evaluate_case(seg.mask, gt ? &*gt : nullptr, c.spacing_mm,
                                static_cast<int>(c.helpers.size()));
    row.elapsed_us = seg.elapsed_us;
    return row;
}

} // namespace

std::vector<CaseManifestEntry> parse_manifest(std::string_view json_text,
                                              const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw InvalidArgument("manifest must be a JSON array of cases");
    }

    std::vector<CaseManifestEntry> out;
    out.reserve(doc.size());
    for (std::size_t k = 0; k < doc.size(); ++k) {
        const json& j = doc[k];
        CaseManifestEntry e;
        e.id = j.contains("id") ? j["id"].get<std::string>() : "case" + std::to_string(k);
        try {
            e.image = resolve(base_dir, j.at("image").get<std::string>());
            if (j.contains("gt_mask") && !j["gt_mask"].is_null()) {
                e.gt_mask = resolve(base_dir, j["gt_mask"].get<std::string>());
            }
            e.seed = parse_point(j.at("seed"), "seed");
            if (j.contains("spacing_mm") && !j["spacing_mm"].is_null()) {
                e.spacing_mm = j["spacing_mm"].get<double>();
            }
            if (j.contains("params")) {
                const json& p = j["params"];
                e.params.rays = p.value("rays", e.params.rays);
                e.params.nodes_per_ray = p.value("nodes", e.params.nodes_per_ray);
                e.params.max_radius = p.value("radius", e.params.max_radius);
                e.params.delta = p.value("delta", e.params.delta);
                e.params.seed_region_radius = p.value("seed_region", e.params.seed_region_radius);
            }
            e.params.validate();
            if (j.contains("helpers")) {
                for (const json& h : j["helpers"]) {
                    const SeedPoint p = parse_point(h, "helper");
                    e.helpers.push_back(HelperSeed{p.x, p.y, parse_helper_kind(h.is_object() ? h.value("kind", "inside") : "inside")});
                }
            }
        } catch (const json::exception& ex) {
            throw BatchCaseError(e.id, std::string("malformed manifest entry: ") + ex.what());
        } catch (const Error& ex) {
            throw BatchCaseError(e.id, ex.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<CaseManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest '" + path.string() + "'");
    }
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    return parse_manifest(text, path.parent_path());
}

BatchReport run_batch(const std::vector<CaseManifestEntry>& cases, const BatchOptions& options) {
    if (cases.empty()) {
        throw InvalidArgument("manifest contains no cases");
    }
    const std::size_t n = cases.size();
    std::vector<std::optional<CaseReport>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t k = next++; k < n && !failed; k = next++) {
            try {
                rows[k] = run_case(cases[k]);
            } catch (...) {
                errors[k] = std::current_exception();
                failed = true;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(options.parallel, static_cast<int>(n)));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (errors[k]) {
            try {
                std::rethrow_exception(errors[k]);
            } catch (const std::exception& e) {
                throw BatchCaseError(cases[k].id, e.what());
            }
        }
    }

    BatchReport report;
    std::vector<CaseMetrics> metrics;
    for (std::size_t k = 0; k < n; ++k) {
        if (!rows[k]) {
            throw BatchCaseError(cases[k].id, "case was not evaluated");
        }
        metrics.push_back(rows[k]->metrics);
        report.rows.push_back(std::move(*rows[k]));
    }
    report.summary = summarize(metrics);
    return report;
}

void write_report_csv(std::ostream& os, const BatchReport& report, const BatchOptions& options) {
    os << "id,max_diameter_algo,max_diameter_ref,area_algo,area_ref,pixels_algo,pixels_ref,dsc_pct,hd_px,hs";
    if (options.include_timing) {
        os << ",elapsed_us";
    }
    os << '\n';
    for (const auto& r : report.rows) {
        const auto& m = r.metrics;
        os << r.id << ',' << fmt4(m.max_diameter_algo) << ',' << fmt4(m.max_diameter_ref) << ','
           << fmt4(m.area_algo) << ',' << fmt4(m.area_ref) << ',' << m.pixels_algo << ','
           << (m.pixels_ref ? std::to_string(*m.pixels_ref) : std::string()) << ','
           << (m.dsc ? fmt4(*m.dsc * 100.0) : std::string()) << ',' << fmt4(m.hd) << ','
           << m.helper_seed_count;
        if (options.include_timing) {
            os << ',' << r.elapsed_us;
        }
        os << '\n';
    }

    static constexpr const char* kColumns[] = {"max_diameter_algo", "max_diameter_ref", "area_algo",
                                               "area_ref",          "pixels_algo",      "pixels_ref",
                                               "dsc",               "hd",               "helper_seeds"};
    struct Row {
        const char* label;
        std::optional<double> (*get)(const MetricSummary&);
    };
    static constexpr Row kRows[] = {
        {"summary_min", [](const MetricSummary& s) -> std::optional<double> { return s.count ? std::optional(s.min) : std::nullopt; }},
        {"summary_max", [](const MetricSummary& s) -> std::optional<double> { return s.count ? std::optional(s.max) : std::nullopt; }},
        {"summary_mean", [](const MetricSummary& s) -> std::optional<double> { return s.count ? std::optional(s.mean) : std::nullopt; }},
        {"summary_sd", [](const MetricSummary& s) { return s.stddev; }},
    };
    for (const auto& row : kRows) {
        os << row.label;
        for (const char* col : kColumns) {
            const MetricSummary* s = report.summary.find(col);
            std::optional<double> v = s ? row.get(*s) : std::nullopt;
            if (v && std::string_view(col) == "dsc") {
                *v *= 100.0;
            }
            os << ',' << fmt4(v);
        }
        if (options.include_timing) {
            os << ',';
        }
        os << '\n';
    }
}

SummaryStats run_batch(const std::filesystem::path& manifest, const std::filesystem::path& report_path,
                       const BatchOptions& options) {
    const auto cases = load_manifest(manifest);
    const BatchReport report = run_batch(cases, options);
    std::ostringstream csv;
    write_report_csv(csv, report, options);
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write report '" + report_path.string() + "'");
    }
    out << csv.str();
    return report.summary;
}

} // namespace uscut
