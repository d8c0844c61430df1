// uscut: interactive radial graph-cut segmentation, batch evaluation,
// phantom generation and the interactive endpoint.

#include <CLI11.hpp>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uscut/batch.hpp"
#include "uscut/error.hpp"
#include "uscut/image_io.hpp"
#include "uscut/phantom.hpp"
#include "uscut/segmenter.hpp"
#include "uscut/server.hpp"
#include "uscut/service.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(item);
    }
    return parts;
}

uscut::Point2 parse_xy(const std::string& text, const char* what) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) {
        throw uscut::InvalidArgument(std::string(what) + " must be X,Y");
    }
    try {
        return {std::stod(parts[0]), std::stod(parts[1])};
    } catch (const std::exception&) {
        throw uscut::InvalidArgument(std::string(what) + " must be X,Y with numeric values");
    }
}

uscut::HelperSeed parse_helper(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3 || (parts[2] != "inside" && parts[2] != "outside")) {
        throw uscut::InvalidArgument("--helper must be X,Y,inside or X,Y,outside");
    }
    const auto p = parse_xy(parts[0] + "," + parts[1], "--helper");
    return {p.x, p.y, parts[2] == "inside" ? uscut::HelperKind::inside : uscut::HelperKind::outside};
}

struct SegmentArgs {
    std::string image;
    std::string seed;
    uscut::TemplateParams params;
    std::vector<std::string> helpers;
    std::string out_mask;
    std::string out_contour;
    std::string dump_network;
};

int run_segment(const SegmentArgs& a) {
    const auto img = uscut::load_gray_image(a.image);
    const auto seed = parse_xy(a.seed, "--seed");
    std::vector<uscut::HelperSeed> helpers;
    for (const auto& h : a.helpers) {
        helpers.push_back(parse_helper(h));
    }
    const auto tr = uscut::segment_traced(img, seed, a.params, helpers);
    const auto& r = tr.result;

    uscut::save_mask(r.mask, a.out_mask);
    if (!a.out_contour.empty()) {
        std::ofstream out(a.out_contour);
        if (!out) {
            throw uscut::IoError("cannot write '" + a.out_contour + "'");
        }
        uscut::write_contour(out, r.contour);
    }
    if (!a.dump_network.empty()) {
        std::ofstream out(a.dump_network);
        if (!out) {
            throw uscut::IoError("cannot write '" + a.dump_network + "'");
        }
        tr.network.write_arc_list(out);
    }
    std::printf("cut_cost=%.4f collapsed=%s pixels=%zu elapsed_us=%lld\n", r.cut_cost,
                r.collapsed ? "true" : "false", r.mask.count(), static_cast<long long>(r.elapsed_us));
    return 0;
}

int run_eval(const std::string& manifest, const std::string& report, const uscut::BatchOptions& opts) {
    const auto summary = uscut::run_batch(manifest, report, opts);
    const auto* dsc = summary.find("dsc");
    const auto* hd = summary.find("hd");
    std::printf("report written to %s\n", report.c_str());
    if (dsc && dsc->count > 0) {
        std::printf("DSC %%: mean %.2f sd %s min %.2f max %.2f (n=%zu)\n", dsc->mean * 100.0,
                    dsc->stddev ? std::to_string(*dsc->stddev * 100.0).c_str() : "n/a", dsc->min * 100.0,
                    dsc->max * 100.0, dsc->count);
        const bool in_band = dsc->mean >= 0.75 && dsc->mean <= 0.92;
        std::printf("mean DSC %s the 0.75-0.92 clinical sanity band (informational)\n",
                    in_band ? "inside" : "outside");
    }
    if (hd && hd->count > 0) {
        std::printf("HD px: mean %.2f min %.2f max %.2f\n", hd->mean, hd->min, hd->max);
    }
    return 0;
}

int run_serve(const std::string& host, unsigned short port, int threads) {
    uscut::Service service;
    uscut::Server server(service, host, port, threads);
    server.start();
    std::printf("uscut serving on %s:%u (WebSocket on any path, POST /segment)\n", host.c_str(),
                static_cast<unsigned>(server.port()));
    std::fflush(stdout);

    boost::asio::io_context signals_ioc;
    boost::asio::signal_set signals(signals_ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
    signals_ioc.run();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uscut - interactive radial graph-cut lesion segmentation"};
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* seg_cmd = app.add_subcommand("segment", "Segment one image from a seed point");
    seg_cmd->add_option("--image", seg.image, "PGM or PNG input")->required();
    seg_cmd->add_option("--seed", seg.seed, "Seed point X,Y in pixels")->required();
    seg_cmd->add_option("--rays", seg.params.rays, "Number of rays")->capture_default_str();
    seg_cmd->add_option("--nodes", seg.params.nodes_per_ray, "Nodes per ray")->capture_default_str();
    seg_cmd->add_option("--radius", seg.params.max_radius, "Template radius in pixels")->capture_default_str();
    seg_cmd->add_option("--delta", seg.params.delta, "Max boundary jump between adjacent rays")->capture_default_str();
    seg_cmd->add_option("--seed-region", seg.params.seed_region_radius, "Radius of the averaging disk")
        ->capture_default_str();
    seg_cmd->add_option("--helper", seg.helpers, "Helper seed X,Y,inside|outside (repeatable)");
    seg_cmd->add_option("--out-mask", seg.out_mask, "Output mask (0/255), .png or .pgm")->required();
    seg_cmd->add_option("--out-contour", seg.out_contour, "Output contour as 'x y' lines");
    seg_cmd->add_option("--dump-network", seg.dump_network, "Write the flow network arc list");

    std::string manifest;
    std::string report;
    uscut::BatchOptions batch_opts;
    auto* eval_cmd = app.add_subcommand("eval", "Run a manifest of cases and write a CSV report");
    eval_cmd->add_option("--manifest", manifest, "JSON manifest")->required();
    eval_cmd->add_option("--report", report, "CSV report path")->required();
    eval_cmd->add_option("--parallel", batch_opts.parallel, "Worker threads")->capture_default_str();
    eval_cmd->add_flag("--timing", batch_opts.include_timing, "Add an elapsed_us column");

    uscut::PhantomSpec ph;
    std::string pattern = "hypo";
    std::string out_image;
    std::string out_gt;
    std::string center;
    double radius = 30.0;
    auto* ph_cmd = app.add_subcommand("phantom", "Generate a synthetic lesion image and its ground truth");
    ph_cmd->add_option("--pattern", pattern, "hyper|iso|hypo|halo_hyper|halo_iso")
        ->check(CLI::IsMember({"hyper", "iso", "hypo", "halo_hyper", "halo_iso"}))
        ->capture_default_str();
    ph_cmd->add_option("--size", ph.size, "Image side length")->capture_default_str();
    ph_cmd->add_option("--bg", ph.background, "Background gray")->capture_default_str();
    ph_cmd->add_option("--contrast", ph.contrast, "Lesion contrast in gray levels")->capture_default_str();
    ph_cmd->add_option("--sigma", ph.speckle_sigma, "Relative speckle sigma (0.08 = 8%)")->capture_default_str();
    ph_cmd->add_option("--rng", ph.rng_seed, "Noise seed")->capture_default_str();
    ph_cmd->add_option("--radius", radius, "Lesion radius in pixels")->capture_default_str();
    ph_cmd->add_option("--center", center, "Lesion center X,Y (default: image center)");
    ph_cmd->add_option("--halo-width", ph.halo_width, "Halo ring width")->capture_default_str();
    ph_cmd->add_option("--halo-depth", ph.halo_depth, "Halo darkening in gray levels")->capture_default_str();
    ph_cmd->add_option("--out-image", out_image, "Output image")->required();
    ph_cmd->add_option("--out-gt", out_gt, "Output ground-truth mask")->required();

    std::string host = "127.0.0.1";
    unsigned short port = 8080;
    int threads = 2;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the interactive WebSocket/HTTP endpoint");
    serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
    serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--threads", threads, "Compute threads")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*seg_cmd) {
            return run_segment(seg);
        }
        if (*eval_cmd) {
            return run_eval(manifest, report, batch_opts);
        }
        if (*ph_cmd) {
            ph.pattern = uscut::parse_echo_pattern(pattern);
            ph.radius_x = ph.radius_y = radius;
            if (!center.empty()) {
                ph.center = parse_xy(center, "--center");
            }
            const auto phantom = uscut::generate_phantom(ph);
            uscut::save_gray_image(phantom.image, out_image);
            uscut::save_mask(phantom.ground_truth, out_gt);
            return 0;
        }
        if (*serve_cmd) {
            return run_serve(host, port, threads);
        }
    } catch (const uscut::BatchCaseError& e) {
        std::fprintf(stderr, "uscut: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "uscut: %s\n", e.what());
        return 1;
    }
    return 0;
}
