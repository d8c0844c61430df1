#include "uscut/service.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>

#include "uscut/error.hpp"
#include "uscut/image_io.hpp"
#include "uscut/metrics.hpp"
#include "uscut/segmenter.hpp"

namespace uscut {
namespace {

using nlohmann::json;

/// Protocol-level failure with a stable error code.
class ProtocolError : public Error {
public:
    ProtocolError(std::string code, const std::string& detail) : Error(detail), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct Session {
    std::string id;
    std::shared_ptr<const GrayImage> image;

    std::mutex compute;  // one segmentation in flight per session
    std::atomic<std::uint64_t> latest_seq{0};

    std::mutex state;
    TemplateParams params;
    std::vector<HelperSeed> helpers;
    std::optional<SegmentationResult> last;
    std::optional<std::uint64_t> last_delivered;
    std::optional<SegmentationResult> committed;
};

Point2 parse_point(const json& j) {
    if (j.is_array() && j.size() == 2) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    if (j.is_object()) {
        return {j.at("x").get<double>(), j.at("y").get<double>()};
    }
    throw ProtocolError("malformed", "point must be {\"x\":..,\"y\":..} or [x, y]");
}

TemplateParams merge_params(TemplateParams p, const json& j) {
    if (!j.is_object()) {
        throw ProtocolError("malformed", "params must be an object");
    }
    p.rays = j.value("rays", p.rays);
    p.nodes_per_ray = j.value("nodes", p.nodes_per_ray);
    p.max_radius = j.value("radius", p.max_radius);
    p.delta = j.value("delta", p.delta);
    p.seed_region_radius = j.value("seed_region", p.seed_region_radius);
    p.validate();
    return p;
}

json params_to_json(const TemplateParams& p) {
    return {{"rays", p.rays},
            {"nodes", p.nodes_per_ray},
            {"radius", p.max_radius},
            {"delta", p.delta},
            {"seed_region", p.seed_region_radius}};
}

HelperSeed parse_helper(const json& j) {
    const Point2 p = parse_point(j);
    const std::string kind = j.is_object() ? j.value("kind", "inside") : "inside";
    if (kind != "inside" && kind != "outside") {
        throw ProtocolError("malformed", "helper kind must be 'inside' or 'outside'");
    }
    return HelperSeed{p.x, p.y, kind == "inside" ? HelperKind::inside : HelperKind::outside};
}

json helpers_to_json(const std::vector<HelperSeed>& hs) {
    json arr = json::array();
    for (const auto& h : hs) {
        arr.push_back({{"x", h.x}, {"y", h.y}, {"kind", h.kind == HelperKind::inside ? "inside" : "outside"}});
    }
    return arr;
}

json rle_to_json(const BinaryMask& mask) {
    json arr = json::array();
    for (const auto& [start, len] : mask_to_rle(mask)) {
        arr.push_back(json::array({start, len}));
    }
    return arr;
}

std::vector<std::uint8_t> decode_base64(const std::string& text) {
    namespace b64 = boost::beast::detail::base64;
    std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
    const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
    // The decoder stops at padding; anything else left over is garbage.
    if (text.find_first_not_of('=', read) != std::string::npos) {
        throw ProtocolError("malformed", "invalid base64 image payload");
    }
    out.resize(written);
    return out;
}

GrayImage load_image_field(const json& msg) {
    std::optional<GrayImage> img;
    if (msg.contains("path")) {
        img = load_gray_image(msg["path"].get<std::string>());
    } else if (msg.contains("png_base64") || msg.contains("image_base64")) {
        const auto& field = msg.contains("png_base64") ? msg["png_base64"] : msg["image_base64"];
        img = decode_gray_image(decode_base64(field.get<std::string>()));
    } else {
        throw ProtocolError("malformed", "image must be given as 'path' or 'png_base64'");
    }
    if (msg.contains("spacing_mm") && !msg["spacing_mm"].is_null()) {
        return img->with_spacing(msg["spacing_mm"].get<double>());
    }
    return std::move(*img);
}

json result_to_json(const SegmentationResult& r, bool want_mask) {
    json contour = json::array();
    for (const auto& p : r.contour) {
        contour.push_back(json::array({p.x, p.y}));
    }
    json out = {{"type", "result"},
                {"boundary", r.boundary},
                {"contour", std::move(contour)},
                {"cut_cost", r.cut_cost},
                {"collapsed", r.collapsed},
                {"elapsed_us", r.elapsed_us}};
    if (want_mask) {
        out["width"] = r.mask.width();
        out["height"] = r.mask.height();
        out["mask_rle"] = rle_to_json(r.mask);
    }
    return out;
}

json error_json(const std::string& code, const std::string& detail) {
    return {{"type", "error"}, {"code", code}, {"detail", detail}};
}

} // namespace

MaskRle mask_to_rle(const BinaryMask& mask) {
    MaskRle runs;
    const auto bits = mask.bits();
    std::size_t k = 0;
    while (k < bits.size()) {
        if (!bits[k]) {
            ++k;
            continue;
        }
        const std::size_t start = k;
        while (k < bits.size() && bits[k]) {
            ++k;
        }
        runs.emplace_back(start, k - start);
    }
    return runs;
}

BinaryMask mask_from_rle(const MaskRle& rle, int width, int height) {
    BinaryMask mask(width, height);
    auto bits = mask.bits();
    for (const auto& [start, len] : rle) {
        if (start > bits.size() || len > bits.size() - start) {
            throw InvalidArgument("run-length entry exceeds the mask");
        }
        std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(start), len, std::uint8_t{1});
    }
    return mask;
}

struct Service::Impl {
    ServiceOptions options;
    mutable std::mutex mu;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::uint64_t next_id = 1;

    std::shared_ptr<Session> find(const json& msg) {
        if (!msg.contains("session") || !msg["session"].is_string()) {
            throw ProtocolError("malformed", "missing 'session'");
        }
        const auto id = msg["session"].get<std::string>();
        std::lock_guard lock(mu);
        auto it = sessions.find(id);
        if (it == sessions.end()) {
            throw ProtocolError("unknown_session", "no session '" + id + "'");
        }
        return it->second;
    }

    static std::uint64_t seq_of(const json& msg) {
        if (!msg.contains("seq") || !msg["seq"].is_number_unsigned()) {
            throw ProtocolError("malformed", "segment requests need a non-negative integer 'seq'");
        }
        return msg["seq"].get<std::uint64_t>();
    }

    json on_load(const json& msg) {
        auto s = std::make_shared<Session>();
        s->image = std::make_shared<const GrayImage>(load_image_field(msg));
        if (msg.contains("params")) {
            s->params = merge_params(s->params, msg["params"]);
        }
        std::lock_guard lock(mu);
        s->id = "s" + std::to_string(next_id++);
        sessions.emplace(s->id, s);
        return {{"type", "loaded"},
                {"session", s->id},
                {"width", s->image->width()},
                {"height", s->image->height()}};
    }

    json on_set_params(const json& msg) {
        auto s = find(msg);
        std::lock_guard lock(s->state);
        s->params = merge_params(s->params, msg.at("params"));
        return {{"type", "params"}, {"session", s->id}, {"params", params_to_json(s->params)}};
    }

    std::optional<json> on_segment(const json& msg) {
        auto s = find(msg);
        const std::uint64_t seq = seq_of(msg);
        std::uint64_t seen = s->latest_seq.load();
        while (seq > seen && !s->latest_seq.compare_exchange_weak(seen, seq)) {
        }

        std::lock_guard compute(s->compute);
        TemplateParams params;
        std::vector<HelperSeed> helpers;
        {
            std::lock_guard lock(s->state);
            params = s->params;
            helpers = s->helpers;
        }
        if (msg.contains("params")) {
            params = merge_params(params, msg["params"]);
        }
        const Point2 seed = parse_point(msg.at("seed"));
        if (options.before_segment) {
            options.before_segment(s->id, seq);
        }
        SegmentationResult result = segment(*s->image, seed, params, helpers);

        std::lock_guard lock(s->state);
        if (seq < s->latest_seq.load() || (s->last_delivered && seq <= *s->last_delivered)) {
            return std::nullopt;
        }
        s->last_delivered = seq;
        json out = result_to_json(result, msg.value("want_mask", false));
        out["session"] = s->id;
        out["seq"] = seq;
        s->last = std::move(result);
        return out;
    }

    json on_add_helper(const json& msg) {
        auto s = find(msg);
        const HelperSeed h = parse_helper(msg);
        if (!s->image->contains(Point2{h.x, h.y})) {
            throw InvalidArgument("helper seed lies outside the image");
        }
        std::lock_guard lock(s->state);
        s->helpers.push_back(h);
        return {{"type", "helpers"}, {"session", s->id}, {"helpers", helpers_to_json(s->helpers)}};
    }

    json on_clear_helpers(const json& msg) {
        auto s = find(msg);
        std::lock_guard lock(s->state);
        s->helpers.clear();
        return {{"type", "helpers"}, {"session", s->id}, {"helpers", json::array()}};
    }

    json on_commit(const json& msg) {
        auto s = find(msg);
        std::lock_guard lock(s->state);
        if (!s->last) {
            throw ProtocolError("no_result", "nothing to commit: no segmentation delivered yet");
        }
        s->committed = s->last;
        return {{"type", "committed"},
                {"session", s->id},
                {"seq", *s->last_delivered},
                {"width", s->committed->mask.width()},
                {"height", s->committed->mask.height()},
                {"mask_rle", rle_to_json(s->committed->mask)}};
    }

    json on_metrics(const json& msg) {
        auto s = find(msg);
        if (!msg.contains("gt") || !msg["gt"].is_string()) {
            throw ProtocolError("malformed", "metrics needs a ground-truth path in 'gt'");
        }
        const BinaryMask gt = load_mask(msg["gt"].get<std::string>());
        std::optional<BinaryMask> committed;
        {
            std::lock_guard lock(s->state);
            if (!s->committed) {
                throw ProtocolError("no_result", "commit a segmentation before requesting metrics");
            }
            committed = s->committed->mask;
        }
        json out = {{"type", "metrics"}, {"session", s->id}, {"dsc", dice(*committed, gt)}};
        out["hd"] = (!committed->empty() && !gt.empty()) ? json(hausdorff(*committed, gt)) : json(nullptr);
        return out;
    }

    json on_close(const json& msg) {
        auto s = find(msg);
        std::lock_guard lock(mu);
        sessions.erase(s->id);
        return {{"type", "closed"}, {"session", s->id}};
    }

    std::optional<json> dispatch(const json& msg) {
        if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
            throw ProtocolError("malformed", "message must be a JSON object with a string 'type'");
        }
        const auto type = msg["type"].get<std::string>();
        if (type == "load") return on_load(msg);
        if (type == "set_params") return on_set_params(msg);
        if (type == "segment") return on_segment(msg);
        if (type == "add_helper") return on_add_helper(msg);
        if (type == "clear_helpers") return on_clear_helpers(msg);
        if (type == "commit") return on_commit(msg);
        if (type == "metrics") return on_metrics(msg);
        if (type == "close") return on_close(msg);
        throw ProtocolError("unknown_type", "unknown message type '" + type + "'");
    }

    template <class F>
    static std::optional<json> guarded(const json* msg, F&& f) {
        json err;
        try {
            return f();
        } catch (const ProtocolError& e) {
            err = error_json(e.code(), e.what());
        } catch (const InfeasibleConstraints& e) {
            err = error_json("infeasible", e.what());
        } catch (const IoError& e) {
            err = error_json("io_error", e.what());
        } catch (const InvalidArgument& e) {
            err = error_json("invalid_argument", e.what());
        } catch (const json::exception& e) {
            err = error_json("malformed", e.what());
        } catch (const std::exception& e) {
            err = error_json("internal", e.what());
        }
        if (msg && msg->is_object() && msg->contains("seq")) {
            err["seq"] = (*msg)["seq"];
        }
        return err;
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
}

Service::~Service() = default;

void Service::announce(std::string_view message) {
    const json msg = json::parse(message, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || msg.value("type", "") != "segment" ||
        !msg.contains("session") || !msg["session"].is_string() || !msg.contains("seq") ||
        !msg["seq"].is_number_unsigned()) {
        return;
    }
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(impl_->mu);
        auto it = impl_->sessions.find(msg["session"].get<std::string>());
        if (it == impl_->sessions.end()) {
            return;
        }
        s = it->second;
    }
    const auto seq = msg["seq"].get<std::uint64_t>();
    std::uint64_t seen = s->latest_seq.load();
    while (seq > seen && !s->latest_seq.compare_exchange_weak(seen, seq)) {
    }
}

std::optional<std::string> Service::handle(std::string_view message) {
    const json msg = json::parse(message, nullptr, false);
    if (msg.is_discarded()) {
        return error_json("malformed", "message is not valid JSON").dump();
    }
    auto reply = Impl::guarded(&msg, [&] { return impl_->dispatch(msg); });
    if (!reply) {
        return std::nullopt;
    }
    if (msg.is_object() && msg.contains("seq") && !reply->contains("seq")) {
        (*reply)["seq"] = msg["seq"];
    }
    return reply->dump();
}

std::string Service::handle_segment_request(std::string_view body) {
    const json msg = json::parse(body, nullptr, false);
    if (msg.is_discarded()) {
        return error_json("malformed", "request body is not valid JSON").dump();
    }
    auto reply = Impl::guarded(&msg, [&]() -> std::optional<json> {
        if (!msg.is_object()) {
            throw ProtocolError("malformed", "request body must be a JSON object");
        }
        const GrayImage img = load_image_field(msg);
        TemplateParams params;
        if (msg.contains("params")) {
            params = merge_params(params, msg["params"]);
        }
        std::vector<HelperSeed> helpers;
        if (msg.contains("helpers")) {
            for (const auto& h : msg["helpers"]) {
                helpers.push_back(parse_helper(h));
            }
        }
        const SegmentationResult r = segment(img, parse_point(msg.at("seed")), params, helpers);
        json out = result_to_json(r, msg.value("want_mask", false));
        if (msg.contains("seq")) {
            out["seq"] = msg["seq"];
        }
        return out;
    });
    return reply->dump();
}

std::size_t Service::session_count() const {
    std::lock_guard lock(impl_->mu);
    return impl_->sessions.size();
}

} // namespace uscut
