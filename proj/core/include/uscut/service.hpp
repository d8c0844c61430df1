#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uscut/image.hpp"

namespace uscut {

/// Runs of set pixels over row-major indices, as [start, length] pairs.
using MaskRle = std::vector<std::pair<std::size_t, std::size_t>>;

MaskRle mask_to_rle(const BinaryMask& mask);
BinaryMask mask_from_rle(const MaskRle& rle, int width, int height);

struct ServiceOptions {
    /// Invoked right before a segment request is computed. Lets tests inject
    /// delays; leave empty in production.
    std::function<void(std::string_view session, std::uint64_t seq)> before_segment;
};

/// Session store and JSON message handler behind the interactive endpoint.
///
/// Messages are JSON objects with a "type" field: load, set_params,
/// segment, add_helper, clear_helpers, commit, metrics, close. Replies are
/// JSON text; failures come back as {"type":"error","code":..,"detail":..}.
///
/// Segment requests are latest-wins per session: a transport calls
/// announce() as soon as a message arrives, and handle() drops the reply of
/// any segment whose seq has been overtaken, so delivered seqs only grow.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Records the arrival of a message. Cheap; call from the receive path.
    void announce(std::string_view message);

    /// Processes one message. Returns nullopt when a stale segment reply is
    /// suppressed.
    std::optional<std::string> handle(std::string_view message);

    /// One-shot segmentation for POST /segment: image by path or base64,
    /// seed, optional params, helpers and want_mask. Always replies.
    std::string handle_segment_request(std::string_view body);

    std::size_t session_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace uscut
