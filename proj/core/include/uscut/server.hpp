#pragma once

#include <memory>
#include <string>

#include "uscut/service.hpp"

namespace uscut {

/// Localhost companion endpoint. A WebSocket upgrade on any path carries
/// one protocol message per frame; POST /segment takes a one-shot request;
/// GET /health answers "ok".
///
/// Messages of one connection are handled in arrival order on a compute
/// pool while the socket keeps reading, so newer hovers can overtake (and
/// suppress) older in-flight segmentations.
class Server {
public:
    Server(Service& service, std::string host, unsigned short port, int compute_threads = 2);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts serving in background threads. Port 0 picks a free port.
    void start();
    void stop();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();

    unsigned short port() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace uscut
