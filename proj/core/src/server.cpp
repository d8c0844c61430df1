#include "uscut/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <thread>

#include "uscut/error.hpp"

namespace uscut {
namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

bool is_error_reply(const std::string& body) {
    return body.find("\"type\":\"error\"") != std::string::npos;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, Service& service, net::thread_pool& pool)
        : ws_(std::move(socket)), service_(service), compute_(net::make_strand(pool)) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.text(true);
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) {
            return;
        }
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            return;
        }
        std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        service_.announce(text);
        net::post(compute_, [self = shared_from_this(), text = std::move(text)] {
            auto reply = self->service_.handle(text);
            if (reply) {
                net::post(self->ws_.get_executor(),
                          [self, r = std::move(*reply)]() mutable { self->send(std::move(r)); });
            }
        });
        do_read();
    }

    void send(std::string msg) {
        outbox_.push_back(std::move(msg));
        if (outbox_.size() == 1) {
            do_write();
        }
    }

    void do_write() {
        ws_.async_write(net::buffer(outbox_.front()),
                        beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            outbox_.clear();
            return;
        }
        outbox_.pop_front();
        if (!outbox_.empty()) {
            do_write();
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    Service& service_;
    net::strand<net::thread_pool::executor_type> compute_;
    std::deque<std::string> outbox_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Service& service, net::thread_pool& pool)
        : stream_(std::move(socket)), service_(service), pool_(pool) {}

    void run() {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
    }

private:
    void do_read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(60));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), service_, pool_)->run(std::move(req_));
            return;
        }
        if (req_.method() == http::verb::post && req_.target() == "/segment") {
            net::post(pool_, [self = shared_from_this()] {
                std::string body = self->service_.handle_segment_request(self->req_.body());
                net::post(self->stream_.get_executor(), [self, body = std::move(body)]() mutable {
                    const auto status = is_error_reply(body) ? http::status::bad_request : http::status::ok;
                    self->respond(status, "application/json", std::move(body));
                });
            });
            return;
        }
        if (req_.method() == http::verb::get && req_.target() == "/health") {
            respond(http::status::ok, "text/plain", "ok\n");
            return;
        }
        respond(http::status::not_found, "text/plain", "not found\n");
    }

    void respond(http::status status, const char* content_type, std::string body) {
        res_ = {};
        res_.result(status);
        res_.version(req_.version());
        res_.set(http::field::server, "uscut");
        res_.set(http::field::content_type, content_type);
        res_.keep_alive(req_.keep_alive());
        res_.body() = std::move(body);
        res_.prepare_payload();
        http::async_write(stream_, res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            return;
        }
        if (!res_.keep_alive()) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        do_read();
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    http::response<http::string_body> res_;
    Service& service_;
    net::thread_pool& pool_;
};

} // namespace

struct Server::Impl {
    Service& service;
    std::string host;
    unsigned short requested_port;
    // pool outlives ioc: connection handlers still queued in ioc own
    // strands that point into the pool.
    net::thread_pool pool;
    net::io_context ioc{1};
    tcp::acceptor acceptor{net::make_strand(ioc)};
    std::thread io_thread;
    unsigned short bound_port = 0;

    std::mutex mu;
    std::condition_variable cv;
    bool stopped = false;

    Impl(Service& s, std::string h, unsigned short p, int threads)
        : service(s), host(std::move(h)), requested_port(p), pool(static_cast<std::size_t>(std::max(1, threads))) {}

    void do_accept() {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                if (ec == net::error::operation_aborted) {
                    return;
                }
            } else {
                std::make_shared<HttpSession>(std::move(socket), service, pool)->run();
            }
            do_accept();
        });
    }
};

Server::Server(Service& service, std::string host, unsigned short port, int compute_threads)
    : impl_(std::make_unique<Impl>(service, std::move(host), port, compute_threads)) {}

Server::~Server() {
    stop();
}

void Server::start() {
    beast::error_code ec;
    const auto address = net::ip::make_address(impl_->host, ec);
    if (ec) {
        throw InvalidArgument("invalid listen address '" + impl_->host + "'");
    }
    const tcp::endpoint endpoint(address, impl_->requested_port);
    auto& acc = impl_->acceptor;
    acc.open(endpoint.protocol(), ec);
    if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acc.bind(endpoint, ec);
    if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
        throw IoError("cannot listen on " + impl_->host + ":" + std::to_string(impl_->requested_port) + ": " +
                      ec.message());
    }
    impl_->bound_port = acc.local_endpoint().port();
    impl_->do_accept();
    impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->stopped) {
            return;
        }
        impl_->stopped = true;
    }
    impl_->ioc.stop();
    if (impl_->io_thread.joinable()) {
        impl_->io_thread.join();
    }
    impl_->pool.join();
    impl_->cv.notify_all();
}

void Server::wait() {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

unsigned short Server::port() const noexcept {
    return impl_->bound_port;
}

} // namespace uscut
