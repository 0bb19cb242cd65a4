#pragma once

// HTTP and WebSocket on one port (Boost.Beast). REST requests go to
// Gateway::handle; `GET /ws?token=...` upgrades to a WebSocket that carries
// the user's Notification records as JSON text frames.

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <iostream>
#include <thread>

#include "nora/gateway/api.hpp"

namespace nora::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class WsSession;

// Routes notifications to every open socket of the recipient. Users with no
// open socket miss the push and catch up through sync.
class WsHub : public chat::PushChannel {
 public:
  void deliver(const chat::Notification& n) override;

  void attach(const std::string& user, const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(mutex_);
    sockets_[user].push_back(s);
  }

  void detach(const std::string& user, const WsSession* s) {
    std::lock_guard lock(mutex_);
    auto& v = sockets_[user];
    v.erase(std::remove_if(v.begin(), v.end(),
                           [&](const std::weak_ptr<WsSession>& w) {
                             auto p = w.lock();
                             return !p || p.get() == s;
                           }),
            v.end());
  }

  std::size_t connections(const std::string& user) const {
    std::lock_guard lock(mutex_);
    auto it = sockets_.find(user);
    return it == sockets_.end() ? 0 : it->second.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<std::weak_ptr<WsSession>>> sockets_;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, WsHub& hub, std::string user)
      : ws_(std::move(socket)), hub_(hub), user_(std::move(user)) {}

  template <class Body>
  void accept(http::request<Body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  // Queues one text frame; frames go out in order.
  void send(std::string text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    hub_.attach(user_, shared_from_this());
    read();
  }

  // Incoming frames are ignored; reading keeps control frames flowing and
  // notices the close.
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->hub_.detach(self->user_, self.get());
        return;
      }
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->hub_.detach(self->user_, self.get());
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  WsHub& hub_;
  std::string user_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

inline void WsHub::deliver(const chat::Notification& n) {
  std::vector<std::shared_ptr<WsSession>> targets;
  {
    std::lock_guard lock(mutex_);
    auto it = sockets_.find(n.recipient);
    if (it == sockets_.end()) return;
    for (auto& w : it->second) {
      if (auto s = w.lock()) targets.push_back(std::move(s));
    }
  }
  const auto text = json(n).dump();
  for (auto& s : targets) s->send(text);
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Gateway& gateway, WsHub& hub)
      : stream_(std::move(socket)), gateway_(gateway), hub_(hub) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    const auto target = std::string(req_.target());
    if (websocket::is_upgrade(req_)) return upgrade(target);

    Request r{std::string(req_.method_string()), target, req_.body(), bearer()};
    const auto res = gateway_.handle(r);
    auto out = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(res.status),
                                                                     req_.version());
    out->set(http::field::content_type, "application/json; charset=utf-8");
    out->keep_alive(req_.keep_alive());
    out->body() = res.body.dump();
    out->prepare_payload();
    http::async_write(stream_, *out, [self = shared_from_this(), out](beast::error_code wec, std::size_t) {
      if (wec || !out->keep_alive()) return self->close();
      self->read();
    });
  }

  void upgrade(const std::string& target) {
    const auto t = split_target(target);
    std::string user;
    try {
      if (t.path != "/ws") fail(ErrorKind::NotFound, "no websocket at " + t.path);
      auto token = bearer();
      if (auto it = t.query.find("token"); it != t.query.end()) token = it->second;
      user = gateway_.platform().auth().authenticate(token);
    } catch (const Error& e) {
      auto out = std::make_shared<http::response<http::string_body>>(
          static_cast<http::status>(http_status(e.kind())), req_.version());
      out->body() = error_response(e.kind(), e.what()).body.dump();
      out->prepare_payload();
      http::async_write(stream_, *out, [self = shared_from_this(), out](beast::error_code, std::size_t) {
        self->close();
      });
      return;
    }
    stream_.expires_never();
    std::make_shared<WsSession>(stream_.release_socket(), hub_, user)->accept(std::move(req_));
  }

  std::optional<std::string> bearer() const {
    auto it = req_.find(http::field::authorization);
    if (it == req_.end()) return std::nullopt;
    const auto v = std::string(it->value());
    if (v.rfind("Bearer ", 0) != 0) return std::nullopt;
    return v.substr(7);
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Gateway& gateway_;
  WsHub& hub_;
};

// Accepts connections on `port` (0 picks a free one) and serves them on
// `threads` worker threads until stop().
class Server {
 public:
  Server(Gateway& gateway, WsHub& hub, unsigned short port, unsigned threads = 2)
      : gateway_(gateway), hub_(hub), acceptor_(ioc_, tcp::endpoint(net::ip::make_address("0.0.0.0"), port)) {
    accept();
    for (unsigned i = 0; i < std::max(1u, threads); ++i) workers_.emplace_back([this] { ioc_.run(); });
  }

  ~Server() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void stop() {
    ioc_.stop();
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
  }

  void wait() {
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
  }

 private:
  void accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpSession>(std::move(socket), gateway_, hub_)->run();
      accept();
    });
  }

  Gateway& gateway_;
  WsHub& hub_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::vector<std::thread> workers_;
};

}  // namespace nora::gateway
