#include "groupfeed/server/server.hpp"

#include <spdlog/spdlog.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <map>

#include "groupfeed/server/hub.hpp"

namespace groupfeed::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using boost::system::error_code;

namespace {

// A client that stops reading is dropped once this much output is queued.
constexpr std::size_t kMaxQueuedBytes = 16 * 1024 * 1024;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(Hub& hub, std::function<Millis()> clock) : hub_(hub), clock_(std::move(clock)) {}
  virtual ~Connection() = default;

  void attach() {
    std::weak_ptr<Connection> weak = shared_from_this();
    id_ = hub_.connect(Endpoint{[weak](std::string line) {
                                  if (auto self = weak.lock()) self->deliver(std::move(line));
                                },
                                [weak] {
                                  if (auto self = weak.lock()) self->close();
                                }});
    start();
  }

  ConnectionId id() const noexcept { return id_; }
  virtual void close() = 0;

 protected:
  virtual void start() = 0;
  virtual void deliver(std::string line) = 0;

  void dispatch(std::string_view text) {
    while (!text.empty() && !detached_) {
      const auto nl = text.find('\n');
      auto line = text.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) hub_.receive(id_, line, clock_());
      if (nl == std::string_view::npos) break;
      text.remove_prefix(nl + 1);
    }
  }

  void detach(const char* why) {
    if (detached_) return;
    detached_ = true;
    spdlog::debug("connection {} closed: {}", id_, why);
    hub_.disconnect(id_, clock_());
  }

  bool detached() const noexcept { return detached_; }

  void reject_oversized(std::size_t limit) {
    const std::string msg = "message exceeds " + std::to_string(limit) + " bytes";
    deliver(session::encode(session::Error{std::string(session::codes::kPayloadTooLarge), msg}));
  }

  Hub& hub_;
  std::function<Millis()> clock_;
  ConnectionId id_ = 0;
  bool detached_ = false;
};

class TcpConnection final : public Connection {
 public:
  TcpConnection(tcp::socket socket, Hub& hub, std::function<Millis()> clock, std::size_t max_line)
      : Connection(hub, std::move(clock)), socket_(std::move(socket)), input_(max_line + 1), max_line_(max_line) {}

  void close() override {
    closing_ = true;
    if (!writing_) shutdown();
  }

 private:
  void start() override { read(); }

  void read() {
    asio::async_read_until(socket_, input_, '\n', [self = shared(), this](error_code ec, std::size_t n) {
      if (ec == asio::error::not_found) {
        reject_oversized(max_line_);
        detach("oversized line");
        close();
        return;
      }
      if (ec) {
        detach(ec == asio::error::eof ? "eof" : "read error");
        shutdown();
        return;
      }
      const auto data = input_.data();
      std::string line(asio::buffers_begin(data), asio::buffers_begin(data) + static_cast<std::ptrdiff_t>(n));
      input_.consume(n);
      dispatch(line);
      if (!detached() && !closing_) read();
    });
  }

  void deliver(std::string line) override {
    if (closing_ || !socket_.is_open()) return;
    queued_ += line.size() + 1;
    if (queued_ > kMaxQueuedBytes) {
      spdlog::warn("connection {} is not reading; dropping it", id_);
      detach("slow consumer");
      shutdown();
      return;
    }
    line += '\n';
    out_.push_back(std::move(line));
    if (!writing_) write();
  }

  void write() {
    writing_ = true;
    asio::async_write(socket_, asio::buffer(out_.front()), [self = shared(), this](error_code ec, std::size_t) {
      queued_ -= out_.front().size();
      out_.pop_front();
      if (ec) {
        writing_ = false;
        detach("write error");
        shutdown();
        return;
      }
      if (!out_.empty()) return write();
      writing_ = false;
      if (closing_) shutdown();
    });
  }

  void shutdown() {
    if (!socket_.is_open()) return;
    error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  std::shared_ptr<TcpConnection> shared() { return std::static_pointer_cast<TcpConnection>(shared_from_this()); }

  tcp::socket socket_;
  asio::streambuf input_;
  std::size_t max_line_;
  std::deque<std::string> out_;
  std::size_t queued_ = 0;
  bool writing_ = false;
  bool closing_ = false;
};

class WsConnection final : public Connection {
 public:
  WsConnection(tcp::socket socket, Hub& hub, std::function<Millis()> clock, std::size_t max_message)
      : Connection(hub, std::move(clock)), ws_(std::move(socket)), max_message_(max_message) {}

  void close() override {
    closing_ = true;
    if (!writing_ && accepted_) finish();
  }

 private:
  void start() override {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(max_message_);
    ws_.async_accept([self = shared(), this](error_code ec) {
      if (ec) {
        detach("handshake failed");
        return;
      }
      accepted_ = true;
      if (!out_.empty()) write();
      if (closing_ && !writing_) return finish();
      read();
    });
  }

  void read() {
    ws_.async_read(input_, [self = shared(), this](error_code ec, std::size_t) {
      // an oversized message makes the stream close itself with code 1009
      if (ec) {
        detach(ec == websocket::error::closed ? "closed" : "read error");
        return;
      }
      const std::string text = beast::buffers_to_string(input_.data());
      input_.consume(input_.size());
      dispatch(text);
      if (!detached() && !closing_) read();
    });
  }

  void deliver(std::string line) override {
    if (closing_ || finished_) return;
    queued_ += line.size();
    if (queued_ > kMaxQueuedBytes) {
      spdlog::warn("connection {} is not reading; dropping it", id_);
      detach("slow consumer");
      beast::get_lowest_layer(ws_).close();
      finished_ = true;
      return;
    }
    out_.push_back(std::move(line));
    if (accepted_ && !writing_) write();
  }

  void write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(out_.front()), [self = shared(), this](error_code ec, std::size_t) {
      queued_ -= out_.front().size();
      out_.pop_front();
      if (ec) {
        writing_ = false;
        detach("write error");
        return;
      }
      if (!out_.empty()) return write();
      writing_ = false;
      if (closing_) finish();
    });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    ws_.async_close(websocket::close_code::normal, [self = shared(), this](error_code) { detach("closed by server"); });
  }

  std::shared_ptr<WsConnection> shared() { return std::static_pointer_cast<WsConnection>(shared_from_this()); }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer input_;
  std::size_t max_message_;
  std::deque<std::string> out_;
  std::size_t queued_ = 0;
  bool accepted_ = false;
  bool writing_ = false;
  bool closing_ = false;
  bool finished_ = false;
};

}  // namespace

struct Server::Impl {
  Impl(ServerConfig c, std::shared_ptr<LogStore> store)
      : cfg(std::move(c)),
        hub(cfg, std::move(store)),
        tcp_acceptor(io),
        ws_acceptor(io),
        ticker(io),
        grace(io),
        signals(io),
        origin(std::chrono::steady_clock::now()) {}

  Millis now() const {
    return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - origin);
  }

  std::size_t max_message() const { return cfg.max_signal_bytes + 64 * 1024; }

  void open(tcp::acceptor& acc, std::uint16_t port) {
    const tcp::endpoint ep(asio::ip::make_address(cfg.bind_address), port);
    acc.open(ep.protocol());
    acc.set_option(asio::socket_base::reuse_address(true));
    acc.bind(ep);
    acc.listen();
  }

  template <class Conn>
  void accept(tcp::acceptor& acc) {
    acc.async_accept([this, &acc](error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!stopping && acc.is_open()) accept<Conn>(acc);
        return;
      }
      socket.set_option(tcp::no_delay(true));
      auto conn = std::make_shared<Conn>(std::move(socket), hub, [this] { return now(); }, max_message());
      conn->attach();
      connections[conn->id()] = conn;
      sweep();
      if (!stopping) accept<Conn>(acc);
    });
  }

  void tick() {
    const auto period = Millis(std::max<std::uint32_t>(cfg.engine.tick_duration_ms / 4, 5));
    ticker.expires_after(period);
    ticker.async_wait([this](error_code ec) {
      if (ec || stopping) return;
      hub.advance(now());
      tick();
    });
  }

  void sweep() {
    std::erase_if(connections, [](const auto& kv) { return kv.second.expired(); });
  }

  void shutdown() {
    if (stopping) return;
    stopping = true;
    spdlog::info("shutting down");
    hub.stop_all();
    error_code ignored;
    tcp_acceptor.close(ignored);
    ws_acceptor.close(ignored);
    ticker.cancel();
    signals.cancel();
    for (auto& [id, weak] : connections)
      if (auto c = weak.lock()) c->close();
    drain(std::chrono::steady_clock::now() + std::chrono::seconds(2));
  }

  // Lets queued output reach clients, but never waits past `deadline`.
  void drain(std::chrono::steady_clock::time_point deadline) {
    sweep();
    if (connections.empty() || std::chrono::steady_clock::now() >= deadline) {
      io.stop();
      return;
    }
    grace.expires_after(Millis(10));
    grace.async_wait([this, deadline](error_code ec) {
      if (!ec) drain(deadline);
    });
  }

  ServerConfig cfg;
  asio::io_context io{1};
  Hub hub;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor ws_acceptor;
  asio::steady_timer ticker;
  asio::steady_timer grace;
  asio::signal_set signals;
  std::chrono::steady_clock::time_point origin;
  std::map<ConnectionId, std::weak_ptr<Connection>> connections;
  bool stopping = false;
  bool listening = false;
};

Server::Server(ServerConfig cfg, std::shared_ptr<LogStore> store)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(store))) {}

Server::~Server() = default;

void Server::listen() {
  auto& d = *impl_;
  if (d.listening) return;
  d.open(d.tcp_acceptor, d.cfg.port);
  if (d.cfg.websocket) d.open(d.ws_acceptor, d.cfg.ws_port);
  d.listening = true;
  spdlog::info("listening on {}:{} (tcp){}", d.cfg.bind_address, tcp_port(),
               d.cfg.websocket ? fmt::format(" and :{} (websocket)", ws_port()) : std::string());
}

void Server::run(bool handle_signals) {
  auto& d = *impl_;
  listen();
  d.accept<TcpConnection>(d.tcp_acceptor);
  if (d.ws_acceptor.is_open()) d.accept<WsConnection>(d.ws_acceptor);
  d.tick();
  if (handle_signals) {
    d.signals.add(SIGINT);
    d.signals.add(SIGTERM);
    d.signals.async_wait([&d](error_code ec, int sig) {
      if (ec) return;
      spdlog::info("received signal {}", sig);
      d.shutdown();
    });
  }
  d.io.run();
}

void Server::stop() {
  asio::post(impl_->io, [this] { impl_->shutdown(); });
}

std::uint16_t Server::tcp_port() const {
  return impl_->tcp_acceptor.is_open() ? impl_->tcp_acceptor.local_endpoint().port() : 0;
}

std::uint16_t Server::ws_port() const {
  return impl_->ws_acceptor.is_open() ? impl_->ws_acceptor.local_endpoint().port() : 0;
}

const Hub& Server::hub() const { return impl_->hub; }

std::size_t Server::max_message_bytes() const { return impl_->max_message(); }

}  // namespace groupfeed::server
