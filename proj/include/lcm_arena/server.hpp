#pragma once

// TCP transport for Session: one session per connection, NDJSON lines.
//
// POSIX sockets only. Each connection gets its own thread and its own engine
// instance; a session's messages are handled strictly in order.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "session.hpp"

namespace lcm {

class TcpServer {
public:
    /// Binds immediately; port 0 picks a free port (see port()).
    explicit TcpServer(std::uint16_t port, const std::string& host = "127.0.0.1") {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw Error(ErrorKind::Protocol, std::string("socket: ") + std::strerror(errno));
        int yes = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd_);
            throw Error(ErrorKind::Protocol, "invalid host address " + host);
        }
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 16) < 0) {
            const std::string why = std::strerror(errno);
            ::close(fd_);
            throw Error(ErrorKind::Protocol, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    ~TcpServer() {
        stop();
        std::lock_guard lock(mutex_);
        for (auto& t : workers_) {
            if (t.joinable()) t.join();
        }
        ::close(fd_);
    }

    std::uint16_t port() const { return port_; }

    void stop() { stopping_ = true; }

    /// Accepts connections until stop() is called.
    void serve_forever() {
        while (!stopping_) {
            pollfd p{fd_, POLLIN, 0};
            if (::poll(&p, 1, 100) <= 0) continue;
            const int client = ::accept(fd_, nullptr, nullptr);
            if (client < 0) continue;
            std::lock_guard lock(mutex_);
            workers_.emplace_back([this, client] { handle_connection(client); });
        }
    }

private:
    void handle_connection(int client) {
        Session session;
        std::string buffer;
        char chunk[4096];
        while (!stopping_) {
            pollfd p{client, POLLIN, 0};
            const int ready = ::poll(&p, 1, 100);
            if (ready == 0) continue;
            if (ready < 0) break;
            const ssize_t n = ::recv(client, chunk, sizeof chunk, 0);
            if (n <= 0) break;
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                const std::string reply = session.handle_line(line) + "\n";
                if (!send_all(client, reply)) {
                    ::close(client);
                    return;
                }
            }
        }
        ::close(client);
    }

    static bool send_all(int fd, const std::string& data) {
        std::size_t sent = 0;
        while (sent < data.size()) {
            const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) return false;
            sent += static_cast<std::size_t>(n);
        }
        return true;
    }

    int fd_{-1};
    std::uint16_t port_{0};
    std::atomic<bool> stopping_{false};
    std::mutex mutex_;
    std::vector<std::thread> workers_;
};

}  // namespace lcm
