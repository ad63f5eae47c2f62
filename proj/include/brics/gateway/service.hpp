#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "brics/error.hpp"
#include "brics/session.hpp"
#include "brics/viewmodel.hpp"

namespace httplib {
class Server;
}

namespace brics::gateway {

/// HTTP status for a module error: 400, 404, 409 or 422.
int http_status(ErrorCode code) noexcept;

/// {"status", "code", "message"} as sent on every failed request.
std::string api_error_body(int status, ErrorCode code, const std::string& message);

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Request handling without the network: every endpoint except the event
/// stream is served by handle(), which the HTTP layer forwards to.
class Service {
public:
    explicit Service(std::vector<StructureGrammar> grammars, Palette palette = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    ApiResponse handle(const ApiRequest& request);

    SessionStore& store() noexcept { return store_; }

    /// Binds to host:port (port 0 picks a free one) and returns the port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    ApiResponse route(const ApiRequest& request);
    void install_routes();

    SessionStore store_;
    Palette palette_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<bool> stopping_{false};
};

} // namespace brics::gateway
