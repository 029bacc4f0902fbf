#pragma once

#include "cbx/service.hpp"

#include <memory>
#include <string>

namespace cbx {

struct HttpOptions {
    std::string host = "127.0.0.1";
    int port = 8080; ///< 0 picks a free port
    std::string cors_origin; ///< empty: no CORS headers
};

/// Serves a Service over HTTP/1.1.
class HttpServer {
public:
    HttpServer(Service& service, HttpOptions options);
    ~HttpServer();

    /// Binds the listening socket; returns the bound port, or -1.
    int bind();
    /// Blocks until stop(). Call bind() first.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cbx
