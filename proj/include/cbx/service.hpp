#pragma once

#include "cbx/error.hpp"
#include "cbx/json_io.hpp"
#include "cbx/session.hpp"

#include <map>
#include <memory>
#include <string>

namespace cbx {

struct Request {
    std::string method; ///< GET, POST, PUT, DELETE
    std::string path;   ///< e.g. /sessions/session-1/curves/roc
    std::map<std::string, std::string> query;
    std::string body;
    std::string content_type;
};

struct Response {
    int status = 200;
    Json body;

    std::string text() const { return body.is_null() ? std::string() : body.dump(); }
};

/// HTTP status for an error code: 400 parse, 404 unknown session/entity,
/// 409 conflicts, 422 everything else.
int http_status(ErrorCode code);
Json error_body(const Error& error);

/// The REST surface, independent of any transport. Thread-safe: requests
/// against one session are serialized for writes and concurrent for reads.
class Service {
public:
    Response handle(const Request& request);

    /// Creates a session directly (server preload). Returns the session id.
    std::string create_session(Dataset dataset, std::optional<std::string> id = std::nullopt);
    SessionStore& sessions() noexcept { return store_; }

private:
    SessionStore store_;
};

} // namespace cbx
