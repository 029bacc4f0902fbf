#include "cbx/http_server.hpp"

#include <httplib.h>

namespace cbx {

struct HttpServer::Impl {
    Service& service;
    HttpOptions options;
    httplib::Server server;

    Impl(Service& s, HttpOptions o) : service(s), options(std::move(o)) {}

    void add_cors(httplib::Response& res) const {
        if (options.cors_origin.empty()) return;
        res.set_header("Access-Control-Allow-Origin", options.cors_origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }

    void dispatch(const httplib::Request& req, httplib::Response& res) const {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        r.content_type = req.get_header_value("Content-Type");
        const auto out = service.handle(r);
        res.status = out.status;
        add_cors(res);
        res.set_content(out.text(), "application/json");
    }
};

HttpServer::HttpServer(Service& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
    auto& svr = impl_->server;
    svr.set_payload_max_length(std::size_t{1} << 30);
    auto handler = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) { impl->dispatch(req, res); };
    svr.Get(".*", handler);
    svr.Post(".*", handler);
    svr.Put(".*", handler);
    svr.Delete(".*", handler);
    svr.Options(".*", [impl = impl_.get()](const httplib::Request&, httplib::Response& res) {
        impl->add_cors(res);
        res.status = 204;
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    auto& o = impl_->options;
    if (o.port == 0) {
        o.port = impl_->server.bind_to_any_port(o.host);
        return o.port;
    }
    return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

} // namespace cbx
