// HTTP server for the evaluation service. Flags may also come from CBX_*
// environment variables.
#include "cbx/error.hpp"
#include "cbx/http_server.hpp"
#include "cbx/ingest.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

cbx::HttpServer* running = nullptr;

void on_signal(int) {
    if (running) running->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classifier evaluation service"};
    cbx::HttpOptions options;
    std::string data;
    bool normalize = false;
    std::string session_id = "default";
    app.add_option("--port", options.port, "Port to listen on (0 picks one)")->envname("CBX_PORT");
    app.add_option("--host", options.host, "Address to bind")->envname("CBX_HOST");
    app.add_option("--data", data, "Ingest file (JSON or CSV) to preload as a session")->envname("CBX_DATA");
    app.add_option("--session-id", session_id, "Id of the preloaded session")->envname("CBX_SESSION_ID");
    app.add_flag("--normalize", normalize, "Min-max normalize out-of-range scores in --data")->envname("CBX_NORMALIZE");
    app.add_option("--cors-origin", options.cors_origin, "Value for Access-Control-Allow-Origin")
        ->envname("CBX_CORS_ORIGIN");
    CLI11_PARSE(app, argc, argv);

    cbx::Service service;
    if (!data.empty()) {
        std::ifstream in(data, std::ios::binary);
        if (!in) {
            std::cerr << "cannot read " << data << "\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        cbx::LoadOptions load;
        load.normalize = normalize;
        load.provenance = data;
        try {
            auto result = cbx::load_dataset(buf.str(), cbx::IngestFormat::Auto, load);
            for (const auto& w : result.report.warnings) std::cerr << "warning " << w.code << ": " << w.message << "\n";
            if (!result.report.ok()) {
                for (const auto& e : result.report.errors) std::cerr << "error " << e.code << ": " << e.message << "\n";
                return 1;
            }
            service.create_session(std::move(*result.dataset), session_id);
        } catch (const cbx::Error& e) {
            std::cerr << cbx::code_name(e.code()) << ": " << e.what() << "\n";
            return 1;
        }
    }

    cbx::HttpServer server(service, options);
    const int port = server.bind();
    if (port < 0) {
        std::cerr << "cannot bind " << options.host << ":" << options.port << "\n";
        return 1;
    }
    running = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << options.host << ":" << port;
    if (!data.empty()) std::cout << " (session '" << session_id << "')";
    std::cout << std::endl;
    server.listen();
    return 0;
}
