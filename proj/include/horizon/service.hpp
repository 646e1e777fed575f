#pragma once

#include <string>

#include "horizon/engine.hpp"

namespace httplib {
class Server;
}

namespace horizon {

// POST /api/forecast, GET /api/defaults, GET /api/health. Handlers only read
// the engine, so the server may run them on any number of threads.
void register_routes(httplib::Server& server, const Engine& engine);

struct HttpReply {
    int status;
    std::string body;
};

// The forecast endpoint without the transport: 200 with the response JSON,
// 400 for malformed requests, 422 when the forecast cannot be computed.
HttpReply handle_forecast(const Engine& engine, const std::string& body);

// Blocks until the server stops. Throws Error if the port cannot be bound.
void serve(const Engine& engine, const std::string& host, int port);

}  // namespace horizon
