#include "horizon/service.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "horizon/errors.hpp"

namespace horizon {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

std::string error_body(const std::string& message, const std::string& field = {}) {
    json j{{"error", message}};
    if (!field.empty()) j["field"] = field;
    return j.dump();
}

}  // namespace

HttpReply handle_forecast(const Engine& engine, const std::string& body) {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::parse_error& e) {
        return {400, error_body(fmt::format("malformed JSON: {}", e.what()), "body")};
    }
    try {
        return {200, engine.forecast_json(request).dump()};
    } catch (const FieldError& e) {
        return {400, error_body(e.what(), e.field())};
    } catch (const InputError& e) {
        return {400, error_body(e.what())};
    } catch (const ComputeError& e) {
        return {422, error_body(e.what())};
    }
}

void register_routes(httplib::Server& server, const Engine& engine) {
    server.Post("/api/forecast", [&engine](const httplib::Request& req, httplib::Response& res) {
        const auto reply = handle_forecast(engine, req.body);
        res.status = reply.status;
        res.set_content(reply.body, kJson);
    });
    server.Get("/api/defaults", [&engine](const httplib::Request&, httplib::Response& res) {
        res.set_content(engine.defaults_json().dump(), kJson);
    });
    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", kJson);
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_body(message), kJson);
    });
}

void serve(const Engine& engine, const std::string& host, int port) {
    httplib::Server server;
    register_routes(server, engine);
    if (!server.bind_to_port(host, port)) {
        throw Error(fmt::format("cannot bind {}:{}", host, port));
    }
    server.listen_after_bind();
}

}  // namespace horizon
