#pragma once

#include "cueforge/service/session.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace cueforge {

struct ApiResponse
{
    int status = 200;
    std::string body;
};

// /v1 routes over a SessionStore, independent of the transport.
//   GET  /v1/health
//   POST /v1/locate
//   POST /v1/sessions
//   GET  /v1/sessions/{id}
//   PUT  /v1/sessions/{id}/state
//   POST /v1/sessions/{id}/suggest
//   POST /v1/sessions/{id}/play
class Api
{
  public:
    explicit Api(SessionStore& store, std::uint64_t seed = 0) : store_(store), seed_(seed) {}

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

  private:
    ApiResponse locate(const std::string& body) const;
    ApiResponse suggest(const std::string& id, const std::string& body) const;

    SessionStore& store_;
    std::uint64_t seed_;
};

// Suggestion body shared by the service and the CLI:
// {"suggestion": {...}} or {"suggestion": null, "reason": "..."}.
Json suggest_json(const TableState& state, bool mirror);

struct ServiceConfig
{
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir; // empty: sessions are not persisted
    std::filesystem::path ui_dir;   // static files served at /
    std::uint64_t seed = 0;
};

// Defaults overridden by CUEFORGE_HOST, CUEFORGE_PORT, CUEFORGE_DATA_DIR,
// CUEFORGE_UI_DIR and CUEFORGE_SEED.
ServiceConfig config_from_env(ServiceConfig base = {});

class HttpService
{
  public:
    explicit HttpService(ServiceConfig config);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    // Binds the socket (port 0 picks a free one) and returns the bound port.
    int bind();
    // Serves until stop(); call bind() first.
    void listen();
    void stop();
    const SessionStore& store() const { return store_; }

  private:
    struct Impl;
    ServiceConfig config_;
    SessionStore store_;
    Api api_;
    std::unique_ptr<Impl> impl_;
};

} // namespace cueforge
