#include "cueforge/service/api.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/ingest/ingest.hpp"

#include "httplib.h"

#include <cstdlib>
#include <sstream>

namespace cueforge {

namespace {

ApiResponse reply(int status, const Json& j) { return {status, j.dump()}; }

ApiResponse fail(int status, const std::exception& e) { return reply(status, error_json(e)); }

ApiResponse fail(int status, const std::string& msg) { return fail(status, Error(msg)); }

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '/'))
        if (!part.empty())
            parts.push_back(part);
    return parts;
}

Json parse_body(const std::string& body)
{
    try {
        return Json::parse(body.empty() ? "{}" : body);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

// Accepts {"<key>": {...}} or the object itself.
const Json& unwrap(const Json& j, const char* key)
{
    if (j.is_object()) {
        const auto it = j.find(key);
        if (it != j.end())
            return *it;
    }
    return j;
}

TableState state_body(const std::string& body) { return state_from_json(unwrap(parse_body(body), "state")); }

} // namespace

Json suggest_json(const TableState& state, bool mirror)
{
    Json j;
    j["mirror"] = mirror;
    if (!state.cue_live()) {
        j["suggestion"] = nullptr;
        j["reason"] = "cue_not_on_table";
        return j;
    }
    const auto s = best_shot(state, mirror);
    if (!s) {
        j["suggestion"] = nullptr;
        j["reason"] = "no_feasible_hitpoint";
        return j;
    }
    j["suggestion"] = suggestion_to_json(*s);
    return j;
}

ApiResponse Api::handle(const std::string& method, const std::string& path, const std::string& body) const
{
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "v1")
        return fail(404, "no route for " + path);
    const auto method_not_allowed = [&] { return fail(405, method + " not allowed on " + path); };

    try {
        if (parts.size() == 2 && parts[1] == "health") {
            if (method != "GET")
                return method_not_allowed();
            Json j;
            j["status"] = "ok";
            j["cm_per_px"] = kCmPerPx;
            j["table"] = {{"width", default_table().width}, {"height", default_table().height},
                          {"ball_radius", default_table().ball_radius},
                          {"pocket_radius", default_table().pocket_radius}};
            return reply(200, j);
        }
        if (parts.size() == 2 && parts[1] == "locate")
            return method == "POST" ? locate(body) : method_not_allowed();
        if (parts[1] != "sessions")
            return fail(404, "no route for " + path);

        if (parts.size() == 2) {
            if (method != "POST")
                return method_not_allowed();
            const TableState state = state_body(body);
            return reply(201, session_to_json(store_.create(state)));
        }
        const std::string& id = parts[2];
        if (parts.size() == 3) {
            if (method != "GET")
                return method_not_allowed();
            return reply(200, session_to_json(store_.get(id)));
        }
        if (parts.size() != 4)
            return fail(404, "no route for " + path);
        const std::string& action = parts[3];
        if (action == "suggest")
            return method == "POST" ? suggest(id, body) : method_not_allowed();
        if (action == "play") {
            if (method != "POST")
                return method_not_allowed();
            const Shot shot = shot_from_json(unwrap(parse_body(body), "shot"));
            Json j = step_to_json(store_.play(id, shot));
            j["session_id"] = id;
            return reply(200, j);
        }
        if (action == "state") {
            if (method != "PUT")
                return method_not_allowed();
            const TableState state = state_body(body);
            return reply(200, session_to_json(store_.replace_state(id, state)));
        }
        return fail(404, "no route for " + path);
    } catch (const NotFound& e) {
        return fail(404, e);
    } catch (const Conflict& e) {
        return fail(409, e);
    } catch (const ParseError& e) {
        return fail(400, e);
    } catch (const ValidationError& e) {
        return fail(422, e);
    } catch (const ActionError& e) {
        return fail(422, e);
    } catch (const std::exception& e) {
        return fail(500, e);
    }
}

ApiResponse Api::locate(const std::string& body) const
{
    DetectionSet ds;
    try {
        ds = parse_detections(body);
    } catch (const Error& e) {
        return fail(400, e);
    }
    try {
        LocateOptions opt;
        opt.seed = seed_;
        const LocateResult r = cueforge::locate(ds, default_template(), opt);
        Json j = locate_to_json(r);
        try {
            j["state"] = state_to_json(located_state(r, default_table()));
        } catch (const ValidationError& e) {
            j["state"] = nullptr;
            j["state_error"] = e.what();
        }
        return reply(200, j);
    } catch (const GeometryError& e) {
        return fail(422, e);
    }
}

ApiResponse Api::suggest(const std::string& id, const std::string& body) const
{
    const Json req = parse_body(body);
    bool mirror = true;
    if (req.is_object() && req.contains("mirror")) {
        if (!req["mirror"].is_boolean())
            throw ParseError("field 'mirror' must be a boolean");
        mirror = req["mirror"].get<bool>();
    }
    // planned on a copy; the session is never touched
    Json j = suggest_json(store_.snapshot(id), mirror);
    j["session_id"] = id;
    return reply(200, j);
}

ServiceConfig config_from_env(ServiceConfig c)
{
    if (const char* v = std::getenv("CUEFORGE_HOST"))
        c.host = v;
    if (const char* v = std::getenv("CUEFORGE_PORT"))
        c.port = std::stoi(v);
    if (const char* v = std::getenv("CUEFORGE_DATA_DIR"))
        c.data_dir = v;
    if (const char* v = std::getenv("CUEFORGE_UI_DIR"))
        c.ui_dir = v;
    if (const char* v = std::getenv("CUEFORGE_SEED"))
        c.seed = std::stoull(v);
    return c;
}

struct HttpService::Impl
{
    httplib::Server server;
};

HttpService::HttpService(ServiceConfig config)
    : config_(std::move(config)), store_(config_.data_dir, config_.seed), api_(store_, config_.seed),
      impl_(std::make_unique<Impl>())
{
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const ApiResponse r = api_.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    const std::string pattern = R"(/v1/.*)";
    impl_->server.Get(pattern, handler);
    impl_->server.Post(pattern, handler);
    impl_->server.Put(pattern, handler);
    impl_->server.Delete(pattern, handler);
    if (!config_.ui_dir.empty() && !impl_->server.set_mount_point("/", config_.ui_dir.string()))
        throw Error("UI directory not found: " + config_.ui_dir.string());
}

HttpService::~HttpService() { stop(); }

int HttpService::bind()
{
    if (config_.port == 0) {
        const int port = impl_->server.bind_to_any_port(config_.host);
        if (port < 0)
            throw Error("cannot bind " + config_.host);
        return port;
    }
    if (!impl_->server.bind_to_port(config_.host, config_.port))
        throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
    return config_.port;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }

void HttpService::stop()
{
    if (impl_)
        impl_->server.stop();
}

} // namespace cueforge
