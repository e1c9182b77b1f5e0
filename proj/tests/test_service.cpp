#include "doctest.h"

#include "cueforge/geometry/synthetic.hpp"
#include "cueforge/service/api.hpp"

#include "httplib.h"

#include <filesystem>
#include <fstream>
#include <thread>

using namespace cueforge;

namespace {

TableState layout(Variant v, std::uint64_t seed)
{
    EnvConfig cfg;
    cfg.variant = v;
    return reset_state(cfg, seed);
}

std::string state_body(const TableState& s) { return Json{{"state", state_to_json(s)}}.dump(); }

Json call(const Api& api, const std::string& method, const std::string& path, const std::string& body, int want)
{
    const ApiResponse r = api.handle(method, path, body);
    INFO(method, " ", path, " -> ", r.body);
    CHECK(r.status == want);
    return Json::parse(r.body);
}

// 2-ball layout whose planned direct shot was verified by simulation.
TableState verified_two_ball()
{
    for (std::uint64_t seed = 0;; ++seed) {
        const TableState s = layout(Variant::two_ball, seed);
        const auto best = best_shot(s, false);
        if (best && best->verified)
            return s;
    }
}

struct TempDir
{
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("cueforge-test-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

bool has_pocketed(const Json& events, int ball)
{
    for (const auto& e : events)
        if (e["kind"] == "pocketed" && e["ball"] == ball)
            return true;
    return false;
}

} // namespace

TEST_CASE("state and shot codecs round trip")
{
    const TableState s = layout(Variant::all_ball, 12);
    const TableState back = state_from_json(Json::parse(state_to_json(s).dump()));
    REQUIRE(back.balls.size() == s.balls.size());
    for (std::size_t i = 0; i < s.balls.size(); ++i) {
        CHECK(back.balls[i].id == s.balls[i].id);
        CHECK(back.balls[i].pos.x == s.balls[i].pos.x);
        CHECK(back.balls[i].pos.y == s.balls[i].pos.y);
        CHECK(back.balls[i].cls == s.balls[i].cls);
    }
    CHECK(back.variant == s.variant);

    CHECK(shot_from_json(shot_to_json({12345, 7})) == Shot{12345, 7});
    CHECK(shot_from_json(Json{{"alpha_deg", 90.004}, {"rho_index", 2}}) == Shot{9000, 2});
    CHECK_THROWS_AS(shot_from_json(Json{{"alpha_index", 1.5}, {"rho_index", 2}}), ParseError);
    CHECK_THROWS_AS(state_from_json(Json{{"balls", {{{"id", 0}, {"x", "a"}, {"y", 1}}}}}), ParseError);

    // class defaults from the id, variant from the classes
    const TableState inferred = state_from_json(Json::parse(R"({"balls":[{"id":8,"x":300,"y":100},{"id":0,"x":100,"y":100}]})"));
    CHECK(inferred.variant == Variant::two_ball);
    CHECK(inferred.balls[0].id == 0);
    CHECK(inferred.balls[1].cls == BallClass::black);
}

TEST_CASE("locate endpoint")
{
    SessionStore store;
    const Api api(store, 0);
    const TableState truth = layout(Variant::all_ball, 4);
    const SyntheticScene scene = make_synthetic_scene(top_down_view(640, 640), truth, 0.0, 9);
    const std::string body = serialize_detections(scene.detections);

    const auto first = api.handle("POST", "/v1/locate", body);
    REQUIRE(first.status == 200);
    CHECK(api.handle("POST", "/v1/locate", body).body == first.body);

    const Json j = Json::parse(first.body);
    CHECK(j["rmse_px"].get<double>() < 1e-6);
    CHECK(j["cm_per_px"].get<double>() == doctest::Approx(0.4071));
    REQUIRE(j["balls"].size() == truth.balls.size());
    for (const auto& b : truth.balls) {
        double best = 1e9;
        for (const auto& jb : j["balls"])
            best = std::min(best, distance(b.pos, {jb["x"].get<double>(), jb["y"].get<double>()}));
        CHECK(best < 1.0);
    }
    CHECK(j["state"]["balls"].size() == truth.balls.size());

    SUBCASE("no dots")
    {
        DetectionSet ds = scene.detections;
        std::erase_if(ds.detections, [](const Detection& d) { return d.cls == DetClass::dot; });
        const Json e = call(api, "POST", "/v1/locate", serialize_detections(ds), 422);
        CHECK(e["lines_found"] == 0);
        CHECK(e["kind"] == "line_estimation");
    }
    SUBCASE("two spurious dots")
    {
        DetectionSet ds = scene.detections;
        ds.detections.push_back({{300, 300, 6, 6}, DetClass::dot, 0.2});
        ds.detections.push_back({{350, 200, 6, 6}, DetClass::dot, 0.25});
        const Json r = call(api, "POST", "/v1/locate", serialize_detections(ds), 200);
        CHECK(r["detections_kept"] == scene.detections.detections.size());
    }
    SUBCASE("schema errors")
    {
        call(api, "POST", "/v1/locate", "{nope", 400);
        call(api, "POST", "/v1/locate", R"({"image_id":"a","width":64,"height":64,"detections":[{"x":1,"y":2,"w":3,"h":4,"class":"purple","conf":0.5}]})", 400);
        call(api, "GET", "/v1/locate", "", 405);
    }
}

TEST_CASE("session lifecycle")
{
    SessionStore store;
    const Api api(store, 0);
    const TableState s = verified_two_ball();

    const Json created = call(api, "POST", "/v1/sessions", state_body(s), 201);
    const std::string id = created["session_id"];
    const std::string base = "/v1/sessions/" + id;

    const Json sug = call(api, "POST", base + "/suggest", R"({"mirror":false})", 200);
    REQUIRE(sug["suggestion"].is_object());
    CHECK(sug["suggestion"]["verified"] == true);
    CHECK(has_pocketed(sug["suggestion"]["predicted_events"], kBlackId));

    // suggest is side-effect free
    CHECK(call(api, "GET", base, "", 200) == created);
    CHECK(call(api, "POST", base + "/suggest", R"({"mirror":false})", 200) == sug);

    const Json played = call(api, "POST", base + "/play", Json{{"shot", sug["suggestion"]["shot"]}}.dump(), 200);
    CHECK(has_pocketed(played["events"], kBlackId));
    CHECK(played["verdict"]["win"] == true);
    CHECK(played["terminated"] == true);
    CHECK(played["events"] == sug["suggestion"]["predicted_events"]);

    call(api, "POST", base + "/play", R"({"alpha_index":0,"rho_index":3})", 409);

    // editing the state reopens the session
    call(api, "PUT", base + "/state", state_body(s), 200);
    call(api, "POST", base + "/play", R"({"alpha_index":99999,"rho_index":3})", 422);
    const Json again = call(api, "POST", base + "/play", R"({"alpha_index":0,"rho_index":3})", 200);
    const Json got = call(api, "GET", base, "", 200);
    CHECK(got["history"].size() == 3);
    CHECK(got["state"] == again["state"]);

    call(api, "GET", "/v1/sessions/ffff", "", 404);
    call(api, "POST", "/v1/sessions/ffff/suggest", "{}", 404);
    call(api, "POST", "/v1/sessions", "[1,2", 400);
    call(api, "GET", "/v2/anything", "", 404);
    call(api, "DELETE", base, "", 405);
}

TEST_CASE("invalid states are rejected")
{
    SessionStore store;
    const Api api(store, 0);
    const std::string overlap = R"({"state":{"balls":[{"id":0,"x":100,"y":100},{"id":8,"x":105,"y":100}]}})";
    const Json e = call(api, "POST", "/v1/sessions", overlap, 422);
    CHECK(e["kind"] == "validation");

    const Json created = call(api, "POST", "/v1/sessions", state_body(layout(Variant::two_ball, 1)), 201);
    call(api, "PUT", "/v1/sessions/" + created["session_id"].get<std::string>() + "/state", overlap, 422);
    CHECK(store.size() == 1);
}

TEST_CASE("null suggestion contract")
{
    // no direct hitpoint on this layout, one cushion shot available
    const TableState s = layout(Variant::two_ball, 541);
    REQUIRE_FALSE(best_shot(s, false).has_value());

    SessionStore store;
    const Api api(store, 0);
    const std::string id = call(api, "POST", "/v1/sessions", state_body(s), 201)["session_id"];
    const Json off = call(api, "POST", "/v1/sessions/" + id + "/suggest", R"({"mirror":false})", 200);
    CHECK(off["suggestion"].is_null());
    CHECK(off["reason"] == "no_feasible_hitpoint");

    const Json on = call(api, "POST", "/v1/sessions/" + id + "/suggest", R"({"mirror":true})", 200);
    REQUIRE(on["suggestion"].is_object());
    CHECK(on["suggestion"]["scored"]["kick_cushions"].size() + on["suggestion"]["scored"]["bank_cushions"].size() >= 1);
}

TEST_CASE("history replays to the current state")
{
    SessionStore store;
    const TableState s = layout(Variant::all_ball, 30);
    const Session created = store.create(s);
    for (int k = 0; k < 3; ++k) {
        if (store.get(created.id).terminated)
            store.replace_state(created.id, s);
        store.play(created.id, {4500 + 9000 * k, 12});
    }
    const Session ses = store.get(created.id);
    CHECK(ses.history.size() >= 2);
    const TableState r = replay(ses.initial, ses.history);
    CHECK(state_to_json(r) == state_to_json(ses.current));
}

TEST_CASE("sessions persist across restarts")
{
    TempDir dir;
    std::string id;
    Json before;
    {
        SessionStore store(dir.path, 3);
        const Api api(store, 3);
        id = call(api, "POST", "/v1/sessions", state_body(layout(Variant::all_ball, 8)), 201)["session_id"];
        call(api, "POST", "/v1/sessions/" + id + "/play", R"({"alpha_index":4500,"rho_index":12})", 200);
        call(api, "POST", "/v1/sessions", state_body(layout(Variant::one_ball, 2)), 201);
        before = call(api, "GET", "/v1/sessions/" + id, "", 200);
    }
    {
        // a torn final line is skipped with a warning
        std::ofstream(dir.path / "sessions.jsonl", std::ios::app) << R"({"op":"play","id")";
    }
    SessionStore store(dir.path, 3);
    CHECK(store.size() == 2);
    CHECK(store.load_warnings().size() == 1);
    const Api api(store, 3);
    CHECK(call(api, "GET", "/v1/sessions/" + id, "", 200) == before);
    const std::string fresh = call(api, "POST", "/v1/sessions", state_body(layout(Variant::one_ball, 5)), 201)["session_id"];
    CHECK(fresh != id);
}

TEST_CASE("http transport")
{
    TempDir dir;
    std::ofstream(dir.path / "index.html") << "<html>board</html>";
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.ui_dir = dir.path;
    HttpService svc(cfg);
    const int port = svc.bind();
    std::thread t([&] { svc.listen(); });

    httplib::Client cli("127.0.0.1", port);
    const auto health = cli.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(Json::parse(health->body)["cm_per_px"].get<double>() == doctest::Approx(0.4071));

    const auto created = cli.Post("/v1/sessions", state_body(layout(Variant::two_ball, 2)), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = Json::parse(created->body)["session_id"];
    const auto put = cli.Put("/v1/sessions/" + id + "/state", state_body(layout(Variant::two_ball, 3)), "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    const auto missing = cli.Get("/v1/sessions/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    const auto page = cli.Get("/index.html");
    REQUIRE(page);
    CHECK(page->body == "<html>board</html>");

    svc.stop();
    t.join();
}

TEST_CASE("environment overrides")
{
    setenv("CUEFORGE_PORT", "9123", 1);
    setenv("CUEFORGE_SEED", "77", 1);
    const ServiceConfig c = config_from_env();
    CHECK(c.port == 9123);
    CHECK(c.seed == 77);
    unsetenv("CUEFORGE_PORT");
    unsetenv("CUEFORGE_SEED");
    CHECK(config_from_env().port == 8080);
}
