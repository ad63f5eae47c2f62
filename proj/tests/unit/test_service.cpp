#include "doctest.h"

#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "brics/gateway/service.hpp"
#include "fixtures.hpp"
#include "render_check.hpp"

using namespace brics;
using namespace brics::gateway;
using nlohmann::json;

namespace {

ApiResponse call(Service& svc, const std::string& method, const std::string& path, const json& body = nullptr,
                 std::map<std::string, std::string> query = {}) {
    return svc.handle({method, path, std::move(query), body.is_null() ? "" : body.dump()});
}

std::string create(Service& svc, const std::string& text, const std::string& grammar = "c") {
    auto res = call(svc, "POST", "/sessions", {{"text", text}, {"grammar", grammar}});
    REQUIRE(res.status == 201);
    return json::parse(res.body).at("session_id").get<std::string>();
}

json error_of(const ApiResponse& res) { return json::parse(res.body); }

} // namespace

TEST_SUITE("service") {

TEST_CASE("status codes for module errors") {
    CHECK(http_status(ErrorCode::bad_request) == 400);
    CHECK(http_status(ErrorCode::not_found) == 404);
    CHECK(http_status(ErrorCode::stale) == 409);
    for (auto c : {ErrorCode::range, ErrorCode::multi_output, ErrorCode::name_taken, ErrorCode::encoding,
                   ErrorCode::boundary, ErrorCode::unknown_grammar, ErrorCode::no_method}) {
        CHECK(http_status(c) == 422);
    }
    auto body = json::parse(api_error_body(409, ErrorCode::stale, "old"));
    CHECK(body == json{{"status", 409}, {"code", "E_STALE"}, {"message", "old"}});
}

TEST_CASE("creating a session returns version 0 with its tree") {
    Service svc(builtin_grammars());
    auto res = call(svc, "POST", "/sessions", {{"text", fixtures::kSample}, {"grammar", "c"}});
    REQUIRE(res.status == 201);
    auto body = json::parse(res.body);
    CHECK(body.at("version") == 0);
    CHECK(body.at("tree").size() == 1);
    CHECK(body.at("tree")[0].at("children").size() == 1);
    CHECK(body.at("diagnostics").empty());
    CHECK(body.contains("session_id"));

    auto got = json::parse(call(svc, "GET", "/sessions/" + body.at("session_id").get<std::string>()).body);
    CHECK(got.at("text") == fixtures::kSample);
    CHECK(got.at("digest") == body.at("digest"));
}

TEST_CASE("bad session requests") {
    Service svc(builtin_grammars());
    CHECK(call(svc, "POST", "/sessions", {{"text", "x"}, {"grammar", "cobol"}}).status == 422);
    CHECK(error_of(call(svc, "POST", "/sessions", {{"text", "x"}, {"grammar", "cobol"}})).at("code") == "E_UNKNOWN_GRAMMAR");
    CHECK(call(svc, "POST", "/sessions", {{"text", 3}, {"grammar", "c"}}).status == 400);
    CHECK(svc.handle({"POST", "/sessions", {}, "not json"}).status == 400);
    CHECK(call(svc, "GET", "/sessions/s99").status == 404);
    CHECK(call(svc, "GET", "/nowhere").status == 404);
    CHECK(error_of(call(svc, "GET", "/nowhere")).at("code") == "E_NOT_FOUND");
    CHECK(svc.handle({"POST", "/sessions", {}, "{\"text\": \"\xff\", \"grammar\": \"c\"}"}).status == 400);
}

TEST_CASE("edits move the version and stale edits are refused") {
    Service svc(builtin_grammars());
    const auto id = create(svc, fixtures::kSample);
    auto ok = call(svc, "POST", "/sessions/" + id + "/edits", {{"start_byte", 0}, {"end_byte", 0}, {"text", "// x\n"}, {"base_version", 0}});
    REQUIRE(ok.status == 200);
    CHECK(json::parse(ok.body).at("version") == 1);
    auto stale = call(svc, "POST", "/sessions/" + id + "/edits", {{"start_byte", 0}, {"end_byte", 0}, {"text", ""}, {"base_version", 0}});
    CHECK(stale.status == 409);
    CHECK(error_of(stale).at("code") == "E_STALE");
    CHECK(error_of(stale).at("status") == 409);
    auto range = call(svc, "POST", "/sessions/" + id + "/edits", {{"start_byte", 0}, {"end_byte", 999}, {"text", ""}, {"base_version", 1}});
    CHECK(range.status == 422);
    CHECK(error_of(range).at("code") == "E_RANGE");
    auto negative = call(svc, "POST", "/sessions/" + id + "/edits", {{"start_byte", -1}, {"end_byte", 0}, {"text", ""}, {"base_version", 1}});
    CHECK(negative.status == 400);
}

TEST_CASE("rects and activity") {
    Service svc(builtin_grammars());
    const auto id = create(svc, "#ifdef A\nint a;\n#else\nint b;\n#endif\n");
    auto off = json::parse(call(svc, "GET", "/sessions/" + id + "/rects").body);
    CHECK(off.at("rects").size() == 2);
    CHECK(off.at("rects")[0].at("active") == false);
    CHECK(off.at("activity").at("active").at("0") == false);
    auto on = json::parse(call(svc, "GET", "/sessions/" + id + "/rects", nullptr, {{"defines", "A,B"}}).body);
    CHECK(on.at("rects")[0].at("active") == true);
    CHECK(on.at("rects")[1].at("active") == false);
}

TEST_CASE("overview") {
    Service svc(builtin_grammars());
    const auto id = create(svc, fixtures::kSample);
    auto res = call(svc, "GET", "/sessions/" + id + "/overview", nullptr,
                    {{"w", "200"}, {"h", "100"}, {"g", "1"}, {"from", "1"}, {"to", "5"}, {"errors", "3"}});
    REQUIRE(res.status == 200);
    auto m = json::parse(res.body);
    CHECK(m.at("rects").size() == 2);
    CHECK(m.at("doc_cols") == 15);
    CHECK(m.at("error_lines").size() == 1);
    CHECK(m.at("version") == 0);
    CHECK(call(svc, "GET", "/sessions/" + id + "/overview", nullptr, {{"h", "100"}}).status == 400);
    CHECK(call(svc, "GET", "/sessions/" + id + "/overview", nullptr, {{"w", "x"}, {"h", "100"}}).status == 400);
    auto range = call(svc, "GET", "/sessions/" + id + "/overview", nullptr, {{"w", "200"}, {"h", "100"}, {"to", "100"}});
    CHECK(range.status == 422);
    CHECK(error_of(range).at("code") == "E_RANGE");
}

TEST_CASE("extract applies the rewrite as a new version") {
    Service svc(builtin_grammars());
    const auto id = create(svc, "int calc() {\n    int a = 1;\n    int b = 2;\n    if (a > 0) {\n        b = a + 1;\n    }\n    return b;\n}\n");
    auto res = call(svc, "POST", "/sessions/" + id + "/refactor/extract", {{"block_id", 1}, {"name", "bump"}});
    REQUIRE(res.status == 200);
    auto body = json::parse(res.body);
    CHECK(body.at("version") == 1);
    CHECK(body.at("new_source").get<std::string>().find("b = bump(a, b);") != std::string::npos);
    CHECK(body.at("dependencies").at("inputs") == json{"a", "b"});
    auto snap = json::parse(call(svc, "GET", "/sessions/" + id).body);
    CHECK(snap.at("text") == body.at("new_source"));
    CHECK(snap.at("tree").size() == 2);

    auto taken = call(svc, "POST", "/sessions/" + id + "/refactor/extract", {{"block_id", 0}, {"name", "bump"}});
    CHECK(taken.status == 422);
    CHECK(error_of(taken).at("code") == "E_NO_METHOD");
    auto name = call(svc, "POST", "/sessions/" + id + "/refactor/extract", {{"block_id", 2}, {"name", "calc"}});
    CHECK(error_of(name).at("code") == "E_NAME_TAKEN");
    CHECK(json::parse(call(svc, "GET", "/sessions/" + id).body).at("version") == 1);
}

TEST_CASE("render.svg") {
    Service svc(builtin_grammars());
    const auto id = create(svc, fixtures::kSample);
    auto res = call(svc, "GET", "/sessions/" + id + "/render.svg");
    CHECK(res.status == 200);
    CHECK(res.content_type == "image/svg+xml");
    auto shape = render_check::inspect_svg(res.body);
    CHECK(shape.rects == 2);
    CHECK(shape.texts == 5);
    auto folded = render_check::inspect_svg(call(svc, "GET", "/sessions/" + id + "/render.svg", nullptr, {{"g", "0"}}).body);
    CHECK(folded.texts == 4);
}

TEST_CASE("over loopback HTTP the event stream reports every version in order") {
    Service svc(builtin_grammars());
    const int port = svc.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread server([&] { svc.listen(); });

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(10, 0);
    for (int tries = 0; tries < 100 && !client.Get("/sessions/none"); ++tries) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    auto created = client.Post("/sessions", json{{"text", ""}, {"grammar", "c"}}.dump(), "application/json");
    REQUIRE(created);
    REQUIRE(created->status == 201);
    const auto id = json::parse(created->body).at("session_id").get<std::string>();

    std::string stream;
    std::thread reader([&] {
        client.Get("/sessions/" + id + "/events?since=0&until=5", [&](const char* data, std::size_t len) {
            stream.append(data, len);
            return true;
        });
    });
    httplib::Client writer("127.0.0.1", port);
    for (int v = 0; v < 5; ++v) {
        auto r = writer.Post("/sessions/" + id + "/edits",
                             json{{"start_byte", v}, {"end_byte", v}, {"text", "x"}, {"base_version", v}}.dump(),
                             "application/json");
        REQUIRE(r);
        CHECK(r->status == 200);
    }
    reader.join();

    std::vector<std::uint64_t> versions;
    std::istringstream lines(stream);
    std::string line;
    while (std::getline(lines, line)) versions.push_back(json::parse(line).at("version").get<std::uint64_t>());
    CHECK(versions == std::vector<std::uint64_t>{1, 2, 3, 4, 5});

    auto missing = writer.Get("/sessions/nope/events");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    svc.stop();
    server.join();
}

}
