#include "brics/gateway/service.hpp"

#include <charconv>
#include <regex>

#include "httplib.h"

#include "brics/gateway/json_codec.hpp"
#include "brics/gateway/render.hpp"
#include "brics/refactor.hpp"

namespace brics::gateway {

namespace {

constexpr auto kEventPoll = std::chrono::milliseconds(200);

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

json parse_body(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::bad_request, "request body must be a JSON object");
    return j;
}

template <typename T>
T require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw Error(ErrorCode::bad_request, std::string("missing field '") + field + "'");
    try {
        if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw Error(ErrorCode::bad_request, "");
            if constexpr (std::is_unsigned_v<T>) {
                if (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0) {
                    throw Error(ErrorCode::bad_request, "");
                }
            }
        } else if (!it->is_string()) {
            throw Error(ErrorCode::bad_request, "");
        }
        return it->get<T>();
    } catch (const Error&) {
        throw Error(ErrorCode::bad_request, std::string("field '") + field + "' has the wrong type");
    }
}

int query_int(const ApiRequest& req, const std::string& key, std::optional<int> fallback) {
    auto it = req.query.find(key);
    if (it == req.query.end()) {
        if (!fallback) throw Error(ErrorCode::bad_request, "missing query parameter '" + key + "'");
        return *fallback;
    }
    int value = 0;
    const auto& s = it->second;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size()) {
        throw Error(ErrorCode::bad_request, "query parameter '" + key + "' is not an integer");
    }
    return value;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        if (comma > start) out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::set<std::string> query_defines(const ApiRequest& req) {
    auto it = req.query.find("defines");
    if (it == req.query.end()) return {};
    auto list = split_list(it->second);
    return {list.begin(), list.end()};
}

std::vector<int> query_lines(const ApiRequest& req) {
    std::vector<int> lines;
    auto it = req.query.find("errors");
    if (it == req.query.end()) return lines;
    for (const auto& item : split_list(it->second)) {
        int v = 0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || end != item.data() + item.size()) {
            throw Error(ErrorCode::bad_request, "error line '" + item + "' is not an integer");
        }
        lines.push_back(v);
    }
    return lines;
}

struct Parsed {
    SnapshotPtr snap;
    SourceText source;
    ActivityMap activity;
};

Parsed view_of(const Session& session, const std::set<std::string>& defines) {
    auto snap = session.snapshot();
    SourceText source(snap->text);
    auto activity = conditional_activity(snap->tree, source, session.grammar(), defines);
    return {snap, std::move(source), std::move(activity)};
}

} // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::bad_request: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::stale: return 409;
    default: return 422;
    }
}

std::string api_error_body(int status, ErrorCode code, const std::string& message) {
    return json{{"status", status}, {"code", std::string(to_string(code))}, {"message", message}}.dump();
}

Service::Service(std::vector<StructureGrammar> grammars, Palette palette)
    : store_(std::move(grammars)), palette_(std::move(palette)) {
    palette_.validate();
}

Service::~Service() { stop(); }

ApiResponse Service::handle(const ApiRequest& request) {
    try {
        return route(request);
    } catch (const Error& e) {
        const int status = http_status(e.code());
        return {status, "application/json", api_error_body(status, e.code(), e.what())};
    } catch (const std::exception& e) {
        return {400, "application/json", api_error_body(400, ErrorCode::bad_request, e.what())};
    }
}

ApiResponse Service::route(const ApiRequest& req) {
    static const std::regex kSessionPath(R"(^/sessions/([A-Za-z0-9_-]+)(/.*)?$)");

    if (req.path == "/sessions") {
        if (req.method != "POST") throw Error(ErrorCode::not_found, "no route " + req.method + " " + req.path);
        auto body = parse_body(req.body);
        auto text = require<std::string>(body, "text");
        auto grammar = require<std::string>(body, "grammar");
        auto [id, session] = store_.create(std::move(text), grammar);
        auto out = snapshot_json(*session->snapshot(), false);
        out["session_id"] = id;
        return json_response(201, out);
    }

    std::smatch m;
    if (!std::regex_match(req.path, m, kSessionPath)) {
        throw Error(ErrorCode::not_found, "no route " + req.method + " " + req.path);
    }
    auto session = store_.get(m[1].str());
    const std::string tail = m[2].str();
    const auto route_key = req.method + " " + tail;

    if (route_key == "GET ") {
        auto out = snapshot_json(*session->snapshot(), true);
        out["session_id"] = m[1].str();
        return json_response(200, out);
    }
    if (route_key == "POST /edits") {
        auto body = parse_body(req.body);
        Edit edit;
        edit.start_byte = require<std::size_t>(body, "start_byte");
        edit.end_byte = require<std::size_t>(body, "end_byte");
        edit.replacement = require<std::string>(body, "text");
        edit.base_version = require<std::uint64_t>(body, "base_version");
        auto snap = session->apply_edit(edit);
        return json_response(200, snapshot_json(*snap, false));
    }
    if (route_key == "GET /rects") {
        auto v = view_of(*session, query_defines(req));
        json rects = json::array();
        for (const auto& r : editor_rects(v.snap->tree, v.source, palette_, &v.activity)) rects.push_back(to_json(r));
        return json_response(200, json{{"version", v.snap->version}, {"rects", rects}, {"activity", to_json(v.activity)}});
    }
    if (route_key == "GET /overview") {
        auto v = view_of(*session, query_defines(req));
        OverviewRequest o;
        o.view_width = query_int(req, "w", std::nullopt);
        o.view_height = query_int(req, "h", std::nullopt);
        o.granularity = query_int(req, "g", 2);
        o.from_line = query_int(req, "from", 1);
        o.to_line = query_int(req, "to", std::max(1, v.source.line_count()));
        auto model = mark_errors(overview_model(v.snap->tree, v.source, o, palette_, &v.activity), query_lines(req));
        auto out = to_json(model);
        out["version"] = v.snap->version;
        return json_response(200, out);
    }
    if (route_key == "POST /refactor/extract") {
        auto body = parse_body(req.body);
        const int block_id = require<int>(body, "block_id");
        const auto name = require<std::string>(body, "name");
        auto snap = session->snapshot();
        SourceText source(snap->text);
        auto result = extract_block(source, snap->tree, session->grammar(), block_id, name);
        auto next = session->replace_text(result.new_source, snap->version);
        auto out = to_json(result);
        out["version"] = next->version;
        out["digest"] = next->digest;
        return json_response(200, out);
    }
    if (route_key == "GET /render.svg") {
        auto v = view_of(*session, query_defines(req));
        auto rects = editor_rects(v.snap->tree, v.source, palette_, &v.activity);
        std::vector<FoldSpan> folds;
        if (req.query.count("g")) folds = fold_spans(v.snap->tree, query_int(req, "g", 0));
        return {200, "image/svg+xml", render_svg(rects, folds, v.source)};
    }
    throw Error(ErrorCode::not_found, "no route " + req.method + " " + req.path);
}

int Service::bind(const std::string& host, int port) {
    if (!server_) {
        server_ = std::make_unique<httplib::Server>();
        install_routes();
    }
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return server_ && server_->listen_after_bind(); }

void Service::stop() {
    stopping_ = true;
    store_.interrupt_all();
    if (server_) server_->stop();
}

void Service::install_routes() {
    auto forward = [this](const httplib::Request& in, httplib::Response& out) {
        ApiRequest req;
        req.method = in.method;
        req.path = in.path;
        for (const auto& [k, v] : in.params) req.query[k] = v;
        req.body = in.body;
        auto res = handle(req);
        out.status = res.status;
        out.set_content(res.body, res.content_type);
    };
    server_->Get(R"(/sessions/([A-Za-z0-9_-]+)/events)", [this](const httplib::Request& in, httplib::Response& out) {
        std::shared_ptr<Session> session;
        std::uint64_t since = 0;
        std::optional<std::uint64_t> until;
        try {
            session = store_.get(in.matches[1].str());
            ApiRequest probe;
            for (const auto& [k, v] : in.params) probe.query[k] = v;
            since = static_cast<std::uint64_t>(std::max(0, query_int(probe, "since", 0)));
            if (probe.query.count("until")) until = static_cast<std::uint64_t>(query_int(probe, "until", 0));
        } catch (const Error& e) {
            const int status = http_status(e.code());
            out.status = status;
            out.set_content(api_error_body(status, e.code(), e.what()), "application/json");
            return;
        }
        auto last = std::make_shared<std::uint64_t>(since);
        out.set_chunked_content_provider(
            "application/x-ndjson", [this, session, last, until](std::size_t, httplib::DataSink& sink) {
                if (stopping_ || (until && *last >= *until)) {
                    sink.done();
                    return true;
                }
                for (const auto& ev : session->events_after(*last, kEventPoll)) {
                    auto line = json{{"version", ev.version}, {"digest", ev.digest}}.dump() + "\n";
                    if (!sink.write(line.data(), line.size())) return false;
                    *last = ev.version;
                    if (until && *last >= *until) break;
                }
                return sink.is_writable();
            });
    });
    server_->Get(".*", forward);
    server_->Post(".*", forward);
    server_->Put(".*", forward);
    server_->Delete(".*", forward);
    server_->Patch(".*", forward);
}

} // namespace brics::gateway
