#include "brics/gateway/json_codec.hpp"

namespace brics::gateway {

namespace {

json node_json(const BlockTree& tree, const BlockNode& n) {
    json children = json::array();
    for (int c : n.children) children.push_back(node_json(tree, tree.at(c)));
    return json{
        {"id", n.id},
        {"kind", std::string(to_string(n.kind))},
        {"open", to_json(n.open)},
        {"close", to_json(n.close)},
        {"first_line", n.first_line},
        {"last_line", n.last_line},
        {"depth", n.depth},
        {"introducer", n.introducer},
        {"children", std::move(children)},
    };
}

} // namespace

json to_json(Position pos) { return json{{"line", pos.line}, {"col", pos.col}}; }

json to_json(const BlockTree& tree) {
    json out = json::array();
    for (int r : tree.roots) out.push_back(node_json(tree, tree.at(r)));
    return out;
}

json to_json(const ParseDiagnostic& d) {
    return json{{"position", to_json(d.position)}, {"code", std::string(to_string(d.code))}, {"message", d.message}};
}

json to_json(const std::vector<ParseDiagnostic>& diags) {
    json out = json::array();
    for (const auto& d : diags) out.push_back(to_json(d));
    return out;
}

json to_json(const BlockRect& r) {
    return json{
        {"block_id", r.block_id},   {"top_line", r.top_line}, {"bottom_line", r.bottom_line},
        {"left_col", r.left_col},   {"right_col", r.right_col}, {"depth", r.depth},
        {"kind", std::string(to_string(r.kind))},
        {"fill", r.fill.hex()},     {"outline", r.outline.hex()}, {"active", r.active},
    };
}

json to_json(const OverviewModel& m) {
    json rects = json::array();
    for (const auto& r : m.rects) {
        rects.push_back(json{
            {"block_id", r.block_id}, {"depth", r.depth}, {"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h},
            {"col", r.col}, {"line", r.line}, {"cols", r.cols}, {"lines", r.lines},
            {"fill", r.fill.hex()}, {"outline", r.outline.hex()}, {"active", r.active},
        });
    }
    json errors = json::array();
    for (const auto& e : m.error_lines) {
        errors.push_back(json{{"line", e.line}, {"y", e.y}, {"width", e.width}, {"color", e.color.hex()}});
    }
    return json{
        {"scale", m.scale},
        {"scale_fraction", json::array({m.scale_num, m.scale_den})},
        {"view_width", m.view_width},
        {"view_height", m.view_height},
        {"from_line", m.from_line},
        {"to_line", m.to_line},
        {"granularity", m.granularity},
        {"doc_cols", m.doc_cols},
        {"doc_lines", m.doc_lines},
        {"rects", std::move(rects)},
        {"error_lines", std::move(errors)},
    };
}

json to_json(const DepSets& d) { return json{{"inputs", d.inputs}, {"outputs", d.outputs}}; }

json to_json(const RefactorResult& r) {
    return json{
        {"new_source", r.new_source},
        {"new_method_lines", json::array({r.method_first_line, r.method_last_line})},
        {"call_line", r.call_line},
        {"dependencies", to_json(r.dependencies)},
    };
}

json to_json(const FoldSpan& f) {
    return json{{"block_id", f.block_id},
                {"hidden", json::array({f.first_hidden, f.last_hidden})},
                {"placeholder_line", f.placeholder_line},
                {"placeholder", f.placeholder}};
}

json to_json(const ActivityMap& a) {
    json active = json::object();
    for (const auto& [id, on] : a.active) active[std::to_string(id)] = on;
    json errors = json::array();
    for (const auto& e : a.errors) errors.push_back(json{{"block_id", e.block_id}, {"message", e.message}});
    return json{{"active", std::move(active)}, {"errors", std::move(errors)}};
}

json snapshot_json(const Snapshot& snap, bool with_text) {
    json out{
        {"version", snap.version},
        {"digest", snap.digest},
        {"grammar", snap.grammar},
        {"tree", to_json(snap.tree)},
        {"diagnostics", to_json(snap.diagnostics)},
    };
    if (with_text) out["text"] = snap.text;
    return out;
}

} // namespace brics::gateway
