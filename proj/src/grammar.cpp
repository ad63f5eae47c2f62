#include "brics/grammar.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "brics/error.hpp"
#include "brics/source_text.hpp"

namespace brics {

namespace detail {
// Generated from grammars/*.grammar.json at configure time.
extern const std::vector<std::pair<std::string_view, std::string_view>> builtin_grammar_sources;
} // namespace detail

namespace {

using nlohmann::json;

constexpr std::array<std::pair<BlockKind, std::string_view>, 7> kKindNames{{
    {BlockKind::branch, "branch"},
    {BlockKind::loop, "loop"},
    {BlockKind::guard, "guard"},
    {BlockKind::callable, "callable"},
    {BlockKind::type_decl, "type_decl"},
    {BlockKind::conditional_region, "conditional_region"},
    {BlockKind::generic, "generic"},
}};

const std::set<std::string_view> kKnownFields{
    "name",     "extensions", "lineComments", "blockComments", "strings",
    "blocks",   "kinds",      "defaultType",  "conditionals",  "keywords",
    "primitiveTypes", "continuations", "voidType",
};

bool is_word(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || u == '_';
    });
}

bool is_lower_word(std::string_view s) {
    return is_word(s) && std::none_of(s.begin(), s.end(), [](char c) {
               return std::isupper(static_cast<unsigned char>(c));
           });
}

// Walks the raw token stream so duplicate object keys can be reported; the
// parsed json silently keeps the last one.
class DuplicateKeyTracker {
public:
    struct Frame {
        bool is_object = false;
        std::set<std::string> keys;
        std::string key;
        int index = -1;
    };

    bool operator()(int /*depth*/, json::parse_event_t event, json& parsed) {
        switch (event) {
        case json::parse_event_t::object_start:
            enter_value();
            frames_.push_back(Frame{true, {}, {}, -1});
            break;
        case json::parse_event_t::array_start:
            enter_value();
            frames_.push_back(Frame{false, {}, {}, -1});
            break;
        case json::parse_event_t::object_end:
        case json::parse_event_t::array_end:
            if (!frames_.empty()) frames_.pop_back();
            break;
        case json::parse_event_t::key: {
            auto key = parsed.get<std::string>();
            auto& top = frames_.back();
            if (!top.keys.insert(key).second) duplicates_.emplace_back(path_with(key), key);
            top.key = std::move(key);
            break;
        }
        case json::parse_event_t::value:
            enter_value();
            break;
        }
        return true;
    }

    // (path, key) of each repeated key.
    const std::vector<std::pair<std::string, std::string>>& duplicates() const { return duplicates_; }

private:
    void enter_value() {
        if (!frames_.empty() && !frames_.back().is_object) ++frames_.back().index;
    }

    std::string path_with(const std::string& key) const {
        std::string out;
        for (std::size_t i = 0; i + 1 < frames_.size(); ++i) {
            const auto& f = frames_[i];
            if (!out.empty()) out += '/';
            out += f.is_object ? f.key : std::to_string(f.index);
        }
        if (!out.empty()) out += '/';
        return out + key;
    }

    std::vector<Frame> frames_;
    std::vector<std::pair<std::string, std::string>> duplicates_;
};

class GrammarReader {
public:
    explicit GrammarReader(std::vector<GrammarDiagnostic>& diags) : diags_(diags) {}

    void error(std::string path, std::string message) {
        diags_.push_back({std::move(path), std::move(message), GrammarDiagnostic::Severity::error});
    }
    void warning(std::string path, std::string message) {
        diags_.push_back({std::move(path), std::move(message), GrammarDiagnostic::Severity::warning});
    }

    std::optional<std::string> marker(const json& v, const std::string& path) {
        if (!v.is_string()) {
            error(path, "expected a string");
            return std::nullopt;
        }
        auto s = v.get<std::string>();
        if (s.empty()) {
            error(path, "marker must not be empty");
            return std::nullopt;
        }
        return s;
    }

    std::vector<std::string> string_list(const json& doc, const std::string& field) {
        std::vector<std::string> out;
        if (!doc.contains(field)) return out;
        const auto& v = doc.at(field);
        if (!v.is_array()) {
            error(field, "expected a list");
            return out;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto s = marker(v[i], field + "/" + std::to_string(i))) out.push_back(*s);
        }
        return out;
    }

    std::set<std::string> word_set(const json& doc, const std::string& field) {
        std::set<std::string> out;
        auto list = string_list(doc, field);
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!is_word(list[i])) {
                error(field + "/" + std::to_string(i), "'" + list[i] + "' is not a word");
            } else {
                out.insert(list[i]);
            }
        }
        return out;
    }

    std::optional<DelimiterPair> pair_object(const json& v, const std::string& path) {
        if (!v.is_object()) {
            error(path, "expected an object with open and close");
            return std::nullopt;
        }
        auto open = field_marker(v, "open", path);
        auto close = field_marker(v, "close", path);
        if (!open || !close) return std::nullopt;
        return DelimiterPair{*open, *close};
    }

    std::optional<std::string> field_marker(const json& obj, const char* name, const std::string& path) {
        const std::string sub = path + "/" + name;
        if (!obj.contains(name)) {
            error(sub, std::string("missing required field '") + name + "'");
            return std::nullopt;
        }
        return marker(obj.at(name), sub);
    }

private:
    std::vector<GrammarDiagnostic>& diags_;
};

} // namespace

std::string_view to_string(BlockKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "generic";
}

std::optional<BlockKind> block_kind_from_string(std::string_view name) noexcept {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

bool StructureGrammar::is_keyword(std::string_view word) const {
    const std::string w(word);
    return kinds.count(w) || keywords.count(w) || primitive_types.count(w) || continuations.count(w);
}

GrammarLoadResult load_grammar(std::string_view config_text) {
    GrammarLoadResult result;
    auto& diags = result.diagnostics;
    GrammarReader rd(diags);

    if (!utf8::is_valid(config_text)) {
        rd.error("", "grammar config is not valid UTF-8");
        return result;
    }

    DuplicateKeyTracker tracker;
    json doc;
    try {
        doc = json::parse(config_text.begin(), config_text.end(), std::ref(tracker));
    } catch (const json::parse_error& e) {
        rd.error("", std::string("malformed document: ") + e.what());
        return result;
    }
    if (!doc.is_object()) {
        rd.error("", "grammar config must be an object");
        return result;
    }
    for (const auto& [path, key] : tracker.duplicates()) {
        if (path == "kinds/" + key) {
            rd.error(path, "duplicate keyword '" + key + "'");
        } else {
            rd.error(path, "duplicate field '" + key + "'");
        }
    }
    for (const auto& [key, _] : doc.items()) {
        if (!kKnownFields.count(key)) rd.warning(key, "unknown field ignored");
    }

    StructureGrammar g;

    if (!doc.contains("name")) {
        rd.error("name", "missing required field 'name'");
    } else if (!doc["name"].is_string() || !is_lower_word(doc["name"].get<std::string>())) {
        rd.error("name", "name must be a lowercase word");
    } else {
        g.name = doc["name"].get<std::string>();
    }

    g.extensions = rd.string_list(doc, "extensions");
    for (std::size_t i = 0; i < g.extensions.size(); ++i) {
        if (g.extensions[i].front() != '.' || g.extensions[i].size() < 2) {
            rd.error("extensions/" + std::to_string(i), "extension must begin with '.'");
        }
    }

    g.line_comments = rd.string_list(doc, "lineComments");

    if (doc.contains("blockComments")) {
        const auto& v = doc["blockComments"];
        if (!v.is_array()) {
            rd.error("blockComments", "expected a list");
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string path = "blockComments/" + std::to_string(i);
                const auto& item = v[i];
                if (!item.is_array() || item.size() != 2) {
                    rd.error(path, "expected an [open, close] pair");
                    continue;
                }
                auto open = rd.marker(item[0], path + "/0");
                auto close = rd.marker(item[1], path + "/1");
                if (open && close) g.block_comments.push_back({*open, *close});
            }
        }
    }

    if (doc.contains("strings")) {
        const auto& v = doc["strings"];
        if (!v.is_array()) {
            rd.error("strings", "expected a list");
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string path = "strings/" + std::to_string(i);
                auto pair = rd.pair_object(v[i], path);
                if (!pair) continue;
                StringSyntax s{pair->open, pair->close, {}};
                if (v[i].contains("escape")) {
                    const auto& esc = v[i]["escape"];
                    if (!esc.is_string()) {
                        rd.error(path + "/escape", "expected a string");
                        continue;
                    }
                    s.escape = esc.get<std::string>();
                }
                g.strings.push_back(std::move(s));
            }
        }
    }

    if (!doc.contains("blocks")) {
        rd.error("blocks", "missing required field 'blocks'");
    } else if (!doc["blocks"].is_array() || doc["blocks"].empty()) {
        rd.error("blocks", "expected a non-empty list");
    } else {
        const auto& v = doc["blocks"];
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto pair = rd.pair_object(v[i], "blocks/" + std::to_string(i))) g.blocks.push_back(*pair);
        }
    }

    if (doc.contains("kinds")) {
        const auto& v = doc["kinds"];
        if (!v.is_object()) {
            rd.error("kinds", "expected a map from keyword to kind");
        } else {
            for (const auto& [word, kind] : v.items()) {
                const std::string path = "kinds/" + word;
                if (!is_word(word)) {
                    rd.error(path, "'" + word + "' is not a word");
                    continue;
                }
                auto parsed = kind.is_string() ? block_kind_from_string(kind.get<std::string>()) : std::nullopt;
                if (!parsed) {
                    rd.error(path, "unknown block kind");
                    continue;
                }
                g.kinds.emplace(word, *parsed);
            }
        }
    }

    if (doc.contains("defaultType")) {
        const auto& v = doc["defaultType"];
        if (!v.is_string() || !is_word(v.get<std::string>())) {
            rd.error("defaultType", "defaultType must be a word");
        } else {
            g.default_type = v.get<std::string>();
        }
    }
    if (doc.contains("voidType")) {
        const auto& v = doc["voidType"];
        if (!v.is_string() || !is_word(v.get<std::string>())) {
            rd.error("voidType", "voidType must be a word");
        } else {
            g.void_type = v.get<std::string>();
        }
    }

    g.keywords = rd.word_set(doc, "keywords");
    g.primitive_types = rd.word_set(doc, "primitiveTypes");
    g.continuations = rd.word_set(doc, "continuations");

    if (doc.contains("conditionals") && !doc["conditionals"].is_null()) {
        const auto& v = doc["conditionals"];
        if (!v.is_object()) {
            rd.error("conditionals", "expected an object");
        } else {
            ConditionalDirectives c;
            const std::pair<const char*, std::string*> fields[] = {
                {"if", &c.if_},     {"ifdef", &c.ifdef}, {"ifndef", &c.ifndef},
                {"else", &c.else_}, {"elif", &c.elif},   {"end", &c.end},
            };
            bool complete = true;
            for (const auto& [name, dst] : fields) {
                auto s = rd.field_marker(v, name, "conditionals");
                if (!s) {
                    complete = false;
                    continue;
                }
                if (std::any_of(s->begin(), s->end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); })) {
                    rd.error(std::string("conditionals/") + name, "directive must not contain whitespace");
                    complete = false;
                    continue;
                }
                *dst = *s;
            }
            if (complete) g.conditionals = c;
        }
    }

    const bool failed = std::any_of(diags.begin(), diags.end(), [](const GrammarDiagnostic& d) {
        return d.severity == GrammarDiagnostic::Severity::error;
    });
    if (!failed) result.grammar = std::move(g);
    return result;
}

std::string grammar_to_json(const StructureGrammar& g) {
    json doc;
    doc["name"] = g.name;
    doc["extensions"] = g.extensions;
    doc["lineComments"] = g.line_comments;
    doc["blockComments"] = json::array();
    for (const auto& p : g.block_comments) doc["blockComments"].push_back({p.open, p.close});
    doc["strings"] = json::array();
    for (const auto& s : g.strings) {
        json item{{"open", s.open}, {"close", s.close}};
        if (!s.escape.empty()) item["escape"] = s.escape;
        doc["strings"].push_back(std::move(item));
    }
    doc["blocks"] = json::array();
    for (const auto& p : g.blocks) doc["blocks"].push_back({{"open", p.open}, {"close", p.close}});
    doc["kinds"] = json::object();
    for (const auto& [word, kind] : g.kinds) doc["kinds"][word] = std::string(to_string(kind));
    doc["defaultType"] = g.default_type;
    doc["voidType"] = g.void_type;
    doc["keywords"] = g.keywords;
    doc["primitiveTypes"] = g.primitive_types;
    doc["continuations"] = g.continuations;
    if (g.conditionals) {
        const auto& c = *g.conditionals;
        doc["conditionals"] = {{"if", c.if_},     {"ifdef", c.ifdef}, {"ifndef", c.ifndef},
                               {"else", c.else_}, {"elif", c.elif},   {"end", c.end}};
    }
    return doc.dump(2);
}

BlockKind classify_block_kind(const StructureGrammar& grammar, const std::optional<Introducer>& introducer) {
    if (!introducer || introducer->word.empty()) return BlockKind::generic;
    if (auto it = grammar.kinds.find(introducer->word); it != grammar.kinds.end()) return it->second;
    if (introducer->has_parameters) return BlockKind::callable;
    if (!introducer->type_keyword.empty()) {
        auto it = grammar.kinds.find(introducer->type_keyword);
        if (it != grammar.kinds.end() && it->second == BlockKind::type_decl) return BlockKind::type_decl;
    }
    return BlockKind::generic;
}

const std::vector<StructureGrammar>& builtin_grammars() {
    static const std::vector<StructureGrammar> grammars = [] {
        std::vector<StructureGrammar> out;
        for (const auto& [name, text] : detail::builtin_grammar_sources) {
            auto loaded = load_grammar(text);
            if (!loaded.ok()) {
                throw Error(ErrorCode::grammar, "shipped grammar '" + std::string(name) + "' is invalid");
            }
            out.push_back(std::move(*loaded.grammar));
        }
        return out;
    }();
    return grammars;
}

const StructureGrammar* find_grammar(std::string_view name, const std::vector<StructureGrammar>& extra) {
    for (const auto& g : extra) {
        if (g.name == name) return &g;
    }
    for (const auto& g : builtin_grammars()) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

std::vector<StructureGrammar> load_grammar_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto fname = entry.path().filename().string();
        constexpr std::string_view suffix = ".grammar.json";
        if (fname.size() > suffix.size() && fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0) {
            files.push_back(entry.path());
        }
    }
    if (ec) throw Error(ErrorCode::grammar, "cannot read grammar directory " + dir + ": " + ec.message());
    std::sort(files.begin(), files.end());

    std::vector<StructureGrammar> out;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        auto loaded = load_grammar(buf.str());
        if (!loaded.ok()) {
            std::string msg = file.string() + ":";
            for (const auto& d : loaded.diagnostics) {
                if (d.severity == GrammarDiagnostic::Severity::error) msg += " [" + d.path + "] " + d.message + ";";
            }
            throw Error(ErrorCode::grammar, msg);
        }
        out.push_back(std::move(*loaded.grammar));
    }
    return out;
}

} // namespace brics
