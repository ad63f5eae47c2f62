#include "dep_oracle.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dep {

namespace {

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Same length as the input; comments and literals become spaces, newlines stay.
std::string blank(const std::string& text) {
    static const std::regex hidden(R"(//[^\n]*|/\*[\s\S]*?\*/|"(?:\\.|[^"\\\n])*"|'(?:\\.|[^'\\\n])*')");
    std::string out = text;
    for (std::sregex_iterator it(text.begin(), text.end(), hidden), stop; it != stop; ++it) {
        for (auto k = static_cast<std::size_t>(it->position()); k < static_cast<std::size_t>(it->position() + it->length()); ++k) {
            if (out[k] != '\n') out[k] = ' ';
        }
    }
    return out;
}

struct Tok {
    std::string text;
    std::size_t begin;
    std::size_t end;
    bool word;
};

std::vector<Tok> tokens(const std::string& code) {
    static const std::regex tok(R"([A-Za-z_]\w*|\d[\w.]*|<<=|>>=|->|::|\+\+|--|&&|\|\||<<|>>|[-+*/%&|^=!<>]=|\S)");
    std::vector<Tok> out;
    for (std::sregex_iterator it(code.begin(), code.end(), tok), stop; it != stop; ++it) {
        const auto b = static_cast<std::size_t>(it->position());
        const std::string s = it->str();
        const bool word = std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_';
        out.push_back({s, b, b + s.size(), word});
    }
    return out;
}

// [first, last] token range of the innermost function body holding [begin, end).
std::pair<std::size_t, std::size_t> function_around(const std::vector<Tok>& t, std::size_t begin, std::size_t end,
                                                    const brics::StructureGrammar& g) {
    std::pair<std::size_t, std::size_t> best{0, t.size() ? t.size() - 1 : 0};
    bool found = false;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!t[i].word || g.kinds.count(t[i].text) || g.is_keyword(t[i].text) || t[i + 1].text != "(") continue;
        // name ( ... ) [throws X, Y] {
        std::size_t k = i + 1;
        int paren = 0;
        for (; k < t.size(); ++k) {
            if (t[k].text == "(") ++paren;
            if (t[k].text == ")" && --paren == 0) break;
            if (t[k].text == ";" || t[k].text == "{" || t[k].text == "}") break;
        }
        if (k >= t.size() || t[k].text != ")") continue;
        ++k;
        if (k < t.size() && t[k].text == "throws") {
            while (k < t.size() && t[k].text != "{" && t[k].text != ";") ++k;
        }
        if (k >= t.size() || t[k].text != "{") continue;
        int depth = 0;
        std::size_t close = k;
        for (; close < t.size(); ++close) {
            if (t[close].text == "{") ++depth;
            if (t[close].text == "}" && --depth == 0) break;
        }
        if (close >= t.size()) continue;
        if (t[k].begin < begin && t[close].end >= end) {
            if (!found || i > best.first) best = {i, close};
            found = true;
        }
    }
    if (!found) throw std::runtime_error("selection is not inside a function");
    return best;
}

} // namespace

Case load_case(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Case c;
    c.name = path.filename().string();
    c.text = ss.str();
    const auto open = c.text.find("/*<*/");
    const auto close = c.text.find("/*>*/");
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw std::runtime_error(c.name + ": missing selection markers");
    }
    c.begin = open + 5;
    c.end = close;
    std::istringstream lines(c.text);
    std::string line;
    bool have_expect = false;
    while (std::getline(lines, line) && line.rfind("//", 0) == 0) {
        if (line.rfind("// inputs:", 0) == 0) c.inputs = split_names(line.substr(10));
        if (line.rfind("// outputs:", 0) == 0) c.outputs = split_names(line.substr(11));
        if (line.rfind("// expect:", 0) == 0) {
            c.expect_multi = line.find("E_MULTI_OUTPUT") != std::string::npos;
            have_expect = true;
        }
    }
    if (!have_expect) throw std::runtime_error(c.name + ": missing expect line");
    return c;
}

std::vector<std::filesystem::path> case_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Deps analyse(const std::string& text, std::size_t begin, std::size_t end, const brics::StructureGrammar& g) {
    const auto t = tokens(blank(text));
    const auto [first, last] = function_around(t, begin, end, g);

    std::set<std::string> names;
    for (std::size_t i = first; i <= last; ++i) {
        if (t[i].word && !g.is_keyword(t[i].text)) names.insert(t[i].text);
    }

    struct Verdict {
        std::size_t first_inside = std::string::npos;
        bool input = false;
        bool output = false;
    };
    std::vector<std::pair<std::string, Verdict>> found;

    for (const auto& v : names) {
        bool known_before = false, declared_inside = false, assigned_inside = false, used_after = false, used_inside = false;
        std::size_t first_inside = std::string::npos;
        for (std::size_t i = first; i <= last; ++i) {
            if (t[i].text != v) continue;
            const std::string prev = i > first ? t[i - 1].text : "";
            const std::string next = i < last ? t[i + 1].text : "";
            if (prev == "." || prev == "->" || prev == "::" || next == "(") continue;
            const bool decl = i > first && t[i - 1].word &&
                              (!g.is_keyword(prev) || g.primitive_types.count(prev));
            static const std::set<std::string> assign{"=", "+=", "-=", "*=", "/=", "%=", "&=",
                                                      "|=", "^=", "<<=", ">>=", "++", "--"};
            const bool store = assign.count(next) || prev == "++" || prev == "--";
            if (t[i].end <= begin) {
                known_before = known_before || decl || store;
            } else if (t[i].begin >= end) {
                used_after = true;
            } else {
                used_inside = true;
                first_inside = std::min(first_inside, t[i].begin);
                declared_inside = declared_inside || decl;
                assigned_inside = assigned_inside || store;
            }
        }
        if (!used_inside || declared_inside) continue;
        Verdict verdict{first_inside, known_before, assigned_inside && used_after};
        if (verdict.input || verdict.output) found.emplace_back(v, verdict);
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.second.first_inside < b.second.first_inside; });
    Deps d;
    for (const auto& [v, verdict] : found) {
        if (verdict.input) d.inputs.push_back(v);
        if (verdict.output) d.outputs.push_back(v);
    }
    return d;
}

} // namespace dep
