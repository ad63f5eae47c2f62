#include <cctype>

#include "brics/error.hpp"
#include "brics/viewmodel.hpp"

namespace brics {

namespace {

// Recursive descent over: or := and ('||' and)* ; and := unary ('&&' unary)* ;
// unary := '!' unary | primary ; primary := '(' or ')' | defined ... | number | symbol
class ConditionParser {
public:
    ConditionParser(std::string_view text, const std::set<std::string>& defines) : text_(text), defines_(defines) {}

    bool parse() {
        const bool value = parse_or();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(text_.substr(pos_)) + "'");
        return value;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::expr, "cannot evaluate '" + std::string(text_) + "': " + why);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view op) {
        skip_space();
        if (text_.substr(pos_, op.size()) == op) {
            pos_ += op.size();
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    bool parse_or() {
        bool value = parse_and();
        while (accept("||")) {
            const bool rhs = parse_and();
            value = value || rhs;
        }
        return value;
    }

    bool parse_and() {
        bool value = parse_unary();
        while (accept("&&")) {
            const bool rhs = parse_unary();
            value = value && rhs;
        }
        return value;
    }

    bool parse_unary() {
        skip_space();
        if (pos_ + 1 < text_.size() && text_[pos_] == '!' && text_[pos_ + 1] == '=') fail("comparison not supported");
        if (accept("!")) return !parse_unary();
        return parse_primary();
    }

    bool parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        if (accept("(")) {
            const bool value = parse_or();
            if (!accept(")")) fail("missing ')'");
            return value;
        }
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            long long value = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                value = value * 10 + (text_[pos_] - '0');
                if (value > 1'000'000'000) value = 1'000'000'000;
                ++pos_;
            }
            while (pos_ < text_.size() && (text_[pos_] == 'u' || text_[pos_] == 'U' || text_[pos_] == 'l' || text_[pos_] == 'L')) {
                ++pos_;
            }
            return value != 0;
        }
        const std::string word = identifier();
        if (word.empty()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (word == "defined") {
            const bool paren = accept("(");
            const std::string symbol = identifier();
            if (symbol.empty()) fail("defined needs a symbol");
            if (paren && !accept(")")) fail("missing ')' after defined(" + symbol);
            return defines_.count(symbol) > 0;
        }
        // A symbol given on the command line expands to 1; unknown symbols to 0.
        return defines_.count(word) > 0;
    }

    std::string_view text_;
    const std::set<std::string>& defines_;
    std::size_t pos_ = 0;
};

bool single_symbol_defined(const std::string& argument, const std::set<std::string>& defines) {
    bool ok = !argument.empty() && (std::isalpha(static_cast<unsigned char>(argument[0])) || argument[0] == '_');
    for (char c : argument) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (!ok) throw Error(ErrorCode::expr, "expected a single symbol, got '" + argument + "'");
    return defines.count(argument) > 0;
}

class ActivityWalker {
public:
    ActivityWalker(const BlockTree& tree, const SourceText& source, const StructureGrammar& grammar,
                   const std::set<std::string>& defines)
        : tree_(tree), source_(source), grammar_(grammar), defines_(defines),
          mask_(scan_mask(source, grammar).mask) {}

    ActivityMap run() {
        walk(tree_.roots, true);
        return std::move(result_);
    }

private:
    // Evaluates a region's own test; an unparseable test counts as false.
    bool test(int id, const DirectiveLine& d) {
        try {
            switch (d.kind) {
            case DirectiveKind::ifdef: return single_symbol_defined(d.argument, defines_);
            case DirectiveKind::ifndef: return !single_symbol_defined(d.argument, defines_);
            case DirectiveKind::if_:
            case DirectiveKind::elif: return evaluate_condition(d.argument, defines_);
            default: return true;
            }
        } catch (const Error& e) {
            result_.errors.push_back({id, e.what()});
            return false;
        }
    }

    void walk(const std::vector<int>& siblings, bool parent_active) {
        bool chain_taken = false;
        for (int id : siblings) {
            const auto& node = tree_.nodes[static_cast<std::size_t>(id)];
            if (node.kind != BlockKind::conditional_region) {
                walk(node.children, parent_active);
                continue;
            }
            auto d = directive_on_line(source_, mask_, grammar_, node.open.line);
            bool own = false;
            if (!d) {
                result_.errors.push_back({id, "conditional region without a directive"});
            } else {
                switch (d->kind) {
                case DirectiveKind::if_:
                case DirectiveKind::ifdef:
                case DirectiveKind::ifndef:
                    chain_taken = false;
                    own = test(id, *d);
                    break;
                case DirectiveKind::elif: {
                    const bool t = test(id, *d);
                    own = !chain_taken && t;
                    break;
                }
                case DirectiveKind::else_:
                    own = !chain_taken;
                    break;
                case DirectiveKind::end:
                    break;
                }
            }
            chain_taken = chain_taken || own;
            const bool effective = parent_active && own;
            result_.active[id] = effective;
            walk(node.children, effective);
        }
    }

    const BlockTree& tree_;
    const SourceText& source_;
    const StructureGrammar& grammar_;
    const std::set<std::string>& defines_;
    CodeMask mask_;
    ActivityMap result_;
};

} // namespace

bool evaluate_condition(std::string_view expression, const std::set<std::string>& defines) {
    return ConditionParser(expression, defines).parse();
}

ActivityMap conditional_activity(const BlockTree& tree, const SourceText& source, const StructureGrammar& grammar,
                                 const std::set<std::string>& defines) {
    if (!grammar.conditionals) return {};
    return ActivityWalker(tree, source, grammar, defines).run();
}

} // namespace brics
