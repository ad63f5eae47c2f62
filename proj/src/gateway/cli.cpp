#include "brics/gateway/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "brics/error.hpp"
#include "brics/gateway/json_codec.hpp"
#include "brics/gateway/render.hpp"
#include "brics/gateway/service.hpp"
#include "brics/refactor.hpp"

namespace brics::gateway {

namespace fs = std::filesystem;

namespace {

/// Failure that maps straight onto an exit code.
struct CliFailure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliFailure{exit_usage, "cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw CliFailure{exit_usage, "cannot read '" + path + "'"};
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())) || !out.flush()) {
        throw CliFailure{exit_usage, "cannot write '" + path + "'"};
    }
}

StructureGrammar grammar_from_file(const std::string& path) {
    auto result = load_grammar(read_file(path));
    if (!result.ok()) {
        std::string msg = "grammar '" + path + "' is invalid";
        for (const auto& d : result.diagnostics) {
            if (d.severity == GrammarDiagnostic::Severity::error) msg += "\n  " + d.path + ": " + d.message;
        }
        throw CliFailure{exit_usage, msg};
    }
    return *result.grammar;
}

/// A path to a grammar file, then <name>.grammar.json under $BRICS_GRAMMARS,
/// then a shipped grammar; without a name the file extension decides.
StructureGrammar resolve_grammar(const std::string& name, const std::string& file) {
    if (!name.empty()) {
        if (name.find('/') != std::string::npos || name.ends_with(".json")) return grammar_from_file(name);
        if (const char* dir = std::getenv("BRICS_GRAMMARS"); dir && *dir) {
            const auto candidate = fs::path(dir) / (name + ".grammar.json");
            if (fs::exists(candidate)) return grammar_from_file(candidate.string());
        }
        if (const auto* g = find_grammar(name)) return *g;
        throw CliFailure{exit_usage, "unknown grammar '" + name + "'"};
    }
    const auto ext = fs::path(file).extension().string();
    for (const auto& g : builtin_grammars()) {
        if (std::find(g.extensions.begin(), g.extensions.end(), ext) != g.extensions.end()) return g;
    }
    throw CliFailure{exit_usage, "no grammar for '" + file + "'; pass --grammar"};
}

struct Loaded {
    StructureGrammar grammar;
    SourceText source;
    ParseResult parsed;
};

Loaded load_source(const std::string& file, const std::string& grammar_name) {
    auto grammar = resolve_grammar(grammar_name, file);
    auto text = read_file(file);
    if (!utf8::is_valid(text)) throw CliFailure{exit_usage, "'" + file + "' is not valid UTF-8"};
    SourceText source(std::move(text));
    auto parsed = parse_blocks(source, grammar);
    return {std::move(grammar), std::move(source), std::move(parsed)};
}

int report_diagnostics(const std::string& file, const std::vector<ParseDiagnostic>& diags, std::ostream& err) {
    for (const auto& d : diags) {
        err << file << ":" << d.position.line << ":" << d.position.col + 1 << ": " << to_string(d.code) << ": "
            << d.message << "\n";
    }
    return diags.empty() ? exit_ok : exit_diagnostics;
}

void emit(const std::string& data, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << data;
    } else {
        write_file(out_path, data);
    }
}

Position parse_position(const std::string& spec) {
    const auto colon = spec.find(':');
    auto number = [&](std::string_view s) {
        int v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
            throw CliFailure{exit_usage, "--block expects LINE:COL, got '" + spec + "'"};
        }
        return v;
    };
    if (colon == std::string::npos) throw CliFailure{exit_usage, "--block expects LINE:COL, got '" + spec + "'"};
    return {number(std::string_view(spec).substr(0, colon)), number(std::string_view(spec).substr(colon + 1))};
}

std::vector<int> read_error_lines(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<int> lines;
    std::string row;
    int n = 0;
    while (std::getline(in, row)) {
        ++n;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        const auto first = row.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = row.find_last_not_of(" \t");
        const std::string_view s(row.data() + first, last - first + 1);
        int v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size()) {
            throw CliFailure{exit_usage, path + ":" + std::to_string(n) + ": not a line number"};
        }
        lines.push_back(v);
    }
    return lines;
}

volatile std::sig_atomic_t g_stop_requested = 0;

void request_stop(int) { g_stop_requested = 1; }

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nested block boxes for source code", "brics"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::Throw);

    std::string file, grammar_name, out_path;

    auto* render = app.add_subcommand("render", "Draw the block boxes of a file");
    std::string format = "svg";
    render->add_option("file", file, "Source file")->required();
    render->add_option("--grammar", grammar_name, "Grammar name or path");
    render->add_option("--format", format, "svg or ansi")->check(CLI::IsMember({"svg", "ansi"}));
    render->add_option("--out", out_path, "Output file (default: standard output)");
    int fold_level = -1;
    render->add_option("--fold", fold_level, "Collapse blocks deeper than this level (svg only)")
        ->check(CLI::NonNegativeNumber);

    auto* overview = app.add_subcommand("overview", "Compute the overview model of a file");
    int width = 0, height = 0, granularity = 0;
    std::optional<int> from_line, to_line;
    std::string errors_path;
    overview->add_option("file", file, "Source file")->required();
    overview->add_option("--grammar", grammar_name, "Grammar name or path");
    overview->add_option("--width", width, "View width in pixels")->required();
    overview->add_option("--height", height, "View height in pixels")->required();
    overview->add_option("--granularity", granularity, "Deepest block depth shown")->required();
    overview->add_option("--from", from_line, "First zoomed line");
    overview->add_option("--to", to_line, "Last zoomed line");
    overview->add_option("--errors", errors_path, "File with one error line number per line");
    overview->add_option("--out", out_path, "Output file; .svg draws the minimap, anything else gets JSON")->required();

    auto* extract = app.add_subcommand("extract", "Move a block into a new method");
    std::string block_spec, new_name;
    bool write_back = false;
    extract->add_option("file", file, "Source file")->required();
    extract->add_option("--grammar", grammar_name, "Grammar name or path");
    extract->add_option("--block", block_spec, "LINE:COL inside the block (1-based line, 0-based column)")->required();
    extract->add_option("--name", new_name, "Name of the new method")->required();
    extract->add_flag("--write", write_back, "Rewrite FILE instead of printing the result");

    auto* grammar_cmd = app.add_subcommand("grammar", "Grammar file tools");
    grammar_cmd->require_subcommand(1);
    auto* check = grammar_cmd->add_subcommand("check", "Validate a grammar file");
    std::string grammar_path;
    check->add_option("path", grammar_path, "Grammar file")->required();

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = 8080;
    std::string grammar_dir, host = "127.0.0.1";
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Address to bind");
    serve->add_option("--grammars", grammar_dir, "Directory of extra *.grammar.json files");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "brics: " << e.what() << "\n";
        err << "usage: brics {render|overview|extract|grammar check|serve} ... (see --help)\n";
        return exit_usage;
    }

    try {
        if (*render) {
            auto in = load_source(file, grammar_name);
            const int status = report_diagnostics(file, in.parsed.diagnostics, err);
            auto activity = conditional_activity(in.parsed.tree, in.source, in.grammar, {});
            auto rects = editor_rects(in.parsed.tree, in.source, Palette{}, &activity);
            std::string data;
            if (format == "ansi") {
                data = render_ansi(rects, in.source);
            } else {
                std::vector<FoldSpan> folds;
                if (fold_level >= 0) folds = fold_spans(in.parsed.tree, fold_level);
                data = render_svg(rects, folds, in.source);
            }
            emit(data, out_path, out);
            return status;
        }
        if (*overview) {
            auto in = load_source(file, grammar_name);
            const int status = report_diagnostics(file, in.parsed.diagnostics, err);
            OverviewRequest req;
            req.view_width = width;
            req.view_height = height;
            req.granularity = granularity;
            req.from_line = from_line.value_or(1);
            req.to_line = to_line.value_or(std::max(1, in.source.line_count()));
            auto activity = conditional_activity(in.parsed.tree, in.source, in.grammar, {});
            auto model = overview_model(in.parsed.tree, in.source, req, Palette{}, &activity);
            if (!errors_path.empty()) model = mark_errors(std::move(model), read_error_lines(errors_path));
            const bool svg = fs::path(out_path).extension() == ".svg";
            emit(svg ? render_overview_svg(model) : to_json(model).dump(2) + "\n", out_path, out);
            return status;
        }
        if (*extract) {
            auto in = load_source(file, grammar_name);
            const int status = report_diagnostics(file, in.parsed.diagnostics, err);
            const auto pos = parse_position(block_spec);
            std::optional<int> id;
            try {
                id = block_at(in.parsed.tree, in.source, pos);
            } catch (const Error& e) {
                throw CliFailure{exit_usage, std::string("--block: ") + e.what()};
            }
            if (!id) throw CliFailure{exit_refactor, "E_NOT_FOUND: no block contains " + block_spec};
            auto result = extract_block(in.source, in.parsed.tree, in.grammar, *id, new_name);
            if (write_back) {
                write_file(file, result.new_source);
            } else {
                out << result.new_source;
            }
            return status;
        }
        if (*check) {
            auto result = load_grammar(read_file(grammar_path));
            for (const auto& d : result.diagnostics) {
                err << grammar_path << ": "
                    << (d.severity == GrammarDiagnostic::Severity::error ? "error" : "warning") << ": "
                    << (d.path.empty() ? "(document)" : d.path) << ": " << d.message << "\n";
            }
            if (!result.ok()) return exit_diagnostics;
            out << "grammar '" << result.grammar->name << "' is valid\n";
            return exit_ok;
        }
        if (*serve) {
            std::vector<StructureGrammar> grammars = builtin_grammars();
            if (!grammar_dir.empty()) {
                for (auto& g : load_grammar_directory(grammar_dir)) {
                    std::erase_if(grammars, [&](const StructureGrammar& b) { return b.name == g.name; });
                    grammars.push_back(std::move(g));
                }
            }
            Service service(std::move(grammars));
            const int bound = service.bind(host, port);
            if (bound < 0) throw CliFailure{exit_usage, "cannot listen on " + host + ":" + std::to_string(port)};
            err << "brics: listening on http://" << host << ":" << bound << "\n";
            g_stop_requested = 0;
            std::signal(SIGINT, request_stop);
            std::signal(SIGTERM, request_stop);
            std::atomic<bool> done{false};
            std::thread watcher([&] {
                while (!done && !g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(50));
                service.stop();
            });
            service.listen();
            done = true;
            watcher.join();
            std::signal(SIGINT, SIG_DFL);
            std::signal(SIGTERM, SIG_DFL);
            return exit_ok;
        }
    } catch (const CliFailure& f) {
        err << "brics: " << f.message << "\n";
        return f.code;
    } catch (const Error& e) {
        err << "brics: " << to_string(e.code()) << ": " << e.what() << "\n";
        switch (e.code()) {
        case ErrorCode::multi_output:
        case ErrorCode::name_taken:
        case ErrorCode::invalid_name:
        case ErrorCode::no_method:
        case ErrorCode::bad_request:
            return exit_refactor;
        default:
            return exit_usage;
        }
    }
    return exit_usage;
}

} // namespace brics::gateway
