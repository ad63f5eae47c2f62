#include "brics/session.hpp"

#include <openssl/evp.h>

#include "brics/error.hpp"

namespace brics {

std::string content_digest(std::string_view text) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

Session::Session(std::string text, std::shared_ptr<const StructureGrammar> grammar) : grammar_(std::move(grammar)) {
    current_ = make_snapshot(std::move(text), 0);
}

SnapshotPtr Session::make_snapshot(std::string text, std::uint64_t version) const {
    auto snap = std::make_shared<Snapshot>();
    SourceText source(text);
    auto parsed = parse_blocks(source, *grammar_);
    snap->version = version;
    snap->digest = content_digest(text);
    snap->text = std::move(text);
    snap->grammar = grammar_->name;
    snap->tree = std::move(parsed.tree);
    snap->diagnostics = std::move(parsed.diagnostics);
    return snap;
}

SnapshotPtr Session::snapshot() const {
    std::lock_guard lock(mutex_);
    return current_;
}

SnapshotPtr Session::apply_edit(const Edit& edit) {
    std::unique_lock lock(mutex_);
    const auto& text = current_->text;
    if (edit.base_version != current_->version) {
        throw Error(ErrorCode::stale, "edit is based on version " + std::to_string(edit.base_version) +
                                          " but the document is at version " + std::to_string(current_->version));
    }
    if (edit.start_byte > edit.end_byte || edit.end_byte > text.size()) {
        throw Error(ErrorCode::range, "edit range [" + std::to_string(edit.start_byte) + ", " +
                                          std::to_string(edit.end_byte) + ") is outside the " +
                                          std::to_string(text.size()) + "-byte document");
    }
    auto mid_char = [&](std::size_t at) {
        return at < text.size() && utf8::is_continuation(static_cast<unsigned char>(text[at]));
    };
    if (mid_char(edit.start_byte) || mid_char(edit.end_byte)) {
        throw Error(ErrorCode::boundary, "edit bounds split a UTF-8 character");
    }
    if (!utf8::is_valid(edit.replacement)) throw Error(ErrorCode::encoding, "replacement is not valid UTF-8");

    std::string next;
    next.reserve(text.size() - (edit.end_byte - edit.start_byte) + edit.replacement.size());
    next.append(text, 0, edit.start_byte);
    next += edit.replacement;
    next.append(text, edit.end_byte, std::string::npos);

    auto snap = make_snapshot(std::move(next), current_->version + 1);
    current_ = snap;
    history_.push_back({snap->version, snap->digest});
    // Listeners run under the lock so they observe versions strictly in order.
    for (const auto& [_, listener] : listeners_) listener(snap);
    changed_.notify_all();
    return snap;
}

SnapshotPtr Session::replace_text(std::string text, std::uint64_t base_version) {
    Edit edit;
    edit.base_version = base_version;
    edit.start_byte = 0;
    {
        std::lock_guard lock(mutex_);
        edit.end_byte = current_->text.size();
    }
    edit.replacement = std::move(text);
    return apply_edit(edit);
}

int Session::subscribe(Listener listener) {
    std::lock_guard lock(mutex_);
    const int token = next_token_++;
    listeners_.emplace(token, std::move(listener));
    return token;
}

void Session::unsubscribe(int token) {
    std::lock_guard lock(mutex_);
    listeners_.erase(token);
}

std::vector<VersionEvent> Session::events_after(std::uint64_t after, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    changed_.wait_for(lock, timeout, [&] { return interrupted_ || current_->version > after; });
    std::vector<VersionEvent> out;
    // history_[k] holds version k + 1.
    for (std::size_t k = static_cast<std::size_t>(after); k < history_.size(); ++k) out.push_back(history_[k]);
    return out;
}

void Session::interrupt() {
    std::lock_guard lock(mutex_);
    interrupted_ = true;
    changed_.notify_all();
}

std::shared_ptr<Session> open_session(std::string text, std::shared_ptr<const StructureGrammar> grammar) {
    if (!grammar) throw Error(ErrorCode::unknown_grammar, "no grammar given");
    return std::make_shared<Session>(std::move(text), std::move(grammar));
}

SessionStore::SessionStore(std::vector<StructureGrammar> grammars) {
    for (auto& g : grammars) {
        auto name = g.name;
        grammars_[name] = std::make_shared<const StructureGrammar>(std::move(g));
    }
}

std::shared_ptr<const StructureGrammar> SessionStore::grammar(const std::string& name) const {
    auto it = grammars_.find(name);
    if (it == grammars_.end()) throw Error(ErrorCode::unknown_grammar, "unknown grammar '" + name + "'");
    return it->second;
}

std::pair<std::string, std::shared_ptr<Session>> SessionStore::create(std::string text, const std::string& grammar_name) {
    auto session = open_session(std::move(text), grammar(grammar_name));
    std::lock_guard lock(mutex_);
    std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, session);
    return {id, session};
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::not_found, "no session '" + id + "'");
    return it->second;
}

void SessionStore::interrupt_all() {
    std::lock_guard lock(mutex_);
    for (auto& [_, s] : sessions_) s->interrupt();
}

} // namespace brics
