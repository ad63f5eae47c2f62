#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "brics/blockparse.hpp"

namespace brics {

/// Lowercase hex SHA-256 of the bytes.
std::string content_digest(std::string_view text);

struct Edit {
    std::size_t start_byte = 0;
    std::size_t end_byte = 0;
    std::string replacement;
    std::uint64_t base_version = 0;
};

/// Immutable result of one document version. `tree` and `diagnostics` are
/// exactly parse_blocks(text).
struct Snapshot {
    std::uint64_t version = 0;
    std::string text;
    std::string digest;
    std::string grammar;
    BlockTree tree;
    std::vector<ParseDiagnostic> diagnostics;
};

using SnapshotPtr = std::shared_ptr<const Snapshot>;

struct VersionEvent {
    std::uint64_t version = 0;
    std::string digest;
};

/// One edited document. Edits are serialized by an internal mutex; the
/// snapshot handed out is never mutated afterwards.
class Session {
public:
    using Listener = std::function<void(const SnapshotPtr&)>;

    /// Throws Error(encoding) for invalid UTF-8.
    Session(std::string text, std::shared_ptr<const StructureGrammar> grammar);

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    SnapshotPtr snapshot() const;
    const StructureGrammar& grammar() const noexcept { return *grammar_; }

    /// Splices the edit in and reparses. Listeners are invoked, in version
    /// order, before this returns. Throws Error with stale, range, boundary or
    /// encoding; a rejected edit changes nothing.
    SnapshotPtr apply_edit(const Edit& edit);

    /// Replaces the whole text (used after a refactoring) as one edit.
    SnapshotPtr replace_text(std::string text, std::uint64_t base_version);

    int subscribe(Listener listener);
    void unsubscribe(int token);

    /// Events with version > `after`, waiting up to `timeout` for one to arrive.
    std::vector<VersionEvent> events_after(std::uint64_t after, std::chrono::milliseconds timeout) const;

    /// Wakes every waiter in events_after (used on shutdown).
    void interrupt();

private:
    SnapshotPtr make_snapshot(std::string text, std::uint64_t version) const;

    std::shared_ptr<const StructureGrammar> grammar_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    SnapshotPtr current_;
    std::vector<VersionEvent> history_; // one entry per accepted edit
    std::map<int, Listener> listeners_;
    int next_token_ = 1;
    bool interrupted_ = false;
};

/// open_session: version 0 snapshot of `text`.
std::shared_ptr<Session> open_session(std::string text, std::shared_ptr<const StructureGrammar> grammar);

/// Named grammars plus the live sessions of a service.
class SessionStore {
public:
    explicit SessionStore(std::vector<StructureGrammar> grammars);

    /// Throws Error(unknown_grammar) or Error(encoding).
    std::pair<std::string, std::shared_ptr<Session>> create(std::string text, const std::string& grammar);

    /// Throws Error(not_found).
    std::shared_ptr<Session> get(const std::string& id) const;

    std::shared_ptr<const StructureGrammar> grammar(const std::string& name) const;

    void interrupt_all();

private:
    std::map<std::string, std::shared_ptr<const StructureGrammar>> grammars_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

} // namespace brics
