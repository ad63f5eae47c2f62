#pragma once

#include "json.hpp"

#include "brics/blockparse.hpp"
#include "brics/refactor.hpp"
#include "brics/session.hpp"
#include "brics/viewmodel.hpp"

namespace brics::gateway {

using nlohmann::json;

json to_json(Position pos);
json to_json(const BlockTree& tree); // nested, roots first
json to_json(const ParseDiagnostic& diag);
json to_json(const std::vector<ParseDiagnostic>& diags);
json to_json(const BlockRect& rect);
json to_json(const OverviewModel& model);
json to_json(const DepSets& deps);
json to_json(const RefactorResult& result);
json to_json(const FoldSpan& fold);
json to_json(const ActivityMap& activity);

/// {version, digest, grammar, tree, diagnostics}; `with_text` adds the text.
json snapshot_json(const Snapshot& snap, bool with_text);

} // namespace brics::gateway
