#pragma once

#include "cbx/dataset.hpp"
#include "cbx/json_io.hpp"
#include "cbx/sampling.hpp"
#include "cbx/selection.hpp"
#include "cbx/trinary.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cbx {

struct FocusState {
    std::optional<std::uint32_t> item;
    std::uint64_t random_calls = 0;
};

struct StoredSample {
    std::string id;
    std::optional<PartitionResult> partition;
    std::optional<BootstrapResult> bootstrap;
    std::vector<std::string> selections; ///< partition A / B selection ids
};

/// "none" | "class" | "feature:<name>".
Stratification parse_stratification(const std::string& text);
StoredSample sample_from_json(const Json& node, const Dataset& dataset);

/// One analysis workspace: a dataset plus everything the user has set on
/// it. Callers hold `mutex` shared for reads and exclusive for writes.
class Session {
public:
    Session(std::string id, Dataset dataset);

    const std::string& id() const noexcept { return id_; }

    Dataset dataset;
    OperatingPointTable points;
    SelectionRegistry selections;
    FocusState focus;
    std::map<std::string, StoredSample> samples;
    std::uint64_t next_sample_id = 1;
    /// When set, every computation is scoped to this selection (the other
    /// partition is hidden).
    std::optional<std::string> visible_selection;

    mutable std::shared_mutex mutex;

    /// Session document holding everything needed to rebuild this state,
    /// including realized sample members.
    Json export_document() const;
    /// Rebuilds a session from export_document() output.
    static std::unique_ptr<Session> import_document(std::string id, const Json& document);

private:
    std::string id_;
};

class SessionStore {
public:
    std::shared_ptr<Session> create(Dataset dataset, std::optional<std::string> id = std::nullopt);
    std::shared_ptr<Session> adopt(std::unique_ptr<Session> session);
    /// Throws SessionNotFound.
    std::shared_ptr<Session> get(const std::string& id) const;
    bool remove(const std::string& id);
    std::string next_id();

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t counter_ = 1;
};

} // namespace cbx
