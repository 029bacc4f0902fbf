#pragma once

#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/trinary.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cbx {

// ------------------------------------------------------------ predicates

/// Score in [lo, hi), closed at hi when hi >= 1. With `bin` set, membership
/// is instead "score falls in bin `bin` of `bins` equal-width bins on [0, 1]",
/// which is exactly how the histograms bin.
struct ScoreRangePredicate {
    std::string classifier;
    double lo = 0.0;
    double hi = 1.0;
    std::optional<int> bin;
    int bins = 10;
};

struct OutcomePredicate {
    std::string classifier;
    Outcome category = Outcome::TP;
};

/// Matches the named class.
struct ClassPredicate {
    std::string label;
};

/// Numeric feature in the closed interval [lo, hi]. With `bin` set,
/// membership is "value falls in bin `bin` of `bins` over the feature's
/// observed range". Absent and string values never match.
struct FeatureRangePredicate {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::optional<int> bin;
    int bins = 10;
};

struct FeatureEqualsPredicate {
    std::string name;
    FeatureValue value;
};

struct IdListPredicate {
    std::vector<std::string> ids;
};

using Predicate = std::variant<ScoreRangePredicate, OutcomePredicate, ClassPredicate, FeatureRangePredicate,
                               FeatureEqualsPredicate, IdListPredicate>;

// ------------------------------------------------------------ expressions

struct SelectionExpr {
    enum class Op { Leaf, Union, Intersection, Difference, Complement };

    Op op = Op::Leaf;
    std::optional<Predicate> predicate; ///< Leaf only
    std::vector<SelectionExpr> args;

    static SelectionExpr leaf(Predicate p);
    static SelectionExpr union_of(std::vector<SelectionExpr> args);
    static SelectionExpr intersection_of(std::vector<SelectionExpr> args);
    static SelectionExpr difference(SelectionExpr a, SelectionExpr b);
    static SelectionExpr complement(SelectionExpr a);
    static SelectionExpr empty() { return leaf(IdListPredicate{}); }
    static SelectionExpr all() { return complement(empty()); }

    /// Structural check: leaves carry a predicate, union/intersection have
    /// >= 1 argument, difference exactly 2, complement exactly 1, and
    /// numeric ranges have lo <= hi. Throws InvalidArgument.
    void validate() const;
};

MemberSet evaluate_predicate(const Predicate& predicate, const Dataset& dataset, const OperatingPointTable& points);

/// Materializes `expr`. Complement is relative to the full instance set and
/// outcome predicates use the points in `points`. Unknown classifiers,
/// features, class names or ids throw the matching Unknown* error.
MemberSet evaluate(const SelectionExpr& expr, const Dataset& dataset, const OperatingPointTable& points);

// ------------------------------------------------------------ overlap

struct OverlapCount {
    std::size_t in_selection = 0;
    std::size_t total = 0;

    bool operator==(const OverlapCount&) const = default;
};

/// Per grouping cell: members also in `selection`, and cell size. Cells must
/// be pairwise disjoint (InvalidArgument otherwise).
std::vector<OverlapCount> overlap(const MemberSet& selection, std::span<const MemberSet> grouping);

// ------------------------------------------------------------ registry

enum class Slot { None, A, B };

std::string_view slot_name(Slot slot);
std::optional<Slot> parse_slot(std::string_view name);

struct Selection {
    std::string id;
    std::string name;
    SelectionExpr expr;
    double weight = 1.0;
    Slot slot = Slot::None;
    MemberSet members;
    std::uint64_t evaluated_at = 0; ///< OperatingPointTable epoch of `members`
};

/// Session-scoped named selections. Materialized members are caches of each
/// provenance expression; refresh() re-resolves any that predate the
/// current operating-point epoch.
class SelectionRegistry {
public:
    const Selection& create(std::string name, SelectionExpr expr, double weight, Slot slot, const Dataset& dataset,
                            const OperatingPointTable& points);
    /// Re-creates a selection under a recorded id (session import).
    const Selection& restore(std::string id, std::string name, SelectionExpr expr, double weight, Slot slot,
                             const Dataset& dataset, const OperatingPointTable& points);

    const Selection& get(const std::string& id) const;
    const Selection* find(const std::string& id) const;
    const Selection* in_slot(Slot slot) const;
    std::vector<const Selection*> list() const;

    void set_slot(const std::string& id, Slot slot);
    void set_weight(const std::string& id, double weight);
    void remove(const std::string& id);

    void refresh(const Dataset& dataset, const OperatingPointTable& points);

    std::uint64_t next_id() const noexcept { return next_id_; }
    void set_next_id(std::uint64_t next) noexcept { next_id_ = next; }

private:
    Selection& insert(std::string id, std::string name, SelectionExpr expr, double weight, Slot slot,
                      const Dataset& dataset, const OperatingPointTable& points);
    Selection& get_mutable(const std::string& id);

    std::map<std::string, Selection> selections_;
    std::vector<std::string> order_;
    std::uint64_t next_id_ = 1;
};

// ------------------------------------------------------------ focus

enum class FocusMode { Next, Prev, Random };

/// Next/prev walk `scope` in ascending id order and wrap around; a missing
/// current item starts at the first (next) or last (prev) member. Random
/// draws uniformly and depends only on (seed, scope, call_index). Throws
/// EmptyScope when `scope` has no members.
std::uint32_t step_focus(FocusMode mode, const MemberSet& scope, std::optional<std::uint32_t> current,
                         std::uint64_t seed = 0, std::uint64_t call_index = 0);

} // namespace cbx
