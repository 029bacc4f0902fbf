#include "cbx/selection.hpp"

#include "cbx/binning.hpp"
#include "cbx/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cbx {

BinSpec BinSpec::make(int count, double lo, double hi) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw Error(ErrorCode::InvalidArgument, "bin range must satisfy lo <= hi");
    return BinSpec{count, lo, hi};
}

std::optional<std::pair<double, double>> numeric_feature_range(const Dataset& dataset, const std::string& feature) {
    std::optional<std::pair<double, double>> range;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto* v = dataset.feature(i, feature);
        if (!v) continue;
        const auto* d = std::get_if<double>(v);
        if (!d) continue;
        if (!range) range.emplace(*d, *d);
        range->first = std::min(range->first, *d);
        range->second = std::max(range->second, *d);
    }
    return range;
}

bool feature_has_strings(const Dataset& dataset, const std::string& feature) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto* v = dataset.feature(i, feature);
        if (v && std::holds_alternative<std::string>(*v)) return true;
    }
    return false;
}

// ------------------------------------------------------------ expressions

SelectionExpr SelectionExpr::leaf(Predicate p) {
    SelectionExpr e;
    e.op = Op::Leaf;
    e.predicate = std::move(p);
    return e;
}

SelectionExpr SelectionExpr::union_of(std::vector<SelectionExpr> args) {
    SelectionExpr e;
    e.op = Op::Union;
    e.args = std::move(args);
    return e;
}

SelectionExpr SelectionExpr::intersection_of(std::vector<SelectionExpr> args) {
    SelectionExpr e;
    e.op = Op::Intersection;
    e.args = std::move(args);
    return e;
}

SelectionExpr SelectionExpr::difference(SelectionExpr a, SelectionExpr b) {
    SelectionExpr e;
    e.op = Op::Difference;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

SelectionExpr SelectionExpr::complement(SelectionExpr a) {
    SelectionExpr e;
    e.op = Op::Complement;
    e.args.push_back(std::move(a));
    return e;
}

namespace {

void check_range(double lo, double hi, const char* what) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " predicate needs finite lo <= hi");
}

void check_bin(const std::optional<int>& bin, int bins) {
    if (!bin) return;
    if (bins < 1 || *bin < 0 || *bin >= bins)
        throw Error(ErrorCode::InvalidArgument, "bin index must lie in [0, bins)");
}

} // namespace

void SelectionExpr::validate() const {
    switch (op) {
        case Op::Leaf:
            if (!predicate) throw Error(ErrorCode::InvalidArgument, "leaf expression without predicate");
            if (!args.empty()) throw Error(ErrorCode::InvalidArgument, "leaf expression cannot have arguments");
            if (const auto* p = std::get_if<ScoreRangePredicate>(&*predicate)) {
                check_range(p->lo, p->hi, "score-range");
                check_bin(p->bin, p->bins);
            } else if (const auto* f = std::get_if<FeatureRangePredicate>(&*predicate)) {
                check_range(f->lo, f->hi, "feature-range");
                check_bin(f->bin, f->bins);
            }
            return;
        case Op::Union:
        case Op::Intersection:
            if (args.empty()) throw Error(ErrorCode::InvalidArgument, "union/intersection need at least one argument");
            break;
        case Op::Difference:
            if (args.size() != 2) throw Error(ErrorCode::InvalidArgument, "difference takes exactly two arguments");
            break;
        case Op::Complement:
            if (args.size() != 1) throw Error(ErrorCode::InvalidArgument, "complement takes exactly one argument");
            break;
    }
    for (const auto& a : args) a.validate();
}

namespace {

void require_feature(const Dataset& dataset, const std::string& name) {
    if (!dataset.has_feature(name))
        throw Error(ErrorCode::UnknownFeature, "unknown feature '" + name + "'", name);
}

struct PredicateEvaluator {
    const Dataset& dataset;
    const OperatingPointTable& points;

    MemberSet operator()(const ScoreRangePredicate& p) const {
        const auto& c = dataset.classifier(p.classifier);
        MemberSet out(dataset.size());
        const auto scores = c.score_view();
        if (p.bin) {
            const auto spec = BinSpec::make(p.bins);
            for (std::size_t i = 0; i < scores.size(); ++i)
                if (spec.index_of(scores[i]) == *p.bin) out.insert(i);
        } else {
            const bool closed_top = p.hi >= 1.0;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                const double s = scores[i];
                if (s >= p.lo && (s < p.hi || (closed_top && s == p.hi))) out.insert(i);
            }
        }
        return out;
    }

    MemberSet operator()(const OutcomePredicate& p) const {
        const auto& c = dataset.classifier(p.classifier);
        const auto op = points.point_for(c);
        MemberSet out(dataset.size());
        const auto scores = c.score_view();
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (classify(scores[i], dataset.label(i), op) == p.category) out.insert(i);
        return out;
    }

    MemberSet operator()(const ClassPredicate& p) const {
        Label want;
        if (p.label == dataset.classes().positive) want = Label::Positive;
        else if (p.label == dataset.classes().negative) want = Label::Negative;
        else throw Error(ErrorCode::InvalidArgument, "unknown class '" + p.label + "'", p.label);
        MemberSet out(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i)
            if (dataset.label(i) == want) out.insert(i);
        return out;
    }

    MemberSet operator()(const FeatureRangePredicate& p) const {
        require_feature(dataset, p.name);
        MemberSet out(dataset.size());
        std::optional<BinSpec> spec;
        if (p.bin) {
            const auto range = numeric_feature_range(dataset, p.name);
            if (!range) return out;
            spec = BinSpec::make(p.bins, range->first, range->second);
        }
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const auto* v = dataset.feature(i, p.name);
            const auto* d = v ? std::get_if<double>(v) : nullptr;
            if (!d) continue;
            const bool hit = spec ? spec->index_of(*d) == *p.bin : (*d >= p.lo && *d <= p.hi);
            if (hit) out.insert(i);
        }
        return out;
    }

    MemberSet operator()(const FeatureEqualsPredicate& p) const {
        require_feature(dataset, p.name);
        MemberSet out(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const auto* v = dataset.feature(i, p.name);
            if (v && *v == p.value) out.insert(i);
        }
        return out;
    }

    MemberSet operator()(const IdListPredicate& p) const {
        MemberSet out(dataset.size());
        for (const auto& id : p.ids) out.insert(dataset.require_index(id));
        return out;
    }
};

} // namespace

MemberSet evaluate_predicate(const Predicate& predicate, const Dataset& dataset, const OperatingPointTable& points) {
    return std::visit(PredicateEvaluator{dataset, points}, predicate);
}

namespace {

MemberSet evaluate_node(const SelectionExpr& expr, const Dataset& dataset, const OperatingPointTable& points) {
    using Op = SelectionExpr::Op;
    switch (expr.op) {
        case Op::Leaf: return evaluate_predicate(*expr.predicate, dataset, points);
        case Op::Union: {
            MemberSet out(dataset.size());
            for (const auto& a : expr.args) out |= evaluate_node(a, dataset, points);
            return out;
        }
        case Op::Intersection: {
            MemberSet out = evaluate_node(expr.args.front(), dataset, points);
            for (std::size_t k = 1; k < expr.args.size(); ++k) out &= evaluate_node(expr.args[k], dataset, points);
            return out;
        }
        case Op::Difference:
            return evaluate_node(expr.args[0], dataset, points) - evaluate_node(expr.args[1], dataset, points);
        case Op::Complement: return evaluate_node(expr.args[0], dataset, points).complement();
    }
    return MemberSet(dataset.size());
}

} // namespace

MemberSet evaluate(const SelectionExpr& expr, const Dataset& dataset, const OperatingPointTable& points) {
    expr.validate();
    return evaluate_node(expr, dataset, points);
}

// ------------------------------------------------------------ overlap

std::vector<OverlapCount> overlap(const MemberSet& selection, std::span<const MemberSet> grouping) {
    std::vector<OverlapCount> out;
    out.reserve(grouping.size());
    MemberSet seen(selection.universe());
    for (const auto& cell : grouping) {
        if (!(seen & cell).empty()) throw Error(ErrorCode::InvalidArgument, "grouping cells must be disjoint");
        seen |= cell;
        out.push_back({(selection & cell).count(), cell.count()});
    }
    return out;
}

// ------------------------------------------------------------ registry

std::string_view slot_name(Slot slot) {
    switch (slot) {
        case Slot::None: return "none";
        case Slot::A: return "A";
        case Slot::B: return "B";
    }
    return "none";
}

std::optional<Slot> parse_slot(std::string_view name) {
    if (name == "none" || name.empty()) return Slot::None;
    if (name == "A" || name == "a") return Slot::A;
    if (name == "B" || name == "b") return Slot::B;
    return std::nullopt;
}

Selection& SelectionRegistry::insert(std::string id, std::string name, SelectionExpr expr, double weight, Slot slot,
                                     const Dataset& dataset, const OperatingPointTable& points) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw Error(ErrorCode::InvalidArgument, "selection weight must be positive");
    if (selections_.count(id)) throw Error(ErrorCode::Conflict, "selection id '" + id + "' already exists", id);
    Selection sel;
    sel.members = evaluate(expr, dataset, points);
    sel.evaluated_at = points.epoch();
    sel.id = id;
    sel.name = name.empty() ? id : std::move(name);
    sel.expr = std::move(expr);
    sel.weight = weight;
    if (slot != Slot::None) {
        for (auto& [_, other] : selections_)
            if (other.slot == slot) other.slot = Slot::None;
    }
    sel.slot = slot;
    order_.push_back(id);
    return selections_.emplace(id, std::move(sel)).first->second;
}

const Selection& SelectionRegistry::create(std::string name, SelectionExpr expr, double weight, Slot slot,
                                           const Dataset& dataset, const OperatingPointTable& points) {
    std::string id = "s" + std::to_string(next_id_);
    auto& sel = insert(std::move(id), std::move(name), std::move(expr), weight, slot, dataset, points);
    ++next_id_;
    return sel;
}

const Selection& SelectionRegistry::restore(std::string id, std::string name, SelectionExpr expr, double weight,
                                            Slot slot, const Dataset& dataset, const OperatingPointTable& points) {
    return insert(std::move(id), std::move(name), std::move(expr), weight, slot, dataset, points);
}

const Selection* SelectionRegistry::find(const std::string& id) const {
    auto it = selections_.find(id);
    return it == selections_.end() ? nullptr : &it->second;
}

const Selection& SelectionRegistry::get(const std::string& id) const {
    if (const auto* s = find(id)) return *s;
    throw Error(ErrorCode::UnknownSelection, "unknown selection '" + id + "'", id);
}

Selection& SelectionRegistry::get_mutable(const std::string& id) {
    auto it = selections_.find(id);
    if (it == selections_.end()) throw Error(ErrorCode::UnknownSelection, "unknown selection '" + id + "'", id);
    return it->second;
}

const Selection* SelectionRegistry::in_slot(Slot slot) const {
    if (slot == Slot::None) return nullptr;
    for (const auto& [_, s] : selections_)
        if (s.slot == slot) return &s;
    return nullptr;
}

std::vector<const Selection*> SelectionRegistry::list() const {
    std::vector<const Selection*> out;
    out.reserve(order_.size());
    for (const auto& id : order_) out.push_back(&selections_.at(id));
    return out;
}

void SelectionRegistry::set_slot(const std::string& id, Slot slot) {
    auto& sel = get_mutable(id);
    if (slot != Slot::None) {
        for (auto& [_, other] : selections_)
            if (other.slot == slot) other.slot = Slot::None;
    }
    sel.slot = slot;
}

void SelectionRegistry::set_weight(const std::string& id, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw Error(ErrorCode::InvalidArgument, "selection weight must be positive");
    get_mutable(id).weight = weight;
}

void SelectionRegistry::remove(const std::string& id) {
    get_mutable(id);
    selections_.erase(id);
    order_.erase(std::remove(order_.begin(), order_.end(), id), order_.end());
}

void SelectionRegistry::refresh(const Dataset& dataset, const OperatingPointTable& points) {
    for (auto& [_, sel] : selections_) {
        if (sel.evaluated_at == points.epoch()) continue;
        sel.members = evaluate(sel.expr, dataset, points);
        sel.evaluated_at = points.epoch();
    }
}

// ------------------------------------------------------------ focus

std::uint32_t step_focus(FocusMode mode, const MemberSet& scope, std::optional<std::uint32_t> current,
                         std::uint64_t seed, std::uint64_t call_index) {
    const auto members = scope.indices();
    if (members.empty()) throw Error(ErrorCode::EmptyScope, "focus scope is empty");
    switch (mode) {
        case FocusMode::Next: {
            if (!current) return members.front();
            auto it = std::upper_bound(members.begin(), members.end(), *current);
            return it == members.end() ? members.front() : *it;
        }
        case FocusMode::Prev: {
            if (!current) return members.back();
            auto it = std::lower_bound(members.begin(), members.end(), *current);
            return it == members.begin() ? members.back() : *std::prev(it);
        }
        case FocusMode::Random: {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(call_index), static_cast<std::uint32_t>(call_index >> 32)};
            std::mt19937_64 gen(seq);
            std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
            return members[pick(gen)];
        }
    }
    return members.front();
}

} // namespace cbx
