#include "cbx/json_io.hpp"

#include "cbx/error.hpp"

namespace cbx {

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

const Json& field(const Json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

std::string string_field(const Json& node, const char* key) {
    const auto& v = field(node, key);
    if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double number_field(const Json& node, const char* key) {
    const auto& v = field(node, key);
    if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::optional<int> optional_int(const Json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
    return it->get<int>();
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace

Json feature_value_to_json(const FeatureValue& value) {
    return std::visit([](const auto& v) { return Json(v); }, value);
}

// ------------------------------------------------------------ predicates

Predicate predicate_from_json(const Json& node) {
    if (!node.is_object()) bad("predicate must be an object");
    const auto kind = string_field(node, "kind");
    if (kind == "score-range") {
        ScoreRangePredicate p;
        p.classifier = string_field(node, "classifier");
        p.bin = optional_int(node, "bin");
        p.bins = optional_int(node, "bins").value_or(10);
        if (p.bin) {
            p.lo = node.contains("lo") ? number_field(node, "lo") : static_cast<double>(*p.bin) / p.bins;
            p.hi = node.contains("hi") ? number_field(node, "hi") : static_cast<double>(*p.bin + 1) / p.bins;
        } else {
            p.lo = number_field(node, "lo");
            p.hi = number_field(node, "hi");
        }
        return p;
    }
    if (kind == "outcome") {
        OutcomePredicate p;
        p.classifier = string_field(node, "classifier");
        const auto category = string_field(node, "category");
        auto o = parse_outcome(category);
        if (!o) bad("unknown outcome category '" + category + "'");
        p.category = *o;
        return p;
    }
    if (kind == "class") return ClassPredicate{string_field(node, "label")};
    if (kind == "feature-range") {
        FeatureRangePredicate p;
        p.name = string_field(node, "name");
        p.bin = optional_int(node, "bin");
        p.bins = optional_int(node, "bins").value_or(10);
        p.lo = node.contains("lo") ? number_field(node, "lo") : 0.0;
        p.hi = node.contains("hi") ? number_field(node, "hi") : 0.0;
        if (!p.bin && (!node.contains("lo") || !node.contains("hi"))) bad("feature-range needs lo and hi");
        return p;
    }
    if (kind == "feature-equals") {
        FeatureEqualsPredicate p;
        p.name = string_field(node, "name");
        const auto& v = field(node, "value");
        if (v.is_number()) p.value = v.get<double>();
        else if (v.is_string()) p.value = v.get<std::string>();
        else bad("feature-equals value must be a number or string");
        return p;
    }
    if (kind == "id-list") {
        IdListPredicate p;
        const auto& ids = field(node, "ids");
        if (!ids.is_array()) bad("id-list ids must be an array");
        for (const auto& id : ids) {
            if (!id.is_string()) bad("id-list ids must be strings");
            p.ids.push_back(id.get<std::string>());
        }
        return p;
    }
    bad("unknown predicate kind '" + kind + "'");
}

Json to_json(const Predicate& predicate) {
    struct Visitor {
        Json operator()(const ScoreRangePredicate& p) const {
            Json j{{"kind", "score-range"}, {"classifier", p.classifier}, {"lo", p.lo}, {"hi", p.hi}};
            if (p.bin) {
                j["bin"] = *p.bin;
                j["bins"] = p.bins;
            }
            return j;
        }
        Json operator()(const OutcomePredicate& p) const {
            return {{"kind", "outcome"}, {"classifier", p.classifier}, {"category", outcome_name(p.category)}};
        }
        Json operator()(const ClassPredicate& p) const { return {{"kind", "class"}, {"label", p.label}}; }
        Json operator()(const FeatureRangePredicate& p) const {
            Json j{{"kind", "feature-range"}, {"name", p.name}, {"lo", p.lo}, {"hi", p.hi}};
            if (p.bin) {
                j["bin"] = *p.bin;
                j["bins"] = p.bins;
            }
            return j;
        }
        Json operator()(const FeatureEqualsPredicate& p) const {
            return {{"kind", "feature-equals"}, {"name", p.name}, {"value", feature_value_to_json(p.value)}};
        }
        Json operator()(const IdListPredicate& p) const { return {{"kind", "id-list"}, {"ids", p.ids}}; }
    };
    return std::visit(Visitor{}, predicate);
}

// ------------------------------------------------------------ expressions

SelectionExpr expr_from_json(const Json& node) {
    if (!node.is_object()) bad("selection expression must be an object");
    if (auto pred = node.find("pred"); pred != node.end()) return SelectionExpr::leaf(predicate_from_json(*pred));
    const auto op = string_field(node, "op");
    const auto& args_node = field(node, "args");
    if (!args_node.is_array()) bad("'args' must be an array");
    std::vector<SelectionExpr> args;
    for (const auto& a : args_node) args.push_back(expr_from_json(a));

    SelectionExpr e;
    if (op == "union") e.op = SelectionExpr::Op::Union;
    else if (op == "intersection") e.op = SelectionExpr::Op::Intersection;
    else if (op == "difference") e.op = SelectionExpr::Op::Difference;
    else if (op == "complement") e.op = SelectionExpr::Op::Complement;
    else bad("unknown selection operator '" + op + "'");
    e.args = std::move(args);
    e.validate();
    return e;
}

Json to_json(const SelectionExpr& expr) {
    using Op = SelectionExpr::Op;
    if (expr.op == Op::Leaf) return {{"pred", to_json(*expr.predicate)}};
    Json args = Json::array();
    for (const auto& a : expr.args) args.push_back(to_json(a));
    const char* name = expr.op == Op::Union          ? "union"
                       : expr.op == Op::Intersection ? "intersection"
                       : expr.op == Op::Difference   ? "difference"
                                                     : "complement";
    return {{"op", name}, {"args", std::move(args)}};
}

// ------------------------------------------------------------ scalars

Json to_json(const OperatingPoint& op) { return {{"lower", op.lower}, {"upper", op.upper}}; }

OperatingPoint operating_point_from_json(const Json& node) {
    if (!node.is_object()) bad("operating point must be an object");
    return OperatingPoint::make(number_field(node, "lower"), number_field(node, "upper"));
}

Json to_json(const TrinaryCounts& c) {
    return {{"TP", c.tp}, {"FP", c.fp}, {"TN", c.tn}, {"FN", c.fn}, {"Rejected", c.rejected}, {"total", c.total()}};
}

Json to_json(const MetricValue& v) { return {{"value", v.value}, {"undefined", v.undefined}}; }

Json to_json(const ValidationReport& report) {
    auto issues = [](const std::vector<ValidationIssue>& list) {
        Json out = Json::array();
        for (const auto& i : list) {
            Json j{{"code", i.code}, {"message", i.message}};
            j["id"] = i.offending_id ? Json(*i.offending_id) : Json(nullptr);
            out.push_back(std::move(j));
        }
        return out;
    };
    return {{"errors", issues(report.errors)},
            {"warnings", issues(report.warnings)},
            {"counts",
             {{"instances", report.instances},
              {"classifiers", report.classifiers},
              {"positive", report.positives},
              {"negative", report.negatives},
              {"scores_normalized", report.scores_normalized}}}};
}

// ------------------------------------------------------------ curves

// Columnar: one array per coordinate, which keeps 10^5-point curves cheap to
// build and parse.
Json to_json(const CurveSeries& series) {
    const auto n = series.points.size();
    Json x = Json::array(), y = Json::array(), param = Json::array(), undefined = Json::array();
    for (auto* column : {&x, &y, &param, &undefined}) column->get_ref<Json::array_t&>().reserve(n);
    for (const auto& p : series.points) {
        x.get_ref<Json::array_t&>().emplace_back(p.x);
        y.get_ref<Json::array_t&>().emplace_back(p.y);
        param.get_ref<Json::array_t&>().emplace_back(nullable(p.param));
        undefined.get_ref<Json::array_t&>().emplace_back(p.undefined);
    }
    return {{"label", series.label},
            {"x", std::move(x)},
            {"y", std::move(y)},
            {"param", std::move(param)},
            {"undefined", std::move(undefined)}};
}

Json to_json(const std::vector<ReliabilityBin>& bins) {
    Json out = Json::array();
    for (const auto& b : bins)
        out.push_back({{"bin", b.bin},
                       {"lo", b.lo},
                       {"hi", b.hi},
                       {"mean_score", b.mean_score},
                       {"value", b.value},
                       {"count", b.count},
                       {"undefined", b.undefined}});
    return out;
}

Json to_json(const std::vector<PerfConfBin>& bins) {
    Json out = Json::array();
    for (const auto& b : bins)
        out.push_back({{"bin", b.bin}, {"lo", b.lo}, {"hi", b.hi}, {"counts", to_json(b.counts)}});
    return out;
}

Json to_json(const std::vector<BandwidthRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows) {
        Json marks = Json::array();
        for (const auto& m : r.marks)
            marks.push_back({{"bandwidth", m.bandwidth}, {"upper", to_json(m.upper)}, {"lower", to_json(m.lower)}});
        out.push_back({{"threshold", r.threshold}, {"center", to_json(r.center)}, {"marks", std::move(marks)}});
    }
    return out;
}

Json to_json(const std::vector<HeatmapCell>& cells) {
    Json out = Json::array();
    for (const auto& c : cells)
        out.push_back({{"lower", c.lower},
                       {"upper", c.upper},
                       {"value", c.value.value},
                       {"coverage", c.coverage},
                       {"undefined", c.value.undefined}});
    return out;
}

Json to_json(const ScatterGrid& grid) {
    Json overlay = Json::array();
    for (const auto& p : grid.overlay)
        overlay.push_back({{"selection", p.selection}, {"id", p.id}, {"x", p.x}, {"y", p.y}});
    return {{"nx", grid.nx},
            {"ny", grid.ny},
            {"x_range", {grid.x_lo, grid.x_hi}},
            {"y_range", {grid.y_lo, grid.y_hi}},
            {"counts", grid.counts},
            {"total", grid.total},
            {"overlay", std::move(overlay)}};
}

Json to_json(const FeatureHistogram& histogram) {
    Json bars = Json::array();
    for (const auto& b : histogram.bars)
        bars.push_back({{"label", b.label}, {"count", b.count}, {"overlap", b.overlap}, {"predicate", to_json(b.predicate)}});
    return {{"feature", histogram.feature}, {"categorical", histogram.categorical}, {"bars", std::move(bars)}};
}

Json to_json(const ReplicateSummary& summary) {
    Json results = Json::array();
    for (const auto& r : summary.results)
        results.push_back({{"seed", r.seed}, {"value", r.value}, {"undefined", r.undefined}});
    return {{"results", std::move(results)},
            {"min", summary.min},
            {"max", summary.max},
            {"mean", summary.mean},
            {"defined", summary.defined}};
}

} // namespace cbx
