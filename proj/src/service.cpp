#include "cbx/service.hpp"

#include "cbx/binning.hpp"
#include "cbx/curves.hpp"
#include "cbx/error.hpp"
#include "cbx/ingest.hpp"
#include "cbx/metrics.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace cbx {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return 400;
        case ErrorCode::NotFound:
        case ErrorCode::SessionNotFound:
        case ErrorCode::UnknownSelection:
        case ErrorCode::UnknownSample: return 404;
        case ErrorCode::Conflict:
        case ErrorCode::FrozenClassifier: return 409;
        default: return 422;
    }
}

Json error_body(const Error& error) {
    Json j{{"code", code_name(error.code())}, {"message", error.what()}};
    if (!error.detail().empty()) j["detail"] = error.detail();
    return j;
}

namespace {

/// An error whose status is fixed by where the entity was named (a path
/// segment is always 404, whatever the code).
struct RouteError {
    int status;
    Error error;
};

template <typename Fn>
auto in_path(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw RouteError{404, e};
    }
}

[[noreturn]] void invalid(const std::string& message, const std::string& detail = {}) {
    throw Error(ErrorCode::InvalidArgument, message, detail);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

// ------------------------------------------------------------ query access

const std::string* query(const Request& r, const char* key) {
    auto it = r.query.find(key);
    return it == r.query.end() ? nullptr : &it->second;
}

long long parse_integer(const std::string& text, const char* key) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        invalid(std::string("query parameter '") + key + "' must be an integer", text);
    return v;
}

double parse_number(const std::string& text, const char* key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    invalid(std::string("query parameter '") + key + "' must be a number", text);
}

int query_int(const Request& r, const char* key, int fallback, int min, int max) {
    const auto* v = query(r, key);
    if (!v) return fallback;
    const auto n = parse_integer(*v, key);
    if (n < min || n > max)
        invalid(std::string("query parameter '") + key + "' must lie in [" + std::to_string(min) + ", " +
                    std::to_string(max) + "]",
                *v);
    return static_cast<int>(n);
}

bool query_flag(const Request& r, const char* key, bool fallback) {
    const auto* v = query(r, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || v->empty()) return true;
    if (*v == "false" || *v == "0") return false;
    invalid(std::string("query parameter '") + key + "' must be true or false", *v);
}

Json parse_body(const Request& r) {
    if (r.body.empty()) return Json::object();
    try {
        return Json::parse(r.body);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("request body is not valid JSON: ") + e.what());
    }
}

Metric parse_metric_or_throw(const std::string& name) {
    auto m = parse_metric(name);
    if (!m) {
        if (name == "auc" || name == "brier")
            throw Error(ErrorCode::UnsupportedPolicy, "'" + name + "' does not depend on thresholds; use the classifiers table", name);
        invalid("unknown metric '" + name + "'", name);
    }
    return *m;
}

// ------------------------------------------------------------ session views

/// Scope and weights for a computation, resolved from the query and the
/// session's visibility and weighted selections.
struct Scope {
    std::optional<MemberSet> members;
    std::optional<WeightVector> weights;

    const MemberSet* set() const { return members ? &*members : nullptr; }
    const WeightVector* weight() const { return weights ? &*weights : nullptr; }
};

Scope resolve_scope(const Session& s, const Request& r, bool allow_weights) {
    Scope scope;
    auto restrict_to = [&](const MemberSet& m) {
        if (scope.members) *scope.members &= m;
        else scope.members = m;
    };
    if (s.visible_selection) restrict_to(s.selections.get(*s.visible_selection).members);
    if (const auto* sel = query(r, "selection"))
        for (const auto& id : split(*sel, ',')) restrict_to(s.selections.get(id).members);
    if (!allow_weights) return scope;

    std::vector<double> w;
    if (const auto* sample_id = query(r, "sample")) {
        auto it = s.samples.find(*sample_id);
        if (it == s.samples.end()) throw Error(ErrorCode::UnknownSample, "unknown sample '" + *sample_id + "'", *sample_id);
        if (!it->second.bootstrap) invalid("sample '" + *sample_id + "' is not a bootstrap sample", *sample_id);
        const auto& m = it->second.bootstrap->multiplicity;
        w.assign(m.begin(), m.end());
    }
    if (query_flag(r, "weighted", true)) {
        std::vector<WeightedSelection> weighted;
        for (const auto* sel : s.selections.list())
            if (sel->weight != 1.0) weighted.push_back({&sel->members, sel->weight});
        if (!weighted.empty()) {
            const auto combined = combine_weights(s.dataset.size(), weighted);
            if (w.empty()) w.assign(s.dataset.size(), 1.0);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] *= combined[i];
        }
    }
    if (!w.empty()) scope.weights.emplace(std::move(w));
    return scope;
}

std::vector<const ClassifierResult*> requested_classifiers(const Session& s, const Request& r) {
    std::vector<const ClassifierResult*> out;
    if (const auto* names = query(r, "classifier")) {
        for (const auto& name : split(*names, ',')) out.push_back(&s.dataset.classifier(name));
        if (out.empty()) invalid("query parameter 'classifier' is empty");
    } else {
        for (const auto& c : s.dataset.classifiers()) out.push_back(&c);
    }
    return out;
}

Json point_json(const Session& s, const ClassifierResult& c) {
    auto j = to_json(s.points.point_for(c));
    j["classifier"] = c.name;
    j["version"] = s.points.version(c.name);
    return j;
}

Json selection_json(const Selection& sel, bool with_expr) {
    Json j{{"id", sel.id},
           {"name", sel.name},
           {"size", sel.members.count()},
           {"weight", sel.weight},
           {"slot", slot_name(sel.slot)}};
    if (with_expr) j["expr"] = to_json(sel.expr);
    return j;
}

Json instance_json(const Session& s, std::size_t i) {
    const auto& inst = s.dataset.instance(i);
    Json features = Json::object();
    for (const auto& [name, value] : inst.features) features[name] = feature_value_to_json(value);
    Json scores = Json::object();
    Json outcomes = Json::object();
    for (const auto& c : s.dataset.classifiers()) {
        scores[c.name] = c.score(i);
        outcomes[c.name] = outcome_name(classify(c.score(i), inst.label, s.points.point_for(c)));
    }
    return {{"id", inst.id},
            {"label", s.dataset.classes().name_of(inst.label)},
            {"features", std::move(features)},
            {"scores", std::move(scores)},
            {"outcomes", std::move(outcomes)}};
}

Json instance_detail(const Session& s, std::size_t i) {
    auto j = instance_json(s, i);
    Json raw = Json::object();
    for (const auto& c : s.dataset.classifiers())
        if (c.normalization) raw[c.name] = c.raw_score(i);
    j["raw_scores"] = std::move(raw);
    return j;
}

Json focus_json(const Session& s) {
    if (!s.focus.item) return {{"focus", nullptr}, {"detail", nullptr}};
    return {{"focus", s.dataset.instance(*s.focus.item).id}, {"detail", instance_detail(s, *s.focus.item)}};
}

Json sample_json(const Session& s, const StoredSample& sample) {
    Json j{{"id", sample.id}};
    if (sample.partition) {
        const auto& p = *sample.partition;
        Json a = Json::array();
        p.a.for_each([&](std::uint32_t i) { a.push_back(s.dataset.instance(i).id); });
        j["kind"] = "partition";
        j["seed"] = p.seed;
        j["fraction"] = p.fraction;
        j["a"] = std::move(a);
        j["size_a"] = p.a.count();
        j["size_b"] = p.b.count();
        j["warnings"] = p.warnings;
    } else {
        const auto& b = *sample.bootstrap;
        Json mult = Json::object();
        for (std::size_t i = 0; i < b.multiplicity.size(); ++i)
            if (b.multiplicity[i]) mult[s.dataset.instance(i).id] = b.multiplicity[i];
        j["kind"] = "bootstrap";
        j["seed"] = b.seed;
        j["multiplicity"] = std::move(mult);
        j["draws"] = b.draws();
    }
    j["selections"] = sample.selections;
    return j;
}

/// Per slot selection, how many of its members fall in each cell.
Json slot_overlap(const Session& s, std::span<const MemberSet> cells) {
    Json out = Json::object();
    for (Slot slot : {Slot::A, Slot::B}) {
        const auto* sel = s.selections.in_slot(slot);
        if (!sel) continue;
        Json counts = Json::array();
        for (const auto& o : overlap(sel->members, cells)) counts.push_back(o.in_selection);
        out[std::string(slot_name(slot))] = {{"selection", sel->id}, {"counts", std::move(counts)}};
    }
    return out;
}

std::vector<ScatterOverlay> slot_overlays(const Session& s) {
    std::vector<ScatterOverlay> out;
    for (Slot slot : {Slot::A, Slot::B})
        if (const auto* sel = s.selections.in_slot(slot)) out.push_back({sel->id, &sel->members});
    return out;
}

// ------------------------------------------------------------ curves

Json classifier_curve(const std::string& kind, const Session& s, const Request& r, const ClassifierResult& c,
                      const Scope& scope) {
    const auto op = s.points.point_for(c);
    Json j{{"classifier", c.name}};
    if (kind == "roc") {
        const auto series = roc_curve(s.dataset, c, scope.set());
        j["auc"] = trapezoid_area(series);
        j["series"] = to_json(series);
    } else if (kind == "pr") {
        j["series"] = to_json(pr_curve(s.dataset, c, scope.set()));
    } else if (kind == "reliability") {
        const auto* mode_text = query(r, "mode");
        const std::string mode_name = mode_text ? *mode_text : "fraction-positive";
        ReliabilityMode mode;
        if (mode_name == "fraction-positive") mode = ReliabilityMode::FractionPositive;
        else if (mode_name == "percent-correct") mode = ReliabilityMode::PercentCorrect;
        else invalid("mode must be 'fraction-positive' or 'percent-correct'", mode_name);
        const auto bins = BinSpec::make(query_int(r, "bins", 10, 1, 1000));
        j["mode"] = mode_name;
        j["operating_point"] = to_json(op);
        j["bins"] = to_json(reliability_curve(s.dataset, c, bins, mode, scope.set(), op));
    } else if (kind == "perf-conf") {
        const auto bins = BinSpec::make(query_int(r, "bins", 10, 1, 1000));
        const auto histogram = perf_conf_histogram(s.dataset, c, op, bins, scope.set(), scope.weight());
        // Cells are (bin, outcome) pairs in bin-major order, matching the bars.
        std::vector<MemberSet> cells(static_cast<std::size_t>(bins.count) * kOutcomes.size(), MemberSet(s.dataset.size()));
        for_each_in_scope(s.dataset.size(), scope.set(), [&](std::size_t i) {
            const auto b = static_cast<std::size_t>(bins.index_of(c.score(i)));
            cells[b * kOutcomes.size() + static_cast<std::size_t>(classify(c.score(i), s.dataset.label(i), op))].insert(i);
        });
        j["operating_point"] = to_json(op);
        j["bins"] = to_json(histogram);
        j["overlap"] = slot_overlap(s, cells);
    } else if (kind == "arc") {
        const auto metric_name = query(r, "metric") ? *query(r, "metric") : std::string("accuracy");
        const auto metric = parse_metric_or_throw(metric_name);
        const auto policy_text = query(r, "policy") ? *query(r, "policy") : std::string("exclude");
        const auto policy = parse_policy(policy_text);
        if (!policy) invalid("unknown rejected policy '" + policy_text + "'", policy_text);
        const double t = query(r, "threshold") ? parse_number(*query(r, "threshold"), "threshold") : op.center();
        if (!(t >= 0.0 && t <= 1.0)) invalid("threshold must lie in [0, 1]");
        const int steps = query_int(r, "steps", 101, 2, 100000);
        j["threshold"] = t;
        j["metric"] = metric_name;
        j["policy"] = policy_text;
        j["series"] = to_json(rejection_curve(s.dataset, c, t, metric, *policy, scope.set(), steps, scope.weight()));
    } else if (kind == "bandwidth") {
        std::vector<double> bandwidths{0.05, 0.1, 0.15, 0.2};
        if (const auto* b = query(r, "bandwidths")) {
            bandwidths.clear();
            for (const auto& part : split(*b, ',')) {
                const double v = parse_number(part, "bandwidths");
                if (!(v >= 0.0 && v <= 1.0)) invalid("bandwidths must lie in [0, 1]", part);
                bandwidths.push_back(v);
            }
        }
        const auto metric_name = query(r, "metric") ? *query(r, "metric") : std::string("accuracy");
        const auto metric = parse_metric_or_throw(metric_name);
        j["metric"] = metric_name;
        j["bandwidths"] = bandwidths;
        j["rows"] = to_json(bandwidth_series(s.dataset, c, bandwidths, metric, query_int(r, "resolution", 20, 1, 1000),
                                             scope.set(), scope.weight()));
    } else if (kind == "heatmap") {
        const auto metric_name = query(r, "metric") ? *query(r, "metric") : std::string("accuracy");
        const auto metric = parse_metric_or_throw(metric_name);
        const int resolution = query_int(r, "resolution", 20, 1, 200);
        j["metric"] = metric_name;
        j["resolution"] = resolution;
        j["cells"] = to_json(threshold_grid(s.dataset, c, metric, resolution, scope.set(), scope.weight()));
    } else {  // trinary-summary
        const auto counts = trinary_summary(s.dataset, c, op, scope.set(), scope.weight());
        std::vector<MemberSet> cells(kOutcomes.size(), MemberSet(s.dataset.size()));
        for_each_in_scope(s.dataset.size(), scope.set(), [&](std::size_t i) {
            cells[static_cast<std::size_t>(classify(c.score(i), s.dataset.label(i), op))].insert(i);
        });
        Json metrics = Json::object();
        for (auto m : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC})
            metrics[std::string(metric_name(m))] = to_json(binary_metric(counts, m));
        j["operating_point"] = to_json(op);
        j["counts"] = to_json(counts);
        j["metrics"] = std::move(metrics);
        j["overlap"] = slot_overlap(s, cells);
    }
    return j;
}

Json curve(const std::string& kind, const Session& s, const Request& r) {
    static const std::vector<std::string> per_classifier = {"roc", "pr", "reliability", "perf-conf", "arc",
                                                             "bandwidth", "heatmap", "trinary-summary"};
    const bool weighted_kind = kind != "roc" && kind != "pr" && kind != "reliability";
    if (std::find(per_classifier.begin(), per_classifier.end(), kind) != per_classifier.end()) {
        const auto scope = resolve_scope(s, r, weighted_kind);
        Json results = Json::array();
        for (const auto* c : requested_classifiers(s, r)) results.push_back(classifier_curve(kind, s, r, *c, scope));
        return {{"kind", kind}, {"results", std::move(results)}};
    }
    if (kind == "scatter") {
        const auto* x = query(r, "x");
        const auto* y = query(r, "y");
        if (!x || !y) invalid("scatter needs query parameters 'x' and 'y'");
        const auto scope = resolve_scope(s, r, false);
        const auto overlays = slot_overlays(s);
        const auto grid = scatter_bins(s.dataset, ScatterVariable::parse(s.dataset, *x), ScatterVariable::parse(s.dataset, *y),
                                       query_int(r, "nx", 20, 1, 1000), query_int(r, "ny", 20, 1, 1000), scope.set(),
                                       overlays);
        return {{"kind", kind}, {"x", *x}, {"y", *y}, {"grid", to_json(grid)}};
    }
    if (kind == "feature-histogram") {
        const auto* feature = query(r, "feature");
        if (!feature) invalid("feature-histogram needs query parameter 'feature'");
        const auto scope = resolve_scope(s, r, false);
        const auto overlays = slot_overlays(s);
        Json overlay_ids = Json::array();
        for (const auto& o : overlays) overlay_ids.push_back(o.selection);
        return {{"kind", kind},
                {"overlays", std::move(overlay_ids)},
                {"histogram", to_json(feature_histogram(s.dataset, *feature, query_int(r, "bins", 10, 1, 1000), scope.set(),
                                                        overlays))}};
    }
    throw RouteError{404, Error(ErrorCode::NotFound, "unknown curve kind '" + kind + "'", kind)};
}

// ------------------------------------------------------------ classifier table

Json classifier_table(const Session& s, const Request& r) {
    const auto scope = resolve_scope(s, r, true);
    Json rows = Json::array();
    for (const auto& c : s.dataset.classifiers()) {
        const auto counts = confusion(s.dataset, c, s.points.point_for(c), scope.set(), scope.weight());
        Json metrics = Json::object();
        for (auto m : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC})
            metrics[std::string(metric_name(m))] = to_json(binary_metric(counts, m));
        try {
            metrics["auc"] = to_json(MetricValue{auc(s.dataset, c, scope.set()), false});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UndefinedMetric) throw;
            metrics["auc"] = to_json(MetricValue{0.0, true});
        }
        try {
            metrics["brier"] = to_json(MetricValue{brier(s.dataset, c, scope.set(), scope.weight()), false});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UndefinedMetric) throw;
            metrics["brier"] = to_json(MetricValue{0.0, true});
        }
        Json row{{"name", c.name},
                 {"kind", c.kind == ClassifierKind::Loaded ? "loaded" : "derived"},
                 {"operating_point", point_json(s, c)},
                 {"frozen", c.kind == ClassifierKind::Derived},
                 {"counts", to_json(counts)},
                 {"metrics", std::move(metrics)}};
        if (c.kind == ClassifierKind::Derived) row["base"] = c.base;
        if (c.normalization) row["normalization"] = {{"min", c.normalization->min}, {"max", c.normalization->max}};
        rows.push_back(std::move(row));
    }
    return {{"classifiers", std::move(rows)}};
}

// ------------------------------------------------------------ routing

using Segments = std::vector<std::string>;

std::string json_string(const Json& body, const char* key, bool required, std::string fallback = {}) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) invalid(std::string("missing field '") + key + "'");
        return fallback;
    }
    if (!it->is_string()) invalid(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

double json_number(const Json& body, const char* key, double fallback) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_number()) invalid(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

std::uint64_t json_seed(const Json& body) {
    auto it = body.find("seed");
    if (it == body.end()) invalid("missing field 'seed'");
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
        invalid("field 'seed' must be a non-negative integer");
    return it->get<std::uint64_t>();
}

Slot json_slot(const Json& body) {
    const auto text = json_string(body, "slot", false, "none");
    auto slot = parse_slot(text);
    if (!slot) invalid("slot must be 'none', 'A' or 'B'", text);
    return *slot;
}

double json_weight(const Json& body) {
    const double w = json_number(body, "weight", 1.0);
    if (!(w > 0.0) || !std::isfinite(w)) invalid("selection weight must be a positive number");
    return w;
}

Response ok(Json body, int status = 200) { return {status, std::move(body)}; }

Response ingest_session(SessionStore& store, const Request& r) {
    LoadOptions options;
    options.normalize = query_flag(r, "normalize", false);
    IngestFormat format = IngestFormat::Auto;
    if (const auto* f = query(r, "format")) {
        if (*f == "json") format = IngestFormat::Json;
        else if (*f == "csv") format = IngestFormat::Csv;
        else invalid("format must be 'json' or 'csv'", *f);
    } else if (r.content_type.find("csv") != std::string::npos) {
        format = IngestFormat::Csv;
    } else if (r.content_type.find("json") != std::string::npos) {
        format = IngestFormat::Json;
    }
    if (const auto* classes = query(r, "classes")) {
        const auto parts = split(*classes, ',');
        if (parts.size() != 2) invalid("classes must be 'negative,positive'", *classes);
        options.classes = ClassNames{parts[0], parts[1]};
    }
    if (const auto* p = query(r, "provenance")) options.provenance = *p;

    auto loaded = load_dataset(r.body, format, options);
    if (!loaded.report.ok())
        return {422, {{"code", code_name(ErrorCode::ValidationFailed)},
                      {"message", "dataset failed validation"},
                      {"detail", to_json(loaded.report)}}};
    auto session = store.create(std::move(*loaded.dataset));
    return ok({{"session", session->id()}, {"report", to_json(loaded.report)}}, 201);
}

Response session_route(Session& s, const Request& r, const Segments& seg) {
    const auto& m = r.method;
    const std::string head = seg.size() > 2 ? seg[2] : "";
    std::shared_lock read(s.mutex, std::defer_lock);
    std::unique_lock write(s.mutex, std::defer_lock);
    const bool mutating = m != "GET" && !(head == "replicates" && m == "POST");
    if (mutating) write.lock();
    else read.lock();

    if (seg.size() == 2) {
        if (m == "GET")
            return ok({{"session", s.id()},
                       {"instances", s.dataset.size()},
                       {"classifiers", s.dataset.classifiers().size()},
                       {"features", s.dataset.feature_names()},
                       {"classes", {s.dataset.classes().negative, s.dataset.classes().positive}},
                       {"provenance", s.dataset.provenance()},
                       {"visible_selection", s.visible_selection ? Json(*s.visible_selection) : Json(nullptr)}});
    }

    if (head == "export" && seg.size() == 3 && m == "GET") return ok(s.export_document());

    if (head == "classifiers") {
        if (seg.size() == 3 && m == "GET") return ok(classifier_table(s, r));
        if (seg.size() == 4 && seg[3] == "derived" && m == "POST") {
            const auto body = parse_body(r);
            const auto& base = s.dataset.classifier(json_string(body, "base", true));
            const auto name = json_string(body, "name", true);
            OperatingPoint op = s.points.point_for(base);
            if (auto it = body.find("operating_point"); it != body.end()) op = operating_point_from_json(*it);
            else if (body.contains("lower") || body.contains("upper"))
                op = OperatingPoint::make(json_number(body, "lower", op.lower), json_number(body, "upper", op.upper));
            auto derived = derive_classifier(s.dataset, base, op, name);
            s.dataset.add_classifier(std::move(derived));
            s.selections.refresh(s.dataset, s.points);
            const auto& c = s.dataset.classifier(name);
            return ok({{"name", c.name}, {"kind", "derived"}, {"base", c.base}, {"operating_point", point_json(s, c)}}, 201);
        }
    }

    if (head == "operating-points") {
        if (seg.size() == 3 && m == "GET") {
            Json out = Json::array();
            for (const auto& c : s.dataset.classifiers()) out.push_back(point_json(s, c));
            return ok({{"operating_points", std::move(out)}});
        }
        if (seg.size() == 4) {
            const auto& c = in_path([&]() -> const ClassifierResult& { return s.dataset.classifier(seg[3]); });
            if (m == "GET") return ok(point_json(s, c));
            if (m == "PUT") {
                const auto body = parse_body(r);
                if (auto it = body.find("classifier"); it != body.end() && *it != c.name)
                    invalid("body classifier does not match the path", it->dump());
                if (c.kind == ClassifierKind::Derived)
                    throw Error(ErrorCode::FrozenClassifier, "classifier '" + c.name + "' is derived; its point is frozen",
                                c.name);
                s.points.set(c.name, operating_point_from_json(body));
                s.selections.refresh(s.dataset, s.points);
                return ok(point_json(s, c));
            }
        }
    }

    if (head == "selections") {
        if (seg.size() == 3 && m == "GET") {
            Json out = Json::array();
            for (const auto* sel : s.selections.list()) out.push_back(selection_json(*sel, true));
            return ok({{"selections", std::move(out)}});
        }
        if (seg.size() == 3 && m == "POST") {
            const auto body = parse_body(r);
            auto it = body.find("expr");
            const auto& expr_node = it != body.end() ? *it : body;
            const auto& sel = s.selections.create(json_string(body, "name", false), expr_from_json(expr_node),
                                                  json_weight(body), json_slot(body), s.dataset, s.points);
            return ok(selection_json(sel, true), 201);
        }
        if (seg.size() >= 4) {
            const auto& id = seg[3];
            in_path([&] { return s.selections.get(id).id; });
            if (seg.size() == 4 && m == "GET") return ok(selection_json(s.selections.get(id), true));
            if (seg.size() == 4 && m == "PUT") {
                const auto body = parse_body(r);
                if (body.contains("weight")) s.selections.set_weight(id, json_weight(body));
                if (body.contains("slot")) s.selections.set_slot(id, json_slot(body));
                return ok(selection_json(s.selections.get(id), true));
            }
            if (seg.size() == 4 && m == "DELETE") {
                s.selections.remove(id);
                if (s.visible_selection == id) s.visible_selection.reset();
                for (auto& [_, sample] : s.samples) std::erase(sample.selections, id);
                return ok({{"deleted", id}});
            }
            if (seg.size() == 5 && seg[4] == "members" && m == "GET") {
                Json ids = Json::array();
                const auto& sel = s.selections.get(id);
                sel.members.for_each([&](std::uint32_t i) { ids.push_back(s.dataset.instance(i).id); });
                return ok({{"id", id}, {"size", sel.members.count()}, {"members", std::move(ids)}});
            }
        }
    }

    if (head == "instances") {
        if (seg.size() == 3 && m == "GET") {
            const int offset = query_int(r, "offset", 0, 0, INT32_MAX);
            const int limit = query_int(r, "limit", 100, 1, INT32_MAX);
            const auto scope = resolve_scope(s, r, false);
            Json rows = Json::array();
            std::size_t total = 0;
            for_each_in_scope(s.dataset.size(), scope.set(), [&](std::size_t i) {
                if (total >= static_cast<std::size_t>(offset) && rows.size() < static_cast<std::size_t>(limit))
                    rows.push_back(instance_json(s, i));
                ++total;
            });
            return ok({{"total", total}, {"offset", offset}, {"limit", limit}, {"rows", std::move(rows)}});
        }
        if (seg.size() == 4 && m == "GET") {
            const auto i = in_path([&] { return s.dataset.require_index(seg[3]); });
            return ok(instance_detail(s, i));
        }
    }

    if (head == "curves" && seg.size() == 4 && m == "GET") return ok(curve(seg[3], s, r));

    if (head == "samples") {
        if (seg.size() == 3 && m == "GET") {
            Json out = Json::array();
            for (const auto& [_, sample] : s.samples) out.push_back(sample_json(s, sample));
            return ok({{"samples", std::move(out)}});
        }
        if (seg.size() == 4 && m == "GET") {
            auto it = s.samples.find(seg[3]);
            if (it == s.samples.end()) throw Error(ErrorCode::UnknownSample, "unknown sample '" + seg[3] + "'", seg[3]);
            return ok(sample_json(s, it->second));
        }
        if (seg.size() == 3 && m == "POST") {
            const auto body = parse_body(r);
            const auto kind = json_string(body, "kind", true);
            StoredSample sample;
            sample.id = "sample-" + std::to_string(s.next_sample_id);
            if (kind == "partition") {
                auto result = partition(s.dataset, json_number(body, "fraction", 0.5),
                                        parse_stratification(json_string(body, "stratify", false, "none")),
                                        json_seed(body));
                const auto name = json_string(body, "name", false, sample.id);
                auto make_side = [&](const MemberSet& side, const char* suffix) {
                    IdListPredicate ids;
                    side.for_each([&](std::uint32_t i) { ids.ids.push_back(s.dataset.instance(i).id); });
                    return s.selections.create(name + " " + suffix, SelectionExpr::leaf(std::move(ids)), 1.0, Slot::None,
                                               s.dataset, s.points)
                        .id;
                };
                sample.selections = {make_side(result.a, "A"), make_side(result.b, "B")};
                sample.partition = std::move(result);
            } else if (kind == "bootstrap") {
                std::optional<std::size_t> size;
                if (auto it = body.find("size"); it != body.end() && !it->is_null()) {
                    if (!it->is_number_unsigned() || it->get<std::size_t>() == 0)
                        invalid("bootstrap size must be a positive integer");
                    size = it->get<std::size_t>();
                }
                sample.bootstrap = bootstrap(s.dataset, json_seed(body), size);
            } else {
                invalid("sample kind must be 'partition' or 'bootstrap'", kind);
            }
            ++s.next_sample_id;
            auto [it, _] = s.samples.emplace(sample.id, std::move(sample));
            return ok(sample_json(s, it->second), 201);
        }
    }

    if (head == "replicates" && seg.size() == 3 && m == "POST") {
        const auto body = parse_body(r);
        const auto& c = s.dataset.classifier(json_string(body, "classifier", true));
        auto it = body.find("seeds");
        if (it == body.end() || !it->is_array()) invalid("field 'seeds' must be an array of integers");
        std::vector<std::uint64_t> seeds;
        for (const auto& v : *it) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
                invalid("seeds must be non-negative integers");
            seeds.push_back(v.get<std::uint64_t>());
        }
        ReplicateOptions options;
        const auto analysis = json_string(body, "analysis", false, "metric-at-op");
        if (analysis == "best-mcc-threshold") options.analysis = ReplicateAnalysis::BestMccThreshold;
        else if (analysis != "metric-at-op") invalid("analysis must be 'best-mcc-threshold' or 'metric-at-op'", analysis);
        options.metric = parse_metric_or_throw(json_string(body, "metric", false, "accuracy"));
        options.op = s.points.point_for(c);
        if (auto p = body.find("operating_point"); p != body.end()) options.op = operating_point_from_json(*p);
        const double resolution = json_number(body, "resolution", 100);
        if (resolution < 1 || resolution > 100000 || resolution != std::floor(resolution))
            invalid("resolution must be an integer in [1, 100000]");
        options.resolution = static_cast<int>(resolution);
        auto out = to_json(replicate_sweep(s.dataset, c, seeds, options));
        out["classifier"] = c.name;
        out["analysis"] = analysis;
        return ok(std::move(out));
    }

    if (head == "focus") {
        if (seg.size() == 3 && m == "GET") return ok(focus_json(s));
        if (seg.size() == 3 && m == "PUT") {
            const auto body = parse_body(r);
            auto it = body.find("id");
            if (it == body.end() || it->is_null()) s.focus.item.reset();
            else if (!it->is_string()) invalid("focus id must be a string or null");
            else s.focus.item = static_cast<std::uint32_t>(s.dataset.require_index(it->get<std::string>()));
            return ok(focus_json(s));
        }
        if (seg.size() == 4 && seg[3] == "step" && m == "POST") {
            const auto body = parse_body(r);
            const auto mode_text = json_string(body, "mode", false, "next");
            FocusMode mode;
            if (mode_text == "next") mode = FocusMode::Next;
            else if (mode_text == "prev") mode = FocusMode::Prev;
            else if (mode_text == "random") mode = FocusMode::Random;
            else invalid("mode must be 'next', 'prev' or 'random'", mode_text);
            const auto scope_text = json_string(body, "scope", false, "all");
            MemberSet scope = MemberSet::all(s.dataset.size());
            if (s.visible_selection) scope &= s.selections.get(*s.visible_selection).members;
            if (scope_text == "A" || scope_text == "B") {
                const auto* sel = s.selections.in_slot(*parse_slot(scope_text));
                if (!sel) throw Error(ErrorCode::EmptyScope, "no selection occupies slot " + scope_text, scope_text);
                scope &= sel->members;
            } else if (scope_text != "all") {
                invalid("scope must be 'A', 'B' or 'all'", scope_text);
            }
            std::uint64_t seed = 0;
            if (mode == FocusMode::Random) seed = json_seed(body);
            const auto call = mode == FocusMode::Random ? s.focus.random_calls : 0;
            s.focus.item = step_focus(mode, scope, s.focus.item, seed, call);
            if (mode == FocusMode::Random) ++s.focus.random_calls;
            return ok(focus_json(s));
        }
    }

    if (head == "visibility") {
        if (seg.size() == 3 && m == "GET")
            return ok({{"visible_selection", s.visible_selection ? Json(*s.visible_selection) : Json(nullptr)}});
        if (seg.size() == 3 && m == "PUT") {
            const auto body = parse_body(r);
            auto it = body.find("selection");
            if (it == body.end() || it->is_null()) {
                s.visible_selection.reset();
            } else {
                if (!it->is_string()) invalid("visibility selection must be a string or null");
                s.selections.get(it->get<std::string>());
                s.visible_selection = it->get<std::string>();
            }
            return ok({{"visible_selection", s.visible_selection ? Json(*s.visible_selection) : Json(nullptr)}});
        }
    }

    throw RouteError{404, Error(ErrorCode::NotFound, "no route for " + m + " " + r.path, r.path)};
}

} // namespace

std::string Service::create_session(Dataset dataset, std::optional<std::string> id) {
    return store_.create(std::move(dataset), std::move(id))->id();
}

Response Service::handle(const Request& r) {
    try {
        const auto seg = split(r.path, '/');
        if (seg.empty() || seg[0] != "sessions")
            throw RouteError{404, Error(ErrorCode::NotFound, "no route for " + r.method + " " + r.path, r.path)};
        if (seg.size() == 1 && r.method == "POST") return ingest_session(store_, r);
        if (seg.size() == 2 && seg[1] == "import" && r.method == "POST") {
            auto session = Session::import_document(store_.next_id(), parse_body(r));
            const auto id = session->id();
            store_.adopt(std::move(session));
            return ok({{"session", id}}, 201);
        }
        if (seg.size() == 2 && r.method == "DELETE") {
            if (!store_.remove(seg[1])) throw Error(ErrorCode::SessionNotFound, "unknown session '" + seg[1] + "'", seg[1]);
            return ok({{"deleted", seg[1]}});
        }
        if (seg.size() >= 2) {
            auto session = store_.get(seg[1]);
            return session_route(*session, r, seg);
        }
        throw RouteError{404, Error(ErrorCode::NotFound, "no route for " + r.method + " " + r.path, r.path)};
    } catch (const RouteError& e) {
        return {e.status, error_body(e.error)};
    } catch (const Error& e) {
        return {http_status(e.code()), error_body(e)};
    } catch (const Json::exception& e) {
        return {422, error_body(Error(ErrorCode::InvalidArgument, e.what()))};
    }
}

} // namespace cbx
