#include "cbx/ingest.hpp"

#include "cbx/error.hpp"
#include "csv_reader.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace cbx {

using nlohmann::json;

bool ValidationReport::has_error(std::string_view code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const {
    return std::any_of(warnings.begin(), warnings.end(), [&](const auto& e) { return e.code == code; });
}

namespace {

// Per-(code, classifier) cap on individually reported offending ids.
constexpr std::size_t kMaxReportedIds = 25;

struct RawInstance {
    std::string id;
    std::string label;
    FeatureMap features;
};

struct RawClassifier {
    std::string name;
    std::vector<std::pair<std::string, double>> scores;
    std::optional<ScoreNormalization> normalization;
    // derived classifiers only
    bool derived = false;
    std::string base;
    OperatingPoint point;
};

struct RawPayload {
    std::optional<ClassNames> classes;
    std::vector<RawInstance> instances;
    std::vector<RawClassifier> classifiers;
    std::optional<std::string> provenance;
};

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

[[noreturn]] void parse_fail(const std::string& message, const std::string& where) {
    throw Error(ErrorCode::ParseError, message + " (" + where + ")", where);
}

// ---------------------------------------------------------------- JSON

std::string require_string(const json& node, const char* key, const std::string& where) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_string())
        parse_fail(std::string("expected string field '") + key + "'", where);
    return it->get<std::string>();
}

RawPayload parse_json_payload(std::string_view payload) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what(),
                    "byte " + std::to_string(e.byte));
    }
    if (!doc.is_object()) parse_fail("ingest document must be a JSON object", "$");

    RawPayload raw;
    auto classes = doc.find("classes");
    if (classes == doc.end() || !classes->is_array() || classes->size() != 2 ||
        !(*classes)[0].is_string() || !(*classes)[1].is_string())
        parse_fail("'classes' must be an array of two strings", "$.classes");
    raw.classes = ClassNames{(*classes)[0].get<std::string>(), (*classes)[1].get<std::string>()};

    if (auto p = doc.find("provenance"); p != doc.end() && p->is_string()) raw.provenance = p->get<std::string>();

    auto instances = doc.find("instances");
    if (instances == doc.end() || !instances->is_array()) parse_fail("'instances' must be an array", "$.instances");
    for (std::size_t i = 0; i < instances->size(); ++i) {
        const auto& node = (*instances)[i];
        const std::string where = "$.instances[" + std::to_string(i) + "]";
        if (!node.is_object()) parse_fail("instance must be an object", where);
        RawInstance inst;
        inst.id = require_string(node, "id", where + ".id");
        inst.label = require_string(node, "label", where + ".label");
        if (auto f = node.find("features"); f != node.end() && !f->is_null()) {
            if (!f->is_object()) parse_fail("'features' must be an object", where + ".features");
            for (const auto& [name, value] : f->items()) {
                if (value.is_null()) continue;
                if (value.is_number()) inst.features.emplace(name, value.get<double>());
                else if (value.is_string()) inst.features.emplace(name, value.get<std::string>());
                else parse_fail("feature values must be numbers, strings or null", where + ".features." + name);
            }
        }
        raw.instances.push_back(std::move(inst));
    }

    auto classifiers = doc.find("classifiers");
    if (classifiers == doc.end() || !classifiers->is_array())
        parse_fail("'classifiers' must be an array", "$.classifiers");
    for (std::size_t c = 0; c < classifiers->size(); ++c) {
        const auto& node = (*classifiers)[c];
        const std::string where = "$.classifiers[" + std::to_string(c) + "]";
        if (!node.is_object()) parse_fail("classifier must be an object", where);
        RawClassifier rc;
        rc.name = require_string(node, "name", where + ".name");
        if (auto d = node.find("derived_from"); d != node.end()) {
            if (!d->is_string()) parse_fail("'derived_from' must be a string", where + ".derived_from");
            rc.derived = true;
            rc.base = d->get<std::string>();
            auto op = node.find("operating_point");
            if (op == node.end() || !op->is_object() || !op->contains("lower") || !op->contains("upper") ||
                !(*op)["lower"].is_number() || !(*op)["upper"].is_number())
                parse_fail("derived classifier needs an operating_point {lower, upper}", where + ".operating_point");
            rc.point = OperatingPoint{(*op)["lower"].get<double>(), (*op)["upper"].get<double>()};
            raw.classifiers.push_back(std::move(rc));
            continue;
        }
        auto scores = node.find("scores");
        if (scores == node.end() || !scores->is_object()) parse_fail("'scores' must be an object", where + ".scores");
        for (const auto& [id, value] : scores->items()) {
            if (!value.is_number()) parse_fail("score must be a number", where + ".scores." + id);
            rc.scores.emplace_back(id, value.get<double>());
        }
        if (auto n = node.find("normalization"); n != node.end()) {
            if (!n->is_object() || !n->contains("min") || !n->contains("max") || !(*n)["min"].is_number() ||
                !(*n)["max"].is_number())
                parse_fail("'normalization' must be {min, max}", where + ".normalization");
            rc.normalization = ScoreNormalization{(*n)["min"].get<double>(), (*n)["max"].get<double>()};
        }
        raw.classifiers.push_back(std::move(rc));
    }
    return raw;
}

// ---------------------------------------------------------------- CSV

RawPayload parse_csv_payload(std::string_view payload) {
    detail::CsvReader reader(payload);
    std::vector<std::string> header;
    if (!reader.next(header)) parse_fail("CSV payload needs a header row", "line 1");
    if (header.size() < 3 || header[0] != "id" || header[1] != "label")
        parse_fail("CSV header must start with 'id,label' and name at least one score column", "line 1");

    RawPayload raw;
    std::vector<std::size_t> score_columns;
    std::vector<std::size_t> feature_columns;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (header[c].rfind("score:", 0) == 0) {
            score_columns.push_back(c);
            RawClassifier rc;
            rc.name = header[c].substr(6);
            raw.classifiers.push_back(std::move(rc));
        } else {
            feature_columns.push_back(c);
        }
    }

    std::vector<std::string> row;
    while (true) {
        const std::size_t line = reader.line();
        if (!reader.next(row)) break;
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != header.size())
            parse_fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(row.size()),
                       "line " + std::to_string(line));
        RawInstance inst;
        inst.id = row[0];
        inst.label = row[1];
        for (auto c : feature_columns) {
            const auto& cell = row[c];
            if (cell.empty()) continue;
            if (auto v = parse_number(cell)) inst.features.emplace(header[c], *v);
            else inst.features.emplace(header[c], cell);
        }
        for (std::size_t k = 0; k < score_columns.size(); ++k) {
            const auto& cell = row[score_columns[k]];
            if (cell.empty()) continue;
            auto v = parse_number(cell);
            if (!v) parse_fail("score is not a number: '" + cell + "'",
                               "line " + std::to_string(line) + ", field " + header[score_columns[k]]);
            raw.classifiers[k].scores.emplace_back(inst.id, *v);
        }
        raw.instances.push_back(std::move(inst));
    }
    return raw;
}

std::optional<ClassNames> infer_classes(const std::vector<RawInstance>& instances) {
    std::set<std::string> seen;
    for (const auto& i : instances) seen.insert(i.label);
    static const std::vector<std::pair<std::string, std::string>> known = {
        {"0", "1"}, {"neg", "pos"}, {"negative", "positive"}, {"false", "true"},
        {"no", "yes"}, {"n", "p"}, {"-1", "1"}, {"False", "True"}, {"No", "Yes"},
    };
    for (const auto& [neg, pos] : known) {
        if (std::all_of(seen.begin(), seen.end(), [&](const auto& l) { return l == neg || l == pos; }))
            return ClassNames{neg, pos};
    }
    if (seen.size() == 2) return ClassNames{*seen.begin(), *seen.rbegin()};
    return std::nullopt;
}

// ---------------------------------------------------------------- validation

class IssueSink {
public:
    explicit IssueSink(std::vector<ValidationIssue>& out) : out_(out) {}

    void add(const std::string& code, const std::string& scope, std::string message,
             std::optional<std::string> id = std::nullopt) {
        auto& n = counts_[code + '\x1f' + scope];
        ++n;
        if (n <= kMaxReportedIds) out_.push_back({code, std::move(message), std::move(id)});
    }

    void flush_overflow() {
        for (const auto& [key, n] : counts_) {
            if (n <= kMaxReportedIds) continue;
            const auto sep = key.find('\x1f');
            out_.push_back({key.substr(0, sep),
                            std::to_string(n - kMaxReportedIds) + " further occurrences not listed" +
                                (key.size() > sep + 1 ? " for '" + key.substr(sep + 1) + "'" : ""),
                            std::nullopt});
        }
    }

private:
    std::vector<ValidationIssue>& out_;
    std::map<std::string, std::size_t> counts_;
};

LoadResult validate(RawPayload raw, const LoadOptions& options, const std::string& provenance) {
    LoadResult result;
    auto& report = result.report;
    IssueSink errors(report.errors);
    IssueSink warnings(report.warnings);

    ClassNames classes;
    if (raw.classes) {
        classes = *raw.classes;
    } else if (options.classes) {
        classes = *options.classes;
    } else if (auto inferred = infer_classes(raw.instances)) {
        classes = *inferred;
        warnings.add("CLASSES_INFERRED", "",
                     "class names inferred as [" + classes.negative + ", " + classes.positive + "]");
    } else {
        errors.add("INVALID_CLASSES", "", "cannot infer two class names from the label column");
    }
    if (classes.negative.empty() || classes.positive.empty() || classes.negative == classes.positive)
        errors.add("INVALID_CLASSES", "", "classes must be two distinct non-empty names");

    report.instances = raw.instances.size();
    if (raw.instances.size() < 2)
        errors.add("TOO_FEW_INSTANCES", "", "a dataset needs at least 2 instances");

    std::vector<Instance> instances;
    instances.reserve(raw.instances.size());
    std::unordered_map<std::string, std::size_t> position;
    for (auto& ri : raw.instances) {
        if (ri.id.empty()) {
            errors.add("INVALID_ID", "", "instance id must be non-empty");
            continue;
        }
        if (!position.emplace(ri.id, instances.size()).second) {
            errors.add("DUPLICATE_ID", "", "duplicate instance id '" + ri.id + "'", ri.id);
            continue;
        }
        Instance inst;
        inst.id = ri.id;
        if (ri.label == classes.positive) {
            inst.label = Label::Positive;
            ++report.positives;
        } else if (ri.label == classes.negative) {
            inst.label = Label::Negative;
            ++report.negatives;
        } else {
            errors.add("NON_BINARY_LABEL", "", "label '" + ri.label + "' is not one of the declared classes", ri.id);
        }
        inst.features = std::move(ri.features);
        instances.push_back(std::move(inst));
    }
    if (report.ok() && (report.positives == 0 || report.negatives == 0))
        warnings.add("SINGLE_CLASS", "", "only one class is present; AUC and ROC are undefined");

    report.classifiers = raw.classifiers.size();
    if (raw.classifiers.empty()) errors.add("NO_CLASSIFIERS", "", "at least one classifier is required");

    std::vector<ClassifierResult> classifiers;
    std::unordered_set<std::string> names;
    for (auto& rc : raw.classifiers) {
        if (rc.name.empty()) {
            errors.add("INVALID_CLASSIFIER_NAME", "", "classifier name must be non-empty");
            continue;
        }
        if (!names.insert(rc.name).second) {
            errors.add("DUPLICATE_CLASSIFIER", "", "duplicate classifier name '" + rc.name + "'");
            continue;
        }
        if (rc.derived) {
            ClassifierResult c;
            c.name = rc.name;
            c.kind = ClassifierKind::Derived;
            c.base = rc.base;
            c.frozen_point = rc.point;
            const bool point_ok = rc.point.lower >= 0.0 && rc.point.lower <= rc.point.upper && rc.point.upper <= 1.0;
            if (!point_ok) errors.add("INVALID_OPERATING_POINT", rc.name, "derived classifier '" + rc.name + "' has an invalid operating point");
            classifiers.push_back(std::move(c));
            continue;
        }

        std::vector<double> scores(instances.size(), 0.0);
        std::vector<char> covered(instances.size(), 0);
        bool out_of_range = false;
        bool finite = true;
        for (const auto& [id, s] : rc.scores) {
            auto it = position.find(id);
            if (it == position.end()) {
                errors.add("UNKNOWN_SCORE_ID", rc.name, "classifier '" + rc.name + "' scores unknown id '" + id + "'", id);
                continue;
            }
            if (covered[it->second]) {
                errors.add("DUPLICATE_SCORE", rc.name, "classifier '" + rc.name + "' scores id '" + id + "' twice", id);
                continue;
            }
            covered[it->second] = 1;
            if (!std::isfinite(s)) {
                errors.add("NON_FINITE_SCORE", rc.name, "classifier '" + rc.name + "' has a non-finite score", id);
                finite = false;
                continue;
            }
            scores[it->second] = s;
            if (s < 0.0 || s > 1.0) {
                out_of_range = true;
                if (!options.normalize)
                    errors.add("SCORE_OUT_OF_RANGE", rc.name,
                               "classifier '" + rc.name + "' score outside [0, 1] for '" + id + "'", id);
            }
        }
        for (std::size_t i = 0; i < instances.size(); ++i) {
            if (!covered[i])
                errors.add("MISSING_SCORE", rc.name,
                           "classifier '" + rc.name + "' has no score for '" + instances[i].id + "'", instances[i].id);
        }

        ClassifierResult c;
        c.name = rc.name;
        c.kind = ClassifierKind::Loaded;
        c.normalization = rc.normalization;
        if (out_of_range && options.normalize && finite && !scores.empty()) {
            const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
            const double mn = *lo;
            const double mx = *hi;
            if (mx == mn) {
                std::fill(scores.begin(), scores.end(), 0.5);
                warnings.add("CONSTANT_SCORES", rc.name, "classifier '" + rc.name + "' has constant scores; mapped to 0.5");
            } else {
                for (auto& s : scores) s = (s - mn) / (mx - mn);
            }
            c.normalization = ScoreNormalization{mn, mx};
            report.scores_normalized = true;
            warnings.add("SCORES_NORMALIZED", rc.name, "classifier '" + rc.name + "' scores min-max normalized from [" +
                                                          std::to_string(mn) + ", " + std::to_string(mx) + "]");
        }
        c.scores = std::make_shared<const std::vector<double>>(std::move(scores));
        classifiers.push_back(std::move(c));
    }

    for (auto& c : classifiers) {
        if (c.kind != ClassifierKind::Derived) continue;
        auto base = std::find_if(classifiers.begin(), classifiers.end(), [&](const ClassifierResult& b) {
            return b.kind == ClassifierKind::Loaded && b.name == c.base;
        });
        if (base == classifiers.end()) {
            errors.add("UNKNOWN_BASE_CLASSIFIER", c.name, "derived classifier '" + c.name + "' has unknown base '" + c.base + "'");
            continue;
        }
        c.scores = base->scores;
    }

    errors.flush_overflow();
    warnings.flush_overflow();
    if (!report.ok()) return result;
    result.dataset.emplace(std::move(classes), std::move(instances), std::move(classifiers), provenance);
    return result;
}

} // namespace

LoadResult load_dataset(std::string_view payload, IngestFormat format, const LoadOptions& options) {
    if (format == IngestFormat::Auto) {
        auto first = payload.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
        format = (first != std::string_view::npos && payload[first] == '{') ? IngestFormat::Json : IngestFormat::Csv;
    }
    RawPayload raw = format == IngestFormat::Json ? parse_json_payload(payload) : parse_csv_payload(payload);
    std::string provenance = options.provenance;
    if (provenance.empty() && raw.provenance) provenance = *raw.provenance;
    if (provenance.empty()) provenance = format == IngestFormat::Json ? "json" : "csv";
    return validate(std::move(raw), options, provenance);
}

std::string serialize_dataset(const Dataset& dataset) {
    json doc;
    doc["classes"] = {dataset.classes().negative, dataset.classes().positive};
    doc["provenance"] = dataset.provenance();
    json instances = json::array();
    for (const auto& inst : dataset.instances()) {
        json features = json::object();
        for (const auto& [name, value] : inst.features)
            std::visit([&](const auto& v) { features[name] = v; }, value);
        instances.push_back({{"id", inst.id}, {"label", dataset.classes().name_of(inst.label)}, {"features", features}});
    }
    doc["instances"] = std::move(instances);
    json classifiers = json::array();
    for (const auto& c : dataset.classifiers()) {
        json node;
        node["name"] = c.name;
        if (c.kind == ClassifierKind::Derived) {
            node["derived_from"] = c.base;
            node["operating_point"] = {{"lower", c.frozen_point->lower}, {"upper", c.frozen_point->upper}};
        } else {
            json scores = json::object();
            for (std::size_t i = 0; i < dataset.size(); ++i) scores[dataset.instance(i).id] = c.score(i);
            node["scores"] = std::move(scores);
            if (c.normalization) node["normalization"] = {{"min", c.normalization->min}, {"max", c.normalization->max}};
        }
        classifiers.push_back(std::move(node));
    }
    doc["classifiers"] = std::move(classifiers);
    return doc.dump();
}

} // namespace cbx
