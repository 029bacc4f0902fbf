// Python module _cbx. Structured results cross the boundary as JSON text in
// the same shapes the HTTP service returns; the cbx package decodes them.

#include "cbx/binning.hpp"
#include "cbx/curves.hpp"
#include "cbx/error.hpp"
#include "cbx/ingest.hpp"
#include "cbx/json_io.hpp"
#include "cbx/metrics.hpp"
#include "cbx/sampling.hpp"
#include "cbx/selection.hpp"
#include "cbx/service.hpp"
#include "cbx/session.hpp"
#include "cbx/trinary.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace cbx;

namespace {

using Ids = std::optional<std::vector<std::string>>;
using Weights = std::optional<std::vector<double>>;

std::optional<MemberSet> scope_of(const Dataset& ds, const Ids& ids) {
    if (!ids) return std::nullopt;
    MemberSet m(ds.size());
    for (const auto& id : *ids) m.insert(static_cast<std::uint32_t>(ds.require_index(id)));
    return m;
}

std::optional<WeightVector> weights_of(const Dataset& ds, const Weights& w) {
    if (!w) return std::nullopt;
    if (w->size() != ds.size())
        throw Error(ErrorCode::InvalidArgument, "weights need one entry per instance");
    return WeightVector(*w);
}

template <typename T>
const T* ptr(const std::optional<T>& v) {
    return v ? &*v : nullptr;
}

Metric metric_of(const std::string& name) {
    if (auto m = parse_metric(name)) return *m;
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "'", name);
}

RejectedPolicy policy_of(const std::string& name) {
    if (auto p = parse_policy(name)) return *p;
    throw Error(ErrorCode::InvalidArgument, "unknown rejected policy '" + name + "'", name);
}

IngestFormat format_of(const std::string& name) {
    if (name == "auto") return IngestFormat::Auto;
    if (name == "json") return IngestFormat::Json;
    if (name == "csv") return IngestFormat::Csv;
    throw Error(ErrorCode::InvalidArgument, "format must be 'auto', 'json' or 'csv'", name);
}

/// The classifier's point unless the caller names one; a derived classifier
/// only accepts its own frozen point.
OperatingPoint point_for(const ClassifierResult& c, std::optional<double> lower, std::optional<double> upper) {
    const OperatingPoint fallback = c.frozen_point ? *c.frozen_point : OperatingPoint{};
    if (!lower && !upper) return fallback;
    const auto op = OperatingPoint::make(lower.value_or(fallback.lower), upper.value_or(fallback.upper));
    if (c.frozen_point && op != *c.frozen_point)
        throw Error(ErrorCode::FrozenClassifier, "classifier '" + c.name + "' is derived; its point is frozen", c.name);
    return op;
}

std::vector<std::string> ids_of(const Dataset& ds, const MemberSet& m) {
    std::vector<std::string> out;
    m.for_each([&](std::uint32_t i) { out.push_back(ds.instance(i).id); });
    return out;
}

} // namespace

PYBIND11_MODULE(_cbx, m) {
    m.doc() = "Classifier comparison engine";

    m.attr("CbxError") =
        py::reinterpret_steal<py::object>(PyErr_NewException("cbx._cbx.CbxError", PyExc_Exception, nullptr));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto type = py::module_::import("cbx._cbx").attr("CbxError");
            py::object err = type(e.what());
            err.attr("code") = std::string(code_name(e.code()));
            err.attr("detail") = e.detail();
            PyErr_SetObject(type.ptr(), err.ptr());
        }
    });

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("size", &Dataset::size)
        .def_property_readonly("ids",
                               [](const Dataset& ds) {
                                   std::vector<std::string> out;
                                   for (const auto& inst : ds.instances()) out.push_back(inst.id);
                                   return out;
                               })
        .def_property_readonly("labels",
                               [](const Dataset& ds) {
                                   std::vector<int> out;
                                   for (auto l : ds.labels()) out.push_back(l == Label::Positive);
                                   return out;
                               })
        .def_property_readonly("classes",
                               [](const Dataset& ds) {
                                   return std::pair(ds.classes().negative, ds.classes().positive);
                               })
        .def_property_readonly("classifiers",
                               [](const Dataset& ds) {
                                   std::vector<std::string> out;
                                   for (const auto& c : ds.classifiers()) out.push_back(c.name);
                                   return out;
                               })
        .def_property_readonly("features",
                               [](const Dataset& ds) {
                                   return std::vector<std::string>(ds.feature_names().begin(), ds.feature_names().end());
                               })
        .def("scores",
             [](const Dataset& ds, const std::string& name) {
                 const auto v = ds.classifier(name).score_view();
                 return std::vector<double>(v.begin(), v.end());
             })
        .def("derive",
             [](Dataset& ds, const std::string& base, const std::string& name, double lower, double upper) {
                 ds.add_classifier(derive_classifier(ds, ds.classifier(base), OperatingPoint::make(lower, upper), name));
             },
             py::arg("base"), py::arg("name"), py::arg("lower"), py::arg("upper"))
        .def("to_json", [](const Dataset& ds) { return serialize_dataset(ds); })
        .def("__len__", &Dataset::size);

    m.def(
        "load_dataset",
        [](const std::string& payload, const std::string& format, bool normalize,
           std::optional<std::pair<std::string, std::string>> classes, const std::string& provenance) {
            LoadOptions options;
            options.normalize = normalize;
            if (classes) options.classes = ClassNames{classes->first, classes->second};
            options.provenance = provenance;
            auto result = load_dataset(payload, format_of(format), options);
            return std::pair(std::move(result.dataset), to_json(result.report).dump());
        },
        py::arg("payload"), py::arg("format") = "auto", py::arg("normalize") = false, py::arg("classes") = py::none(),
        py::arg("provenance") = "");

    m.def(
        "confusion",
        [](const Dataset& ds, const std::string& clf, std::optional<double> lower, std::optional<double> upper,
           const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            const auto& c = ds.classifier(clf);
            return to_json(confusion(ds, c, point_for(c, lower, upper), ptr(s), ptr(wv))).dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("lower") = py::none(), py::arg("upper") = py::none(),
        py::arg("scope") = py::none(), py::arg("weights") = py::none());

    m.def(
        "metric",
        [](const Dataset& ds, const std::string& clf, const std::string& metric, std::optional<double> lower,
           std::optional<double> upper,
           const std::string& policy, const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            const auto& c = ds.classifier(clf);
            const auto counts = confusion(ds, c, point_for(c, lower, upper), ptr(s), ptr(wv));
            const auto v = binary_metric(counts, metric_of(metric), policy_of(policy));
            return std::pair(v.value, v.undefined);
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("metric"), py::arg("lower") = py::none(), py::arg("upper") = py::none(),
        py::arg("policy") = "exclude", py::arg("scope") = py::none(), py::arg("weights") = py::none());

    m.def(
        "auc",
        [](const Dataset& ds, const std::string& clf, const Ids& scope) {
            const auto s = scope_of(ds, scope);
            return auc(ds, ds.classifier(clf), ptr(s));
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("scope") = py::none());

    m.def(
        "brier",
        [](const Dataset& ds, const std::string& clf, const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            return brier(ds, ds.classifier(clf), ptr(s), ptr(wv));
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("scope") = py::none(), py::arg("weights") = py::none());

    m.def(
        "roc_curve",
        [](const Dataset& ds, const std::string& clf, const Ids& scope) {
            const auto s = scope_of(ds, scope);
            return to_json(roc_curve(ds, ds.classifier(clf), ptr(s))).dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("scope") = py::none());

    m.def(
        "pr_curve",
        [](const Dataset& ds, const std::string& clf, const Ids& scope) {
            const auto s = scope_of(ds, scope);
            return to_json(pr_curve(ds, ds.classifier(clf), ptr(s))).dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("scope") = py::none());

    m.def(
        "reliability_curve",
        [](const Dataset& ds, const std::string& clf, int bins, const std::string& mode,
           std::optional<std::pair<double, double>> point, const Ids& scope) {
            ReliabilityMode rm;
            if (mode == "fraction-positive") rm = ReliabilityMode::FractionPositive;
            else if (mode == "percent-correct") rm = ReliabilityMode::PercentCorrect;
            else throw Error(ErrorCode::InvalidArgument, "mode must be 'fraction-positive' or 'percent-correct'", mode);
            std::optional<OperatingPoint> op;
            if (point) op = OperatingPoint::make(point->first, point->second);
            const auto s = scope_of(ds, scope);
            return to_json(reliability_curve(ds, ds.classifier(clf), BinSpec::make(bins), rm, ptr(s), op)).dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("bins") = 10, py::arg("mode") = "fraction-positive",
        py::arg("operating_point") = py::none(), py::arg("scope") = py::none());

    m.def(
        "perf_conf_histogram",
        [](const Dataset& ds, const std::string& clf, std::optional<double> lower, std::optional<double> upper, int bins,
           const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            const auto& c = ds.classifier(clf);
            return to_json(perf_conf_histogram(ds, c, point_for(c, lower, upper), BinSpec::make(bins), ptr(s), ptr(wv)))
                .dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("lower") = py::none(), py::arg("upper") = py::none(), py::arg("bins") = 10,
        py::arg("scope") = py::none(), py::arg("weights") = py::none());

    m.def(
        "rejection_curve",
        [](const Dataset& ds, const std::string& clf, double threshold, const std::string& metric,
           const std::string& policy, int steps, const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            return to_json(rejection_curve(ds, ds.classifier(clf), threshold, metric_of(metric), policy_of(policy), ptr(s),
                                           steps, ptr(wv)))
                .dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("threshold") = 0.5, py::arg("metric") = "accuracy",
        py::arg("policy") = "exclude", py::arg("steps") = 101, py::arg("scope") = py::none(),
        py::arg("weights") = py::none());

    m.def(
        "bandwidth_series",
        [](const Dataset& ds, const std::string& clf, const std::vector<double>& bandwidths, const std::string& metric,
           int resolution, const Ids& scope, const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            return to_json(bandwidth_series(ds, ds.classifier(clf), bandwidths, metric_of(metric), resolution, ptr(s),
                                            ptr(wv)))
                .dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("bandwidths") = std::vector<double>{0.05, 0.1, 0.15, 0.2},
        py::arg("metric") = "accuracy", py::arg("resolution") = 20, py::arg("scope") = py::none(),
        py::arg("weights") = py::none());

    m.def(
        "threshold_grid",
        [](const Dataset& ds, const std::string& clf, const std::string& metric, int resolution, const Ids& scope,
           const Weights& w) {
            const auto s = scope_of(ds, scope);
            const auto wv = weights_of(ds, w);
            return to_json(threshold_grid(ds, ds.classifier(clf), metric_of(metric), resolution, ptr(s), ptr(wv))).dump();
        },
        py::arg("dataset"), py::arg("classifier"), py::arg("metric") = "accuracy", py::arg("resolution") = 20,
        py::arg("scope") = py::none(), py::arg("weights") = py::none());

    m.def(
        "select",
        [](const Dataset& ds, const std::string& expr, const std::map<std::string, std::pair<double, double>>& points) {
            OperatingPointTable table;
            for (const auto& [name, lu] : points) table.set(name, OperatingPoint::make(lu.first, lu.second));
            return ids_of(ds, evaluate(expr_from_json(Json::parse(expr)), ds, table));
        },
        py::arg("dataset"), py::arg("expr"), py::arg("operating_points") = std::map<std::string, std::pair<double, double>>{});

    m.def(
        "partition",
        [](const Dataset& ds, double fraction, const std::string& stratify, std::uint64_t seed) {
            const auto p = partition(ds, fraction, parse_stratification(stratify), seed);
            return py::make_tuple(ids_of(ds, p.a), ids_of(ds, p.b), p.warnings);
        },
        py::arg("dataset"), py::arg("fraction"), py::arg("stratify") = "none", py::arg("seed") = 0);

    m.def(
        "bootstrap",
        [](const Dataset& ds, std::uint64_t seed, std::optional<std::size_t> size) {
            return bootstrap(ds, seed, size).multiplicity;
        },
        py::arg("dataset"), py::arg("seed") = 0, py::arg("size") = py::none());

    py::class_<Service>(m, "Service")
        .def(py::init<>())
        .def("create_session",
             [](Service& s, const Dataset& ds, std::optional<std::string> id) { return s.create_session(ds, id); },
             py::arg("dataset"), py::arg("id") = py::none())
        .def(
            "handle",
            [](Service& s, const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
               const std::string& body, const std::string& content_type) {
                Response r;
                {
                    py::gil_scoped_release release;
                    r = s.handle(Request{method, path, query, body, content_type});
                }
                return std::pair(r.status, r.text());
            },
            py::arg("method"), py::arg("path"), py::arg("query") = std::map<std::string, std::string>{},
            py::arg("body") = "", py::arg("content_type") = "application/json");
}
