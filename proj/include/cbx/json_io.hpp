#pragma once

#include "cbx/curves.hpp"
#include "cbx/ingest.hpp"
#include "cbx/metrics.hpp"
#include "cbx/sampling.hpp"
#include "cbx/selection.hpp"
#include "cbx/trinary.hpp"

#include <json.hpp>

namespace cbx {

using Json = nlohmann::json;

/// `{"op":"union","args":[...]}` / `{"pred":{"kind":"outcome",...}}`.
/// Malformed trees throw InvalidArgument.
SelectionExpr expr_from_json(const Json& node);
Json to_json(const SelectionExpr& expr);
Json to_json(const Predicate& predicate);
Predicate predicate_from_json(const Json& node);

Json to_json(const OperatingPoint& op);
/// `{"lower": L, "upper": U}`; throws InvalidArgument when out of order/range.
OperatingPoint operating_point_from_json(const Json& node);

Json to_json(const TrinaryCounts& counts);
Json to_json(const MetricValue& value);
Json to_json(const ValidationReport& report);

Json to_json(const CurveSeries& series);
Json to_json(const std::vector<ReliabilityBin>& bins);
Json to_json(const std::vector<PerfConfBin>& bins);
Json to_json(const std::vector<BandwidthRow>& rows);
Json to_json(const std::vector<HeatmapCell>& cells);
Json to_json(const ScatterGrid& grid);
Json to_json(const FeatureHistogram& histogram);
Json to_json(const ReplicateSummary& summary);

Json feature_value_to_json(const FeatureValue& value);

} // namespace cbx
