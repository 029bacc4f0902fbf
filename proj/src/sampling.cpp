#include "cbx/sampling.hpp"

#include "cbx/error.hpp"
#include "sorted_scope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace cbx {

namespace {

std::string stratum_key(const Dataset& dataset, std::size_t i, const Stratification& s) {
    if (s.by == Stratification::By::Class) return dataset.classes().name_of(dataset.label(i));
    const auto* v = dataset.feature(i, s.feature);
    if (!v) return "(absent)";
    if (const auto* str = std::get_if<std::string>(v)) return *str;
    std::ostringstream out;
    out << std::get<double>(*v);
    return out.str();
}

} // namespace

PartitionResult partition(const Dataset& dataset, double fraction, const Stratification& stratify,
                          std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "partition fraction must lie in (0, 1)");
    if (stratify.by == Stratification::By::Feature && !dataset.has_feature(stratify.feature))
        throw Error(ErrorCode::UnknownFeature, "unknown feature '" + stratify.feature + "'", stratify.feature);
    const std::size_t n = dataset.size();
    if (fraction * static_cast<double>(n) < 1.0)
        throw Error(ErrorCode::EmptyPartition, "fraction * N < 1 leaves partition A empty");

    PartitionResult result;
    result.seed = seed;
    result.fraction = fraction;
    result.stratify = stratify;
    result.a = MemberSet(n);
    std::mt19937_64 gen(seed);

    if (stratify.by == Stratification::By::None) {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::shuffle(order.begin(), order.end(), gen);
        const auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
        for (std::size_t k = 0; k < take; ++k) result.a.insert(order[k]);
        result.b = result.a.complement();
        return result;
    }

    std::map<std::string, std::vector<std::uint32_t>> strata;
    if (stratify.by == Stratification::By::Class) {
        strata[dataset.classes().negative];
        strata[dataset.classes().positive];
    }
    for (std::size_t i = 0; i < n; ++i) strata[stratum_key(dataset, i, stratify)].push_back(static_cast<std::uint32_t>(i));

    struct Quota {
        std::string name;
        std::size_t take;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [name, members] : strata) {
        if (members.empty()) {
            result.warnings.push_back("stratum '" + name + "' is empty; skipped");
            continue;
        }
        const double exact = fraction * static_cast<double>(members.size());
        const double floor = std::floor(exact);
        quotas.push_back({name, static_cast<std::size_t>(floor), exact - floor});
        assigned += static_cast<std::size_t>(floor);
    }
    const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> by_remainder(quotas.size());
    std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
    // quotas are already in name order, so stable_sort breaks ties by name.
    std::stable_sort(by_remainder.begin(), by_remainder.end(),
                     [&](std::size_t x, std::size_t y) { return quotas[x].remainder > quotas[y].remainder; });
    for (std::size_t k = 0; k < by_remainder.size() && assigned < target; ++k) {
        auto& q = quotas[by_remainder[k]];
        if (q.remainder <= 0.0) break;
        ++q.take;
        ++assigned;
    }

    for (const auto& q : quotas) {
        auto members = strata.at(q.name);
        std::shuffle(members.begin(), members.end(), gen);
        for (std::size_t k = 0; k < q.take; ++k) result.a.insert(members[k]);
    }
    result.b = result.a.complement();
    return result;
}

std::size_t BootstrapResult::draws() const noexcept {
    return std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0});
}

WeightVector BootstrapResult::weights() const {
    return WeightVector(std::vector<double>(multiplicity.begin(), multiplicity.end()));
}

BootstrapResult bootstrap(const Dataset& dataset, std::uint64_t seed, std::optional<std::size_t> size) {
    const std::size_t n = dataset.size();
    if (n == 0) throw Error(ErrorCode::EmptyScope, "cannot bootstrap an empty dataset");
    BootstrapResult result;
    result.seed = seed;
    result.multiplicity.assign(n, 0);
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t draws = size.value_or(n);
    for (std::size_t k = 0; k < draws; ++k) ++result.multiplicity[pick(gen)];
    return result;
}

namespace {

MetricValue best_mcc_threshold(const Dataset& dataset, const ClassifierResult& classifier, const WeightVector& weights,
                               int resolution) {
    const detail::SortedScope sorted(dataset, classifier, nullptr, &weights);
    double best = -2.0;
    std::vector<int> tied;
    for (int i = 0; i <= resolution; ++i) {
        const double t = static_cast<double>(i) / resolution;
        const auto mcc = binary_metric(sorted.counts(OperatingPoint{t, t}), Metric::MCC);
        if (mcc.undefined) continue;
        if (mcc.value > best) {
            best = mcc.value;
            tied.assign(1, i);
        } else if (mcc.value == best) {
            tied.push_back(i);
        }
    }
    if (tied.empty()) return {0.0, true};
    return {static_cast<double>(tied[(tied.size() - 1) / 2]) / resolution, false};
}

} // namespace

ReplicateSummary replicate_sweep(const Dataset& dataset, const ClassifierResult& classifier,
                                 std::span<const std::uint64_t> seeds, const ReplicateOptions& options) {
    if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "replicate sweep needs at least one seed");
    if (options.resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 1");

    ReplicateSummary summary;
    double sum = 0.0;
    for (auto seed : seeds) {
        const auto weights = bootstrap(dataset, seed).weights();
        MetricValue v;
        if (options.analysis == ReplicateAnalysis::BestMccThreshold) {
            v = best_mcc_threshold(dataset, classifier, weights, options.resolution);
        } else {
            v = binary_metric(confusion(dataset, classifier, options.op, nullptr, &weights), options.metric);
        }
        summary.results.push_back({seed, v.value, v.undefined});
        if (v.undefined) continue;
        if (summary.defined == 0) summary.min = summary.max = v.value;
        summary.min = std::min(summary.min, v.value);
        summary.max = std::max(summary.max, v.value);
        sum += v.value;
        ++summary.defined;
    }
    if (summary.defined) summary.mean = sum / static_cast<double>(summary.defined);
    return summary;
}

} // namespace cbx
