#pragma once

#include "cbx/dataset.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbx {

enum class IngestFormat { Auto, Json, Csv };

struct LoadOptions {
    /// Min-max normalize, per classifier, any classifier whose scores leave [0, 1].
    /// Without it such scores are validation errors.
    bool normalize = false;
    /// CSV payloads carry no class declaration; when unset the names are inferred.
    std::optional<ClassNames> classes;
    std::string provenance;
};

struct ValidationIssue {
    std::string code;
    std::string message;
    std::optional<std::string> offending_id;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    std::size_t instances = 0;
    std::size_t classifiers = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    bool scores_normalized = false;

    bool ok() const noexcept { return errors.empty(); }
    bool has_error(std::string_view code) const;
    bool has_warning(std::string_view code) const;
};

struct LoadResult {
    std::optional<Dataset> dataset; ///< set iff report.ok()
    ValidationReport report;
};

/// Parses and validates an ingest payload. Malformed payloads throw
/// Error(ParseError) naming the line or field; semantic problems are
/// collected in the report instead.
LoadResult load_dataset(std::string_view payload, IngestFormat format = IngestFormat::Auto,
                        const LoadOptions& options = {});

/// JSON ingest document for `dataset`; load_dataset() on it reproduces the
/// dataset field for field, including normalization parameters and derived
/// classifiers.
std::string serialize_dataset(const Dataset& dataset);

} // namespace cbx
