#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoq/evalstats.hpp"
#include "echoq/qmetrics.hpp"

namespace echoq {

// Metric CSV: header "frame_id,region_id,intensity,cr,cnr,gcnr,coherence",
// rows sorted by frame id then region order, coherence empty when absent.
// Numbers use the shortest representation that reads back exactly.

std::string metrics_to_csv(std::vector<MetricVector> rows);
std::vector<MetricVector> metrics_from_csv(std::string_view text);

inline constexpr std::array<std::string_view, 5> kMetricNames = {"intensity", "cr", "cnr", "gcnr",
                                                                  "coherence"};

/// Value of the named metric column; nullopt for an absent coherence value.
std::optional<double> metric_value(const MetricVector& row, std::string_view name);

/// Annotation CSV "frame_id,region_id,annotator,label"; label is 1..5 or "oos".
/// Out-of-sector rows are dropped.
std::vector<QualityRecord> annotations_from_csv(std::string_view text);

/// Method score CSV "frame_id,region_id,score".
std::vector<QualityRecord> scores_from_csv(std::string_view text, const std::string& method);

enum class Split { Train, Val, Test };

/// {"train": [...], "val": [...], "test": [...]}; a frame listed under two
/// splits is a ValidationError.
struct SplitManifest {
    std::map<std::string, Split> frames;

    std::optional<Split> split_of(const std::string& frame_id) const;
    std::size_t count(Split split) const;
};

SplitManifest split_from_json(std::string_view text);
std::string split_to_json(const SplitManifest& manifest);

} // namespace echoq
