#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "echoq/imaging.hpp"
#include "echoq/qmetrics.hpp"
#include "echoq/regions.hpp"
#include "echoq/table_io.hpp"

// File-level drivers behind the command line tool. Each returns the exact
// bytes the tool writes, so determinism can be checked without touching disk.

namespace echoq {

namespace fs = std::filesystem;

std::string run_regions(const fs::path& labels, const std::optional<fs::path>& sector,
                        Spacing spacing, View view, double annulus_radius_mm = 2.0);

/// Histogram-matches the B-mode over the sector, then measures every
/// non-excluded region against the sector-clipped LV lumen.
std::vector<MetricVector> frame_metrics(const GrayImage& bmode, const LabelMask& labels,
                                        const RegionSet& regions,
                                        const std::optional<GrayImage>& coherence,
                                        const std::string& frame_id);

struct FrameFiles {
    std::string frame_id;
    fs::path bmode;
    fs::path labels;
    fs::path regions;
    std::optional<fs::path> coherence;
};

/// Frame list of a corpus manifest; paths are resolved against its directory.
std::vector<FrameFiles> load_corpus_manifest(const fs::path& manifest);

struct MetricsResult {
    std::string csv;
    std::vector<std::string> warnings;
};

MetricsResult run_metrics(const std::vector<FrameFiles>& frames, int threads = 1);

struct EvaluateInputs {
    std::vector<MetricVector> metrics;
    std::vector<QualityRecord> annotations;
    SplitManifest split;
    std::vector<std::vector<QualityRecord>> methods; ///< scores already on the 1..5 scale
    std::optional<std::string> timestamp;            ///< embedded only when given
};

/// Calibrates each metric on train+val annotations and reports agreement
/// with the annotators on the test split, plus inter-observer and pairwise
/// Wilcoxon sections. Returns the report JSON.
std::string run_evaluate(const EvaluateInputs& inputs, int threads = 1);

struct ComparePair {
    std::string frame_id;
    fs::path target;
    fs::path pred;
};

std::string run_compare(const std::vector<ComparePair>& pairs, int threads = 1);

/// CHDF1 channel data to a gamma-normalized CIMG1 coherence image.
GrayImage run_coherence(const fs::path& channels, Spacing spacing, double gamma = 0.5,
                        int threads = 1);

struct CorpusOptions {
    int frames = 12;
    int width = 128;
    int height = 128;
    Spacing spacing{0.5, 0.5};
    std::uint64_t seed = 1;
};

/// Writes a synthetic corpus: per-frame B-mode, labels, sector, coherence and
/// regions files, three annotators' labels, a split manifest and corpus.json.
void write_corpus(const fs::path& dir, const CorpusOptions& options, int threads = 1);

} // namespace echoq
