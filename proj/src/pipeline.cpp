#include "echoq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <set>

#include "echoq/coherence.hpp"
#include "echoq/imgcmp.hpp"
#include "echoq/parallel.hpp"
#include "echoq/phantom.hpp"
#include "echoq/rng.hpp"

namespace echoq {

namespace {

using json = nlohmann::json;

void check_shape(int w, int h, int ew, int eh, const std::string& what)
{
    if (w != ew || h != eh)
        throw ValidationError("dimension mismatch: " + what + " is " + std::to_string(w) + "x" +
                              std::to_string(h) + ", expected " + std::to_string(ew) + "x" +
                              std::to_string(eh));
}

json stats_json(const AgreementStats& s)
{
    return {{"spearman", s.spearman}, {"mae", s.mae}, {"mae_std", s.mae_std},
            {"accuracy", s.accuracy}, {"n", s.n}};
}

json number_or_tag(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

// Annotation records of the frames that belong to `splits`.
std::vector<QualityRecord> in_splits(const std::vector<QualityRecord>& records,
                                     const SplitManifest& split, std::set<Split> splits)
{
    std::vector<QualityRecord> out;
    for (const auto& r : records) {
        const auto s = split.split_of(r.frame_id);
        if (s && splits.count(*s)) out.push_back(r);
    }
    return out;
}

struct SourceReport {
    std::string name;
    json section;
    std::vector<ErrorEntry> entries; // test-set comparisons, for the Wilcoxon section
};

// Agreement of `method` records with the test annotations, pooled and per annotator.
void agreement(SourceReport& out, const std::vector<QualityRecord>& method,
               const std::vector<QualityRecord>& test_refs)
{
    const ErrorMultiset pooled = method_vs_observers(method, test_refs);
    out.section["test"] = stats_json(pooled.stats);
    std::map<std::string, std::vector<QualityRecord>> by_annotator;
    for (const auto& r : test_refs) by_annotator[r.source.name].push_back(r);
    json per = json::object();
    for (const auto& [name, refs] : by_annotator) {
        try {
            per[name] = stats_json(method_vs_observers(method, refs).stats);
        } catch (const InputError&) {
            // No overlap with this annotator.
        }
    }
    out.section["per_annotator"] = std::move(per);
    out.entries = pooled.entries;
}

SourceReport evaluate_metric(const std::string& metric, const EvaluateInputs& in,
                             const std::vector<QualityRecord>& test_refs)
{
    SourceReport out{metric, json::object(), {}};
    std::map<std::pair<std::string, std::string>, std::vector<double>> labels;
    for (const auto& r : in.annotations) labels[{r.frame_id, r.region_id}].push_back(r.score);

    std::vector<double> x, y;
    std::vector<std::pair<const MetricVector*, double>> test_rows;
    for (const auto& row : in.metrics) {
        const auto value = metric_value(row, metric);
        const auto s = in.split.split_of(row.frame_id);
        if (!value || !s) continue;
        if (*s == Split::Test) {
            test_rows.emplace_back(&row, *value);
            continue;
        }
        auto it = labels.find({row.frame_id, std::string(region_name(row.region))});
        if (it == labels.end()) continue;
        for (double label : it->second) {
            x.push_back(*value);
            y.push_back(label);
        }
    }
    if (x.empty() && test_rows.empty()) {
        out.section["skipped"] = "no values";
        return out;
    }

    try {
        const LinearCalibration cal = fit_linear(x, y);
        out.section["calibration"] = {{"slope", cal.slope}, {"intercept", cal.intercept},
                                      {"n_fit", x.size()}};
        std::vector<QualityRecord> predicted;
        for (auto [row, value] : test_rows)
            predicted.push_back({row->frame_id, std::string(region_name(row->region)),
                                 Source::method(metric), apply_calibration(cal, value)});
        agreement(out, predicted, test_refs);
    } catch (const InputError& e) {
        out.section = {{"skipped", e.what()}};
        out.entries.clear();
    }
    return out;
}

using EntryKey = std::tuple<std::string, std::string, std::string>;

std::map<EntryKey, double> abs_errors_by_key(const std::vector<ErrorEntry>& entries)
{
    std::map<EntryKey, double> out;
    for (const auto& e : entries) out[{e.frame_id, e.region_id, e.first_source}] = e.abs_error();
    return out;
}

std::vector<FrameFiles> frames_from_manifest_json(const json& j, const fs::path& base)
{
    std::vector<FrameFiles> out;
    for (const auto& f : j.at("frames")) {
        FrameFiles ff;
        ff.frame_id = f.at("frame_id").get<std::string>();
        ff.bmode = base / f.at("bmode").get<std::string>();
        ff.labels = base / f.at("labels").get<std::string>();
        ff.regions = base / f.at("regions").get<std::string>();
        if (f.contains("coherence") && !f.at("coherence").is_null())
            ff.coherence = base / f.at("coherence").get<std::string>();
        out.push_back(std::move(ff));
    }
    return out;
}

} // namespace

std::string run_regions(const fs::path& labels, const std::optional<fs::path>& sector,
                        Spacing spacing, View view, double annulus_radius_mm)
{
    const LabelMask mask = load_label_mask(labels, sector, spacing);
    return regions_to_json(divide_regions(mask, view, annulus_radius_mm));
}

std::vector<MetricVector> frame_metrics(const GrayImage& bmode, const LabelMask& labels,
                                        const RegionSet& regions,
                                        const std::optional<GrayImage>& coherence,
                                        const std::string& frame_id)
{
    check_shape(bmode.width(), bmode.height(), regions.width(), regions.height(), "B-mode image");
    check_shape(labels.width(), labels.height(), regions.width(), regions.height(), "label mask");
    if (coherence)
        check_shape(coherence->width(), coherence->height(), regions.width(), regions.height(),
                    "coherence image");
    LabelMask clipped = labels;
    clipped.sector = regions.sector;
    const GrayImage matched = histogram_match(bmode, regions.sector);
    return compute_metric_vector(matched, coherence, regions, lumen_background(clipped), frame_id);
}

std::vector<FrameFiles> load_corpus_manifest(const fs::path& manifest)
{
    const std::string text = read_file(manifest);
    try {
        return frames_from_manifest_json(json::parse(text), manifest.parent_path());
    } catch (const json::exception& e) {
        throw InputError("corpus manifest: " + std::string(e.what()));
    }
}

MetricsResult run_metrics(const std::vector<FrameFiles>& frames, int threads)
{
    std::set<std::string> ids;
    for (const auto& f : frames)
        if (!ids.insert(f.frame_id).second) throw ValidationError("duplicate frame id " + f.frame_id);

    std::vector<std::vector<MetricVector>> per_frame(frames.size());
    parallel_for(frames.size(), threads, [&](std::size_t i) {
        const FrameFiles& f = frames[i];
        const RegionSet regions = regions_from_json(read_file(f.regions));
        const GrayImage bmode = load_gray(f.bmode, regions.spacing);
        if (bmode.domain != PixelDomain::Intensity8) throw InputError("B-mode must be a PGM image");
        const LabelMask labels = load_label_mask(f.labels, std::nullopt, regions.spacing);
        std::optional<GrayImage> coherence;
        if (f.coherence) coherence = load_gray(*f.coherence);
        per_frame[i] = frame_metrics(bmode, labels, regions, coherence, f.frame_id);
    });

    MetricsResult out;
    std::vector<MetricVector> rows;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (per_frame[i].empty())
            out.warnings.push_back("frame " + frames[i].frame_id + ": every region is excluded");
        rows.insert(rows.end(), per_frame[i].begin(), per_frame[i].end());
    }
    std::sort(out.warnings.begin(), out.warnings.end());
    out.csv = metrics_to_csv(std::move(rows));
    return out;
}

std::string run_evaluate(const EvaluateInputs& in, int threads)
{
    const auto test_refs = in_splits(in.annotations, in.split, {Split::Test});
    if (test_refs.empty()) throw InputError("no annotations on test frames");

    std::set<std::string> annotators;
    for (const auto& r : in.annotations) annotators.insert(r.source.name);

    // Metric columns present in the input.
    std::vector<std::string> metrics;
    for (auto name : kMetricNames) {
        const std::string n(name);
        if (std::any_of(in.metrics.begin(), in.metrics.end(),
                        [&](const MetricVector& m) { return metric_value(m, n).has_value(); }))
            metrics.push_back(n);
    }

    std::vector<SourceReport> sources(metrics.size() + in.methods.size());
    parallel_for(sources.size(), threads, [&](std::size_t i) {
        if (i < metrics.size()) {
            sources[i] = evaluate_metric(metrics[i], in, test_refs);
            return;
        }
        const auto& scores = in.methods[i - metrics.size()];
        if (scores.empty()) throw InputError("empty method score list");
        SourceReport rep{scores.front().source.name, json::object(), {}};
        const auto test_scores = in_splits(scores, in.split, {Split::Test});
        agreement(rep, test_scores, test_refs);
        sources[i] = std::move(rep);
    });

    json report;
    report["format"] = "echoq-evaluation/1";
    report["splits"] = {{"train", in.split.count(Split::Train)},
                        {"val", in.split.count(Split::Val)},
                        {"test", in.split.count(Split::Test)}};
    report["annotators"] = annotators;
    json metric_json = json::object(), method_json = json::object();
    for (std::size_t i = 0; i < sources.size(); ++i)
        (i < metrics.size() ? metric_json : method_json)[sources[i].name] = sources[i].section;
    report["metrics"] = std::move(metric_json);
    report["methods"] = std::move(method_json);

    if (annotators.size() == 3) {
        try {
            const auto inter = inter_observer(test_refs);
            report["inter_observer"] = stats_json(inter.stats);
        } catch (const InputError& e) {
            report["inter_observer"] = {{"skipped", e.what()}};
        }
    }

    json tests = json::array();
    for (std::size_t i = 0; i < sources.size(); ++i) {
        for (std::size_t k = i + 1; k < sources.size(); ++k) {
            if (sources[i].entries.empty() || sources[k].entries.empty()) continue;
            const auto a = abs_errors_by_key(sources[i].entries);
            const auto b = abs_errors_by_key(sources[k].entries);
            std::vector<double> xa, xb;
            for (const auto& [key, v] : a) {
                auto it = b.find(key);
                if (it == b.end()) continue;
                xa.push_back(v);
                xb.push_back(it->second);
            }
            json t = {{"a", sources[i].name}, {"b", sources[k].name}, {"pairs", xa.size()}};
            try {
                const auto w = wilcoxon_signed_rank(xa, xb);
                t["statistic"] = w.statistic;
                t["n_nonzero"] = w.n;
                t["p_two_sided"] = w.p_two_sided;
                t["exact"] = w.exact;
                t["significant"] = w.p_two_sided < 0.05;
            } catch (const InputError& e) {
                t["skipped"] = e.what();
            }
            tests.push_back(std::move(t));
        }
    }
    report["wilcoxon"] = std::move(tests);
    if (in.timestamp) report["generated_at"] = *in.timestamp;
    return report.dump(1) + "\n";
}

std::string run_compare(const std::vector<ComparePair>& pairs, int threads)
{
    if (pairs.empty()) throw InputError("no image pairs to compare");
    std::vector<ImageScores> scores(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        const GrayImage t = load_gray(pairs[i].target);
        const GrayImage p = load_gray(pairs[i].pred);
        scores[i] = compare_images(t, p);
    });

    json frames = json::array();
    std::vector<double> s, p, r;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        frames.push_back({{"frame_id", pairs[i].frame_id},
                          {"ssim", scores[i].ssim},
                          {"psnr_db", number_or_tag(scores[i].psnr_db)},
                          {"rpe", scores[i].rpe}});
        s.push_back(scores[i].ssim);
        p.push_back(scores[i].psnr_db);
        r.push_back(scores[i].rpe);
    }
    json report;
    report["format"] = "echoq-compare/1";
    report["frames"] = std::move(frames);
    report["summary"] = {{"ssim", summary_json(summarize(s))},
                         {"psnr_db", summary_json(summarize(p))},
                         {"rpe", summary_json(summarize(r))}};
    return report.dump(1) + "\n";
}

GrayImage run_coherence(const fs::path& channels, Spacing spacing, double gamma, int threads)
{
    validate(spacing);
    return gamma_normalize(coherence_factor(load_channels(channels), spacing, threads), gamma);
}

void write_corpus(const fs::path& dir, const CorpusOptions& opt, int threads)
{
    if (opt.frames < 1) throw InputError("corpus needs at least one frame");
    fs::create_directories(dir / "frames");
    const CounterRng rng(opt.seed);
    constexpr std::array<View, 3> views = {View::A4C, View::A2C, View::ALAX};

    std::vector<std::string> ids(static_cast<std::size_t>(opt.frames));
    std::vector<std::array<double, kRegionCount>> quality(ids.size());
    std::vector<std::array<bool, kRegionCount>> excluded(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        char id[16];
        std::snprintf(id, sizeof id, "f%03zu", i);
        ids[i] = id;
        RngStream draw(rng, 100 + i);
        const double base = draw.uniform(1.5, 4.5);
        for (auto& q : quality[i]) q = std::clamp(base + draw.uniform(-1.0, 1.0), 1.0, 5.0);

        const View view = views[i % views.size()];
        const auto params = random_chamber(rng.bits(200, i), false, opt.width, opt.height);
        const auto frame = gen_synthetic_frame(view, opt.width, opt.height, opt.spacing, params,
                                               quality[i], rng.bits(300, i));
        excluded[i] = frame.regions.excluded;
        const fs::path stem = dir / "frames" / ids[i];
        save_gray(stem.string() + "_bmode.pgm", frame.bmode);
        save_label_mask(stem.string() + "_labels.pgm", stem.string() + "_sector.pgm", frame.mask);
        save_gray(stem.string() + "_coherence.cimg", frame.coherence);
        write_file(stem.string() + "_regions.json", regions_to_json(frame.regions));
    });

    std::string annotations = "frame_id,region_id,annotator,label\n";
    json manifest_frames = json::array();
    SplitManifest split;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (RegionId id : kAllRegions) {
            const auto k = static_cast<std::size_t>(id);
            for (int a = 0; a < 3; ++a) {
                std::string label = "oos";
                if (!excluded[i][k]) {
                    const double noisy = quality[i][k] + 0.6 * rng.normal(400 + a, i * kRegionCount + k);
                    label = std::to_string(std::clamp<long>(std::lround(noisy), 1, 5));
                }
                annotations += ids[i] + "," + std::string(region_name(id)) + ",a" +
                               std::to_string(a + 1) + "," + label + "\n";
            }
        }
        const std::string stem = "frames/" + ids[i];
        manifest_frames.push_back({{"frame_id", ids[i]},
                                   {"view", to_string(views[i % views.size()])},
                                   {"bmode", stem + "_bmode.pgm"},
                                   {"labels", stem + "_labels.pgm"},
                                   {"sector", stem + "_sector.pgm"},
                                   {"coherence", stem + "_coherence.cimg"},
                                   {"regions", stem + "_regions.json"}});
        // 60 / 20 / 20 by position.
        const std::size_t n = ids.size();
        split.frames[ids[i]] = i * 5 < n * 3 ? Split::Train : (i * 5 < n * 4 ? Split::Val : Split::Test);
    }
    write_file(dir / "annotations.csv", annotations);
    write_file(dir / "split.json", split_to_json(split));
    json manifest = {{"format", "echoq-corpus/1"},
                     {"spacing", {opt.spacing.depth, opt.spacing.width}},
                     {"frames", std::move(manifest_frames)}};
    write_file(dir / "corpus.json", manifest.dump(1) + "\n");
}

} // namespace echoq
