// echoq: regional image-quality metrics for apical echocardiography frames.
//
// Exit codes: 0 ok, 2 input error, 3 validation error, 4 internal invariant.

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <iostream>
#include <json.hpp>

#include "echoq/coherence.hpp"
#include "echoq/phantom.hpp"
#include "echoq/pipeline.hpp"

namespace {

using namespace echoq;

constexpr int kExitInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInvariant = 4;

struct Globals {
    int threads = 1;
    std::uint64_t seed = 1;
    bool verbose = false;
};

void log(const Globals& g, const std::string& msg)
{
    if (g.verbose) std::cerr << "echoq: " << msg << "\n";
}

Spacing parse_spacing(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError("spacing must be 'depth,width' in mm");
    try {
        std::size_t used = 0;
        Spacing s{std::stod(text.substr(0, comma), &used), 0.0};
        if (used != comma) throw std::invalid_argument("spacing");
        const std::string rest = text.substr(comma + 1);
        s.width = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("spacing");
        validate(s);
        return s;
    } catch (const std::logic_error&) {
        throw InputError("spacing must be 'depth,width' in mm, got '" + text + "'");
    }
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RegionsArgs {
    std::string labels, sector, spacing = "1,1", view, out;
    double radius = 2.0;
};

struct MetricsArgs {
    std::string bmode, labels, regions, coherence, frame_id = "frame", manifest, out;
};

struct CoherenceArgs {
    std::string channels, out, spacing = "1,1";
    double gamma = 0.5;
};

struct CompareArgs {
    std::vector<std::string> targets, preds;
    std::string out;
};

struct EvaluateArgs {
    std::vector<std::string> metrics, methods;
    std::string annotations, split, out;
    bool timestamp = false;
};

struct PhantomArgs {
    std::string out_dir, out, view = "A4C", spacing = "0.5,0.5", profile = "constant:0.7";
    double roi_mean = 120, roi_std = 15, bg_mean = 40, bg_std = 15;
    std::size_t pixels = 100000;
    int width = 128, height = 128, elements = 64, frames = 12;
    bool random_geometry = false;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regional image-quality metrics for apical echocardiography frames"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for the phantom generators");
    app.add_flag("--verbose", g.verbose, "Progress messages on standard error");

    RegionsArgs ra;
    auto* regions = app.add_subcommand("regions", "Divide the myocardium into regions");
    regions->fallthrough();
    regions->add_option("--labels", ra.labels, "Label PGM (0 bg, 1 LV, 2 MYO, 3 LA, 4 AO)")->required();
    regions->add_option("--sector", ra.sector, "Sector PGM (0 outside, 255 inside)");
    regions->add_option("--spacing", ra.spacing, "Pixel spacing 'depth,width' in mm");
    regions->add_option("--view", ra.view, "A2C, A4C or ALAX")->required();
    regions->add_option("--annulus-radius", ra.radius, "Annulus disk radius in mm");
    regions->add_option("--out", ra.out, "Regions JSON")->required();

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "Regional quality metrics as CSV");
    metrics->fallthrough();
    metrics->add_option("--bmode", ma.bmode, "B-mode PGM");
    metrics->add_option("--labels", ma.labels, "Label PGM");
    metrics->add_option("--regions", ma.regions, "Regions JSON from 'regions'");
    metrics->add_option("--coherence", ma.coherence, "Coherence CIMG1 image");
    metrics->add_option("--frame-id", ma.frame_id, "Frame id for a single frame");
    metrics->add_option("--manifest", ma.manifest, "Corpus manifest (batch mode)");
    metrics->add_option("--out", ma.out, "Metric CSV")->required();

    CoherenceArgs ca;
    auto* coherence = app.add_subcommand("coherence", "Coherence image from channel data");
    coherence->fallthrough();
    coherence->add_option("--channels", ca.channels, "CHDF1 channel data")->required();
    coherence->add_option("--spacing", ca.spacing, "Pixel spacing 'depth,width' in mm");
    coherence->add_option("--gamma", ca.gamma, "Gamma applied to the coherence factor");
    coherence->add_option("--out", ca.out, "CIMG1 output")->required();

    CompareArgs cm;
    auto* compare = app.add_subcommand("compare", "SSIM, PSNR and RPE of predicted images");
    compare->fallthrough();
    compare->add_option("--target", cm.targets, "Reference images")->required();
    compare->add_option("--pred", cm.preds, "Predicted images, same order")->required();
    compare->add_option("--out", cm.out, "Report JSON")->required();

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Calibrate metrics and score agreement");
    evaluate->fallthrough();
    evaluate->add_option("--metrics", ea.metrics, "Metric CSV files")->required();
    evaluate->add_option("--annotations", ea.annotations, "Annotation CSV")->required();
    evaluate->add_option("--split", ea.split, "Split manifest JSON")->required();
    evaluate->add_option("--method", ea.methods, "Extra method scores as name=path.csv");
    evaluate->add_flag("--timestamp", ea.timestamp, "Embed the generation time in the report");
    evaluate->add_option("--out", ea.out, "Report JSON")->required();

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Synthetic test data");
    phantom->fallthrough();
    phantom->require_subcommand(1);
    auto* contrast = phantom->add_subcommand("contrast", "Speckle disk and ring");
    contrast->fallthrough();
    contrast->add_option("--roi-mean", pa.roi_mean);
    contrast->add_option("--roi-std", pa.roi_std);
    contrast->add_option("--bg-mean", pa.bg_mean);
    contrast->add_option("--bg-std", pa.bg_std);
    contrast->add_option("--pixels", pa.pixels, "Pixels per region");
    contrast->add_option("--out-dir", pa.out_dir)->required();
    auto* chamber = phantom->add_subcommand("chamber", "Parametric apical-view label mask");
    chamber->fallthrough();
    chamber->add_option("--view", pa.view);
    chamber->add_option("--width", pa.width);
    chamber->add_option("--height", pa.height);
    chamber->add_option("--spacing", pa.spacing);
    chamber->add_flag("--random", pa.random_geometry, "Random geometry drawn from --seed");
    chamber->add_option("--out-dir", pa.out_dir)->required();
    auto* channels = phantom->add_subcommand("channels", "Channel data with prescribed coherence");
    channels->fallthrough();
    channels->add_option("--width", pa.width);
    channels->add_option("--height", pa.height);
    channels->add_option("--elements", pa.elements);
    channels->add_option("--profile", pa.profile, "constant:<cf>, gradient:<lo>:<hi> or random");
    channels->add_option("--out", pa.out, "CHDF1 output")->required();
    auto* corpus = phantom->add_subcommand("corpus", "Synthetic multi-frame corpus");
    corpus->fallthrough();
    corpus->add_option("--frames", pa.frames);
    corpus->add_option("--width", pa.width);
    corpus->add_option("--height", pa.height);
    corpus->add_option("--spacing", pa.spacing);
    corpus->add_option("--out-dir", pa.out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*regions) {
            std::optional<fs::path> sector;
            if (!ra.sector.empty()) sector = ra.sector;
            write_file(ra.out, run_regions(ra.labels, sector, parse_spacing(ra.spacing),
                                           parse_view(ra.view), ra.radius));
            log(g, "wrote " + ra.out);
        } else if (*metrics) {
            std::vector<FrameFiles> frames;
            if (!ma.manifest.empty()) {
                if (!ma.bmode.empty() || !ma.labels.empty() || !ma.regions.empty())
                    throw InputError("--manifest cannot be combined with single-frame inputs");
                frames = load_corpus_manifest(ma.manifest);
            } else {
                if (ma.bmode.empty() || ma.labels.empty() || ma.regions.empty())
                    throw InputError("metrics needs --bmode, --labels and --regions (or --manifest)");
                FrameFiles f{ma.frame_id, ma.bmode, ma.labels, ma.regions, std::nullopt};
                if (!ma.coherence.empty()) f.coherence = ma.coherence;
                frames.push_back(std::move(f));
            }
            const auto result = run_metrics(frames, g.threads);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            write_file(ma.out, result.csv);
            log(g, "wrote " + ma.out);
        } else if (*coherence) {
            const GrayImage img = run_coherence(ca.channels, parse_spacing(ca.spacing), ca.gamma, g.threads);
            write_file(ca.out, encode_cimg(img));
            log(g, "wrote " + ca.out);
        } else if (*compare) {
            if (cm.targets.size() != cm.preds.size())
                throw InputError("--target and --pred need the same number of files");
            std::vector<ComparePair> pairs;
            for (std::size_t i = 0; i < cm.targets.size(); ++i)
                pairs.push_back({fs::path(cm.targets[i]).stem().string(), cm.targets[i], cm.preds[i]});
            write_file(cm.out, run_compare(pairs, g.threads));
            log(g, "wrote " + cm.out);
        } else if (*evaluate) {
            EvaluateInputs in;
            for (const auto& path : ea.metrics) {
                auto rows = metrics_from_csv(read_file(path));
                in.metrics.insert(in.metrics.end(), rows.begin(), rows.end());
            }
            in.annotations = annotations_from_csv(read_file(ea.annotations));
            in.split = split_from_json(read_file(ea.split));
            for (const auto& spec : ea.methods) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw InputError("--method expects name=path, got '" + spec + "'");
                in.methods.push_back(scores_from_csv(read_file(spec.substr(eq + 1)), spec.substr(0, eq)));
            }
            if (ea.timestamp) in.timestamp = utc_now();
            write_file(ea.out, run_evaluate(in, g.threads));
            log(g, "wrote " + ea.out);
        } else if (*contrast) {
            ContrastParams p{pa.roi_mean, pa.roi_std, pa.bg_mean, pa.bg_std, pa.pixels, g.seed};
            const auto [img, mask] = gen_contrast_phantom(p);
            fs::create_directories(pa.out_dir);
            const fs::path dir(pa.out_dir);
            save_gray(dir / "bmode.pgm", img);
            save_label_mask(dir / "labels.pgm", dir / "sector.pgm", mask);
            log(g, "wrote contrast phantom to " + pa.out_dir);
        } else if (*chamber) {
            const View view = parse_view(pa.view);
            const ChamberParams params = pa.random_geometry
                                             ? random_chamber(g.seed, false, pa.width, pa.height)
                                             : default_chamber(pa.width, pa.height);
            const auto ph = gen_chamber_phantom(view, pa.width, pa.height, parse_spacing(pa.spacing), params);
            fs::create_directories(pa.out_dir);
            const fs::path dir(pa.out_dir);
            save_label_mask(dir / "labels.pgm", dir / "sector.pgm", ph.mask);
            const nlohmann::json j = {{"view", to_string(view)},
                                      {"base_left", {ph.base_left.row, ph.base_left.col}},
                                      {"base_right", {ph.base_right.row, ph.base_right.col}}};
            write_file(dir / "expected.json", j.dump(1) + "\n");
            log(g, "wrote chamber phantom to " + pa.out_dir);
        } else if (*channels) {
            const auto profile = CoherenceProfile::parse(pa.profile, pa.width);
            const auto ph = gen_channel_phantom(pa.width, pa.height, pa.elements, profile, g.seed);
            save_channels(pa.out, ph.frame);
            log(g, "wrote " + pa.out);
        } else if (*corpus) {
            CorpusOptions opt{pa.frames, pa.width, pa.height, parse_spacing(pa.spacing), g.seed};
            write_corpus(pa.out_dir, opt, g.threads);
            log(g, "wrote corpus to " + pa.out_dir);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
        case ErrorKind::Input: return kExitInput;
        case ErrorKind::Validation: return kExitValidation;
        case ErrorKind::Invariant: return kExitInvariant;
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return 0;
}
