#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "echoq/coherence.hpp"
#include "echoq/evalstats.hpp"
#include "echoq/imgcmp.hpp"
#include "echoq/phantom.hpp"
#include "echoq/pipeline.hpp"
#include "echoq/qmetrics.hpp"
#include "echoq/regions.hpp"

namespace py = pybind11;
using namespace echoq;

namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
Grid<T> to_grid(const Array<T>& a, const char* what)
{
    if (a.ndim() != 2) throw InputError(std::string(what) + " must be a 2-D array");
    const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    return Grid<T>(w, h, std::vector<T>(a.data(), a.data() + a.size()));
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& g)
{
    py::array_t<T> out({g.height(), g.width()});
    if (g.size() != 0) std::memcpy(out.mutable_data(), g.storage().data(), g.size() * sizeof(T));
    return out;
}

py::array_t<bool> to_bool_array(const Mask& m)
{
    py::array_t<bool> out({m.height(), m.width()});
    auto* dst = out.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i) dst[i] = m[i] != 0;
    return out;
}

Spacing spacing_of(std::pair<double, double> s)
{
    const Spacing sp{s.first, s.second};
    validate(sp);
    return sp;
}

GrayImage unit_image(const Array<double>& a, std::pair<double, double> spacing = {1.0, 1.0})
{
    GrayImage img{to_grid(a, "image"), spacing_of(spacing), PixelDomain::Unit};
    validate(img);
    return img;
}

GrayImage bmode_image(const Array<double>& a, std::pair<double, double> spacing)
{
    GrayImage img{to_grid(a, "bmode"), spacing_of(spacing), PixelDomain::Intensity8};
    validate(img);
    return img;
}

LabelMask label_mask(const Array<std::uint8_t>& labels, const std::optional<Array<std::uint8_t>>& sector,
                     std::pair<double, double> spacing)
{
    LabelMask m{to_grid(labels, "labels"), Mask(), spacing_of(spacing)};
    m.sector = sector ? to_grid(*sector, "sector") : Mask(m.width(), m.height(), 1);
    for (auto& v : m.sector.values()) v = v != 0;
    validate(m);
    return m;
}

Histogram histogram_of(const Array<std::uint8_t>& values)
{
    Histogram h;
    const auto* p = values.data();
    for (py::ssize_t i = 0; i < values.size(); ++i) ++h.bins[p[i]];
    h.total = static_cast<std::uint64_t>(values.size());
    return h;
}

std::span<const double> span_of(const Array<double>& a)
{
    return {a.data(), static_cast<std::size_t>(a.size())};
}

py::tuple point(Point p) { return py::make_tuple(p.row, p.col); }

py::dict regions_dict(const RegionSet& rs)
{
    py::dict masks, excluded, landmarks;
    for (RegionId id : kAllRegions) {
        const std::string name(region_name(id));
        masks[name.c_str()] = to_bool_array(rs[id]);
        excluded[name.c_str()] = rs.is_excluded(id);
    }
    const auto& lm = rs.landmarks;
    landmarks["A"] = point(lm.base_left);
    landmarks["B"] = point(lm.base_right);
    landmarks["C"] = point(lm.apex);
    landmarks["D"] = point(lm.endo_left_thirds[0]);
    landmarks["E"] = point(lm.endo_left_thirds[1]);
    landmarks["F"] = point(lm.endo_right_thirds[0]);
    landmarks["G"] = point(lm.endo_right_thirds[1]);
    const char* outer[] = {"H", "I", "J", "K", "L"};
    for (std::size_t k = 0; k < 5; ++k) landmarks[outer[k]] = point(lm.outer_matches[k]);
    py::dict d;
    d["view"] = std::string(to_string(rs.view));
    d["masks"] = masks;
    d["excluded"] = excluded;
    d["landmarks"] = landmarks;
    d["sector"] = to_bool_array(rs.sector);
    d["json"] = regions_to_json(rs);
    return d;
}

} // namespace

PYBIND11_MODULE(_echoq, m)
{
    m.doc() = "Regional echocardiography image quality metrics";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

    // imaging
    m.def(
        "histogram_match",
        [](const Array<double>& bmode, const std::optional<Array<std::uint8_t>>& sector, double target_mean,
           double target_std) {
            const GrayImage img = bmode_image(bmode, {1.0, 1.0});
            Mask s = sector ? to_grid(*sector, "sector") : Mask(img.width(), img.height(), 1);
            for (auto& v : s.values()) v = v != 0;
            return to_array(histogram_match(img, s, target_mean, target_std).pixels);
        },
        py::arg("bmode"), py::arg("sector") = py::none(), py::arg("target_mean") = 127.0,
        py::arg("target_std") = 32.0);

    // regions
    m.def(
        "divide_regions",
        [](const Array<std::uint8_t>& labels, const std::string& view,
           const std::optional<Array<std::uint8_t>>& sector, std::pair<double, double> spacing,
           double annulus_radius_mm) {
            const LabelMask mask = label_mask(labels, sector, spacing);
            return regions_dict(divide_regions(mask, parse_view(view), annulus_radius_mm));
        },
        py::arg("labels"), py::arg("view"), py::arg("sector") = py::none(),
        py::arg("spacing") = std::pair{1.0, 1.0}, py::arg("annulus_radius_mm") = 2.0,
        "Six-segment division of the myocardium. Returns masks, exclusion flags, landmarks A..L, "
        "the sector and the regions JSON document.");
    m.def("region_names", [] {
        std::vector<std::string> names;
        for (RegionId id : kAllRegions) names.emplace_back(region_name(id));
        return names;
    });

    // quality metrics
    m.def(
        "gcnr",
        [](const Array<std::uint8_t>& roi, const Array<std::uint8_t>& bg) {
            return gcnr(histogram_of(roi), histogram_of(bg));
        },
        py::arg("roi"), py::arg("background"), "gCNR of two sets of 8-bit grey levels.");
    m.def(
        "cnr",
        [](const Array<double>& roi, const Array<double>& bg) {
            auto stats = [](const Array<double>& a) {
                const GrayImage img{Grid<double>(static_cast<int>(a.size()), 1, std::vector<double>(a.data(), a.data() + a.size())),
                                    Spacing{}, PixelDomain::Intensity8};
                return region_stats(img, Mask(img.width(), 1, 1));
            };
            return py::make_tuple(cnr(stats(roi), stats(bg)), contrast_ratio(stats(roi), stats(bg)));
        },
        py::arg("roi"), py::arg("background"), "(CNR, CR) of two samples of grey levels.");
    m.def(
        "frame_metrics",
        [](const Array<double>& bmode, const Array<std::uint8_t>& labels, const std::string& view,
           const std::optional<Array<std::uint8_t>>& sector, std::pair<double, double> spacing,
           const std::optional<Array<double>>& coherence) {
            const LabelMask mask = label_mask(labels, sector, spacing);
            const RegionSet rs = divide_regions(mask, parse_view(view));
            std::optional<GrayImage> coh;
            if (coherence) coh = unit_image(*coherence, spacing);
            py::list rows;
            for (const auto& v : frame_metrics(bmode_image(bmode, spacing), mask, rs, coh, "")) {
                py::dict row;
                row["region"] = std::string(region_name(v.region));
                row["intensity"] = v.intensity;
                row["cr"] = v.cr;
                row["cnr"] = v.cnr;
                row["gcnr"] = v.gcnr;
                row["coherence"] = v.coherence ? py::cast(*v.coherence) : py::none();
                rows.append(row);
            }
            return rows;
        },
        py::arg("bmode"), py::arg("labels"), py::arg("view"), py::arg("sector") = py::none(),
        py::arg("spacing") = std::pair{1.0, 1.0}, py::arg("coherence") = py::none(),
        "Per-region metrics of one frame after histogram matching over the sector.");

    // coherence
    m.def(
        "coherence_factor",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& channels,
           int threads) {
            if (channels.ndim() != 3) throw InputError("channels must have shape (height, width, elements)");
            ChannelFrame frame(static_cast<int>(channels.shape(1)), static_cast<int>(channels.shape(0)),
                               static_cast<int>(channels.shape(2)));
            std::copy(channels.data(), channels.data() + channels.size(), frame.samples().begin());
            Grid<double> cf;
            {
                py::gil_scoped_release release;
                cf = coherence_factor(frame, Spacing{}, threads).pixels;
            }
            return to_array(cf);
        },
        py::arg("channels"), py::arg("threads") = 1,
        "Per-pixel coherence factor of channel data shaped (height, width, elements).");
    m.def(
        "gamma_normalize",
        [](const Array<double>& cf, double gamma) { return to_array(gamma_normalize(unit_image(cf), gamma).pixels); },
        py::arg("coherence"), py::arg("gamma") = 0.5);

    // image comparison
    m.def(
        "ssim", [](const Array<double>& t, const Array<double>& p) { return ssim(unit_image(t), unit_image(p)); },
        py::arg("target"), py::arg("pred"));
    m.def(
        "psnr",
        [](const Array<double>& t, const Array<double>& p, double max_value) {
            return psnr(unit_image(t), unit_image(p), max_value);
        },
        py::arg("target"), py::arg("pred"), py::arg("max_value") = 1.0);
    m.def(
        "rpe",
        [](const Array<double>& t, const Array<double>& p, double epsilon) {
            return rpe(unit_image(t), unit_image(p), epsilon);
        },
        py::arg("target"), py::arg("pred"), py::arg("epsilon") = 1e-4);

    // statistics
    m.def(
        "spearman", [](const Array<double>& x, const Array<double>& y) { return spearman(span_of(x), span_of(y)); },
        py::arg("x"), py::arg("y"));
    m.def(
        "average_ranks", [](const Array<double>& x) { return average_ranks(span_of(x)); }, py::arg("values"));
    m.def(
        "fit_linear",
        [](const Array<double>& metric, const Array<double>& labels) {
            const auto cal = fit_linear(span_of(metric), span_of(labels));
            return py::make_tuple(cal.slope, cal.intercept);
        },
        py::arg("metric"), py::arg("labels"), "(slope, intercept) of labels ~ metric.");
    m.def("quality_category", &quality_category, py::arg("score"));
    m.def(
        "wilcoxon_signed_rank",
        [](const Array<double>& a, const Array<double>& b) {
            const auto w = wilcoxon_signed_rank(span_of(a), span_of(b));
            py::dict d;
            d["statistic"] = w.statistic;
            d["w_plus"] = w.w_plus;
            d["w_minus"] = w.w_minus;
            d["p_value"] = w.p_two_sided;
            d["n"] = w.n;
            d["exact"] = w.exact;
            return d;
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "agreement_by_quality",
        [](const Array<double>& diffs, const Array<double>& quality) {
            py::list out;
            for (const auto& c : agreement_by_quality(span_of(diffs), span_of(quality))) {
                py::dict d;
                d["category"] = c.category;
                d["n"] = c.n;
                d["mean"] = c.mean;
                d["std"] = c.std;
                out.append(d);
            }
            return out;
        },
        py::arg("diffs"), py::arg("quality"));

    // phantoms
    m.def(
        "contrast_phantom",
        [](double roi_mean, double roi_std, double bg_mean, double bg_std, std::size_t pixels, std::uint64_t seed) {
            const auto [img, mask] =
                gen_contrast_phantom(ContrastParams{roi_mean, roi_std, bg_mean, bg_std, pixels, seed});
            return py::make_tuple(to_array(img.pixels), to_array(mask.labels));
        },
        py::arg("roi_mean") = 120.0, py::arg("roi_std") = 15.0, py::arg("bg_mean") = 40.0,
        py::arg("bg_std") = 15.0, py::arg("pixels_per_region") = 100000, py::arg("seed") = 1,
        "(bmode, labels) with an LV disk of background speckle inside a MYO ring.");
    m.def(
        "chamber_phantom",
        [](const std::string& view, int width, int height, std::optional<std::uint64_t> seed, bool symmetric,
           std::pair<double, double> spacing) {
            const ChamberParams params =
                seed ? random_chamber(*seed, symmetric, width, height) : default_chamber(width, height);
            const auto ph = gen_chamber_phantom(parse_view(view), width, height, spacing_of(spacing), params);
            return py::make_tuple(to_array(ph.mask.labels), to_bool_array(ph.mask.sector));
        },
        py::arg("view") = "A4C", py::arg("width") = 128, py::arg("height") = 128, py::arg("seed") = py::none(),
        py::arg("symmetric") = false, py::arg("spacing") = std::pair{0.5, 0.5},
        "(labels, sector) of a parametric apical view; random geometry when a seed is given.");
}
