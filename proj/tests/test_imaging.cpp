#include <doctest.h>

#include <filesystem>

#include "echoq/imaging.hpp"
#include "oracles.hpp"

using namespace echoq;

namespace {

GrayImage intensity_image(const Grid<double>& g)
{
    return GrayImage{g, Spacing{}, PixelDomain::Intensity8};
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("echoq_test_" + name);
}

} // namespace

TEST_CASE("pgm decode reads raw bytes row-major")
{
    std::string bytes = "P5\n2 2\n255\n";
    bytes += std::string{'\x00', '\xff', '\x11', '\x22'};
    const auto g = decode_pgm(bytes);
    CHECK(g.width() == 2);
    CHECK(g.height() == 2);
    CHECK(g(0, 0) == 0);
    CHECK(g(0, 1) == 255);
    CHECK(g(1, 0) == 17);
    CHECK(g(1, 1) == 34);
}

TEST_CASE("pgm errors")
{
    CHECK_THROWS_WITH_AS(decode_pgm("P5\n4 4\n255\n\x01\x02"), "unexpected end of data", InputError);
    CHECK_THROWS_AS(decode_pgm("P6\n1 1\n255\n\x01"), InputError);
    CHECK_THROWS_AS(decode_pgm("P5\n1 1\n65535\n\x01\x01"), InputError);
    CHECK_THROWS_WITH_AS(decode_pgm("P5\n99999999 99999999\n255\n"), "dimension overflow", InputError);
    CHECK_THROWS_AS(decode_pgm("P5\n1 1\n255\n\x01\x02"), InputError); // trailing bytes
    CHECK_THROWS_AS(decode_pgm("P5\n-1 1\n255\n"), InputError);
    // comments are only accepted on the magic line
    CHECK_NOTHROW(decode_pgm("P5 # made by hand\n1 1\n255\n\x07"));
    CHECK_THROWS_AS(decode_pgm("P5\n# late comment\n1 1\n255\n\x07"), InputError);
}

TEST_CASE("pgm and cimg round trips are byte identical")
{
    gen::Engine e(11);
    for (int k = 0; k < 20; ++k) {
        const int w = 1 + static_cast<int>(e() % 40), h = 1 + static_cast<int>(e() % 40);
        Grid<std::uint8_t> g(w, h);
        for (auto& v : g.values()) v = static_cast<std::uint8_t>(e() & 0xff);
        const std::string bytes = encode_pgm(g);
        CHECK(decode_pgm(bytes) == g);
        CHECK(encode_pgm(decode_pgm(bytes)) == bytes);

        GrayImage img = make_gray(w, h, Spacing{0.3, 0.7}, PixelDomain::Unit);
        for (auto& v : img.pixels.values()) v = static_cast<float>(static_cast<double>(e() % 100001) / 100000.0);
        const std::string cimg = encode_cimg(img);
        const GrayImage back = decode_cimg(cimg);
        CHECK(back.pixels == img.pixels);
        CHECK(back.spacing == img.spacing);
        CHECK(encode_cimg(back) == cimg);
    }
}

TEST_CASE("cimg rejects values outside the unit domain and truncation")
{
    GrayImage img = make_gray(2, 1, Spacing{}, PixelDomain::Unit);
    std::string bytes = encode_cimg(img);
    CHECK_THROWS_WITH_AS(decode_cimg(bytes.substr(0, bytes.size() - 1)), "unexpected end of data", InputError);
    // 2.0f little endian
    bytes.replace(bytes.size() - 4, 4, std::string{'\x00', '\x00', '\x00', '\x40'});
    CHECK_THROWS_AS(decode_cimg(bytes), InputError);
}

TEST_CASE("save and load through files")
{
    gen::Engine e(5);
    GrayImage img = intensity_image(gen::image(e, 17, 9, 0, 256, true));
    img.spacing = {0.5, 0.25};
    const auto p = temp_path("img.pgm");
    save_gray(p, img);
    const GrayImage back = load_gray(p, img.spacing);
    CHECK(back.pixels == img.pixels);
    CHECK(back.domain == PixelDomain::Intensity8);
    CHECK_THROWS_WITH_AS(load_gray(temp_path("does_not_exist.pgm")), doctest::Contains("cannot open"), InputError);

    LabelMask mask{Grid<std::uint8_t>(4, 3, 2), Mask(4, 3, 1), Spacing{}};
    mask.sector(0, 0) = 0;
    mask.labels(1, 1) = 4;
    save_label_mask(temp_path("l.pgm"), temp_path("s.pgm"), mask);
    const LabelMask m2 = load_label_mask(temp_path("l.pgm"), temp_path("s.pgm"), Spacing{});
    CHECK(m2.labels == mask.labels);
    CHECK(m2.sector == mask.sector);
    const LabelMask m3 = load_label_mask(temp_path("l.pgm"), std::nullopt, Spacing{});
    CHECK(count(m3.sector) == 12);

    Grid<std::uint8_t> bad(2, 2, 9);
    write_file(temp_path("bad.pgm"), encode_pgm(bad));
    CHECK_THROWS_AS(load_label_mask(temp_path("bad.pgm"), std::nullopt, Spacing{}), InputError);
    Grid<std::uint8_t> bad_sector(4, 3, 17);
    write_file(temp_path("bad_sector.pgm"), encode_pgm(bad_sector));
    CHECK_THROWS_AS(load_label_mask(temp_path("l.pgm"), temp_path("bad_sector.pgm"), Spacing{}), InputError);
}

TEST_CASE("spacing must be positive")
{
    CHECK_THROWS_AS(validate(Spacing{0.0, 1.0}), InputError);
    CHECK_THROWS_AS(validate(Spacing{1.0, -1.0}), InputError);
    CHECK_NOTHROW(validate(Spacing{0.1, 0.2}));
}

TEST_CASE("histogram matches brute-force counting")
{
    gen::Engine e(3);
    for (int k = 0; k < 20; ++k) {
        const GrayImage img = intensity_image(gen::image(e, 31, 23, 0, 256, true));
        Mask m(31, 23);
        for (auto& v : m.values()) v = (e() % 3) != 0;
        m(0, 0) = 1;
        const Histogram h = histogram(img, m);
        std::uint64_t total = 0;
        for (int v = 0; v < 256; ++v) {
            std::uint64_t n = 0;
            for (std::size_t i = 0; i < img.pixels.size(); ++i) n += m[i] && img.pixels[i] == v;
            CHECK(h.bins[static_cast<std::size_t>(v)] == n);
            total += n;
        }
        CHECK(h.total == total);
        double s = 0.0;
        for (double p : h.normalized()) s += p;
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
}

TEST_CASE("histogram trivial cases")
{
    GrayImage img = make_gray(2, 2, Spacing{}, PixelDomain::Intensity8, 7.0);
    const Histogram h = histogram(img, Mask(2, 2, 1));
    CHECK(h.bins[7] == 4);
    CHECK(h.total == 4);
    CHECK_THROWS_WITH_AS(histogram(img, Mask(2, 2, 0)), "empty mask", InputError);
}

TEST_CASE("histogram matching examples")
{
    SUBCASE("constant image maps to the target mean")
    {
        GrayImage img = make_gray(8, 8, Spacing{}, PixelDomain::Intensity8, 40.0);
        const GrayImage out = histogram_match(img, Mask(8, 8, 1));
        for (double v : out.pixels.values()) CHECK(v == 127.0);
    }
    SUBCASE("two-level image")
    {
        GrayImage img = make_gray(10, 10, Spacing{}, PixelDomain::Intensity8);
        for (std::size_t i = 0; i < 50; ++i) img.pixels[i] = 255.0;
        const GrayImage out = histogram_match(img, Mask(10, 10, 1));
        const double lo = std::round(oracle::normal_quantile(0.25, 127, 32));
        const double hi = std::round(oracle::normal_quantile(0.75, 127, 32));
        CHECK(lo == 105.0);
        CHECK(hi == 149.0);
        for (std::size_t i = 0; i < 100; ++i) CHECK(out.pixels[i] == (i < 50 ? hi : lo));
    }
    SUBCASE("only sector pixels shape the mapping")
    {
        GrayImage img = make_gray(4, 1, Spacing{}, PixelDomain::Intensity8);
        img.pixels[0] = 10;
        img.pixels[1] = 20;
        img.pixels[2] = 0; // outside
        img.pixels[3] = 20;
        Mask sector(4, 1, 1);
        sector[2] = 0;
        const GrayImage out = histogram_match(img, sector);
        // F(10) = 0.5/3, F(20) = (1 + 1)/3; value 0 has F = 0 and maps to the bottom
        CHECK(out.pixels[0] == std::round(oracle::normal_quantile(0.5 / 3.0, 127, 32)));
        CHECK(out.pixels[1] == std::round(oracle::normal_quantile(2.0 / 3.0, 127, 32)));
        CHECK(out.pixels[2] == 0.0);
        CHECK_THROWS_AS(histogram_match(img, Mask(4, 1, 0)), InputError);
    }
}

TEST_CASE("histogram matching table matches a bisection oracle")
{
    gen::Engine e(21);
    for (int k = 0; k < 10; ++k) {
        const GrayImage img = intensity_image(gen::image(e, 40, 30, 0, 256, true));
        const Mask all(40, 30, 1);
        const GrayImage out = histogram_match(img, all);
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            double less = 0, equal = 0;
            for (double v : img.pixels.values()) {
                less += v < img.pixels[i];
                equal += v == img.pixels[i];
            }
            const double f = (less + 0.5 * equal) / static_cast<double>(img.pixels.size());
            const double expected = std::round(std::clamp(oracle::normal_quantile(f, 127, 32), 0.0, 255.0));
            REQUIRE(out.pixels[i] == expected);
        }
    }
}

TEST_CASE("histogram matching is monotone and stable under repetition")
{
    gen::Engine e(8);
    for (int k = 0; k < 30; ++k) {
        const bool skewed = k % 2;
        GrayImage img = intensity_image(gen::image(e, 37, 29, 0, skewed ? 60 : 256, true));
        const Mask all(37, 29, 1);
        const GrayImage once = histogram_match(img, all);
        const GrayImage twice = histogram_match(once, all);
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            CHECK(std::abs(once.pixels[i] - twice.pixels[i]) <= 1.0);
            for (std::size_t j = 0; j < img.pixels.size(); j += 97)
                if (img.pixels[i] <= img.pixels[j]) CHECK(once.pixels[i] <= once.pixels[j]);
        }
    }
}
