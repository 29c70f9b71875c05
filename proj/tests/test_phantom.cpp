#include <doctest.h>

#include "echoq/phantom.hpp"
#include "echoq/rng.hpp"
#include "oracles.hpp"

using namespace echoq;

TEST_CASE("counter rng reference values")
{
    // splitmix64 seeded with 0 starts 0xE220A8397B1DCDAF
    CHECK(CounterRng::splitmix(0) == 0xE220A8397B1DCDAFULL);
    const CounterRng rng(42);
    CHECK(rng.bits(3, 7) == CounterRng::splitmix(CounterRng::splitmix(42 ^ CounterRng::splitmix(3)) ^ 7));
    CHECK(rng.bits(3, 7) != rng.bits(3, 8));
    CHECK(rng.bits(3, 7) != rng.bits(4, 7));

    double mean = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(0, static_cast<std::uint64_t>(i));
        CHECK_FALSE(u < 0.0);
        CHECK(u < 1.0);
        const double z = rng.normal(1, static_cast<std::uint64_t>(i));
        mean += z;
        sq += z * z;
    }
    mean /= n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);

    RngStream s(rng, 5);
    CHECK(s.uniform() == rng.uniform(5, 0));
    CHECK(s.normal() == rng.normal(5 | (1ULL << 63), 0));
    CHECK(s.uniform() == rng.uniform(5, 1));
}

TEST_CASE("contrast phantom layout and determinism")
{
    ContrastParams p{120, 15, 40, 15, 2000, 3};
    const auto [img, mask] = gen_contrast_phantom(p);
    const auto [img2, mask2] = gen_contrast_phantom(p);
    CHECK(img.pixels == img2.pixels);
    CHECK(mask.labels == mask2.labels);
    for (double v : img.pixels.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
        CHECK(v == std::round(v));
    }
    CHECK(std::abs(static_cast<double>(count(select(mask, Label::LV))) - 2000.0) < 60.0);
    p.seed = 4;
    CHECK(gen_contrast_phantom(p).first.pixels != img.pixels);

    CHECK_THROWS_AS(gen_contrast_phantom({300, 15, 40, 15, 100, 1}), InputError);
    CHECK_THROWS_AS(gen_contrast_phantom({120, -1, 40, 15, 100, 1}), InputError);
    CHECK_THROWS_AS(gen_contrast_phantom({120, 15, 40, 15, 0, 1}), InputError);
}

TEST_CASE("chamber phantom")
{
    const auto a4c = gen_chamber_phantom(View::A4C, 128, 128, Spacing{0.5, 0.5}, default_chamber(128, 128));
    CHECK(a4c.mask.has(Label::LV));
    CHECK(a4c.mask.has(Label::MYO));
    CHECK(a4c.mask.has(Label::LA));
    CHECK_FALSE(a4c.mask.has(Label::AO));
    const auto alax = gen_chamber_phantom(View::ALAX, 128, 128, Spacing{0.5, 0.5}, default_chamber(128, 128));
    CHECK(alax.mask.has(Label::AO));

    // symmetric parameters give a mirror-symmetric mask
    CHECK(mirror_horizontal(a4c.mask.labels) == a4c.mask.labels);
    CHECK(a4c.base_left.row == a4c.base_right.row);
    CHECK(a4c.base_left.col + a4c.base_right.col == doctest::Approx(127.0));

    CHECK_THROWS_AS(gen_chamber_phantom(View::A4C, 63, 128, Spacing{}, default_chamber(63, 128)), InputError);
    CHECK_THROWS_AS(random_chamber(1, true, 127, 128), InputError);

    for (std::uint64_t seed = 1; seed < 20; ++seed) {
        const auto p = random_chamber(seed, false, 100, 90);
        const auto ph = gen_chamber_phantom(View::A2C, 100, 90, Spacing{0.5, 0.5}, p);
        // the wall never touches the image border
        for (int r = 0; r < 90; ++r) {
            CHECK(ph.mask.labels(r, 0) != label_code(Label::MYO));
            CHECK(ph.mask.labels(r, 99) != label_code(Label::MYO));
        }
        const auto ps = random_chamber(seed, true, 100, 90);
        const auto sym = gen_chamber_phantom(View::A4C, 100, 90, Spacing{0.5, 0.5}, ps);
        CHECK(mirror_horizontal(sym.mask.labels) == sym.mask.labels);
    }
}

TEST_CASE("sector wedge")
{
    SectorParams s;
    CHECK(count(sector_mask(s, 10, 10)) == 100);
    s.enabled = true;
    s.apex_row = 0;
    s.apex_col = 10;
    s.left_angle = s.right_angle = std::numbers::pi / 4;
    s.radius = 1000;
    const Mask m = sector_mask(s, 21, 21);
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c) CHECK(static_cast<bool>(m(r, c)) == (std::abs(c - 10) <= r));
    CHECK(mirror_horizontal(m) == m);
}

TEST_CASE("synthetic frames follow their quality levels")
{
    std::array<double, kRegionCount> q;
    q.fill(1.0);
    q[static_cast<std::size_t>(RegionId::MidRight)] = 5.0;
    const auto f = gen_synthetic_frame(View::A4C, 128, 128, Spacing{0.5, 0.5}, default_chamber(128, 128), q, 8);
    const auto again =
        gen_synthetic_frame(View::A4C, 128, 128, Spacing{0.5, 0.5}, default_chamber(128, 128), q, 8);
    CHECK(f.bmode.pixels == again.bmode.pixels);
    CHECK(f.coherence.pixels == again.coherence.pixels);
    auto mean_in = [](const GrayImage& img, const Mask& m) {
        double s = 0, n = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) s += img.pixels[i], n += 1;
        return s / n;
    };
    CHECK(mean_in(f.bmode, f.regions[RegionId::MidRight]) > mean_in(f.bmode, f.regions[RegionId::MidLeft]) + 40);
    CHECK(mean_in(f.coherence, f.regions[RegionId::MidRight]) >
          mean_in(f.coherence, f.regions[RegionId::MidLeft]) + 0.3);
    for (double v : f.coherence.pixels.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(static_cast<double>(static_cast<float>(v)) == v);
    }
}
