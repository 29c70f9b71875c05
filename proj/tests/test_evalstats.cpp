#include <doctest.h>

#include <cmath>

#include "echoq/evalstats.hpp"
#include "oracles.hpp"

using namespace echoq;

namespace {

std::vector<QualityRecord> labels(const std::string& who, const std::vector<double>& scores,
                                  const std::string& frame = "f")
{
    std::vector<QualityRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i)
        out.push_back({frame, "r" + std::to_string(i), Source::annotator(who), scores[i]});
    return out;
}

std::vector<QualityRecord> join(std::initializer_list<std::vector<QualityRecord>> parts)
{
    std::vector<QualityRecord> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<QualityRecord> as_method(std::vector<QualityRecord> r, const std::string& name)
{
    for (auto& x : r) x.source = Source::method(name);
    return r;
}

} // namespace

TEST_CASE("fit_linear examples and oracle")
{
    const std::vector<double> x = {1, 2, 3}, y = {2, 4, 6};
    const auto cal = fit_linear(x, y);
    CHECK(cal.slope == doctest::Approx(2.0));
    CHECK(std::abs(cal.intercept) < 1e-12);
    const std::vector<double> flat = {3, 3, 3};
    const auto c2 = fit_linear(x, flat);
    CHECK(c2.slope == 0.0);
    CHECK(c2.intercept == 3.0);
    CHECK_THROWS_AS(fit_linear(flat, x), InputError);
    CHECK_THROWS_AS(fit_linear(std::vector<double>{1}, std::vector<double>{1}), InputError);

    gen::Engine e(5);
    for (int k = 0; k < 200; ++k) {
        const auto xs = gen::reals(e, 2 + e() % 50, -10, 10);
        const auto ys = gen::reals(e, xs.size(), -3, 7);
        const auto [slope, intercept] = oracle::ols(xs, ys);
        const auto fit = fit_linear(xs, ys);
        CHECK(std::abs(fit.slope - slope) < 1e-9);
        CHECK(std::abs(fit.intercept - intercept) < 1e-9);
    }
}

TEST_CASE("apply_calibration clamps to the score range")
{
    CHECK(apply_calibration({2, 0}, 1.5) == 3.0);
    CHECK(apply_calibration({2, 0}, 3.1) == 5.0);
    CHECK(apply_calibration({1, 0}, 0.3) == 1.0);
    gen::Engine e(6);
    for (double m : gen::reals(e, 500, -100, 100)) {
        const double v = apply_calibration({0.37, -2.0}, m);
        CHECK(v >= 1.0);
        CHECK(v <= 5.0);
    }
}

TEST_CASE("quality categories round halves up")
{
    CHECK(quality_category(2.5) == 3);
    CHECK(quality_category(3.5) == 4);
    CHECK(quality_category(3.49) == 3);
    CHECK(quality_category(0.2) == 1);
    CHECK(quality_category(7.0) == 5);
}

TEST_CASE("spearman examples and oracle")
{
    const std::vector<double> a = {1, 2, 3}, b = {10, 20, 30}, c = {3, 2, 1};
    CHECK(spearman(a, b) == doctest::Approx(1.0));
    CHECK(spearman(a, c) == doctest::Approx(-1.0));
    const std::vector<double> t1 = {1, 2, 2, 4}, t2 = {1, 3, 2, 4};
    CHECK(std::abs(spearman(t1, t2) - oracle::spearman(t1, t2)) < 1e-12);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1}, std::vector<double>{1, 2}), InputError);

    gen::Engine e(7);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 2 + e() % 60;
        const auto x = gen::tied(e, n, 1, 6);
        const auto y = gen::tied(e, n, 0, 9);
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
            std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
            continue;
        const double s = spearman(x, y);
        CHECK(std::abs(s - oracle::spearman(x, y)) < 1e-12);
        // strictly increasing transforms leave it unchanged
        std::vector<double> tx(x), ty(y);
        for (auto& v : tx) v = std::exp(v) + 3.0;
        for (auto& v : ty) v = v * v * v - 40.0;
        CHECK(std::abs(spearman(tx, ty) - s) < 1e-12);
    }
}

TEST_CASE("average ranks")
{
    const std::vector<double> v = {10, 20, 20, 5};
    const auto r = average_ranks(v);
    CHECK(r == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("mae and accuracy")
{
    const std::vector<double> ref = {1, 2, 3}, pred = {1.4, 2.6, 3.0};
    const auto m = mae_accuracy(pred, ref);
    CHECK(m.mae == doctest::Approx(1.0 / 3.0));
    CHECK(m.accuracy == doctest::Approx(2.0 / 3.0));
    const auto same = mae_accuracy(ref, ref);
    CHECK(same.mae == 0.0);
    CHECK(same.accuracy == 1.0);
    const std::vector<double> half = {2.5}, three = {3};
    CHECK(mae_accuracy(half, three).accuracy == 1.0);
    CHECK_THROWS_AS(mae_accuracy(std::vector<double>{}, std::vector<double>{}), InputError);
}

TEST_CASE("inter-observer aggregation")
{
    SUBCASE("identical annotators")
    {
        const std::vector<double> s = {1, 3, 5, 2};
        const auto e = inter_observer(join({labels("a", s), labels("b", s), labels("c", s)}));
        CHECK(e.entries.size() == 12);
        CHECK(e.stats.mae == 0.0);
        CHECK(e.stats.accuracy == 1.0);
    }
    SUBCASE("one region labelled 1, 2, 3")
    {
        const auto e = inter_observer(join({labels("a", {1}), labels("b", {2}), labels("c", {3})}));
        auto errs = e.abs_errors();
        std::sort(errs.begin(), errs.end());
        CHECK(errs == std::vector<double>{1, 1, 2});
        CHECK(e.stats.mae == doctest::Approx(4.0 / 3.0));
        CHECK(e.stats.accuracy == 0.0);
    }
    SUBCASE("incomplete tuples are skipped")
    {
        auto recs = join({labels("a", {1, 2}), labels("b", {2, 2}), labels("c", {3})});
        const auto e = inter_observer(recs);
        CHECK(e.entries.size() == 3);
        for (const auto& x : e.entries) CHECK(x.region_id == "r0");
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(inter_observer(join({labels("a", {1}), labels("b", {2})})), InputError);
        CHECK_THROWS_AS(inter_observer(join({labels("a", {1}), labels("b", {2}), labels("c", {}),
                                             labels("c", {3}, "g")})),
                        InputError);
    }
}

TEST_CASE("inter-observer statistics do not depend on annotator numbering")
{
    gen::Engine e(8);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 3 + e() % 30;
        const auto s1 = gen::tied(e, n, 1, 5), s2 = gen::tied(e, n, 1, 5), s3 = gen::tied(e, n, 1, 5);
        const auto base = inter_observer(join({labels("a", s1), labels("b", s2), labels("c", s3)}));
        const auto perm = inter_observer(join({labels("a", s3), labels("b", s1), labels("c", s2)}));
        CHECK(base.stats.mae == doctest::Approx(perm.stats.mae).epsilon(1e-14));
        CHECK(base.stats.mae_std == doctest::Approx(perm.stats.mae_std).epsilon(1e-14));
        CHECK(base.stats.accuracy == perm.stats.accuracy);
        if (std::isnan(base.stats.spearman))
            CHECK(std::isnan(perm.stats.spearman));
        else
            CHECK(base.stats.spearman == doctest::Approx(perm.stats.spearman).epsilon(1e-12));
    }
}

TEST_CASE("method against observers")
{
    SUBCASE("method equal to annotator a")
    {
        const std::vector<double> a = {1, 2, 4, 5, 3}, b = {2, 2, 3, 5, 1}, c = {1, 4, 4, 2, 3};
        const auto annot = join({labels("a", a), labels("b", b), labels("c", c)});
        const auto m = method_vs_observers(as_method(labels("a", a), "m"), annot);
        const auto inter = inter_observer(annot);
        // e_M = e_ab u e_ac plus one zero per tuple
        std::vector<double> expected;
        for (const auto& x : inter.entries)
            if (x.first_source == "a" || x.second_source == "a") expected.push_back(x.abs_error());
        expected.insert(expected.end(), a.size(), 0.0);
        auto got = m.abs_errors();
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        CHECK(got == expected);
        double sum_a = 0.0;
        for (double v : expected) sum_a += v;
        CHECK(m.stats.mae == doctest::Approx(sum_a / (3.0 * a.size())));
        // restricted to annotator a the method is perfect
        const auto only_a = method_vs_observers(as_method(labels("a", a), "m"), labels("a", a));
        CHECK(only_a.stats.accuracy == 1.0);
    }
    SUBCASE("method is the mean of the annotators")
    {
        const auto annot = join({labels("a", {1}), labels("b", {2}), labels("c", {3})});
        const auto m = method_vs_observers(std::vector<QualityRecord>{{"f", "r0", Source::method("mean"), 2.0}}, annot);
        auto errs = m.abs_errors();
        std::sort(errs.begin(), errs.end());
        CHECK(errs == std::vector<double>{0, 1, 1});
        CHECK(m.stats.accuracy == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("all agree")
    {
        const auto annot = join({labels("a", {2}), labels("b", {2}), labels("c", {2})});
        const auto m = method_vs_observers(std::vector<QualityRecord>{{"f", "r0", Source::method("m"), 2.0}}, annot);
        CHECK(m.stats.mae == 0.0);
        CHECK(m.stats.accuracy == 1.0);
    }
    SUBCASE("no overlap")
    {
        CHECK_THROWS_AS(method_vs_observers(std::vector<QualityRecord>{{"g", "r0", Source::method("m"), 2.0}}, labels("a", {2})),
                        InputError);
    }
}

TEST_CASE("wilcoxon signed rank")
{
    const std::vector<double> a = {1, 2, 3}, z = {1, 2, 3};
    CHECK_THROWS_WITH_AS(wilcoxon_signed_rank(a, z), "no nonzero differences", InputError);

    const std::vector<double> up = {2, 4, 6, 8, 10}, base = {1, 2, 3, 4, 5};
    const auto w = wilcoxon_signed_rank(up, base);
    CHECK(w.statistic == 0.0);
    CHECK(w.exact);
    CHECK(w.p_two_sided == doctest::Approx(2.0 / 32.0).epsilon(1e-15));

    gen::Engine e(10);
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int k = 0; k < 25; ++k) {
            const auto x = gen::tied(e, n, 0, 6);
            const auto y = gen::tied(e, n, 0, 6);
            if (x == y) continue;
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) any |= x[i] != y[i];
            if (!any) continue;
            const auto r = wilcoxon_signed_rank(x, y);
            CHECK(std::abs(r.p_two_sided - oracle::wilcoxon_enumerated(x, y)) < 1e-12);
            CHECK(r.p_two_sided > 0.0);
            CHECK(r.p_two_sided <= 1.0);
            CHECK(r.w_plus + r.w_minus == doctest::Approx(r.n * (r.n + 1) / 2.0));
        }
    }
}

TEST_CASE("wilcoxon normal approximation for large samples")
{
    gen::Engine e(11);
    const auto x = gen::reals(e, 40, 0, 1);
    auto y = gen::reals(e, 40, 0, 1);
    const auto r = wilcoxon_signed_rank(x, y);
    CHECK_FALSE(r.exact);
    CHECK(r.n == 40);
    // Reference: no ties, so z = (W - n(n+1)/4 + 0.5) / sqrt(n(n+1)(2n+1)/24).
    const double mu = 40.0 * 41.0 / 4.0, sigma = std::sqrt(40.0 * 41.0 * 81.0 / 24.0);
    const double z = (r.statistic - mu + 0.5) / sigma;
    CHECK(r.p_two_sided == doctest::Approx(std::min(1.0, 2.0 * oracle::normal_cdf(z))).epsilon(1e-12));
}

TEST_CASE("agreement by quality")
{
    const std::vector<double> zeros = {0, 0, 0}, q = {1.2, 3.0, 4.9};
    for (const auto& c : agreement_by_quality(zeros, q)) {
        if (c.n == 0) continue;
        CHECK(c.mean == 0.0);
        CHECK(c.std == 0.0);
    }
    const std::vector<double> d = {-2, 2, -1, 1}, qq = {2.2, 1.8, 4.0, 3.6};
    const auto cats = agreement_by_quality(d, qq);
    CHECK(cats[1].category == 2);
    CHECK(cats[1].std == 2.0);
    CHECK(cats[3].std == 1.0);
    CHECK(cats[1].std > cats[3].std);
    CHECK(cats[0].n == 0);
    const std::vector<double> one = {1.0}, q35 = {3.5};
    CHECK(agreement_by_quality(one, q35)[3].n == 1);
}
