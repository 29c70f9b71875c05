#include "echoq/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "echoq/error.hpp"

namespace echoq {

namespace {

void check_paired(std::span<const double> a, std::span<const double> b, std::size_t min_n)
{
    if (a.size() != b.size()) throw InputError("paired inputs differ in length");
    if (a.size() < min_n) throw InputError("degenerate input: too few samples");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw InputError("non-finite sample");
}

double mean_of(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double spearman_or_nan(std::span<const double> x, std::span<const double> y)
{
    try {
        return spearman(x, y);
    } catch (const InputError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

using TupleKey = std::pair<std::string, std::string>;

} // namespace

void validate(const QualityRecord& r)
{
    if (!std::isfinite(r.score)) throw InputError("non-finite quality score");
    if (r.source.kind == Source::Kind::Annotator) {
        if (r.score < 1.0 || r.score > 5.0 || r.score != std::floor(r.score))
            throw InputError("annotator score must be an integer 1..5");
    }
}

LinearCalibration fit_linear(std::span<const double> metric, std::span<const double> labels)
{
    check_paired(metric, labels, 2);
    const double mx = mean_of(metric), my = mean_of(labels);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < metric.size(); ++i) {
        sxx += (metric[i] - mx) * (metric[i] - mx);
        sxy += (metric[i] - mx) * (labels[i] - my);
    }
    if (sxx == 0.0) throw InputError("degenerate input: metric values are all identical");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double apply_calibration(const LinearCalibration& cal, double metric)
{
    return std::clamp(cal.slope * metric + cal.intercept, 1.0, 5.0);
}

int quality_category(double score)
{
    return static_cast<int>(std::floor(std::clamp(score, 1.0, 5.0) + 0.5));
}

std::vector<double> average_ranks(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    check_paired(x, y, 2);
    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw InputError("correlation of constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y)
{
    check_paired(x, y, 2);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

MaeAccuracy mae_accuracy(std::span<const double> pred, std::span<const double> ref)
{
    check_paired(pred, ref, 1);
    MaeAccuracy out;
    out.n = pred.size();
    std::vector<double> err(pred.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        err[i] = std::abs(pred[i] - ref[i]);
        hits += quality_category(pred[i]) == static_cast<int>(std::lround(ref[i]));
    }
    out.mae = mean_of(err);
    double ss = 0.0;
    for (double e : err) ss += (e - out.mae) * (e - out.mae);
    out.mae_std = std::sqrt(ss / static_cast<double>(err.size()));
    out.accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
    return out;
}

std::vector<double> ErrorMultiset::abs_errors() const
{
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.abs_error());
    return out;
}

std::vector<double> ErrorMultiset::signed_errors() const
{
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.signed_error());
    return out;
}

ErrorMultiset inter_observer(std::span<const QualityRecord> records)
{
    std::set<std::string> names;
    std::map<TupleKey, std::map<std::string, double>> table;
    for (const auto& r : records) {
        if (r.source.kind != Source::Kind::Annotator)
            throw InputError("inter-observer statistics take annotator records only");
        validate(r);
        names.insert(r.source.name);
        auto [it, fresh] = table[{r.frame_id, r.region_id}].emplace(r.source.name, r.score);
        if (!fresh) throw InputError("duplicate annotation for " + r.frame_id + "/" + r.region_id);
    }
    if (names.size() != 3) throw InputError("inter-observer statistics need exactly three annotators");
    const std::vector<std::string> who(names.begin(), names.end());
    constexpr std::array<std::pair<int, int>, 3> pairs = {{{0, 1}, {1, 2}, {0, 2}}};

    ErrorMultiset out;
    for (const auto& [key, scores] : table) {
        if (scores.size() != 3) continue;
        for (auto [i, j] : pairs)
            out.entries.push_back({key.first, key.second, who[i], who[j], scores.at(who[i]),
                                   scores.at(who[j])});
    }
    if (out.entries.empty()) throw InputError("no region is labelled by all three annotators");

    std::vector<double> x, y, err;
    std::size_t hits = 0;
    for (const auto& e : out.entries) {
        x.push_back(e.first);
        y.push_back(e.second);
        x.push_back(e.second);
        y.push_back(e.first);
        err.push_back(e.abs_error());
        hits += e.first == e.second;
    }
    out.stats.spearman = spearman_or_nan(x, y);
    out.stats.n = out.entries.size();
    out.stats.mae = mean_of(err);
    double ss = 0.0;
    for (double v : err) ss += (v - out.stats.mae) * (v - out.stats.mae);
    out.stats.mae_std = std::sqrt(ss / static_cast<double>(err.size()));
    out.stats.accuracy = static_cast<double>(hits) / static_cast<double>(err.size());
    return out;
}

ErrorMultiset method_vs_observers(std::span<const QualityRecord> method,
                                  std::span<const QualityRecord> annotators)
{
    std::map<TupleKey, const QualityRecord*> scores;
    for (const auto& r : method) {
        validate(r);
        if (!scores.emplace(TupleKey{r.frame_id, r.region_id}, &r).second)
            throw InputError("duplicate method score for " + r.frame_id + "/" + r.region_id);
    }
    // Sorted by (frame, region, annotator) so the pooled order is input-order independent.
    std::vector<const QualityRecord*> refs;
    for (const auto& r : annotators) {
        if (r.source.kind != Source::Kind::Annotator)
            throw InputError("reference records must come from annotators");
        validate(r);
        refs.push_back(&r);
    }
    std::sort(refs.begin(), refs.end(), [](const QualityRecord* a, const QualityRecord* b) {
        return std::tie(a->frame_id, a->region_id, a->source.name) <
               std::tie(b->frame_id, b->region_id, b->source.name);
    });

    ErrorMultiset out;
    std::vector<double> ref, pred;
    for (const QualityRecord* a : refs) {
        auto it = scores.find({a->frame_id, a->region_id});
        if (it == scores.end()) continue;
        const QualityRecord& m = *it->second;
        out.entries.push_back({a->frame_id, a->region_id, a->source.name, m.source.name, a->score, m.score});
        ref.push_back(a->score);
        pred.push_back(m.score);
    }
    if (out.entries.empty()) throw InputError("method and annotations do not overlap");

    const auto ma = mae_accuracy(pred, ref);
    out.stats.spearman = spearman_or_nan(ref, pred);
    out.stats.mae = ma.mae;
    out.stats.mae_std = ma.mae_std;
    out.stats.accuracy = ma.accuracy;
    out.stats.n = ma.n;
    return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b)
{
    check_paired(a, b, 1);
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    if (d.empty()) throw InputError("no nonzero differences");

    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    const auto ranks = average_ranks(mag);

    WilcoxonResult out;
    out.n = d.size();
    // Average ranks are multiples of 1/2, so doubled ranks are exact integers.
    std::vector<long long> doubled(d.size());
    long long w_plus2 = 0, total2 = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        doubled[i] = std::llround(2.0 * ranks[i]);
        total2 += doubled[i];
        if (d[i] > 0) w_plus2 += doubled[i];
    }
    const long long w_minus2 = total2 - w_plus2;
    const long long stat2 = std::min(w_plus2, w_minus2);
    out.w_plus = static_cast<double>(w_plus2) / 2.0;
    out.w_minus = static_cast<double>(w_minus2) / 2.0;
    out.statistic = static_cast<double>(stat2) / 2.0;

    const std::size_t n = d.size();
    if (n <= 20) {
        // Null distribution of doubled W+ by subset-sum counting.
        std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
        ways[0] = 1.0;
        long long reach = 0;
        for (long long r : doubled) {
            for (long long s = reach; s >= 0; --s)
                if (ways[static_cast<std::size_t>(s)] != 0.0)
                    ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
            reach += r;
        }
        double tail = 0.0;
        for (long long s = 0; s <= stat2; ++s) tail += ways[static_cast<std::size_t>(s)];
        out.p_two_sided = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
        out.exact = true;
        return out;
    }

    std::map<long long, std::size_t> ties;
    for (long long r : doubled) ++ties[r];
    double tie_term = 0.0;
    for (auto [r, t] : ties) {
        (void)r;
        const double tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (!(var > 0.0)) throw InputError("degenerate rank variance");
    const double z = std::min(0.0, (out.statistic - mu + 0.5) / std::sqrt(var));
    out.p_two_sided = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
    return out;
}

std::array<CategoryAgreement, 5> agreement_by_quality(std::span<const double> diffs,
                                                      std::span<const double> quality)
{
    check_paired(diffs, quality, 0);
    std::array<std::vector<double>, 5> groups;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        groups[static_cast<std::size_t>(quality_category(quality[i]) - 1)].push_back(diffs[i]);

    std::array<CategoryAgreement, 5> out;
    for (std::size_t k = 0; k < 5; ++k) {
        out[k].category = static_cast<int>(k) + 1;
        out[k].n = groups[k].size();
        if (groups[k].empty()) continue;
        out[k].mean = mean_of(groups[k]);
        double ss = 0.0;
        for (double v : groups[k]) ss += (v - out[k].mean) * (v - out[k].mean);
        out[k].std = std::sqrt(ss / static_cast<double>(groups[k].size()));
    }
    return out;
}

} // namespace echoq
