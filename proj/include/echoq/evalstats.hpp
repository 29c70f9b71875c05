#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace echoq {

/// Who produced a score: one of the human annotators or an automatic method.
struct Source {
    enum class Kind { Annotator, Method };
    Kind kind = Kind::Annotator;
    std::string name;

    static Source annotator(std::string name) { return {Kind::Annotator, std::move(name)}; }
    static Source method(std::string name) { return {Kind::Method, std::move(name)}; }
    bool operator==(const Source&) const = default;
};

/// One quality score for one region of one frame. Annotator scores are the
/// integers 1..5 of the label scale (1 not visible, 2 poor, 3 ok, 4 good,
/// 5 excellent); method scores are real.
struct QualityRecord {
    std::string frame_id;
    std::string region_id;
    Source source;
    double score = 0.0;
};

void validate(const QualityRecord& record);

struct LinearCalibration {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares labels ~ slope * metric + intercept.
LinearCalibration fit_linear(std::span<const double> metric, std::span<const double> labels);

/// slope * metric + intercept, clamped to the score range [1, 5].
double apply_calibration(const LinearCalibration& cal, double metric);

/// Nearest quality category with halves rounded up, after clamping to [1, 5].
int quality_category(double score);

/// 1-based ranks; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct MaeAccuracy {
    double mae = 0.0;
    double mae_std = 0.0; ///< population std of the absolute errors
    double accuracy = 0.0;
    std::size_t n = 0;
};

/// Accuracy counts quality_category(pred) == ref.
MaeAccuracy mae_accuracy(std::span<const double> pred, std::span<const double> ref);

/// One pooled pairwise comparison. `first` is the reference annotator's score,
/// `second` the other annotator's or the method's.
struct ErrorEntry {
    std::string frame_id;
    std::string region_id;
    std::string first_source;
    std::string second_source;
    double first = 0.0;
    double second = 0.0;

    double signed_error() const { return second - first; }
    double abs_error() const { return second > first ? second - first : first - second; }
};

struct AgreementStats {
    double spearman = 0.0; ///< NaN when a pooled list is constant
    double mae = 0.0;
    double mae_std = 0.0;
    double accuracy = 0.0;
    std::size_t n = 0;
};

struct ErrorMultiset {
    std::vector<ErrorEntry> entries;
    AgreementStats stats;

    std::vector<double> abs_errors() const;
    std::vector<double> signed_errors() const;
};

/// e_12 u e_23 u e_13 over (frame, region) tuples labelled by all three
/// annotators. Records must come from exactly three annotators. Spearman is
/// computed on the pooled pairs taken in both orientations, which keeps it
/// independent of annotator numbering.
ErrorMultiset inter_observer(std::span<const QualityRecord> records);

/// e_1M u e_2M u e_3M: the method against each annotator on every tuple both cover.
ErrorMultiset method_vs_observers(std::span<const QualityRecord> method,
                                  std::span<const QualityRecord> annotators);

struct WilcoxonResult {
    double statistic = 0.0; ///< min(W+, W-)
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_two_sided = 1.0;
    std::size_t n = 0; ///< nonzero differences
    bool exact = false;
};

/// Signed-rank test on a - b. Zero differences are dropped, tied |d| share
/// average ranks. Exact null distribution for n <= 20, otherwise the normal
/// approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct CategoryAgreement {
    int category = 0;
    std::size_t n = 0;
    double mean = 0.0; ///< bias
    double std = 0.0;  ///< population std
};

/// Groups measurement differences by quality_category(quality).
std::array<CategoryAgreement, 5> agreement_by_quality(std::span<const double> diffs,
                                                      std::span<const double> quality);

} // namespace echoq
