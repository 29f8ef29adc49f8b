#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nephrodose/engine.hpp"

namespace nephrodose {

// Fired / not-fired cross-tabulation of engine vs reference.
struct ContingencyTable {
    long both_fired = 0;
    long engine_only = 0;
    long reference_only = 0;
    long neither = 0;

    long n() const { return both_fired + engine_only + reference_only + neither; }
};

struct ContingencyBuild {
    ContingencyTable table;
    long excluded_indeterminate = 0;
    long excluded_without_reference = 0;
};

ContingencyBuild contingency(std::span<const VerdictRecord> records);

struct KappaResult {
    double kappa = 0.0;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
    double standard_error = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

struct DegenerateTableError : std::domain_error {
    using std::domain_error::domain_error;
};

// Cohen's kappa with the Fleiss-Cohen-Everitt large-sample variance;
// 95% CI is kappa +/- 1.96 * SE. Throws DegenerateTableError when the
// table is empty or expected agreement is 1.
KappaResult cohen_kappa(const ContingencyTable& table);

struct DiagnosticMetrics {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
    long skipped_without_gold = 0;

    long n() const { return tp + fp + fn + tn; }
    // nullopt marks an undefined rate (zero denominator); it is rendered
    // as "n/a", never fabricated as 0 or 1.
    std::optional<double> sensitivity() const;
    std::optional<double> specificity() const;
    std::optional<double> ppv() const;
    std::optional<double> npv() const;
    std::optional<double> accuracy() const;
};

// Engine verdicts against an adjudicated truth: gold maps record_ref to
// should_fire. Indeterminate records and records without a gold label are
// skipped and counted.
DiagnosticMetrics diagnostic_metrics(std::span<const VerdictRecord> records,
                                     const std::map<std::string, bool>& gold);

enum class DiscordanceType { A, B, C, Other };

std::string_view discordance_type_token(DiscordanceType type);

struct ClassifiedDiscordance {
    const VerdictRecord* record = nullptr;
    DiscordanceType type = DiscordanceType::Other;
};

struct DiscordanceCounts {
    long a = 0;
    long b = 0;
    long c = 0;
    long other = 0;

    long total() const { return a + b + c + other; }
};

// A: engine silent, reference fired. B: engine over-dose alert, reference
// accepted. C: engine under-dose alert, reference accepted. Alerts of
// differing kinds fall into Other. Concordant and indeterminate records
// are not classified.
std::vector<ClassifiedDiscordance> classify_discordances(std::span<const VerdictRecord> records);
DiscordanceCounts count_discordances(std::span<const ClassifiedDiscordance> classified);

struct FrequencyRow {
    std::string medication_code;
    long n_lines = 0;
    long engine_over = 0;
    long engine_under = 0;
    long reference_over = 0;
    long reference_under = 0;
};

struct FrequencyTable {
    std::vector<FrequencyRow> rows; // sorted by medication code
    FrequencyRow totals;            // medication_code empty
};

// Per-medication alert frequencies for both raters; percentages are
// always re-derived from the row's own counts at render time.
FrequencyTable alert_frequency_table(std::span<const VerdictRecord> records);

double percent(long count, long denominator);

enum class AgreesWith { Engine, Reference };

enum class ReasonCategory {
    EgfrMisconfigured,
    MissedOverdose,
    MissedUnderdose,
    WeightNotUsed,
    PlasmaConcNotUsed,
    BloodPressureNotUsed,
    DurationNotUsed,
    DuplicateLinesNotSummed,
    Other,
};

enum class Severity { None, PurelyPreventive, SeriousOrLifeThreatening };

std::string_view agrees_with_token(AgreesWith value);
std::optional<AgreesWith> parse_agrees_with(std::string_view token);
std::string_view reason_category_token(ReasonCategory value);
std::optional<ReasonCategory> parse_reason_category(std::string_view token);
std::string_view severity_token(Severity value);
std::optional<Severity> parse_severity(std::string_view token);

// One senior-reviewer judgment of a discordant line, joined to its record.
struct AdjudicatedCase {
    const VerdictRecord* record = nullptr;
    DiscordanceType discordance_type = DiscordanceType::Other;
    AgreesWith agrees_with = AgreesWith::Engine;
    ReasonCategory reason_category = ReasonCategory::Other;
    Severity severity = Severity::None;
};

struct AdjudicationRow {
    std::string record_ref;
    AgreesWith agrees_with = AgreesWith::Engine;
    ReasonCategory reason_category = ReasonCategory::Other;
    Severity severity = Severity::None;
};

struct JoinedAdjudications {
    std::vector<AdjudicatedCase> cases;
    std::vector<std::string> unmatched_refs;
};

// Joins adjudication rows to records by record_ref and derives each
// case's discordance type from the underlying verdict pair.
JoinedAdjudications join_adjudications(std::span<const VerdictRecord> records,
                                       std::span<const AdjudicationRow> rows);

struct RuleImpactRow {
    std::string rule_id;
    long alerts_fired = 0;
    long adjudicated_wrong = 0;
    std::map<ReasonCategory, long> reasons;
};

struct RuleImpactReport {
    std::vector<RuleImpactRow> rows; // sorted by rule id
    long total_rules = 0;
    long egfr_misconfigured_rules = 0;

    double egfr_misconfigured_pct() const;
};

// Per-rule alert and adjudication aggregate. total_rule_count sets the
// denominator for the misconfigured-rule fraction (the size of the rule
// base); when 0, the number of distinct rule ids seen is used.
RuleImpactReport rule_impact(std::span<const VerdictRecord> records,
                             std::span<const AdjudicatedCase> cases,
                             long total_rule_count = 0);

struct SeveritySummary {
    long none = 0;
    long purely_preventive = 0;
    long serious_or_life_threatening = 0;

    long total() const { return none + purely_preventive + serious_or_life_threatening; }
};

SeveritySummary severity_summary(std::span<const AdjudicatedCase> cases);

struct CorrectAnalysisSummary {
    long n = 0;          // records with both verdicts present
    long concordant = 0; // agreement on fired / not fired
    long engine_correct = 0;
    long reference_correct = 0;

    double engine_correct_pct() const { return percent(engine_correct, n); }
    double reference_correct_pct() const { return percent(reference_correct, n); }
};

// How many lines each rater analyzed correctly, taking concordant lines
// as correct for both and splitting discordant ones by the senior
// reviewer's agrees_with.
CorrectAnalysisSummary correct_analysis(std::span<const VerdictRecord> records,
                                        std::span<const AdjudicatedCase> cases);

} // namespace nephrodose
