#include "nephrodose/analytics.hpp"

#include <algorithm>
#include <cmath>

namespace nephrodose {

namespace {

bool reference_fired(ReferenceVerdict verdict) { return verdict != ReferenceVerdict::Accept; }

// Engine verdict collapsed onto the three-way scale used by the
// reference rater; nullopt for indeterminate verdicts.
std::optional<ReferenceVerdict> engine_as_reference(const Verdict& verdict) {
    switch (verdict.kind) {
    case VerdictKind::Accept: return ReferenceVerdict::Accept;
    case VerdictKind::AlertOverMaxDailyDose: return ReferenceVerdict::Over;
    case VerdictKind::AlertUnderDose: return ReferenceVerdict::Under;
    case VerdictKind::Indeterminate: return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

ContingencyBuild contingency(std::span<const VerdictRecord> records) {
    ContingencyBuild build;
    for (const VerdictRecord& record : records) {
        if (record.verdict.kind == VerdictKind::Indeterminate) {
            ++build.excluded_indeterminate;
            continue;
        }
        if (!record.reference_verdict) {
            ++build.excluded_without_reference;
            continue;
        }
        const bool engine = record.verdict.fired();
        const bool reference = reference_fired(*record.reference_verdict);
        if (engine && reference) ++build.table.both_fired;
        else if (engine) ++build.table.engine_only;
        else if (reference) ++build.table.reference_only;
        else ++build.table.neither;
    }
    return build;
}

KappaResult cohen_kappa(const ContingencyTable& table) {
    const double n = static_cast<double>(table.n());
    if (n <= 0.0) throw DegenerateTableError("contingency table is empty");

    const double p11 = table.both_fired / n;
    const double p12 = table.engine_only / n;
    const double p21 = table.reference_only / n;
    const double p22 = table.neither / n;
    const double r1 = p11 + p12; // engine fired
    const double r2 = p21 + p22;
    const double c1 = p11 + p21; // reference fired
    const double c2 = p12 + p22;

    const double po = p11 + p22;
    const double pe = r1 * c1 + r2 * c2;
    if (1.0 - pe <= 0.0) {
        throw DegenerateTableError("expected agreement is 1; kappa undefined");
    }

    KappaResult result;
    result.observed_agreement = po;
    result.expected_agreement = pe;
    result.kappa = (po - pe) / (1.0 - pe);

    // Large-sample variance of the kappa estimate (Fleiss, Cohen &
    // Everitt): diagonal, off-diagonal and centering terms over
    // n * (1 - pe)^4. Off-diagonal cells pair the column marginal of
    // their row category with the row marginal of their column category.
    const auto sq = [](double x) { return x * x; };
    const double a_term = p11 * sq((1.0 - pe) - (r1 + c1) * (1.0 - po)) +
                          p22 * sq((1.0 - pe) - (r2 + c2) * (1.0 - po));
    const double b_term = sq(1.0 - po) * (p12 * sq(c1 + r2) + p21 * sq(c2 + r1));
    const double c_term = sq(po * pe - 2.0 * pe + po);
    const double variance = (a_term + b_term - c_term) / (n * sq(sq(1.0 - pe)));
    result.standard_error = variance > 0.0 ? std::sqrt(variance) : 0.0;
    result.ci95_low = result.kappa - 1.96 * result.standard_error;
    result.ci95_high = result.kappa + 1.96 * result.standard_error;
    return result;
}

std::optional<double> DiagnosticMetrics::sensitivity() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> DiagnosticMetrics::specificity() const {
    if (tn + fp == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

std::optional<double> DiagnosticMetrics::ppv() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> DiagnosticMetrics::npv() const {
    if (tn + fn == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fn);
}

std::optional<double> DiagnosticMetrics::accuracy() const {
    if (n() == 0) return std::nullopt;
    return static_cast<double>(tp + tn) / static_cast<double>(n());
}

DiagnosticMetrics diagnostic_metrics(std::span<const VerdictRecord> records,
                                     const std::map<std::string, bool>& gold) {
    DiagnosticMetrics metrics;
    for (const VerdictRecord& record : records) {
        if (record.verdict.kind == VerdictKind::Indeterminate) {
            ++metrics.skipped_without_gold;
            continue;
        }
        const auto it = gold.find(record_ref(record));
        if (it == gold.end()) {
            ++metrics.skipped_without_gold;
            continue;
        }
        const bool fired = record.verdict.fired();
        const bool should_fire = it->second;
        if (fired && should_fire) ++metrics.tp;
        else if (fired && !should_fire) ++metrics.fp;
        else if (!fired && should_fire) ++metrics.fn;
        else ++metrics.tn;
    }
    return metrics;
}

std::string_view discordance_type_token(DiscordanceType type) {
    switch (type) {
    case DiscordanceType::A: return "A";
    case DiscordanceType::B: return "B";
    case DiscordanceType::C: return "C";
    case DiscordanceType::Other: return "Other";
    }
    return "Other";
}

namespace {

std::optional<DiscordanceType> classify_record(const VerdictRecord& record) {
    const auto engine = engine_as_reference(record.verdict);
    if (!engine || !record.reference_verdict) return std::nullopt;
    const ReferenceVerdict reference = *record.reference_verdict;
    if (*engine == reference) return std::nullopt;
    if (*engine == ReferenceVerdict::Accept) return DiscordanceType::A;
    if (*engine == ReferenceVerdict::Over && reference == ReferenceVerdict::Accept) {
        return DiscordanceType::B;
    }
    if (*engine == ReferenceVerdict::Under && reference == ReferenceVerdict::Accept) {
        return DiscordanceType::C;
    }
    // Both fired but with different kinds; outside the A/B/C scheme.
    return DiscordanceType::Other;
}

} // namespace

std::vector<ClassifiedDiscordance> classify_discordances(std::span<const VerdictRecord> records) {
    std::vector<ClassifiedDiscordance> classified;
    for (const VerdictRecord& record : records) {
        if (const auto type = classify_record(record)) classified.push_back({&record, *type});
    }
    return classified;
}

DiscordanceCounts count_discordances(std::span<const ClassifiedDiscordance> classified) {
    DiscordanceCounts counts;
    for (const ClassifiedDiscordance& item : classified) {
        switch (item.type) {
        case DiscordanceType::A: ++counts.a; break;
        case DiscordanceType::B: ++counts.b; break;
        case DiscordanceType::C: ++counts.c; break;
        case DiscordanceType::Other: ++counts.other; break;
        }
    }
    return counts;
}

double percent(long count, long denominator) {
    if (denominator == 0) return 0.0;
    return 100.0 * static_cast<double>(count) / static_cast<double>(denominator);
}

FrequencyTable alert_frequency_table(std::span<const VerdictRecord> records) {
    std::map<std::string, FrequencyRow> by_medication;
    FrequencyTable table;
    for (const VerdictRecord& record : records) {
        FrequencyRow& row = by_medication[record.medication_code];
        row.medication_code = record.medication_code;
        ++row.n_lines;
        ++table.totals.n_lines;
        if (record.verdict.kind == VerdictKind::AlertOverMaxDailyDose) {
            ++row.engine_over;
            ++table.totals.engine_over;
        } else if (record.verdict.kind == VerdictKind::AlertUnderDose) {
            ++row.engine_under;
            ++table.totals.engine_under;
        }
        if (record.reference_verdict == ReferenceVerdict::Over) {
            ++row.reference_over;
            ++table.totals.reference_over;
        } else if (record.reference_verdict == ReferenceVerdict::Under) {
            ++row.reference_under;
            ++table.totals.reference_under;
        }
    }
    table.rows.reserve(by_medication.size());
    for (auto& [code, row] : by_medication) table.rows.push_back(std::move(row));
    return table;
}

std::string_view agrees_with_token(AgreesWith value) {
    return value == AgreesWith::Engine ? "ENGINE" : "REFERENCE";
}

std::optional<AgreesWith> parse_agrees_with(std::string_view token) {
    if (token == "ENGINE") return AgreesWith::Engine;
    if (token == "REFERENCE") return AgreesWith::Reference;
    return std::nullopt;
}

std::string_view reason_category_token(ReasonCategory value) {
    switch (value) {
    case ReasonCategory::EgfrMisconfigured: return "EGFR_MISCONFIGURED";
    case ReasonCategory::MissedOverdose: return "MISSED_OVERDOSE";
    case ReasonCategory::MissedUnderdose: return "MISSED_UNDERDOSE";
    case ReasonCategory::WeightNotUsed: return "WEIGHT_NOT_USED";
    case ReasonCategory::PlasmaConcNotUsed: return "PLASMA_CONC_NOT_USED";
    case ReasonCategory::BloodPressureNotUsed: return "BLOOD_PRESSURE_NOT_USED";
    case ReasonCategory::DurationNotUsed: return "DURATION_NOT_USED";
    case ReasonCategory::DuplicateLinesNotSummed: return "DUPLICATE_LINES_NOT_SUMMED";
    case ReasonCategory::Other: return "OTHER";
    }
    return "OTHER";
}

std::optional<ReasonCategory> parse_reason_category(std::string_view token) {
    if (token == "EGFR_MISCONFIGURED") return ReasonCategory::EgfrMisconfigured;
    if (token == "MISSED_OVERDOSE") return ReasonCategory::MissedOverdose;
    if (token == "MISSED_UNDERDOSE") return ReasonCategory::MissedUnderdose;
    if (token == "WEIGHT_NOT_USED") return ReasonCategory::WeightNotUsed;
    if (token == "PLASMA_CONC_NOT_USED") return ReasonCategory::PlasmaConcNotUsed;
    if (token == "BLOOD_PRESSURE_NOT_USED") return ReasonCategory::BloodPressureNotUsed;
    if (token == "DURATION_NOT_USED") return ReasonCategory::DurationNotUsed;
    if (token == "DUPLICATE_LINES_NOT_SUMMED") return ReasonCategory::DuplicateLinesNotSummed;
    if (token == "OTHER") return ReasonCategory::Other;
    return std::nullopt;
}

std::string_view severity_token(Severity value) {
    switch (value) {
    case Severity::None: return "NONE";
    case Severity::PurelyPreventive: return "PURELY_PREVENTIVE";
    case Severity::SeriousOrLifeThreatening: return "SERIOUS_OR_LIFE_THREATENING";
    }
    return "NONE";
}

std::optional<Severity> parse_severity(std::string_view token) {
    if (token == "NONE") return Severity::None;
    if (token == "PURELY_PREVENTIVE") return Severity::PurelyPreventive;
    if (token == "SERIOUS_OR_LIFE_THREATENING") return Severity::SeriousOrLifeThreatening;
    return std::nullopt;
}

JoinedAdjudications join_adjudications(std::span<const VerdictRecord> records,
                                       std::span<const AdjudicationRow> rows) {
    std::map<std::string, const VerdictRecord*> by_ref;
    for (const VerdictRecord& record : records) by_ref.emplace(record_ref(record), &record);

    JoinedAdjudications joined;
    for (const AdjudicationRow& row : rows) {
        const auto it = by_ref.find(row.record_ref);
        if (it == by_ref.end()) {
            joined.unmatched_refs.push_back(row.record_ref);
            continue;
        }
        AdjudicatedCase item;
        item.record = it->second;
        item.agrees_with = row.agrees_with;
        item.reason_category = row.reason_category;
        item.severity = row.severity;
        item.discordance_type = classify_record(*it->second).value_or(DiscordanceType::Other);
        joined.cases.push_back(item);
    }
    return joined;
}

RuleImpactReport rule_impact(std::span<const VerdictRecord> records,
                             std::span<const AdjudicatedCase> cases, long total_rule_count) {
    std::map<std::string, RuleImpactRow> by_rule;
    std::map<std::string, bool> seen_rules; // any rule id observed on a record
    for (const VerdictRecord& record : records) {
        if (!record.verdict.rule_id.empty()) seen_rules.emplace(record.verdict.rule_id, true);
        if (!record.verdict.fired()) continue;
        RuleImpactRow& row = by_rule[record.verdict.rule_id];
        row.rule_id = record.verdict.rule_id;
        ++row.alerts_fired;
    }

    std::map<std::string, bool> misconfigured;
    for (const AdjudicatedCase& item : cases) {
        if (item.record == nullptr || item.record->verdict.rule_id.empty()) continue;
        const std::string& rule_id = item.record->verdict.rule_id;
        seen_rules.emplace(rule_id, true);
        RuleImpactRow& row = by_rule[rule_id];
        row.rule_id = rule_id;
        if (item.agrees_with == AgreesWith::Reference) {
            ++row.adjudicated_wrong;
            ++row.reasons[item.reason_category];
        }
        if (item.reason_category == ReasonCategory::EgfrMisconfigured) {
            misconfigured.emplace(rule_id, true);
        }
    }

    RuleImpactReport report;
    report.rows.reserve(by_rule.size());
    for (auto& [rule_id, row] : by_rule) report.rows.push_back(std::move(row));
    report.total_rules =
        total_rule_count > 0 ? total_rule_count : static_cast<long>(seen_rules.size());
    report.egfr_misconfigured_rules = static_cast<long>(misconfigured.size());
    return report;
}

double RuleImpactReport::egfr_misconfigured_pct() const {
    return percent(egfr_misconfigured_rules, total_rules);
}

SeveritySummary severity_summary(std::span<const AdjudicatedCase> cases) {
    SeveritySummary summary;
    for (const AdjudicatedCase& item : cases) {
        switch (item.severity) {
        case Severity::None: ++summary.none; break;
        case Severity::PurelyPreventive: ++summary.purely_preventive; break;
        case Severity::SeriousOrLifeThreatening: ++summary.serious_or_life_threatening; break;
        }
    }
    return summary;
}

CorrectAnalysisSummary correct_analysis(std::span<const VerdictRecord> records,
                                        std::span<const AdjudicatedCase> cases) {
    CorrectAnalysisSummary summary;
    for (const VerdictRecord& record : records) {
        if (record.verdict.kind == VerdictKind::Indeterminate || !record.reference_verdict) {
            continue;
        }
        ++summary.n;
        if (record.verdict.fired() == reference_fired(*record.reference_verdict)) {
            ++summary.concordant;
        }
    }
    summary.engine_correct = summary.concordant;
    summary.reference_correct = summary.concordant;
    for (const AdjudicatedCase& item : cases) {
        if (item.agrees_with == AgreesWith::Engine) ++summary.engine_correct;
        else ++summary.reference_correct;
    }
    return summary;
}

} // namespace nephrodose
