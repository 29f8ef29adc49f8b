#include "nephrodose/render.hpp"

#include <cstdio>
#include <sstream>

#include "nephrodose/util.hpp"

namespace nephrodose {

namespace {

std::string pct_text(double value) { return format_fixed(value, 2) + "%"; }

std::string rate_text(const std::optional<double>& rate) {
    if (!rate) return "n/a";
    return format_fixed(*rate * 100.0, 2) + "%";
}

Json rate_json(const std::optional<double>& rate) {
    if (!rate) return nullptr;
    return *rate;
}

std::string pad_left(std::string text, std::size_t width) {
    if (text.size() < width) text.insert(0, width - text.size(), ' ');
    return text;
}

std::string pad_right(std::string text, std::size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

} // namespace

std::string render_validation_text(const ValidationReport& report) {
    std::string out = std::to_string(report.findings.size()) + " findings\n";
    for (const Finding& finding : report.findings) {
        out += std::string(defect_kind_name(finding.kind)) + " " + finding.medication_code;
        if (!finding.rule_id.empty()) out += " [" + finding.rule_id + "]";
        out += ": " + finding.message + "\n";
    }
    return out;
}

Json validation_to_json(const ValidationReport& report) {
    Json findings = Json::array();
    for (const Finding& finding : report.findings) {
        findings.push_back({{"kind", std::string(defect_kind_name(finding.kind))},
                            {"medication_code", finding.medication_code},
                            {"rule_id", finding.rule_id},
                            {"message", finding.message}});
    }
    return Json{{"report", "validation"},
                {"finding_count", report.findings.size()},
                {"findings", findings}};
}

std::string render_verdict_text(const Verdict& verdict) {
    std::string out;
    switch (verdict.kind) {
    case VerdictKind::Accept:
        out = "ACCEPT (rule " + verdict.rule_id + ")";
        break;
    case VerdictKind::AlertOverMaxDailyDose:
        out = "ALERT exceeds-max-daily-dose (rule " + verdict.rule_id + "): " +
              verdict.recommendation;
        break;
    case VerdictKind::AlertUnderDose:
        out = "ALERT under-dose (rule " + verdict.rule_id + "): " + verdict.recommendation;
        break;
    case VerdictKind::Indeterminate:
        out = "INDETERMINATE (" +
              std::string(indeterminate_reason_token(*verdict.indeterminate_reason));
        if (!verdict.missing_covariate.empty()) out += ":" + verdict.missing_covariate;
        out += ")";
        break;
    }
    out += "\n";
    return out;
}

Json verdict_to_json(const Verdict& verdict) {
    Json out{{"report", "verdict"}};
    switch (verdict.kind) {
    case VerdictKind::Accept: out["kind"] = "ACCEPT"; break;
    case VerdictKind::AlertOverMaxDailyDose: out["kind"] = "ALERT_OVER_MAX_DAILY_DOSE"; break;
    case VerdictKind::AlertUnderDose: out["kind"] = "ALERT_UNDER_DOSE"; break;
    case VerdictKind::Indeterminate: out["kind"] = "INDETERMINATE"; break;
    }
    out["rule_id"] = verdict.rule_id;
    out["recommendation"] = verdict.recommendation;
    if (verdict.indeterminate_reason) {
        out["indeterminate_reason"] =
            std::string(indeterminate_reason_token(*verdict.indeterminate_reason));
        if (!verdict.missing_covariate.empty()) {
            out["missing_covariate"] = verdict.missing_covariate;
        }
    }
    return out;
}

std::string render_exclusions_text(const ExclusionSummary& summary) {
    std::string out;
    out += "total lines          " + pad_left(std::to_string(summary.total), 8) + "\n";
    out += "conditional excluded " + pad_left(std::to_string(summary.conditional_excluded), 8) +
           "  (" + pct_text(summary.conditional_pct()) + ")\n";
    out += "unanalyzed excluded  " + pad_left(std::to_string(summary.unanalyzed_excluded), 8) +
           "  (" + pct_text(summary.unanalyzed_pct()) + ")\n";
    out += "analyzed             " + pad_left(std::to_string(summary.analyzed), 8) + "  (" +
           pct_text(summary.analyzed_pct()) + ")\n";
    return out;
}

Json exclusions_to_json(const ExclusionSummary& summary) {
    return Json{{"report", "exclusions"},
                {"total", summary.total},
                {"conditional_excluded", summary.conditional_excluded},
                {"conditional_pct", summary.conditional_pct()},
                {"unanalyzed_excluded", summary.unanalyzed_excluded},
                {"unanalyzed_pct", summary.unanalyzed_pct()},
                {"analyzed", summary.analyzed},
                {"analyzed_pct", summary.analyzed_pct()}};
}

std::string render_agreement_text(const ContingencyBuild& build, const KappaResult& kappa) {
    const ContingencyTable& t = build.table;
    std::ostringstream out;
    out << "contingency (engine rows, reference columns)\n";
    out << "                    ref fired   ref not fired      total\n";
    out << "engine fired     " << pad_left(std::to_string(t.both_fired), 12)
        << pad_left(std::to_string(t.engine_only), 16)
        << pad_left(std::to_string(t.both_fired + t.engine_only), 11) << "\n";
    out << "engine not fired " << pad_left(std::to_string(t.reference_only), 12)
        << pad_left(std::to_string(t.neither), 16)
        << pad_left(std::to_string(t.reference_only + t.neither), 11) << "\n";
    out << "total            " << pad_left(std::to_string(t.both_fired + t.reference_only), 12)
        << pad_left(std::to_string(t.engine_only + t.neither), 16)
        << pad_left(std::to_string(t.n()), 11) << "\n";
    if (build.excluded_indeterminate > 0 || build.excluded_without_reference > 0) {
        out << "excluded: " << build.excluded_indeterminate << " indeterminate, "
            << build.excluded_without_reference << " without reference verdict\n";
    }
    out << "observed agreement p_o = " << format_fixed(kappa.observed_agreement, 4) << " ("
        << pct_text(kappa.observed_agreement * 100.0) << ")\n";
    out << "expected agreement p_e = " << format_fixed(kappa.expected_agreement, 4) << "\n";
    out << "kappa = " << format_fixed(kappa.kappa, 3) << " (SE "
        << format_fixed(kappa.standard_error, 4) << ", 95% CI ["
        << format_fixed(kappa.ci95_low, 3) << ", " << format_fixed(kappa.ci95_high, 3) << "])\n";
    return out.str();
}

Json agreement_to_json(const ContingencyBuild& build, const KappaResult& kappa) {
    return Json{{"report", "agreement"},
                {"contingency",
                 {{"both_fired", build.table.both_fired},
                  {"engine_only", build.table.engine_only},
                  {"reference_only", build.table.reference_only},
                  {"neither", build.table.neither},
                  {"n", build.table.n()}}},
                {"excluded",
                 {{"indeterminate", build.excluded_indeterminate},
                  {"without_reference", build.excluded_without_reference}}},
                {"observed_agreement", kappa.observed_agreement},
                {"expected_agreement", kappa.expected_agreement},
                {"kappa", kappa.kappa},
                {"standard_error", kappa.standard_error},
                {"ci95", {kappa.ci95_low, kappa.ci95_high}}};
}

std::string render_diagnostics_text(const DiagnosticMetrics& metrics) {
    std::string out;
    out += "tp " + std::to_string(metrics.tp) + "  fp " + std::to_string(metrics.fp) + "  fn " +
           std::to_string(metrics.fn) + "  tn " + std::to_string(metrics.tn) + "  (n " +
           std::to_string(metrics.n()) + ")\n";
    if (metrics.skipped_without_gold > 0) {
        out += "skipped (indeterminate or no gold label): " +
               std::to_string(metrics.skipped_without_gold) + "\n";
    }
    out += "sensitivity " + rate_text(metrics.sensitivity()) + "\n";
    out += "specificity " + rate_text(metrics.specificity()) + "\n";
    out += "ppv         " + rate_text(metrics.ppv()) + "\n";
    out += "npv         " + rate_text(metrics.npv()) + "\n";
    out += "accuracy    " + rate_text(metrics.accuracy()) + "\n";
    return out;
}

Json diagnostics_to_json(const DiagnosticMetrics& metrics) {
    return Json{{"report", "diagnostics"},
                {"tp", metrics.tp},
                {"fp", metrics.fp},
                {"fn", metrics.fn},
                {"tn", metrics.tn},
                {"n", metrics.n()},
                {"skipped", metrics.skipped_without_gold},
                {"sensitivity", rate_json(metrics.sensitivity())},
                {"specificity", rate_json(metrics.specificity())},
                {"ppv", rate_json(metrics.ppv())},
                {"npv", rate_json(metrics.npv())},
                {"accuracy", rate_json(metrics.accuracy())}};
}

std::string render_discordance_text(const DiscordanceCounts& counts) {
    std::string out;
    out += "A (engine silent, reference fired)    " + pad_left(std::to_string(counts.a), 6) + "\n";
    out += "B (engine over, reference accepted)   " + pad_left(std::to_string(counts.b), 6) + "\n";
    out += "C (engine under, reference accepted)  " + pad_left(std::to_string(counts.c), 6) + "\n";
    out += "other (alert kinds differ)            " + pad_left(std::to_string(counts.other), 6) +
           "\n";
    out += "total discordant                      " + pad_left(std::to_string(counts.total()), 6) +
           "\n";
    return out;
}

Json discordance_to_json(const DiscordanceCounts& counts) {
    return Json{{"report", "discordance"},
                {"a", counts.a},
                {"b", counts.b},
                {"c", counts.c},
                {"other", counts.other},
                {"total", counts.total()}};
}

namespace {

std::string frequency_row_text(const FrequencyRow& row, const std::string& label) {
    std::string out = pad_right(label, 22);
    out += pad_left(std::to_string(row.n_lines), 8);
    out += pad_left(std::to_string(row.engine_over), 8) + " (" +
           pad_left(pct_text(percent(row.engine_over, row.n_lines)), 7) + ")";
    out += pad_left(std::to_string(row.engine_under), 8) + " (" +
           pad_left(pct_text(percent(row.engine_under, row.n_lines)), 7) + ")";
    out += pad_left(std::to_string(row.reference_over), 8) + " (" +
           pad_left(pct_text(percent(row.reference_over, row.n_lines)), 7) + ")";
    out += pad_left(std::to_string(row.reference_under), 8) + " (" +
           pad_left(pct_text(percent(row.reference_under, row.n_lines)), 7) + ")";
    return out + "\n";
}

Json frequency_row_json(const FrequencyRow& row) {
    return Json{{"medication_code", row.medication_code},
                {"n_lines", row.n_lines},
                {"engine_over", row.engine_over},
                {"engine_over_pct", percent(row.engine_over, row.n_lines)},
                {"engine_under", row.engine_under},
                {"engine_under_pct", percent(row.engine_under, row.n_lines)},
                {"reference_over", row.reference_over},
                {"reference_over_pct", percent(row.reference_over, row.n_lines)},
                {"reference_under", row.reference_under},
                {"reference_under_pct", percent(row.reference_under, row.n_lines)}};
}

} // namespace

std::string render_frequency_text(const FrequencyTable& table) {
    std::string out = pad_right("medication", 22) + pad_left("lines", 8) +
                      pad_left("eng over", 18) + pad_left("eng under", 18) +
                      pad_left("ref over", 18) + pad_left("ref under", 18) + "\n";
    for (const FrequencyRow& row : table.rows) {
        out += frequency_row_text(row, row.medication_code);
    }
    out += frequency_row_text(table.totals, "TOTAL");
    const long fired = table.totals.engine_over + table.totals.engine_under;
    out += "engine fired " + std::to_string(fired) + "/" + std::to_string(table.totals.n_lines) +
           " (" + pct_text(percent(fired, table.totals.n_lines)) + ")\n";
    return out;
}

Json frequency_to_json(const FrequencyTable& table) {
    Json rows = Json::array();
    for (const FrequencyRow& row : table.rows) rows.push_back(frequency_row_json(row));
    Json totals = frequency_row_json(table.totals);
    const long fired = table.totals.engine_over + table.totals.engine_under;
    totals["engine_fired"] = fired;
    totals["engine_fired_pct"] = percent(fired, table.totals.n_lines);
    return Json{{"report", "alert_frequency"}, {"rows", rows}, {"totals", totals}};
}

std::string render_rule_impact_text(const RuleImpactReport& report) {
    std::string out = pad_right("rule", 14) + pad_left("alerts", 8) + pad_left("wrong", 8) +
                      "  reasons\n";
    for (const RuleImpactRow& row : report.rows) {
        out += pad_right(row.rule_id, 14) + pad_left(std::to_string(row.alerts_fired), 8) +
               pad_left(std::to_string(row.adjudicated_wrong), 8) + "  ";
        bool first = true;
        for (const auto& [reason, count] : row.reasons) {
            if (!first) out += ", ";
            out += std::string(reason_category_token(reason)) + " x" + std::to_string(count);
            first = false;
        }
        out += "\n";
    }
    out += "rules flagged EGFR_MISCONFIGURED: " + std::to_string(report.egfr_misconfigured_rules) +
           "/" + std::to_string(report.total_rules) + " (" +
           pct_text(report.egfr_misconfigured_pct()) + ")\n";
    return out;
}

Json rule_impact_to_json(const RuleImpactReport& report) {
    Json rows = Json::array();
    for (const RuleImpactRow& row : report.rows) {
        Json reasons = Json::object();
        for (const auto& [reason, count] : row.reasons) {
            reasons[std::string(reason_category_token(reason))] = count;
        }
        rows.push_back({{"rule_id", row.rule_id},
                        {"alerts_fired", row.alerts_fired},
                        {"adjudicated_wrong", row.adjudicated_wrong},
                        {"reasons", reasons}});
    }
    return Json{{"report", "rule_impact"},
                {"rows", rows},
                {"total_rules", report.total_rules},
                {"egfr_misconfigured_rules", report.egfr_misconfigured_rules},
                {"egfr_misconfigured_pct", report.egfr_misconfigured_pct()}};
}

std::string render_severity_text(const SeveritySummary& summary) {
    std::string out;
    out += "none                        " + pad_left(std::to_string(summary.none), 6) + "\n";
    out += "purely preventive           " +
           pad_left(std::to_string(summary.purely_preventive), 6) + "\n";
    out += "serious or life-threatening " +
           pad_left(std::to_string(summary.serious_or_life_threatening), 6) + "\n";
    out += "total                       " + pad_left(std::to_string(summary.total()), 6) + "\n";
    return out;
}

Json severity_to_json(const SeveritySummary& summary) {
    return Json{{"report", "severity"},
                {"none", summary.none},
                {"purely_preventive", summary.purely_preventive},
                {"serious_or_life_threatening", summary.serious_or_life_threatening},
                {"total", summary.total()}};
}

std::string render_correct_analysis_text(const CorrectAnalysisSummary& summary) {
    std::string out;
    out += "paired lines       " + pad_left(std::to_string(summary.n), 8) + "\n";
    out += "concordant         " + pad_left(std::to_string(summary.concordant), 8) + "\n";
    out += "engine correct     " + pad_left(std::to_string(summary.engine_correct), 8) + "  (" +
           pct_text(summary.engine_correct_pct()) + ")\n";
    out += "reference correct  " + pad_left(std::to_string(summary.reference_correct), 8) + "  (" +
           pct_text(summary.reference_correct_pct()) + ")\n";
    return out;
}

Json correct_analysis_to_json(const CorrectAnalysisSummary& summary) {
    return Json{{"report", "correct_analysis"},
                {"n", summary.n},
                {"concordant", summary.concordant},
                {"engine_correct", summary.engine_correct},
                {"engine_correct_pct", summary.engine_correct_pct()},
                {"reference_correct", summary.reference_correct},
                {"reference_correct_pct", summary.reference_correct_pct()}};
}

} // namespace nephrodose
