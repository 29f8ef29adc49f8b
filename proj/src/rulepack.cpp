#include "nephrodose/rulepack.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nephrodose/util.hpp"

namespace nephrodose {

std::string_view dose_unit_token(DoseUnit unit) {
    switch (unit) {
    case DoseUnit::Mg: return "mg";
    case DoseUnit::G: return "g";
    case DoseUnit::Miu: return "MIU";
    case DoseUnit::MgPerKg: return "mg_per_kg";
    }
    return "mg";
}

std::optional<DoseUnit> parse_dose_unit(std::string_view token) {
    if (token == "mg") return DoseUnit::Mg;
    if (token == "g") return DoseUnit::G;
    if (token == "MIU") return DoseUnit::Miu;
    if (token == "mg_per_kg") return DoseUnit::MgPerKg;
    return std::nullopt;
}

std::string_view covariate_token(Covariate covariate) {
    switch (covariate) {
    case Covariate::WeightKg: return "weight_kg";
    case Covariate::SystolicBpMmHg: return "systolic_bp_mmHg";
    case Covariate::PlasmaConcentrationMgPerL: return "plasma_concentration_mg_per_l";
    case Covariate::TreatmentDurationDays: return "treatment_duration_days";
    }
    return "weight_kg";
}

std::optional<Covariate> parse_covariate(std::string_view token) {
    if (token == "weight_kg") return Covariate::WeightKg;
    if (token == "systolic_bp_mmHg") return Covariate::SystolicBpMmHg;
    if (token == "plasma_concentration_mg_per_l") return Covariate::PlasmaConcentrationMgPerL;
    if (token == "treatment_duration_days") return Covariate::TreatmentDurationDays;
    return std::nullopt;
}

std::string_view comparator_token(Comparator comparator) {
    switch (comparator) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    }
    return "<";
}

std::optional<Comparator> parse_comparator(std::string_view token) {
    if (token == "<") return Comparator::Less;
    if (token == "<=") return Comparator::LessEqual;
    if (token == ">") return Comparator::Greater;
    if (token == ">=") return Comparator::GreaterEqual;
    return std::nullopt;
}

bool CovariateGuard::satisfied_by(double value) const {
    switch (comparator) {
    case Comparator::Less: return value < threshold;
    case Comparator::LessEqual: return value <= threshold;
    case Comparator::Greater: return value > threshold;
    case Comparator::GreaterEqual: return value >= threshold;
    }
    return false;
}

const MedicationRuleSet* RulePack::find_medication(std::string_view code) const {
    for (const auto& ruleset : rulesets) {
        if (ruleset.medication_code == code) return &ruleset;
    }
    return nullptr;
}

std::size_t RulePack::total_rules() const {
    std::size_t count = 0;
    for (const auto& ruleset : rulesets) count += ruleset.bands.size();
    return count;
}

std::string_view defect_kind_name(DefectKind kind) {
    switch (kind) {
    case DefectKind::OverlappingBands: return "OverlappingBands";
    case DefectKind::CoverageGap: return "CoverageGap";
    case DefectKind::InvertedDoseRange: return "InvertedDoseRange";
    case DefectKind::DuplicateMedication: return "DuplicateMedication";
    case DefectKind::DuplicateRuleId: return "DuplicateRuleId";
    case DefectKind::EmptyBandConstraint: return "EmptyBandConstraint";
    }
    return "CoverageGap";
}

bool ValidationReport::has(DefectKind kind) const {
    return std::any_of(findings.begin(), findings.end(),
                       [kind](const Finding& f) { return f.kind == kind; });
}

namespace {

std::string interval_text(double low, double high) {
    return "[" + format_number(low) + ", " + format_number(high) + ")";
}

void validate_ruleset(const MedicationRuleSet& ruleset, std::vector<Finding>& findings) {
    const auto& code = ruleset.medication_code;
    auto add = [&](DefectKind kind, const std::string& rule_id, std::string message) {
        findings.push_back({kind, code, rule_id, std::move(message)});
    };

    std::vector<const EgfrBandRule*> usable;
    for (const auto& band : ruleset.bands) {
        if (!band.max_daily_dose && !band.min_daily_dose) {
            add(DefectKind::EmptyBandConstraint, band.rule_id,
                "band " + interval_text(band.egfr_low, band.egfr_high) +
                    " has neither max_daily nor min_daily");
        }
        if (band.max_daily_dose && band.min_daily_dose &&
            *band.min_daily_dose > *band.max_daily_dose) {
            add(DefectKind::InvertedDoseRange, band.rule_id,
                "min_daily " + format_number(*band.min_daily_dose) + " exceeds max_daily " +
                    format_number(*band.max_daily_dose));
        }
        for (const CovariateGuard& guard : band.guards) {
            if (!std::isfinite(guard.threshold) || guard.threshold < 0.0) {
                add(DefectKind::EmptyBandConstraint, band.rule_id,
                    "guard on " + std::string(covariate_token(guard.covariate)) +
                        " has an unusable threshold " + format_number(guard.threshold) +
                        " (must be finite and >= 0)");
            }
        }
        const bool low_ok = std::isfinite(band.egfr_low) && band.egfr_low >= 0.0;
        const bool high_ok = !std::isnan(band.egfr_high);
        if (!low_ok || !high_ok) {
            add(DefectKind::CoverageGap, band.rule_id,
                "band bounds must satisfy 0 <= low < high (got " +
                    interval_text(band.egfr_low, band.egfr_high) + ")");
            continue;
        }
        if (!(band.egfr_low < band.egfr_high)) {
            add(DefectKind::CoverageGap, band.rule_id,
                "band interval " + interval_text(band.egfr_low, band.egfr_high) + " is empty");
            continue;
        }
        usable.push_back(&band);
    }

    std::sort(usable.begin(), usable.end(), [](const EgfrBandRule* a, const EgfrBandRule* b) {
        if (a->egfr_low != b->egfr_low) return a->egfr_low < b->egfr_low;
        return a->egfr_high < b->egfr_high;
    });

    if (usable.empty()) {
        add(DefectKind::CoverageGap, "", "no usable bands; [0, inf) uncovered");
        return;
    }
    if (usable.front()->egfr_low > 0.0) {
        add(DefectKind::CoverageGap, usable.front()->rule_id,
            interval_text(0.0, usable.front()->egfr_low) + " uncovered");
    }
    const EgfrBandRule* reach = usable.front(); // band whose high extends furthest so far
    for (std::size_t i = 1; i < usable.size(); ++i) {
        const EgfrBandRule* band = usable[i];
        if (band->egfr_low < reach->egfr_high) {
            add(DefectKind::OverlappingBands, band->rule_id,
                "band " + interval_text(band->egfr_low, band->egfr_high) + " overlaps " +
                    reach->rule_id + " " + interval_text(reach->egfr_low, reach->egfr_high));
        } else if (band->egfr_low > reach->egfr_high) {
            add(DefectKind::CoverageGap, band->rule_id,
                interval_text(reach->egfr_high, band->egfr_low) + " uncovered");
        }
        if (band->egfr_high > reach->egfr_high) reach = band;
    }
    if (std::isfinite(reach->egfr_high)) {
        add(DefectKind::CoverageGap, reach->rule_id,
            "[" + format_number(reach->egfr_high) + ", inf) uncovered");
    }
}

} // namespace

ValidationReport validate_pack(const RulePack& pack) {
    ValidationReport report;

    std::map<std::string_view, int> medication_uses;
    std::map<std::string_view, std::string_view> rule_id_owner;
    for (const auto& ruleset : pack.rulesets) {
        if (++medication_uses[ruleset.medication_code] == 2) {
            report.findings.push_back({DefectKind::DuplicateMedication, ruleset.medication_code,
                                       "",
                                       "medication " + ruleset.medication_code +
                                           " declared more than once"});
        }
        for (const auto& band : ruleset.bands) {
            auto [it, inserted] = rule_id_owner.emplace(band.rule_id, ruleset.medication_code);
            if (!inserted) {
                report.findings.push_back(
                    {DefectKind::DuplicateRuleId, ruleset.medication_code, band.rule_id,
                     "rule id " + band.rule_id + " already used by medication " +
                         std::string(it->second)});
            }
        }
    }

    for (const auto& ruleset : pack.rulesets) validate_ruleset(ruleset, report.findings);
    return report;
}

const EgfrBandRule& find_band(const MedicationRuleSet& ruleset, double egfr) {
    for (const auto& band : ruleset.bands) {
        if (band.contains(egfr)) return band;
    }
    throw NoBandMatchError("no eGFR band matches " + format_number(egfr) + " for medication " +
                           ruleset.medication_code + " (ruleset not validated?)");
}

} // namespace nephrodose
