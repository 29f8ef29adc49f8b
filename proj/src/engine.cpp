#include "nephrodose/engine.hpp"

#include "nephrodose/renal.hpp"
#include "nephrodose/util.hpp"

namespace nephrodose {

std::string_view verdict_kind_token(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::Accept: return "ACCEPT";
    case VerdictKind::AlertOverMaxDailyDose: return "ALERT";
    case VerdictKind::AlertUnderDose: return "ALERT";
    case VerdictKind::Indeterminate: return "INDETERMINATE";
    }
    return "INDETERMINATE";
}

std::string_view indeterminate_reason_token(IndeterminateReason reason) {
    switch (reason) {
    case IndeterminateReason::ConditionalLine: return "CONDITIONAL_LINE";
    case IndeterminateReason::MissingEgfr: return "MISSING_EGFR";
    case IndeterminateReason::MissingWeight: return "MISSING_WEIGHT";
    case IndeterminateReason::MissingCovariate: return "MISSING_COVARIATE";
    case IndeterminateReason::NoRuleForMedication: return "NO_RULE_FOR_MEDICATION";
    }
    return "MISSING_EGFR";
}

std::optional<IndeterminateReason> parse_indeterminate_reason(std::string_view token) {
    if (token == "CONDITIONAL_LINE") return IndeterminateReason::ConditionalLine;
    if (token == "MISSING_EGFR") return IndeterminateReason::MissingEgfr;
    if (token == "MISSING_WEIGHT") return IndeterminateReason::MissingWeight;
    if (token == "MISSING_COVARIATE") return IndeterminateReason::MissingCovariate;
    if (token == "NO_RULE_FOR_MEDICATION") return IndeterminateReason::NoRuleForMedication;
    return std::nullopt;
}

namespace {

enum class UnitFamily { Mass, Miu };

UnitFamily unit_family(DoseUnit unit) {
    return unit == DoseUnit::Miu ? UnitFamily::Miu : UnitFamily::Mass;
}

Verdict indeterminate(IndeterminateReason reason, std::string missing_covariate = {}) {
    Verdict verdict;
    verdict.kind = VerdictKind::Indeterminate;
    verdict.indeterminate_reason = reason;
    verdict.missing_covariate = std::move(missing_covariate);
    return verdict;
}

std::optional<double> covariate_value(const PrescriptionLine& line, Covariate covariate) {
    switch (covariate) {
    case Covariate::WeightKg: return line.weight;
    case Covariate::SystolicBpMmHg: return line.systolic_bp;
    case Covariate::PlasmaConcentrationMgPerL: return line.plasma_concentration;
    case Covariate::TreatmentDurationDays:
        return static_cast<double>(line.treatment_duration_days());
    }
    return std::nullopt;
}

// Band bounds are authored in the ruleset's unit; bring them into the
// same per-day units daily_dose produces.
Expected<double, DoseError> bound_in_dose_units(double bound, DoseUnit ruleset_unit,
                                                std::optional<double> weight_kg) {
    switch (ruleset_unit) {
    case DoseUnit::Mg:
    case DoseUnit::Miu: return bound;
    case DoseUnit::G: return bound * 1000.0;
    case DoseUnit::MgPerKg:
        if (!weight_kg) return DoseError::MissingWeight;
        return bound * *weight_kg;
    }
    return bound;
}

} // namespace

bool units_compatible(DoseUnit regimen_unit, DoseUnit ruleset_unit) {
    return unit_family(regimen_unit) == unit_family(ruleset_unit);
}

Expected<double, DoseError> daily_dose(const DoseRegimen& regimen,
                                       std::optional<double> weight_kg,
                                       std::optional<DoseUnit> ruleset_unit) {
    if (ruleset_unit && !units_compatible(regimen.unit, *ruleset_unit)) {
        return DoseError::UnitMismatch;
    }
    const double freq = static_cast<double>(regimen.frequency_per_day);
    switch (regimen.unit) {
    case DoseUnit::Mg: return regimen.amount * freq;
    case DoseUnit::G: return regimen.amount * 1000.0 * freq;
    case DoseUnit::Miu: return regimen.amount * freq;
    case DoseUnit::MgPerKg:
        if (!weight_kg) return DoseError::MissingWeight;
        return regimen.amount * *weight_kg * freq;
    }
    return DoseError::UnitMismatch;
}

LineEvaluation evaluate_line_detail(const RulePack& pack, const PrescriptionLine& line) {
    LineEvaluation result;

    if (line.is_conditional()) {
        result.verdict = indeterminate(IndeterminateReason::ConditionalLine);
        return result;
    }
    const MedicationRuleSet* ruleset = pack.find_medication(line.medication_code);
    if (ruleset == nullptr) {
        result.verdict = indeterminate(IndeterminateReason::NoRuleForMedication);
        return result;
    }
    const std::optional<double> egfr = resolve_egfr(line);
    if (!egfr) {
        result.verdict = indeterminate(IndeterminateReason::MissingEgfr);
        return result;
    }
    result.egfr = egfr;

    const EgfrBandRule& band = find_band(*ruleset, *egfr);
    for (const CovariateGuard& guard : band.guards) {
        if (!covariate_value(line, guard.covariate)) {
            result.verdict = indeterminate(IndeterminateReason::MissingCovariate,
                                           std::string(covariate_token(guard.covariate)));
            return result;
        }
        // A violated guard does not suppress or soften the dose check:
        // guards gate the acceptance context, not the alerting.
    }

    const auto dose = daily_dose(*line.regimen, line.weight, ruleset->dose_unit);
    if (!dose) {
        if (dose.error() == DoseError::MissingWeight) {
            result.verdict = indeterminate(IndeterminateReason::MissingWeight);
            return result;
        }
        throw UnitMismatchError("regimen unit " +
                                std::string(dose_unit_token(line.regimen->unit)) +
                                " cannot be checked against ruleset unit " +
                                std::string(dose_unit_token(ruleset->dose_unit)) +
                                " for medication " + line.medication_code);
    }
    result.daily_dose = *dose;

    std::optional<double> max_bound;
    std::optional<double> min_bound;
    if (band.max_daily_dose) {
        const auto bound = bound_in_dose_units(*band.max_daily_dose, ruleset->dose_unit, line.weight);
        if (!bound) {
            result.verdict = indeterminate(IndeterminateReason::MissingWeight);
            return result;
        }
        max_bound = *bound;
    }
    if (band.min_daily_dose) {
        const auto bound = bound_in_dose_units(*band.min_daily_dose, ruleset->dose_unit, line.weight);
        if (!bound) {
            result.verdict = indeterminate(IndeterminateReason::MissingWeight);
            return result;
        }
        min_bound = *bound;
    }

    Verdict verdict;
    verdict.rule_id = band.rule_id;
    // Strict comparisons: a dose exactly at a bound is compliant.
    if (max_bound && *dose > *max_bound) {
        verdict.kind = VerdictKind::AlertOverMaxDailyDose;
        verdict.recommendation = band.recommendation;
    } else if (band.max_frequency_per_day &&
               line.regimen->frequency_per_day > *band.max_frequency_per_day) {
        verdict.kind = VerdictKind::AlertOverMaxDailyDose;
        verdict.recommendation = "administration frequency " +
                                 std::to_string(line.regimen->frequency_per_day) +
                                 "/day exceeds " + std::to_string(*band.max_frequency_per_day) +
                                 "/day; " + band.recommendation;
    } else if (min_bound && *dose < *min_bound) {
        verdict.kind = VerdictKind::AlertUnderDose;
        verdict.recommendation = band.recommendation;
    } else {
        verdict.kind = VerdictKind::Accept;
    }
    result.verdict = std::move(verdict);
    return result;
}

Verdict evaluate_line(const RulePack& pack, const PrescriptionLine& line) {
    return evaluate_line_detail(pack, line).verdict;
}

std::string record_ref(const VerdictRecord& record) {
    return record.patient_id + "/" + record.encounter_id + "/" + record.medication_code;
}

std::vector<VerdictRecord> evaluate_log(const RulePack& pack,
                                        std::span<const PrescriptionLine> lines) {
    std::vector<VerdictRecord> records;
    records.reserve(lines.size());
    for (const PrescriptionLine& line : lines) {
        LineEvaluation evaluation = evaluate_line_detail(pack, line);
        VerdictRecord record;
        record.patient_id = line.patient_id;
        record.encounter_id = line.encounter_id;
        record.medication_code = line.medication_code;
        record.verdict = std::move(evaluation.verdict);
        record.egfr = evaluation.egfr;
        record.daily_dose = evaluation.daily_dose;
        record.reference_verdict = line.reference_verdict;
        records.push_back(std::move(record));
    }
    return records;
}

} // namespace nephrodose
