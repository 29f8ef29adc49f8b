#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nephrodose/expected.hpp"
#include "nephrodose/prescription.hpp"
#include "nephrodose/rulepack.hpp"

namespace nephrodose {

enum class VerdictKind {
    Accept,
    AlertOverMaxDailyDose,
    AlertUnderDose,
    Indeterminate,
};

enum class IndeterminateReason {
    ConditionalLine,
    MissingEgfr,
    MissingWeight,
    MissingCovariate,
    NoRuleForMedication,
};

std::string_view verdict_kind_token(VerdictKind kind);
std::string_view indeterminate_reason_token(IndeterminateReason reason);
std::optional<IndeterminateReason> parse_indeterminate_reason(std::string_view token);

struct Verdict {
    VerdictKind kind = VerdictKind::Indeterminate;
    std::string rule_id;        // matched band; set for Accept and alerts
    std::string recommendation; // set for alerts
    std::optional<IndeterminateReason> indeterminate_reason;
    std::string missing_covariate; // set with MissingCovariate

    bool fired() const {
        return kind == VerdictKind::AlertOverMaxDailyDose || kind == VerdictKind::AlertUnderDose;
    }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class DoseError { MissingWeight, UnitMismatch };

// Total prescribed dose per day, normalised to the pack's comparison
// units: mg/day for mg, g and mg/kg regimens (weight required for mg/kg),
// MIU/day for MIU regimens. When ruleset_unit is given, regimens of an
// incompatible unit family yield UnitMismatch.
Expected<double, DoseError> daily_dose(const DoseRegimen& regimen,
                                       std::optional<double> weight_kg,
                                       std::optional<DoseUnit> ruleset_unit = std::nullopt);

// True when a regimen in `regimen_unit` can be checked against bounds in
// `ruleset_unit` (MIU does not mix with mass units).
bool units_compatible(DoseUnit regimen_unit, DoseUnit ruleset_unit);

// Raised when a line's regimen unit family contradicts the ruleset's; a
// configuration defect, not a clinical gap.
struct UnitMismatchError : std::logic_error {
    using std::logic_error::logic_error;
};

struct LineEvaluation {
    Verdict verdict;
    std::optional<double> egfr;       // resolved value used for banding
    std::optional<double> daily_dose; // in comparison units per day
};

// Evaluates one line against a validated pack. Clinical gaps (no dose, no
// rules, missing eGFR, weight or guard covariates) come back as
// Indeterminate verdicts; only precondition violations throw.
LineEvaluation evaluate_line_detail(const RulePack& pack, const PrescriptionLine& line);
Verdict evaluate_line(const RulePack& pack, const PrescriptionLine& line);

// Engine output paired with the reference rater's verdict for one line.
struct VerdictRecord {
    std::string patient_id;
    std::string encounter_id;
    std::string medication_code;
    Verdict verdict;
    std::optional<double> egfr;
    std::optional<double> daily_dose;
    std::optional<ReferenceVerdict> reference_verdict;

    friend bool operator==(const VerdictRecord&, const VerdictRecord&) = default;
};

// "patient/encounter/medication" key used to join adjudications and gold
// labels back to records.
std::string record_ref(const VerdictRecord& record);

// Order-preserving evaluation of a whole log slice.
std::vector<VerdictRecord> evaluate_log(const RulePack& pack,
                                        std::span<const PrescriptionLine> lines);

} // namespace nephrodose
