#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nephrodose {

enum class DoseUnit { Mg, G, Miu, MgPerKg };

std::string_view dose_unit_token(DoseUnit unit);
std::optional<DoseUnit> parse_dose_unit(std::string_view token);

enum class Covariate {
    WeightKg,
    SystolicBpMmHg,
    PlasmaConcentrationMgPerL,
    TreatmentDurationDays,
};

enum class Comparator { Less, LessEqual, Greater, GreaterEqual };

std::string_view covariate_token(Covariate covariate);
std::optional<Covariate> parse_covariate(std::string_view token);
std::string_view comparator_token(Comparator comparator);
std::optional<Comparator> parse_comparator(std::string_view token);

// Extra condition a band places on a patient covariate. A band's dose
// range only vouches for lines where every guard covariate is known.
struct CovariateGuard {
    Covariate covariate = Covariate::WeightKg;
    Comparator comparator = Comparator::GreaterEqual;
    double threshold = 0.0;

    bool satisfied_by(double value) const;

    friend bool operator==(const CovariateGuard&, const CovariateGuard&) = default;
};

// One eGFR band with its dose constraints: [egfr_low, egfr_high),
// low-inclusive, high-exclusive; egfr_high may be +infinity.
struct EgfrBandRule {
    std::string rule_id;
    double egfr_low = 0.0;
    double egfr_high = std::numeric_limits<double>::infinity();
    std::optional<double> max_daily_dose;
    std::optional<double> min_daily_dose;
    std::optional<int> max_frequency_per_day;
    std::vector<CovariateGuard> guards;
    std::string recommendation;

    bool contains(double egfr) const { return egfr_low <= egfr && egfr < egfr_high; }

    friend bool operator==(const EgfrBandRule&, const EgfrBandRule&) = default;
};

struct MedicationRuleSet {
    std::string medication_code;
    std::string medication_name;
    DoseUnit dose_unit = DoseUnit::Mg;
    std::vector<EgfrBandRule> bands;

    friend bool operator==(const MedicationRuleSet&, const MedicationRuleSet&) = default;
};

struct RulePack {
    std::string name;
    std::string version;
    std::vector<MedicationRuleSet> rulesets;

    const MedicationRuleSet* find_medication(std::string_view code) const;
    std::size_t total_rules() const;

    friend bool operator==(const RulePack&, const RulePack&) = default;
};

enum class DefectKind {
    OverlappingBands,
    CoverageGap,
    InvertedDoseRange,
    DuplicateMedication,
    DuplicateRuleId,
    EmptyBandConstraint,
};

std::string_view defect_kind_name(DefectKind kind);

struct Finding {
    DefectKind kind;
    std::string medication_code;
    std::string rule_id; // empty when the defect is medication-level
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const { return findings.empty(); }
    bool has(DefectKind kind) const;
};

// Structural validation of the whole pack. Findings are data, never
// exceptions: an empty report means every ruleset's bands partition
// [0, inf), dose ranges are coherent and ids are unique.
ValidationReport validate_pack(const RulePack& pack);

// Only reachable when the ruleset failed validation; signals a caller bug.
struct NoBandMatchError : std::logic_error {
    using std::logic_error::logic_error;
};

// The unique band with egfr_low <= egfr < egfr_high. Requires a validated
// ruleset and a finite egfr >= 0.
const EgfrBandRule& find_band(const MedicationRuleSet& ruleset, double egfr);

} // namespace nephrodose
