#pragma once

#include <optional>
#include <string>

#include "nephrodose/rulepack.hpp"
#include "nephrodose/util.hpp"

namespace nephrodose {

enum class Sex { Male, Female };

std::string_view sex_token(Sex sex);
std::optional<Sex> parse_sex(std::string_view token);

// What the reference rater (the pharmacist) concluded about a line.
enum class ReferenceVerdict { Accept, Over, Under };

std::string_view reference_verdict_token(ReferenceVerdict verdict);
std::optional<ReferenceVerdict> parse_reference_verdict(std::string_view token);

struct DoseRegimen {
    double amount = 0.0; // per administration, in `unit`
    DoseUnit unit = DoseUnit::Mg;
    int frequency_per_day = 1;

    friend bool operator==(const DoseRegimen&, const DoseRegimen&) = default;
};

// One drug within one medication order, with the patient covariates the
// engine may need. Absent regimen marks a conditional (if-needed) line.
struct PrescriptionLine {
    std::string patient_id;
    std::string encounter_id;
    Date birth_date{};
    Sex sex = Sex::Male;
    std::string department;
    std::string medication_code;
    std::string medication_name;
    std::optional<DoseRegimen> regimen;
    Date start_date{};
    Date end_date{};
    std::optional<double> egfr;
    std::optional<double> serum_creatinine;
    std::optional<double> weight;
    std::optional<double> systolic_bp;
    std::optional<double> plasma_concentration;
    std::optional<ReferenceVerdict> reference_verdict;

    bool is_conditional() const { return !regimen.has_value(); }
    // Inclusive day count: same-day start and end is one day.
    int treatment_duration_days() const { return days_between(start_date, end_date) + 1; }

    friend bool operator==(const PrescriptionLine&, const PrescriptionLine&) = default;
};

} // namespace nephrodose
