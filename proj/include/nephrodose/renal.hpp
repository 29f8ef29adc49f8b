#pragma once

#include <optional>
#include <stdexcept>

#include "nephrodose/prescription.hpp"

namespace nephrodose {

struct PatientRenalInput {
    double serum_creatinine = 0.0; // mg/dL
    int age = 0;                   // completed years, >= 18
    Sex sex = Sex::Male;
};

struct InvalidRenalInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Revised 4-variable MDRD estimate, race term omitted:
//   175 * scr^-1.154 * age^-0.203 * (0.742 if female)
// in mL/min/1.73 m^2. Throws InvalidRenalInput for non-positive or
// non-finite creatinine, or age below 18 (adult dosing only).
double mdrd_egfr(const PatientRenalInput& input);

// The line's explicit eGFR when present, otherwise an MDRD estimate from
// serum creatinine and the age at prescription start. nullopt when neither
// path is available (maps to an indeterminate verdict downstream).
std::optional<double> resolve_egfr(const PrescriptionLine& line);

} // namespace nephrodose
