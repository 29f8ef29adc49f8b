#include "nephrodose/renal.hpp"

#include <cmath>

#include "nephrodose/util.hpp"

namespace nephrodose {

std::string_view sex_token(Sex sex) { return sex == Sex::Male ? "male" : "female"; }

std::optional<Sex> parse_sex(std::string_view token) {
    if (token == "male" || token == "m" || token == "M") return Sex::Male;
    if (token == "female" || token == "f" || token == "F") return Sex::Female;
    return std::nullopt;
}

std::string_view reference_verdict_token(ReferenceVerdict verdict) {
    switch (verdict) {
    case ReferenceVerdict::Accept: return "ACCEPT";
    case ReferenceVerdict::Over: return "OVER";
    case ReferenceVerdict::Under: return "UNDER";
    }
    return "ACCEPT";
}

std::optional<ReferenceVerdict> parse_reference_verdict(std::string_view token) {
    if (token == "ACCEPT") return ReferenceVerdict::Accept;
    if (token == "OVER") return ReferenceVerdict::Over;
    if (token == "UNDER") return ReferenceVerdict::Under;
    return std::nullopt;
}

double mdrd_egfr(const PatientRenalInput& input) {
    if (!(input.serum_creatinine > 0.0) || !std::isfinite(input.serum_creatinine)) {
        throw InvalidRenalInput("serum creatinine must be a positive, finite mg/dL value");
    }
    if (input.age < 18) {
        throw InvalidRenalInput("MDRD dosing support covers adults only (age >= 18)");
    }
    double egfr = 175.0 * std::pow(input.serum_creatinine, -1.154) *
                  std::pow(static_cast<double>(input.age), -0.203);
    if (input.sex == Sex::Female) egfr *= 0.742;
    return egfr;
}

std::optional<double> resolve_egfr(const PrescriptionLine& line) {
    if (line.egfr) return *line.egfr;
    if (!line.serum_creatinine) return std::nullopt;
    const int age = age_in_years(line.birth_date, line.start_date);
    if (age < 18 || !(*line.serum_creatinine > 0.0) || !std::isfinite(*line.serum_creatinine)) {
        return std::nullopt;
    }
    return mdrd_egfr({*line.serum_creatinine, age, line.sex});
}

} // namespace nephrodose
