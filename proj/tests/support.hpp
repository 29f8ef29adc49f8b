#pragma once

// Shared generators for the property suites: random-but-valid rule packs
// and helpers for driving the engine with synthetic lines.

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nephrodose/prescription.hpp"
#include "nephrodose/rulepack.hpp"
#include "nephrodose/util.hpp"

namespace testsupport {

using nephrodose::CovariateGuard;
using nephrodose::Date;
using nephrodose::DoseRegimen;
using nephrodose::DoseUnit;
using nephrodose::EgfrBandRule;
using nephrodose::MedicationRuleSet;
using nephrodose::PrescriptionLine;
using nephrodose::RulePack;

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline long uniform_int(std::mt19937& rng, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

inline std::string random_identifier(std::mt19937& rng, std::size_t length) {
    static const char chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-.";
    std::string out;
    out.push_back(static_cast<char>('A' + uniform_int(rng, 0, 25)));
    for (std::size_t i = 1; i < length; ++i) {
        out.push_back(chars[static_cast<std::size_t>(uniform_int(rng, 0, sizeof(chars) - 2))]);
    }
    return out;
}

inline std::string random_text(std::mt19937& rng, std::size_t length) {
    static const char chars[] =
        "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,;:!?()/\\\"'-";
    std::string out;
    for (std::size_t i = 0; i < length; ++i) {
        out.push_back(chars[static_cast<std::size_t>(uniform_int(rng, 0, sizeof(chars) - 2))]);
    }
    return out;
}

inline double round_decimals(double value, int decimals) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    return std::round(value * scale) / scale;
}

// A medication whose bands partition [0, inf): ascending cut points with a
// final open band. Dose bounds are coherent (min <= max, at least one set).
inline MedicationRuleSet random_ruleset(std::mt19937& rng, int index) {
    MedicationRuleSet ruleset;
    ruleset.medication_code = "MED" + std::to_string(index) + "_" + random_identifier(rng, 4);
    ruleset.medication_name = random_text(rng, static_cast<std::size_t>(uniform_int(rng, 3, 24)));
    const std::array<DoseUnit, 4> units = {DoseUnit::Mg, DoseUnit::G, DoseUnit::Miu,
                                           DoseUnit::MgPerKg};
    ruleset.dose_unit = units[static_cast<std::size_t>(uniform_int(rng, 0, 3))];

    const int band_count = static_cast<int>(uniform_int(rng, 1, 6));
    std::vector<double> cuts;
    double cursor = 0.0;
    for (int i = 0; i + 1 < band_count; ++i) {
        cursor += round_decimals(uniform(rng, 1.0, 40.0), 1);
        cuts.push_back(cursor);
    }
    double low = 0.0;
    for (int i = 0; i < band_count; ++i) {
        EgfrBandRule band;
        band.rule_id = ruleset.medication_code + "-" + std::to_string(i + 1);
        band.egfr_low = low;
        band.egfr_high = i + 1 < band_count ? cuts[static_cast<std::size_t>(i)]
                                            : std::numeric_limits<double>::infinity();
        low = band.egfr_high;

        const double max_dose = round_decimals(uniform(rng, 10.0, 5000.0), 1);
        const long shape = uniform_int(rng, 0, 3);
        if (shape != 0) band.max_daily_dose = max_dose;
        if (shape != 1) band.min_daily_dose = round_decimals(max_dose * uniform(rng, 0.05, 0.9), 2);
        if (uniform_int(rng, 0, 2) == 0) {
            band.max_frequency_per_day = static_cast<int>(uniform_int(rng, 1, 6));
        }
        const long guard_count = uniform_int(rng, 0, 2);
        for (long g = 0; g < guard_count; ++g) {
            CovariateGuard guard;
            const std::array<nephrodose::Covariate, 4> covariates = {
                nephrodose::Covariate::WeightKg, nephrodose::Covariate::SystolicBpMmHg,
                nephrodose::Covariate::PlasmaConcentrationMgPerL,
                nephrodose::Covariate::TreatmentDurationDays};
            const std::array<nephrodose::Comparator, 4> comparators = {
                nephrodose::Comparator::Less, nephrodose::Comparator::LessEqual,
                nephrodose::Comparator::Greater, nephrodose::Comparator::GreaterEqual};
            guard.covariate = covariates[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
            guard.comparator = comparators[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
            guard.threshold = round_decimals(uniform(rng, 0.0, 300.0), 2);
            band.guards.push_back(guard);
        }
        band.recommendation = random_text(rng, static_cast<std::size_t>(uniform_int(rng, 0, 60)));
        ruleset.bands.push_back(std::move(band));
    }
    return ruleset;
}

inline RulePack random_pack(std::mt19937& rng) {
    RulePack pack;
    pack.name = random_identifier(rng, 8);
    pack.version = std::to_string(uniform_int(rng, 0, 9)) + "." +
                   std::to_string(uniform_int(rng, 0, 20));
    const int med_count = static_cast<int>(uniform_int(rng, 1, 4));
    for (int i = 0; i < med_count; ++i) pack.rulesets.push_back(random_ruleset(rng, i));
    return pack;
}

inline Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
}

// A line with an explicit eGFR and a plain mg regimen; enough for most
// engine tests.
inline PrescriptionLine basic_line(const std::string& medication, double egfr, double amount,
                                   int freq, DoseUnit unit = DoseUnit::Mg) {
    PrescriptionLine line;
    line.patient_id = "P1";
    line.encounter_id = "E1";
    line.medication_code = medication;
    line.medication_name = medication;
    line.department = "nephrology";
    line.sex = nephrodose::Sex::Male;
    line.birth_date = make_date(1950, 1, 1);
    line.start_date = make_date(2011, 3, 1);
    line.end_date = make_date(2011, 3, 5);
    line.egfr = egfr;
    line.regimen = DoseRegimen{amount, unit, freq};
    return line;
}

} // namespace testsupport
