// Builds the shipped synthetic study dataset: a prescription log whose
// replay reproduces the reference evaluation statistics exactly, plus the
// matching verdict log, senior-review adjudications and gold labels.
// Deterministic: same inputs, same bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nephrodose/analytics.hpp"
#include "nephrodose/engine.hpp"
#include "nephrodose/log_io.hpp"
#include "nephrodose/rule_dsl.hpp"
#include "nephrodose/util.hpp"

namespace {

using namespace nephrodose;

enum class Role {
    Accept,
    EngineOver,       // reference accepted
    EngineUnder,      // reference accepted
    BothOver,         // engine over, reference over
    BothUnder,        // engine under, reference under
    ReferenceOver,    // engine accepted, reference over
    ReferenceUnder,   // engine accepted, reference under
    Unanalyzed,       // no reference verdict
    Conditional,      // no dose
};

bool engine_fires_over(Role role) { return role == Role::EngineOver || role == Role::BothOver; }
bool engine_fires_under(Role role) { return role == Role::EngineUnder || role == Role::BothUnder; }

struct Stratum {
    const char* code;
    long analyzed;
    long engine_over;
    long engine_under;
    long both_over;
    long ref_only_over;  // engine accepted
    long both_under;
    long ref_only_under; // engine accepted
};

// Per-medication analysis-set composition.
const std::vector<Stratum> kStrata = {
    {"ALLO", 309, 49, 2, 4, 2, 0, 0},
    {"AMIK", 21, 9, 2, 0, 0, 0, 0},
    {"AMOR", 2, 0, 0, 0, 0, 0, 0},
    {"AMOX", 310, 8, 1, 1, 0, 0, 0},
    {"AMCL", 440, 69, 5, 2, 0, 0, 0},
    {"ATEN", 303, 5, 8, 2, 1, 0, 0},
    {"BISO", 508, 0, 0, 0, 0, 0, 0},
    {"CAPT", 25, 0, 7, 0, 0, 0, 0},
    {"CEFO", 355, 2, 10, 1, 0, 1, 0},
    {"CIPR", 99, 2, 2, 0, 0, 0, 0},
    {"ERYT", 3, 0, 0, 0, 0, 0, 0},
    {"ETHA", 35, 7, 1, 0, 0, 0, 0},
    {"FOSF", 1, 0, 0, 0, 0, 0, 0},
    {"GENT", 56, 30, 6, 2, 1, 0, 0},
    {"ISON", 38, 0, 34, 0, 0, 0, 0},
    {"LEVO", 230, 12, 3, 3, 1, 0, 0},
    {"METF", 387, 69, 5, 8, 2, 0, 0},
    {"METR", 99, 3, 0, 1, 0, 0, 0},
    {"NORF", 19, 1, 9, 0, 0, 0, 0},
    {"PARA", 110, 0, 0, 0, 0, 0, 0},
    {"RAMI", 1148, 6, 16, 0, 1, 0, 1},
    {"SUTR", 256, 0, 0, 0, 0, 0, 0},
    {"TRAM", 82, 6, 2, 1, 0, 0, 0},
    {"TOBR", 2, 0, 2, 0, 0, 0, 0},
    {"VALA", 93, 0, 0, 0, 0, 0, 0},
    {"VANC", 62, 5, 23, 0, 1, 1, 0},
    {"ACIC", 13, 0, 0, 0, 0, 0, 0},
};

constexpr long kConditionalTotal = 1148;
constexpr long kUnanalyzedTotal = 2097;
constexpr long kRuleBaseSize = 962;

const std::vector<std::string> kDepartments = {
    "nephrology",      "vascular medicine", "clinical immunology",
    "cardiovascular surgery", "geriatrics", "orthopedics",
    "cardiology",      "hypertension",      "internal medicine",
};

struct ReasonQuota {
    ReasonCategory reason;
    long count;
};

// Reference-right reasons applied, in order, to each medication's
// engine-only over (B) and engine-only under (C) lines; the remainder of
// each queue is adjudicated as engine-right.
const std::map<std::string, std::vector<ReasonQuota>> kOverQuotas = {
    {"GENT", {{ReasonCategory::PlasmaConcNotUsed, 2}, {ReasonCategory::WeightNotUsed, 26}}},
    {"AMIK", {{ReasonCategory::PlasmaConcNotUsed, 1}, {ReasonCategory::WeightNotUsed, 8}}},
    {"VANC", {{ReasonCategory::WeightNotUsed, 5}}},
    {"METF", {{ReasonCategory::WeightNotUsed, 6}}},
    {"ATEN", {{ReasonCategory::BloodPressureNotUsed, 3}}},
    {"RAMI", {{ReasonCategory::BloodPressureNotUsed, 6}}},
};

const std::map<std::string, std::vector<ReasonQuota>> kUnderQuotas = {
    {"VANC", {{ReasonCategory::PlasmaConcNotUsed, 14}, {ReasonCategory::WeightNotUsed, 2}}},
    {"AMIK", {{ReasonCategory::WeightNotUsed, 2}}},
    {"GENT", {{ReasonCategory::WeightNotUsed, 6}}},
    {"TOBR", {{ReasonCategory::WeightNotUsed, 2}}},
    {"ATEN", {{ReasonCategory::BloodPressureNotUsed, 6}}},
    {"ISON", {{ReasonCategory::DuplicateLinesNotSummed, 34}}},
    {"CAPT", {{ReasonCategory::DuplicateLinesNotSummed, 7}}},
    {"NORF", {{ReasonCategory::DuplicateLinesNotSummed, 4}}},
};

// Engine-silent lines the reference flagged (type A): reason queues per
// medication, over-flag and under-flag separately.
const std::map<std::string, std::vector<ReasonCategory>> kSilentOverReasons = {
    {"ALLO", {ReasonCategory::EgfrMisconfigured, ReasonCategory::EgfrMisconfigured}},
    {"ATEN", {ReasonCategory::EgfrMisconfigured}},
    {"GENT", {ReasonCategory::EgfrMisconfigured}},
    {"METF", {ReasonCategory::EgfrMisconfigured, ReasonCategory::DuplicateLinesNotSummed}},
    {"LEVO", {ReasonCategory::DurationNotUsed}},
    {"RAMI", {ReasonCategory::DuplicateLinesNotSummed}},
    {"VANC", {ReasonCategory::DuplicateLinesNotSummed}},
};

struct Plan {
    Role role = Role::Accept;
    const MedicationRuleSet* ruleset = nullptr;
    int forced_band = -1; // -1: pick any eligible band
};

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

class Generator {
public:
    Generator(const RulePack& pack, std::string out_dir)
        : pack_(pack), out_dir_(std::move(out_dir)), rng_(20110301) {}

    int run();

private:
    long pick(long lo, long hi) { // inclusive bounds
        return lo + static_cast<long>(rng_() % static_cast<unsigned long>(hi - lo + 1));
    }
    double pick_real(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng_() % 100000) / 100000.0);
    }

    bool band_eligible(const EgfrBandRule& band, Role role) const;
    const EgfrBandRule& choose_band(const MedicationRuleSet& ruleset, Role role, int forced);
    PrescriptionLine make_line(const Plan& plan);
    std::vector<Plan> build_plans();
    void verify(const std::vector<VerdictRecord>& records);
    void build_adjudications(const std::vector<VerdictRecord>& records);

    const RulePack& pack_;
    std::string out_dir_;
    std::mt19937 rng_;
    long scr_counter_ = 0;
    std::vector<AdjudicationRow> adjudications_;
    std::map<std::string, bool> gold_;
};

bool Generator::band_eligible(const EgfrBandRule& band, Role role) const {
    const bool over = engine_fires_over(role);
    const bool under = engine_fires_under(role);
    if (over) return band.max_daily_dose.has_value();
    if (under) return band.min_daily_dose && *band.min_daily_dose > 0.0;
    // accepting roles need a positive dose inside the range
    return !band.max_daily_dose || *band.max_daily_dose > 0.0;
}

const EgfrBandRule& Generator::choose_band(const MedicationRuleSet& ruleset, Role role,
                                           int forced) {
    if (forced >= 0) return ruleset.bands[static_cast<std::size_t>(forced)];
    std::vector<const EgfrBandRule*> eligible;
    for (const EgfrBandRule& band : ruleset.bands) {
        if (band_eligible(band, role)) eligible.push_back(&band);
    }
    if (eligible.empty()) {
        std::fprintf(stderr, "no eligible band for %s\n", ruleset.medication_code.c_str());
        std::exit(1);
    }
    return *eligible[static_cast<std::size_t>(pick(0, static_cast<long>(eligible.size()) - 1))];
}

PrescriptionLine Generator::make_line(const Plan& plan) {
    const MedicationRuleSet& ruleset = *plan.ruleset;
    PrescriptionLine line;
    line.medication_code = ruleset.medication_code;
    line.medication_name = ruleset.medication_name;
    line.department = kDepartments[static_cast<std::size_t>(pick(0, 8))];
    line.sex = pick(0, 1) == 0 ? Sex::Male : Sex::Female;
    line.birth_date = Date{std::chrono::year{static_cast<int>(1925 + pick(0, 65))},
                           std::chrono::month{static_cast<unsigned>(pick(1, 12))},
                           std::chrono::day{static_cast<unsigned>(pick(1, 28))}};
    const auto start = std::chrono::sys_days{*parse_iso_date("2011-03-01")} +
                       std::chrono::days{pick(0, 213)};
    line.start_date = Date{start};
    line.end_date = Date{start + std::chrono::days{pick(0, 13)}};

    const bool per_kg = ruleset.dose_unit == DoseUnit::MgPerKg;
    if (per_kg || pick(0, 9) < 6) line.weight = round_to(pick_real(45.0, 110.0), 1);
    if (pick(0, 9) < 3) line.systolic_bp = round_to(pick_real(95.0, 185.0), 0);
    if ((ruleset.medication_code == "AMIK" || ruleset.medication_code == "GENT" ||
         ruleset.medication_code == "TOBR" || ruleset.medication_code == "VANC") &&
        pick(0, 9) < 4) {
        line.plasma_concentration = round_to(pick_real(0.5, 9.0), 1);
    }

    switch (plan.role) {
    case Role::BothOver: line.reference_verdict = ReferenceVerdict::Over; break;
    case Role::BothUnder: line.reference_verdict = ReferenceVerdict::Under; break;
    case Role::ReferenceOver: line.reference_verdict = ReferenceVerdict::Over; break;
    case Role::ReferenceUnder: line.reference_verdict = ReferenceVerdict::Under; break;
    case Role::Accept:
    case Role::EngineOver:
    case Role::EngineUnder: line.reference_verdict = ReferenceVerdict::Accept; break;
    case Role::Unanalyzed: break;
    case Role::Conditional:
        // every so often a conditional line still carries a reference
        // verdict; the exclusion order must treat it as conditional
        if (pick(0, 39) == 0) line.reference_verdict = ReferenceVerdict::Accept;
        break;
    }

    if (plan.role == Role::Conditional) {
        if (pick(0, 1) == 0) line.egfr = round_to(pick_real(8.0, 110.0), 1);
        return line;
    }

    // Role for dose purposes: unanalyzed lines reuse the accept/over/under
    // shapes without a reference verdict.
    Role dose_role = plan.role;
    if (plan.role == Role::Unanalyzed) {
        const long r = pick(0, 9);
        dose_role = r < 8 ? Role::Accept : (r == 8 ? Role::EngineOver : Role::EngineUnder);
        const bool any_eligible =
            std::any_of(ruleset.bands.begin(), ruleset.bands.end(),
                        [&](const EgfrBandRule& band) { return band_eligible(band, dose_role); });
        if (!any_eligible) dose_role = Role::Accept;
    }

    const EgfrBandRule& band = choose_band(ruleset, dose_role, plan.forced_band);

    // eGFR inside the band, away from the edges.
    const double low = band.egfr_low;
    const double high = std::isinf(band.egfr_high) ? 120.0 : band.egfr_high;
    double egfr_target;
    const bool via_creatinine = (++scr_counter_ % 11 == 0) && plan.role != Role::Unanalyzed;
    if (via_creatinine) {
        egfr_target = low + (high - low) * pick_real(0.4, 0.6);
    } else {
        egfr_target = round_to(low + (high - low) * pick_real(0.12, 0.88), 1);
        egfr_target = std::min(std::max(egfr_target, low + 1.0), high - 1.0);
        egfr_target = round_to(egfr_target, 1);
    }
    if (via_creatinine) {
        const int age = age_in_years(line.birth_date, line.start_date);
        const double sex_factor = line.sex == Sex::Female ? 0.742 : 1.0;
        const double scr = std::pow(
            175.0 * std::pow(static_cast<double>(age), -0.203) * sex_factor / egfr_target,
            1.0 / 1.154);
        line.serum_creatinine = round_to(scr, 2);
    } else {
        line.egfr = egfr_target;
    }

    // Daily dose target in the ruleset's own unit.
    const bool over = engine_fires_over(dose_role);
    const bool under = engine_fires_under(dose_role);
    double daily = 0.0;
    if (over) {
        const double max = *band.max_daily_dose;
        daily = max > 0.0 ? max * pick_real(1.3, 2.2) : pick_real(400.0, 900.0);
    } else if (under) {
        daily = *band.min_daily_dose * pick_real(0.35, 0.75);
    } else if (band.min_daily_dose && band.max_daily_dose) {
        daily = *band.min_daily_dose +
                (*band.max_daily_dose - *band.min_daily_dose) * pick_real(0.3, 0.7);
    } else if (band.max_daily_dose) {
        daily = *band.max_daily_dose * pick_real(0.3, 0.7);
    } else {
        daily = *band.min_daily_dose * pick_real(1.2, 2.0);
    }

    int freq = static_cast<int>(pick(1, 3));
    if (!over && band.max_frequency_per_day) freq = std::min(freq, *band.max_frequency_per_day);

    DoseRegimen regimen;
    regimen.frequency_per_day = freq;
    const bool weight_known = line.weight.has_value();
    switch (ruleset.dose_unit) {
    case DoseUnit::Mg:
        regimen.unit = DoseUnit::Mg;
        regimen.amount = round_to(daily / freq, 3);
        break;
    case DoseUnit::G:
        if (pick(0, 3) == 0) {
            regimen.unit = DoseUnit::Mg;
            regimen.amount = round_to(daily * 1000.0 / freq, 1);
        } else {
            regimen.unit = DoseUnit::G;
            regimen.amount = round_to(daily / freq, 3);
        }
        break;
    case DoseUnit::Miu:
        regimen.unit = DoseUnit::Miu;
        regimen.amount = round_to(daily / freq, 3);
        break;
    case DoseUnit::MgPerKg:
        if (weight_known && pick(0, 4) == 0) {
            regimen.unit = DoseUnit::Mg;
            regimen.amount = round_to(daily * *line.weight / freq, 1);
        } else {
            regimen.unit = DoseUnit::MgPerKg;
            regimen.amount = round_to(daily / freq, 3);
        }
        break;
    }
    if (regimen.amount <= 0.0) regimen.amount = 0.001;
    line.regimen = regimen;
    return line;
}

std::vector<Plan> Generator::build_plans() {
    std::vector<Plan> plans;
    long total_analyzed = 0;
    for (const Stratum& stratum : kStrata) total_analyzed += stratum.analyzed;

    // Largest-remainder apportionment of the conditional and unanalyzed
    // strata across medications.
    auto apportion = [&](long total) {
        std::vector<long> share(kStrata.size(), 0);
        std::vector<std::pair<double, std::size_t>> remainders;
        long assigned = 0;
        for (std::size_t i = 0; i < kStrata.size(); ++i) {
            const double exact = static_cast<double>(total) *
                                 static_cast<double>(kStrata[i].analyzed) /
                                 static_cast<double>(total_analyzed);
            share[i] = static_cast<long>(exact);
            assigned += share[i];
            remainders.push_back({exact - static_cast<double>(share[i]), i});
        }
        std::sort(remainders.begin(), remainders.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (long k = 0; k < total - assigned; ++k) ++share[remainders[static_cast<std::size_t>(k)].second];
        return share;
    };
    const std::vector<long> conditional_share = apportion(kConditionalTotal);
    const std::vector<long> unanalyzed_share = apportion(kUnanalyzedTotal);

    for (std::size_t i = 0; i < kStrata.size(); ++i) {
        const Stratum& stratum = kStrata[i];
        const MedicationRuleSet* ruleset = pack_.find_medication(stratum.code);
        if (ruleset == nullptr) {
            std::fprintf(stderr, "medication %s missing from pack\n", stratum.code);
            std::exit(1);
        }
        auto push = [&](Role role, long count, int forced = -1) {
            for (long k = 0; k < count; ++k) plans.push_back({role, ruleset, forced});
        };

        push(Role::BothOver, stratum.both_over);
        push(Role::EngineOver, stratum.engine_over - stratum.both_over);
        push(Role::BothUnder, stratum.both_under);
        push(Role::EngineUnder, stratum.engine_under - stratum.both_under);
        if (std::string_view(stratum.code) == "ALLO") {
            // engine-silent lines flagged for a misconfigured rule must sit
            // on two distinct bands
            push(Role::ReferenceOver, 1, 1);
            push(Role::ReferenceOver, 1, 2);
        } else {
            push(Role::ReferenceOver, stratum.ref_only_over);
        }
        push(Role::ReferenceUnder, stratum.ref_only_under);
        const long accepts = stratum.analyzed - stratum.engine_over - stratum.engine_under -
                             stratum.ref_only_over - stratum.ref_only_under;
        push(Role::Accept, accepts);
        push(Role::Unanalyzed, unanalyzed_share[i]);
        push(Role::Conditional, conditional_share[i]);
    }

    std::shuffle(plans.begin(), plans.end(), rng_);
    return plans;
}

void Generator::verify(const std::vector<VerdictRecord>& records) {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) {
            std::fprintf(stderr, "verification failed: %s\n", what.c_str());
            std::exit(1);
        }
    };

    const ContingencyBuild build = contingency(records);
    check(build.excluded_indeterminate == 0, "indeterminate records in analysis set");
    check(build.table.both_fired == 27, "both_fired == 27, got " +
                                            std::to_string(build.table.both_fired));
    check(build.table.engine_only == 394, "engine_only == 394, got " +
                                              std::to_string(build.table.engine_only));
    check(build.table.reference_only == 10, "reference_only == 10, got " +
                                                std::to_string(build.table.reference_only));
    check(build.table.neither == 4575, "neither == 4575, got " +
                                           std::to_string(build.table.neither));

    const FrequencyTable freq = alert_frequency_table(records);
    check(freq.totals.engine_over == 283, "total engine over == 283");
    check(freq.totals.engine_under == 138, "total engine under == 138");
    check(freq.totals.reference_over == 34, "total reference over == 34");
    check(freq.totals.reference_under == 3, "total reference under == 3");
    for (const Stratum& stratum : kStrata) {
        const auto row = std::find_if(freq.rows.begin(), freq.rows.end(), [&](const auto& r) {
            return r.medication_code == stratum.code;
        });
        check(row != freq.rows.end(), std::string("row for ") + stratum.code);
        check(row->n_lines == stratum.analyzed,
              std::string(stratum.code) + " lines == " + std::to_string(stratum.analyzed) +
                  ", got " + std::to_string(row->n_lines));
        check(row->engine_over == stratum.engine_over,
              std::string(stratum.code) + " engine over, got " +
                  std::to_string(row->engine_over));
        check(row->engine_under == stratum.engine_under,
              std::string(stratum.code) + " engine under, got " +
                  std::to_string(row->engine_under));
    }

    const auto classified = classify_discordances(records);
    const DiscordanceCounts counts = count_discordances(classified);
    check(counts.a == 10 && counts.b == 258 && counts.c == 136 && counts.other == 0,
          "discordance counts (10, 258, 136, 0), got " + std::to_string(counts.a) + "/" +
              std::to_string(counts.b) + "/" + std::to_string(counts.c) + "/" +
              std::to_string(counts.other));
}

void Generator::build_adjudications(const std::vector<VerdictRecord>& records) {
    std::map<std::string, std::vector<ReasonQuota>> over_quotas(kOverQuotas);
    std::map<std::string, std::vector<ReasonQuota>> under_quotas(kUnderQuotas);
    std::map<std::string, std::vector<ReasonCategory>> silent_over(kSilentOverReasons);

    auto take_quota = [](std::map<std::string, std::vector<ReasonQuota>>& quotas,
                         const std::string& code) -> std::optional<ReasonCategory> {
        auto it = quotas.find(code);
        if (it == quotas.end()) return std::nullopt;
        for (ReasonQuota& quota : it->second) {
            if (quota.count > 0) {
                --quota.count;
                return quota.reason;
            }
        }
        return std::nullopt;
    };

    long index = 0;
    const auto classified = classify_discordances(records);
    for (const ClassifiedDiscordance& item : classified) {
        const VerdictRecord& record = *item.record;
        AdjudicationRow row;
        row.record_ref = record_ref(record);
        switch (item.type) {
        case DiscordanceType::B: {
            const auto reason = take_quota(over_quotas, record.medication_code);
            if (reason) {
                row.agrees_with = AgreesWith::Reference;
                row.reason_category = *reason;
            } else {
                row.agrees_with = AgreesWith::Engine;
                row.reason_category = ReasonCategory::MissedOverdose;
            }
            break;
        }
        case DiscordanceType::C: {
            const auto reason = take_quota(under_quotas, record.medication_code);
            if (reason) {
                row.agrees_with = AgreesWith::Reference;
                row.reason_category = *reason;
            } else {
                row.agrees_with = AgreesWith::Engine;
                row.reason_category = ReasonCategory::MissedUnderdose;
            }
            break;
        }
        case DiscordanceType::A: {
            if (record.reference_verdict == ReferenceVerdict::Under) {
                // the reference rater's lone false positive
                row.agrees_with = AgreesWith::Engine;
                row.reason_category = ReasonCategory::Other;
            } else {
                auto& queue = silent_over[record.medication_code];
                if (queue.empty()) {
                    std::fprintf(stderr, "no silent-over reason left for %s\n",
                                 record.medication_code.c_str());
                    std::exit(1);
                }
                row.agrees_with = AgreesWith::Reference;
                row.reason_category = queue.front();
                queue.erase(queue.begin());
            }
            break;
        }
        case DiscordanceType::Other:
            row.agrees_with = AgreesWith::Engine;
            row.reason_category = ReasonCategory::Other;
            break;
        }
        row.severity = (index++ % 2 == 0) ? Severity::PurelyPreventive : Severity::None;
        adjudications_.push_back(std::move(row));
    }

    // Gold labels: concordant lines are taken as correctly rated by both;
    // discordant ones follow the senior review.
    std::map<std::string, AgreesWith> agrees_by_ref;
    for (const AdjudicationRow& row : adjudications_) {
        agrees_by_ref.emplace(row.record_ref, row.agrees_with);
    }
    for (const VerdictRecord& record : records) {
        const bool engine_fired = record.verdict.fired();
        const bool reference_fired = record.reference_verdict &&
                                     *record.reference_verdict != ReferenceVerdict::Accept;
        const auto it = agrees_by_ref.find(record_ref(record));
        bool should_fire = engine_fired;
        if (it != agrees_by_ref.end()) {
            should_fire = it->second == AgreesWith::Engine ? engine_fired : reference_fired;
        }
        gold_[record_ref(record)] = should_fire;
    }
}

int Generator::run() {
    std::vector<Plan> plans = build_plans();

    std::vector<PrescriptionLine> lines;
    lines.reserve(plans.size());
    for (const Plan& plan : plans) lines.push_back(make_line(plan));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "P%05zu", i + 1);
        lines[i].patient_id = buffer;
        std::snprintf(buffer, sizeof(buffer), "E%05zu", i + 1);
        lines[i].encounter_id = buffer;
    }

    const std::string log_text = prescription_log_to_string(lines);

    // Everything downstream is derived from the file content itself.
    const LogParseResult parsed = parse_prescription_log(log_text);
    if (!parsed.row_errors.empty()) {
        std::fprintf(stderr, "generated log has %zu bad rows (first: row %d: %s)\n",
                     parsed.row_errors.size(), parsed.row_errors[0].row_number,
                     parsed.row_errors[0].message.c_str());
        return 1;
    }
    const ExclusionResult exclusions = apply_exclusions(parsed.lines);
    if (exclusions.summary.total != 8251 ||
        exclusions.summary.conditional_excluded != kConditionalTotal ||
        exclusions.summary.unanalyzed_excluded != kUnanalyzedTotal ||
        exclusions.summary.analyzed != 5006) {
        std::fprintf(stderr, "exclusion summary off: %ld/%ld/%ld/%ld\n",
                     exclusions.summary.total, exclusions.summary.conditional_excluded,
                     exclusions.summary.unanalyzed_excluded, exclusions.summary.analyzed);
        return 1;
    }

    const std::vector<VerdictRecord> records = evaluate_log(pack_, exclusions.analysis_set);

    // Pair each analyzed record back with its plan and flag role drift.
    {
        std::size_t record_index = 0;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            const Plan& plan = plans[i];
            if (plan.role == Role::Conditional || plan.role == Role::Unanalyzed) continue;
            const VerdictRecord& record = records[record_index++];
            const VerdictKind kind = record.verdict.kind;
            const bool want_over = engine_fires_over(plan.role);
            const bool want_under = engine_fires_under(plan.role);
            const bool ok = want_over ? kind == VerdictKind::AlertOverMaxDailyDose
                            : want_under ? kind == VerdictKind::AlertUnderDose
                                         : kind == VerdictKind::Accept;
            if (!ok) {
                std::fprintf(stderr,
                             "role drift: line %zu med %s role %d got verdict %d (egfr %s dose %s)\n",
                             i, record.medication_code.c_str(), static_cast<int>(plan.role),
                             static_cast<int>(kind),
                             record.egfr ? format_number(*record.egfr).c_str() : "-",
                             record.daily_dose ? format_number(*record.daily_dose).c_str() : "-");
            }
        }
    }
    verify(records);
    build_adjudications(records);

    // Cross-check the derived artifacts before writing anything.
    const JoinedAdjudications joined = join_adjudications(records, adjudications_);
    if (!joined.unmatched_refs.empty()) {
        std::fprintf(stderr, "unmatched adjudication refs\n");
        return 1;
    }
    const DiagnosticMetrics metrics = diagnostic_metrics(records, gold_);
    if (metrics.tp != 287 || metrics.fp != 134 || metrics.fn != 9 || metrics.tn != 4576) {
        std::fprintf(stderr, "diagnostics off: tp %ld fp %ld fn %ld tn %ld\n", metrics.tp,
                     metrics.fp, metrics.fn, metrics.tn);
        return 1;
    }
    const CorrectAnalysisSummary correct = correct_analysis(records, joined.cases);
    if (correct.n != 5006 || correct.concordant != 4602 || correct.engine_correct != 4863 ||
        correct.reference_correct != 4745) {
        std::fprintf(stderr, "correct-analysis off: %ld/%ld/%ld/%ld\n", correct.n,
                     correct.concordant, correct.engine_correct, correct.reference_correct);
        return 1;
    }
    const RuleImpactReport impact = rule_impact(records, joined.cases, kRuleBaseSize);
    if (impact.egfr_misconfigured_rules != 5) {
        std::fprintf(stderr, "expected 5 misconfigured rules, got %ld\n",
                     impact.egfr_misconfigured_rules);
        return 1;
    }
    const SeveritySummary severity = severity_summary(joined.cases);
    if (severity.serious_or_life_threatening != 0 || severity.total() != 404) {
        std::fprintf(stderr, "severity summary off\n");
        return 1;
    }

    write_text_file(out_dir_ + "/synthetic_hegp_log.csv", log_text);
    write_text_file(out_dir_ + "/synthetic_verdict_log.csv", verdict_log_to_string(records));
    {
        std::ostringstream out;
        write_adjudications(adjudications_, out);
        write_text_file(out_dir_ + "/adjudications.csv", out.str());
    }
    {
        std::ostringstream out;
        write_gold_labels(gold_, out);
        write_text_file(out_dir_ + "/gold_labels.csv", out.str());
    }

    std::cout << "wrote " << lines.size() << " prescription lines, " << records.size()
              << " verdict records, " << adjudications_.size() << " adjudications, "
              << gold_.size() << " gold labels to " << out_dir_ << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <rules-file> <output-dir>\n", argv[0]);
        return 1;
    }
    try {
        const RulePack pack = parse_rule_pack(read_text_file(argv[1]));
        const ValidationReport report = validate_pack(pack);
        if (!report.ok()) {
            std::fprintf(stderr, "rule pack has %zu validation findings\n",
                         report.findings.size());
            return 1;
        }
        Generator generator(pack, argv[2]);
        return generator.run();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
