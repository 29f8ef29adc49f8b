// Acceptance suite: reproduces the reference evaluation statistics from
// the shipped dataset and runs the property suites. Prints one PASS/FAIL
// line per criterion; exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nephrodose/analytics.hpp"
#include "nephrodose/engine.hpp"
#include "nephrodose/log_io.hpp"
#include "nephrodose/renal.hpp"
#include "nephrodose/rule_dsl.hpp"

#include "support.hpp"

using namespace nephrodose;

namespace {

struct Checker {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void expect_near(double actual, double expected, double tolerance, const std::string& what) {
        if (!(std::abs(actual - expected) <= tolerance)) {
            failures.push_back(what + ": expected " + std::to_string(expected) + " +/- " +
                               std::to_string(tolerance) + ", got " + std::to_string(actual));
        }
    }
    void expect_eq(long actual, long expected, const std::string& what) {
        if (actual != expected) {
            failures.push_back(what + ": expected " + std::to_string(expected) + ", got " +
                               std::to_string(actual));
        }
    }
};

class Runner {
public:
    void criterion(int number, const std::string& name,
                   const std::function<void(Checker&)>& body) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        try {
            body(checker);
        } catch (const std::exception& e) {
            checker.failures.push_back(std::string("exception: ") + e.what());
        }
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        if (checker.failures.empty()) {
            std::printf("criterion %d (%s): PASS [%lld ms]\n", number, name.c_str(),
                        static_cast<long long>(elapsed));
        } else {
            all_passed_ = false;
            std::printf("criterion %d (%s): FAIL [%lld ms]\n", number, name.c_str(),
                        static_cast<long long>(elapsed));
            for (const std::string& failure : checker.failures) {
                std::printf("    %s\n", failure.c_str());
            }
        }
    }

    int finish() const {
        std::printf(all_passed_ ? "acceptance: all criteria passed\n"
                                : "acceptance: FAILURES present\n");
        return all_passed_ ? 0 : 1;
    }

private:
    bool all_passed_ = true;
};

struct StudyData {
    RulePack pack;
    ExclusionResult exclusions;
    std::vector<VerdictRecord> records;
    std::vector<AdjudicatedCase> cases;
    std::map<std::string, bool> gold;
};

StudyData load_study(const std::string& data_dir) {
    StudyData data;
    data.pack = parse_rule_pack(read_text_file(data_dir + "/sample_hegp.rules"));
    if (!validate_pack(data.pack).ok()) throw std::runtime_error("shipped pack has findings");

    const LogParseResult log = parse_prescription_log_file(data_dir + "/synthetic_hegp_log.csv");
    if (!log.row_errors.empty()) throw std::runtime_error("shipped log has malformed rows");
    data.exclusions = apply_exclusions(log.lines);
    data.records = evaluate_log(data.pack, data.exclusions.analysis_set);

    const AdjudicationParseResult adjudications =
        parse_adjudications_file(data_dir + "/adjudications.csv");
    if (!adjudications.row_errors.empty()) {
        throw std::runtime_error("shipped adjudications have malformed rows");
    }
    JoinedAdjudications joined = join_adjudications(data.records, adjudications.rows);
    if (!joined.unmatched_refs.empty()) {
        throw std::runtime_error("adjudication rows with no matching record");
    }
    data.cases = std::move(joined.cases);

    const GoldParseResult gold = parse_gold_labels_file(data_dir + "/gold_labels.csv");
    if (!gold.row_errors.empty()) throw std::runtime_error("gold labels have malformed rows");
    data.gold = gold.labels;
    return data;
}

} // namespace

int main(int argc, char** argv) {
    const std::string data_dir = argc > 1 ? argv[1] : NEPHRODOSE_DATA_DIR;
    Runner runner;

    StudyData data;
    try {
        data = load_study(data_dir);
    } catch (const std::exception& e) {
        std::printf("acceptance: cannot load study data: %s\n", e.what());
        return 1;
    }

    runner.criterion(1, "kappa reproduction", [&](Checker& check) {
        const ContingencyBuild build = contingency(data.records);
        check.expect_eq(build.table.both_fired, 27, "both fired");
        check.expect_eq(build.table.engine_only, 394, "engine only");
        check.expect_eq(build.table.reference_only, 10, "reference only");
        check.expect_eq(build.table.neither, 4575, "neither");

        const KappaResult kappa = cohen_kappa(build.table);
        check.expect_near(kappa.kappa, 0.106, 0.001, "kappa");
        check.expect_near(kappa.ci95_low, 0.068, 0.002, "ci95 low");
        check.expect_near(kappa.ci95_high, 0.144, 0.002, "ci95 high");
        check.expect_near(kappa.observed_agreement * 100.0, 91.93, 0.01,
                          "observed agreement percent");
        check.expect_eq(static_cast<long>(std::lround(kappa.observed_agreement * 5006.0)), 4602,
                        "concordant lines");
    });

    runner.criterion(2, "diagnostic metrics reproduction", [&](Checker& check) {
        const DiagnosticMetrics metrics = diagnostic_metrics(data.records, data.gold);
        check.expect_eq(metrics.tp, 287, "tp");
        check.expect_eq(metrics.fp, 134, "fp");
        check.expect_eq(metrics.fn, 9, "fn");
        check.expect_eq(metrics.tn, 4576, "tn");
        check.expect(metrics.sensitivity().has_value(), "sensitivity defined");
        check.expect_near(*metrics.sensitivity() * 100.0, 96.96, 0.01, "sensitivity percent");
        check.expect_near(*metrics.specificity() * 100.0, 97.15, 0.01, "specificity percent");
        check.expect_near(*metrics.ppv() * 100.0, 68.17, 0.01, "ppv percent");
    });

    runner.criterion(3, "exclusion pipeline", [&](Checker& check) {
        const ExclusionSummary& summary = data.exclusions.summary;
        check.expect_eq(summary.total, 8251, "total lines");
        check.expect_eq(summary.conditional_excluded, 1148, "conditional excluded");
        check.expect_eq(summary.unanalyzed_excluded, 2097, "unanalyzed excluded");
        check.expect_eq(summary.analyzed, 5006, "analyzed");
        check.expect_near(summary.conditional_pct(), 13.91, 0.01, "conditional percent");
        check.expect_near(summary.unanalyzed_pct(), 25.42, 0.01, "unanalyzed percent");
        check.expect_near(summary.analyzed_pct(), 60.67, 0.01, "analyzed percent");
    });

    runner.criterion(4, "frequency and correct-analysis report", [&](Checker& check) {
        const FrequencyTable table = alert_frequency_table(data.records);
        check.expect_eq(table.totals.n_lines, 5006, "total lines");
        check.expect_eq(table.totals.engine_over, 283, "engine over alerts");
        check.expect_eq(table.totals.engine_under, 138, "engine under alerts");
        check.expect_near(percent(table.totals.engine_over, table.totals.n_lines), 5.65, 0.01,
                          "over percent");
        check.expect_near(percent(table.totals.engine_under, table.totals.n_lines), 2.76, 0.01,
                          "under percent");
        check.expect_near(percent(table.totals.engine_over + table.totals.engine_under,
                                  table.totals.n_lines),
                          8.41, 0.01, "combined percent");

        const auto gentamicin = std::find_if(
            table.rows.begin(), table.rows.end(),
            [](const FrequencyRow& row) { return row.medication_code == "GENT"; });
        check.expect(gentamicin != table.rows.end(), "gentamicin row present");
        if (gentamicin != table.rows.end()) {
            check.expect_eq(gentamicin->n_lines, 56, "gentamicin lines");
            check.expect_eq(gentamicin->engine_over, 30, "gentamicin over alerts");
            check.expect_near(percent(gentamicin->engine_over, gentamicin->n_lines), 53.57, 0.01,
                              "gentamicin over percent");
        }

        const CorrectAnalysisSummary correct = correct_analysis(data.records, data.cases);
        check.expect_eq(correct.n, 5006, "paired lines");
        check.expect_eq(correct.engine_correct, 4863, "engine correct count");
        check.expect_eq(correct.reference_correct, 4745, "reference correct count");
        check.expect_near(correct.engine_correct_pct(), 97.14, 0.01, "engine correct percent");
        // 4745/5006; the percentage re-derives from the counts
        check.expect_near(correct.reference_correct_pct(), 100.0 * 4745.0 / 5006.0, 0.01,
                          "reference correct percent");
    });

    runner.criterion(5, "discordance classifier", [&](Checker& check) {
        const auto classified = classify_discordances(data.records);
        const DiscordanceCounts counts = count_discordances(classified);
        check.expect_eq(counts.a, 10, "type A");
        check.expect_eq(counts.b, 258, "type B");
        check.expect_eq(counts.c, 136, "type C");
        check.expect_eq(counts.other, 0, "other discordance");
        check.expect_eq(counts.total(), 404, "total discordant");
    });

    runner.criterion(6, "rule-impact summary", [&](Checker& check) {
        const RuleImpactReport report = rule_impact(data.records, data.cases, 962);
        check.expect_eq(report.egfr_misconfigured_rules, 5, "flagged rules");
        check.expect_eq(report.total_rules, 962, "rule base size");
        check.expect_near(report.egfr_misconfigured_pct(), 0.52, 0.01, "flagged percent");
    });

    runner.criterion(7, "property: band partition fuzz (10k)", [&](Checker& check) {
        std::mt19937 rng(1001);
        long checked = 0;
        while (checked < 10000) {
            const RulePack pack = testsupport::random_pack(rng);
            if (!validate_pack(pack).ok()) {
                check.expect(false, "generated pack failed validation");
                return;
            }
            for (const auto& ruleset : pack.rulesets) {
                for (int k = 0; k < 4; ++k) {
                    double egfr;
                    if (k == 0 && !ruleset.bands.empty()) {
                        const auto& band = ruleset.bands[static_cast<std::size_t>(
                            testsupport::uniform_int(rng, 0,
                                                     static_cast<long>(ruleset.bands.size()) - 1))];
                        egfr = band.egfr_low; // boundary values included
                    } else {
                        egfr = testsupport::uniform(rng, 0.0, 250.0);
                    }
                    int matches = 0;
                    for (const auto& band : ruleset.bands) {
                        if (band.contains(egfr)) ++matches;
                    }
                    if (matches != 1) {
                        check.expect(false, "matches != 1 at egfr " + std::to_string(egfr));
                        return;
                    }
                    ++checked;
                }
            }
        }
        check.expect(checked >= 10000, "enough partition checks");
    });

    runner.criterion(7, "property: DSL round-trip (1k packs)", [&](Checker& check) {
        std::mt19937 rng(1002);
        for (int trial = 0; trial < 1000; ++trial) {
            const RulePack pack = testsupport::random_pack(rng);
            const RulePack reparsed = parse_rule_pack(serialize_rule_pack(pack));
            if (!(reparsed == pack)) {
                check.expect(false, "round-trip mismatch at trial " + std::to_string(trial));
                return;
            }
        }
    });

    runner.criterion(7, "property: dose monotonicity (1k bands)", [&](Checker& check) {
        std::mt19937 rng(1003);
        for (int trial = 0; trial < 1000; ++trial) {
            RulePack pack;
            pack.name = "m";
            pack.version = "1";
            MedicationRuleSet ruleset;
            ruleset.medication_code = "M";
            ruleset.medication_name = "m";
            EgfrBandRule band;
            band.rule_id = "M-1";
            band.egfr_low = 0;
            band.egfr_high = std::numeric_limits<double>::infinity();
            const double min_dose = testsupport::uniform(rng, 0.5, 800.0);
            band.min_daily_dose = min_dose;
            band.max_daily_dose = min_dose + testsupport::uniform(rng, 0.0, 4000.0);
            band.recommendation = "r";
            ruleset.bands.push_back(band);
            pack.rulesets.push_back(ruleset);

            double dose = testsupport::uniform(rng, 0.01, min_dose);
            int phase = 0;
            for (int step = 0; step < 16; ++step) {
                const Verdict verdict =
                    evaluate_line(pack, testsupport::basic_line("M", 50, dose, 1));
                int this_phase;
                switch (verdict.kind) {
                case VerdictKind::AlertUnderDose: this_phase = 0; break;
                case VerdictKind::Accept: this_phase = 1; break;
                case VerdictKind::AlertOverMaxDailyDose: this_phase = 2; break;
                default: check.expect(false, "unexpected indeterminate"); return;
                }
                if (this_phase < phase) {
                    check.expect(false, "verdict phase reversed at trial " +
                                            std::to_string(trial));
                    return;
                }
                phase = this_phase;
                dose += testsupport::uniform(rng, 0.5, 600.0);
            }
        }
    });

    runner.criterion(7, "property: MDRD oracle (100+ inputs)", [&](Checker& check) {
        std::mt19937 rng(1004);
        for (int trial = 0; trial < 200; ++trial) {
            const double scr = testsupport::uniform(rng, 0.25, 8.0);
            const int age = static_cast<int>(testsupport::uniform_int(rng, 18, 100));
            const bool female = trial % 2 == 0;
            const long double oracle =
                std::exp(std::log(175.0L) - 1.154L * std::log(static_cast<long double>(scr)) -
                         0.203L * std::log(static_cast<long double>(age))) *
                (female ? 0.742L : 1.0L);
            const double actual = mdrd_egfr({scr, age, female ? Sex::Female : Sex::Male});
            if (std::abs(actual - static_cast<double>(oracle)) >= 0.05) {
                check.expect(false, "MDRD mismatch at scr " + std::to_string(scr));
                return;
            }
            const double male = mdrd_egfr({scr, age, Sex::Male});
            const double fem = mdrd_egfr({scr, age, Sex::Female});
            if (std::abs(fem / male - 0.742) >= 1e-9) {
                check.expect(false, "sex ratio drift");
                return;
            }
        }
    });

    runner.criterion(7, "property: kappa identities", [&](Checker& check) {
        std::mt19937 rng(1005);
        for (int trial = 0; trial < 500; ++trial) {
            const long a = testsupport::uniform_int(rng, 1, 400);
            const long d = testsupport::uniform_int(rng, 1, 400);
            const KappaResult diagonal = cohen_kappa({a, 0, 0, d});
            if (std::abs(diagonal.kappa - 1.0) > 1e-12) {
                check.expect(false, "diagonal kappa != 1");
                return;
            }

            const long b = testsupport::uniform_int(rng, 0, 400);
            const long c = testsupport::uniform_int(rng, 0, 400);
            try {
                const double original = cohen_kappa({a, b, c, d}).kappa;
                const double swapped = cohen_kappa({a, c, b, d}).kappa;
                if (std::abs(original - swapped) > 1e-12) {
                    check.expect(false, "rater-swap asymmetry");
                    return;
                }
            } catch (const DegenerateTableError&) {
            }

            const long r1 = testsupport::uniform_int(rng, 1, 30);
            const long r2 = testsupport::uniform_int(rng, 1, 30);
            const long c1 = testsupport::uniform_int(rng, 1, 30);
            const long c2 = testsupport::uniform_int(rng, 1, 30);
            const KappaResult independent = cohen_kappa({r1 * c1, r1 * c2, r2 * c1, r2 * c2});
            if (std::abs(independent.kappa) > 1e-12) {
                check.expect(false, "independence kappa != 0");
                return;
            }
        }
    });

    return runner.finish();
}
