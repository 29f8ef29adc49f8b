#include <doctest.h>

#include <random>

#include "nephrodose/rulepack.hpp"
#include "support.hpp"

using namespace nephrodose;

namespace {

EgfrBandRule band(const std::string& id, double low, double high,
                  std::optional<double> max_dose = 100.0,
                  std::optional<double> min_dose = std::nullopt) {
    EgfrBandRule out;
    out.rule_id = id;
    out.egfr_low = low;
    out.egfr_high = high;
    out.max_daily_dose = max_dose;
    out.min_daily_dose = min_dose;
    out.recommendation = "adjust";
    return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

RulePack four_band_pack() {
    RulePack pack;
    pack.name = "t";
    pack.version = "1";
    MedicationRuleSet ruleset;
    ruleset.medication_code = "ALLO";
    ruleset.medication_name = "Allopurinol";
    ruleset.bands = {band("b1", 0, 15), band("b2", 15, 30), band("b3", 30, 60),
                     band("b4", 60, kInf)};
    pack.rulesets.push_back(ruleset);
    return pack;
}

} // namespace

TEST_CASE("four contiguous bands validate clean") {
    const auto report = validate_pack(four_band_pack());
    CHECK(report.ok());
    CHECK(report.findings.empty());
}

TEST_CASE("overlapping bands are flagged") {
    RulePack pack = four_band_pack();
    pack.rulesets[0].bands = {band("b1", 0, 30), band("b2", 15, 60), band("b3", 60, kInf)};
    const auto report = validate_pack(pack);
    CHECK(report.has(DefectKind::OverlappingBands));
}

TEST_CASE("coverage gaps are flagged") {
    RulePack pack = four_band_pack();

    SUBCASE("interior gap") {
        pack.rulesets[0].bands = {band("b1", 0, 15), band("b2", 30, kInf)};
    }
    SUBCASE("missing head") {
        pack.rulesets[0].bands = {band("b1", 10, 60), band("b2", 60, kInf)};
    }
    SUBCASE("missing open tail") {
        pack.rulesets[0].bands = {band("b1", 0, 60)};
    }
    SUBCASE("no bands at all") { pack.rulesets[0].bands.clear(); }

    const auto report = validate_pack(pack);
    CHECK(report.has(DefectKind::CoverageGap));
}

TEST_CASE("inverted dose range is flagged") {
    RulePack pack = four_band_pack();
    pack.rulesets[0].bands[1].min_daily_dose = 200.0;
    pack.rulesets[0].bands[1].max_daily_dose = 100.0;
    const auto report = validate_pack(pack);
    CHECK(report.has(DefectKind::InvertedDoseRange));
}

TEST_CASE("band with neither bound is flagged") {
    RulePack pack = four_band_pack();
    pack.rulesets[0].bands[2].max_daily_dose.reset();
    pack.rulesets[0].bands[2].min_daily_dose.reset();
    const auto report = validate_pack(pack);
    CHECK(report.has(DefectKind::EmptyBandConstraint));
}

TEST_CASE("duplicate medication codes and rule ids are flagged") {
    RulePack pack = four_band_pack();
    pack.rulesets.push_back(pack.rulesets[0]);
    const auto report = validate_pack(pack);
    CHECK(report.has(DefectKind::DuplicateMedication));
    CHECK(report.has(DefectKind::DuplicateRuleId));
}

TEST_CASE("empty interval low >= high is a finding") {
    RulePack pack = four_band_pack();
    pack.rulesets[0].bands[1].egfr_low = 30;
    pack.rulesets[0].bands[1].egfr_high = 15;
    const auto report = validate_pack(pack);
    CHECK_FALSE(report.ok());
    CHECK(report.has(DefectKind::CoverageGap));
}

TEST_CASE("negative lower bound is a finding") {
    RulePack pack = four_band_pack();
    pack.rulesets[0].bands[0].egfr_low = -5;
    const auto report = validate_pack(pack);
    CHECK_FALSE(report.ok());
}

TEST_CASE("find_band honours half-open boundaries") {
    const RulePack pack = four_band_pack();
    const auto& ruleset = pack.rulesets[0];
    CHECK(find_band(ruleset, 59.9).rule_id == "b3");
    CHECK(find_band(ruleset, 60.0).rule_id == "b4");
    CHECK(find_band(ruleset, 0.0).rule_id == "b1");
    CHECK(find_band(ruleset, 15.0).rule_id == "b2");
    CHECK(find_band(ruleset, 1e9).rule_id == "b4");
}

TEST_CASE("find_band on a gapped ruleset throws") {
    MedicationRuleSet ruleset;
    ruleset.medication_code = "X";
    ruleset.bands = {band("b1", 0, 15)};
    CHECK_THROWS_AS(find_band(ruleset, 20.0), NoBandMatchError);
}

TEST_CASE("validation findings are insensitive to band declaration order") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        RulePack pack;
        pack.name = "p";
        pack.version = "1";
        pack.rulesets.push_back(testsupport::random_ruleset(rng, 0));
        // sometimes break it on purpose
        if (trial % 3 == 0 && pack.rulesets[0].bands.size() > 1) {
            pack.rulesets[0].bands[0].egfr_high += 1.0;
        }
        auto kinds_of = [](const ValidationReport& report) {
            std::vector<DefectKind> kinds;
            for (const auto& finding : report.findings) kinds.push_back(finding.kind);
            std::sort(kinds.begin(), kinds.end());
            kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
            return kinds;
        };
        const auto baseline = kinds_of(validate_pack(pack));
        std::shuffle(pack.rulesets[0].bands.begin(), pack.rulesets[0].bands.end(), rng);
        CHECK(kinds_of(validate_pack(pack)) == baseline);
    }
}

TEST_CASE("partition property: exactly one band matches any egfr") {
    std::mt19937 rng(42);
    int checks = 0;
    while (checks < 2000) {
        const RulePack pack = testsupport::random_pack(rng);
        REQUIRE(validate_pack(pack).ok());
        for (const auto& ruleset : pack.rulesets) {
            const double egfr = testsupport::uniform(rng, 0.0, 200.0);
            int matches = 0;
            for (const auto& ruleband : ruleset.bands) {
                if (ruleband.contains(egfr)) ++matches;
            }
            CHECK(matches == 1);
            // boundary values too
            for (const auto& ruleband : ruleset.bands) {
                int edge_matches = 0;
                for (const auto& other : ruleset.bands) {
                    if (other.contains(ruleband.egfr_low)) ++edge_matches;
                }
                CHECK(edge_matches == 1);
            }
            ++checks;
        }
    }
}
