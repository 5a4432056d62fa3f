#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "loqsim/experiments.hpp"
#include "loqsim/serialize.hpp"

using namespace loqsim;
using namespace loqsim::experiments;

namespace {

const AngleGrid kGrid{0.0, 180.0, 37};
const AngleGrid kPeriodGrid{0.0, 175.0, 36};  // one full period, no duplicate point

QubitState left_circular() { return QubitState::named('L'); }

}  // namespace

TEST_CASE("herald correction is derived once and is input independent") {
    const auto& corr = herald_correction();
    // with the fixed pbs conventions the raw gate already matches the table
    CHECK(corr.name == "I x I");
    CHECK((corr.control - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((corr.target - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ideal truth table is exact") {
    const NoiseConfig ideal{};
    auto r = run_cnot_truth_table(ideal);

    CHECK(r.rows[0].input == "HH");
    CHECK(r.rows[0].expected == "HV");
    CHECK(r.rows[1].expected == "HH");
    CHECK(r.rows[2].expected == "VH");
    CHECK(r.rows[3].expected == "VV");

    for (const auto& row : r.rows) {
        CHECK(row.correct_prob == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.herald_prob == doctest::Approx(0.25).epsilon(1e-9));
        double sum = 0.0;
        for (double p : row.outputs) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(r.fidelity_mean == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.fidelity_worst == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fully distinguishable target side degrades rows to a coin flip") {
    NoiseConfig noise{};
    noise.lambda45 = 0.0;
    auto r = run_cnot_truth_table(noise);
    // frozen from the dense oracle: correct output share (1 + lambda45^2)/2
    for (const auto& row : r.rows)
        CHECK(row.correct_prob == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("partial overlap interpolates the row fidelity") {
    NoiseConfig noise{};
    noise.lambda45 = 0.6;
    auto r = run_cnot_truth_table(noise);
    for (const auto& row : r.rows)
        CHECK(row.correct_prob == doctest::Approx((1.0 + 0.36) / 2.0).epsilon(1e-9));
}

TEST_CASE("ideal entangling run produces the singlet") {
    auto r = run_entangling_fringe(NoiseConfig{}, kGrid);
    CHECK(r.state_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.unwanted_probability == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::isinf(r.desired_unwanted_ratio));
    CHECK(r.hv_patterns[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.hv_patterns[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.herald_prob == doctest::Approx(0.25).epsilon(1e-9));

    // fringe minimum at P2 = 45 when P5 sits at +45
    const auto it = std::min_element(r.fringe.begin(), r.fringe.end());
    CHECK(r.angles_deg[it - r.fringe.begin()] == doctest::Approx(45.0));
}

TEST_CASE("fully distinguishable junctions flatten the fringe") {
    NoiseConfig noise{};
    noise.lambda23 = 0.0;
    noise.lambda45 = 0.0;
    auto r = run_entangling_fringe(noise, kGrid);
    CHECK(r.visibility == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("ideal teleportation of the left-circular state") {
    auto r = run_teleportation(left_circular(), NoiseConfig{}, kPeriodGrid);

    for (const auto& b : r.branches) {
        CHECK(b.fidelity == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(b.probability == doctest::Approx(0.25).epsilon(1e-9));
    }
    CHECK(r.average_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.psi_offset_deg == doctest::Approx(90.0).epsilon(1e-9));
    CHECK(r.herald_prob == doctest::Approx(0.25).epsilon(1e-9));

    auto corrected = apply_feedforward(r);
    for (const auto& b : corrected.branches)
        CHECK(b.fidelity_corrected == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(corrected.average_fidelity_corrected == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("teleport correspondences for a basis input") {
    auto r = run_teleportation(QubitState::named('H'), NoiseConfig{}, kPeriodGrid);
    // psi outcomes leave photon 1 in |H>, phi outcomes in |V> (up to sign)
    CHECK(std::abs(r.branches[0].target.alpha) == doctest::Approx(1.0));
    CHECK(std::abs(r.branches[1].target.alpha) == doctest::Approx(1.0));
    CHECK(std::abs(r.branches[2].target.beta) == doctest::Approx(1.0));
    CHECK(std::abs(r.branches[3].target.beta) == doctest::Approx(1.0));
    for (const auto& b : r.branches) CHECK(b.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bell outcome completeness in the single-photon regime") {
    auto r = run_teleportation(left_circular(), NoiseConfig{}, kPeriodGrid);
    double sum = 0.0;
    for (const auto& b : r.branches) sum += b.probability;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("noise-off limit equals the ideal run") {
    NoiseConfig noise;  // lambda = 1, order 1, single photon target
    noise.pair_prob = 0.02;
    auto a = run_cnot_truth_table(noise);
    CHECK(a.fidelity_mean == doctest::Approx(1.0).epsilon(1e-9));
    auto b = run_entangling_fringe(noise, kGrid);
    CHECK(b.visibility == doctest::Approx(1.0).epsilon(1e-9));
    auto c = run_teleportation(left_circular(), noise, kPeriodGrid);
    CHECK(c.average_fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("feedforward keeps the probability-weighted average") {
    auto r = run_teleportation(left_circular(), nominal_noise(), kPeriodGrid);
    auto corrected = apply_feedforward(r);
    CHECK(corrected.average_fidelity_corrected ==
          doctest::Approx(r.average_fidelity).epsilon(1e-9));
}

TEST_CASE("classical baseline") {
    CHECK(classical_baseline_analytic() == 2.0 / 3.0);
    const double mc = classical_baseline_monte_carlo(100000, 20240817);
    CHECK(std::abs(mc - 2.0 / 3.0) < 0.01);
    // determinism
    CHECK(classical_baseline_monte_carlo(5000, 7) ==
          classical_baseline_monte_carlo(5000, 7));
}

TEST_CASE("fringe phase extraction") {
    std::vector<double> angles, sin2, cos2;
    for (int i = 0; i < 36; ++i) {
        const double a = 5.0 * i;
        angles.push_back(a);
        const double t = a * std::numbers::pi / 180.0;
        sin2.push_back(std::sin(t) * std::sin(t));
        cos2.push_back(std::cos(t) * std::cos(t));
    }
    const double off = fringe_phase_deg(angles, cos2) - fringe_phase_deg(angles, sin2);
    double wrapped = std::fmod(off / 2.0, 180.0);
    if (wrapped < 0) wrapped += 180.0;
    CHECK(wrapped == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("zero herald probability is signaled") {
    NoiseConfig noise{};
    noise.pair_prob = 0.0;  // no pairs, nothing can click
    CHECK_THROWS_AS(run_cnot_truth_table(noise), ZeroHeraldProbability);
}

TEST_CASE("json serialization has the stable envelope") {
    auto table = run_cnot_truth_table(NoiseConfig{});
    auto j = serialize::to_json(table);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"experiment", "noise", "tables", "curves", "summary"});
    CHECK(j["summary"]["fidelity"].get<double>() == doctest::Approx(1.0));
    CHECK(j["experiment"] == "cnot-table");

    auto tele = run_teleportation(left_circular(), NoiseConfig{}, kPeriodGrid);
    auto jt = serialize::to_json(tele);
    CHECK(jt["tables"]["branches"].size() == 4);
    CHECK(jt["curves"].contains("psi-"));
}

TEST_CASE("nominal noise lands in a plausible band") {
    const NoiseConfig n = nominal_noise();

    auto table = run_cnot_truth_table(n);
    MESSAGE("table fidelity mean ", table.fidelity_mean, " worst ", table.fidelity_worst);
    CHECK(table.fidelity_mean > 0.6);
    CHECK(table.fidelity_mean < 0.95);

    auto fringe = run_entangling_fringe(n, kGrid);
    MESSAGE("entangle visibility ", fringe.visibility, " ratio ", fringe.desired_unwanted_ratio);
    CHECK(fringe.visibility > 0.3);
    CHECK(fringe.visibility < 0.9);

    auto tele = run_teleportation(left_circular(), n, kPeriodGrid);
    MESSAGE("teleport avg fidelity ", tele.average_fidelity);
    CHECK(tele.average_fidelity > 2.0 / 3.0);
}
