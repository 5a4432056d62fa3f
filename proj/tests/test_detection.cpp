#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "loqsim/detection.hpp"
#include "loqsim/optics.hpp"
#include "support/oracles.hpp"

using namespace loqsim;
using namespace loqsim::detection;
using oracles::cplx;

namespace {

FockBasisState occ(std::initializer_list<int> values) {
    FockBasisState s;
    for (int v : values) s.occ.push_back(static_cast<std::uint8_t>(v));
    return s;
}

/// The four-photon gate circuit built directly on the state engine:
/// |H>_2 (ancilla singlet on 3,4) |H or V>_5 through pbs(2,3) and pbs45(4,5).
Ket gate_circuit(char control, char target) {
    RegistryConfig cfg{.bins = 1};
    auto reg2 = ModeRegistry::make({"2"}, cfg);
    auto reg5 = ModeRegistry::make({"5"}, cfg);
    Ket c = Ket::single(reg2, {"2", control == 'H' ? Pol::H : Pol::V, 0});
    Ket t = Ket::single(reg5, {"5", target == 'H' ? Pol::H : Pol::V, 0});
    Ket anc = make_bell(BellKind::PsiMinus, "3", "4", cfg);
    Ket psi = tensor(tensor(c, anc), t);
    psi = optics::apply_pbs(psi, "2", "3", "2p", "3p");
    psi = optics::apply_pbs45(psi, "4", "5", "4p", "5p");
    return psi;
}

struct OracleHerald {
    double conditional;  // P(-,H | one photon in each heralded line)
    double exclusivity;  // P(one photon in each heralded line)
    double joint;
};

/// Same quantity from a dense 8-mode matrix and the permanent formula;
/// nothing here touches the sparse substitution path.
OracleHerald oracle_herald(char control, char target) {
    // modes: 2H 2V 3H 3V 4H 4V 5H 5V; the pbs blocks act in place.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(8, 8);
    m.block<4, 4>(0, 0) = optics::pbs_two_line_matrix();
    m.block<4, 4>(4, 4) = optics::pbs45_two_line_matrix();
    // analyze 3p in the +- basis: rotate |-> into the H slot
    Eigen::MatrixXcd analyze = Eigen::MatrixXcd::Identity(8, 8);
    analyze.block<2, 2>(2, 2) = optics::rotation_to_h(QubitState::named('M'));
    const Eigen::MatrixXcd total = analyze * m;

    std::vector<std::vector<int>> ins;
    std::vector<cplx> amps;
    const double s = 1.0 / std::numbers::sqrt2;
    const int c = control == 'H' ? 0 : 1;
    const int t = target == 'H' ? 6 : 7;
    {
        std::vector<int> in(8, 0);
        in[c] = 1;
        in[2] = 1;  // 3H with 4V
        in[5] = 1;
        in[t] += 1;
        ins.push_back(in);
        amps.push_back(s);
    }
    {
        std::vector<int> in(8, 0);
        in[c] = 1;
        in[3] = 1;  // 3V with 4H
        in[4] = 1;
        in[t] += 1;
        ins.push_back(in);
        amps.push_back(-s);
    }

    OracleHerald res{0.0, 0.0, 0.0};
    for (const auto& out : oracles::enumerate_basis(8, 4)) {
        cplx amp = 0.0;
        for (size_t i = 0; i < ins.size(); ++i)
            amp += amps[i] * oracles::transition_amplitude(total, ins[i], out);
        const double p = std::norm(amp);
        if (p == 0.0) continue;
        const int n3 = out[2] + out[3];
        const int n4 = out[4] + out[5];
        if (n3 == 1 && n4 == 1) {
            res.exclusivity += p;
            if (out[2] == 1 && out[4] == 1) res.joint += p;
        }
    }
    res.conditional = res.joint / res.exclusivity;
    return res;
}

}  // namespace

TEST_CASE("herald on the ideal gate matches the dense oracle") {
    for (auto [c, t] : {std::pair{'H', 'H'}, {'H', 'V'}, {'V', 'H'}, {'V', 'V'}}) {
        const OracleHerald expect = oracle_herald(c, t);
        Ket psi = gate_circuit(c, t);
        HeraldRule rule{{{"3p", QubitState::named('M')}, {"4p", QubitState::named('H')}}};
        HeraldResult got = herald(psi, rule);

        CHECK(got.probability == doctest::Approx(expect.conditional).epsilon(1e-10));
        CHECK(got.exclusivity_probability == doctest::Approx(expect.exclusivity).epsilon(1e-10));
        CHECK(got.joint_probability == doctest::Approx(expect.joint).epsilon(1e-10));

        // frozen oracle values: the specific pattern carries a quarter of the
        // coincidence mass, which itself is a quarter of everything
        CHECK(got.probability == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(got.exclusivity_probability == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(got.joint_probability == doctest::Approx(0.0625).epsilon(1e-10));
    }
}

TEST_CASE("heralded gate output for |H>|H> is |H>|V>") {
    Ket psi = gate_circuit('H', 'H');
    HeraldRule rule{{{"3p", QubitState::named('M')}, {"4p", QubitState::named('H')}}};
    HeraldResult got = herald(psi, rule);
    auto out_c = project_line_polarization(got.state, "2p", QubitState::named('H'));
    CHECK(out_c.probability == doctest::Approx(1.0).epsilon(1e-10));
    auto out_t = project_line_polarization(out_c.state, "5p", QubitState::named('V'));
    CHECK(out_t.probability == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("herald edge cases") {
    auto reg = ModeRegistry::make({"a"}, {});
    HeraldRule rule{{{"a", QubitState::named('H')}}};

    HeraldResult vac = herald(Ket::vacuum(reg), rule);
    CHECK(vac.probability == 0.0);
    CHECK(vac.state.empty());

    CHECK_THROWS_AS(herald(Ket::vacuum(reg), HeraldRule{{{"z", QubitState::named('H')}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        herald(Ket::vacuum(reg),
               HeraldRule{{{"a", QubitState::named('H')}, {"a", QubitState::named('V')}}}),
        std::invalid_argument);
}

TEST_CASE("herald outcomes are complete over the exclusive subspace") {
    Ket psi = gate_circuit('H', 'H');
    double total = 0.0;
    for (char a : {'P', 'M'})
        for (char b : {'H', 'V'})
            for (char u : {'H', 'V'})
                for (char v : {'H', 'V'}) {
                    HeraldRule rule{{{"3p", QubitState::named(a)},
                                     {"4p", QubitState::named(b)},
                                     {"2p", QubitState::named(u)},
                                     {"5p", QubitState::named(v)}}};
                    total += herald(psi, rule).probability;
                }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("click table counts threshold events") {
    auto reg = ModeRegistry::make({"a"}, {});
    Ket hv(reg);
    hv.add(occ({1, 1}), 1.0);  // one H and one V photon in the line

    ClickTable table(hv, {{"a", QubitState::named('H')}});
    CHECK(table.probability(std::vector{std::pair{std::string("a"), ClickTable::Slot::First}}) ==
          doctest::Approx(1.0));
    CHECK(table.probability(std::vector{std::pair{std::string("a"), ClickTable::Slot::Second}}) ==
          doctest::Approx(1.0));  // separate analyzer runs both click

    Ket twoh(reg);
    twoh.add(occ({2, 0}), 1.0);
    ClickTable t2(twoh, {{"a", QubitState::named('H')}});
    CHECK(t2.probability(std::vector{std::pair{std::string("a"), ClickTable::Slot::Second}}) ==
          doctest::Approx(0.0));
}

TEST_CASE("threshold detection ignores bin relabeling") {
    auto reg = ModeRegistry::make({"a", "b"}, RegistryConfig{.bins = 2});
    Ket psi(reg);
    // order: aH0 aH1 aV0 aV1 bH0 bH1 bV0 bV1
    psi.add(occ({1, 0, 0, 0, 0, 0, 1, 0}), std::sqrt(0.3));
    psi.add(occ({0, 1, 0, 0, 0, 1, 0, 0}), std::sqrt(0.2));
    psi.add(occ({0, 0, 1, 0, 1, 0, 0, 0}), std::sqrt(0.5));

    Ket relabeled(reg);
    for (const auto& [s, v] : psi.terms()) {
        FockBasisState t = s;
        std::swap(t.occ[0], t.occ[1]);
        std::swap(t.occ[2], t.occ[3]);
        std::swap(t.occ[4], t.occ[5]);
        std::swap(t.occ[6], t.occ[7]);
        relabeled.add(t, v);
    }

    for (char a : {'H', 'P', 'L'})
        for (char b : {'V', 'M'}) {
            std::vector<LineBasis> bases{{"a", QubitState::named(a)},
                                         {"b", QubitState::named(b)}};
            ClickTable t1(psi, bases);
            ClickTable t2(relabeled, bases);
            const std::vector<std::pair<std::string, ClickTable::Slot>> req{
                {"a", ClickTable::Slot::First}, {"b", ClickTable::Slot::First}};
            CHECK(t1.probability(req) == doctest::Approx(t2.probability(req)).epsilon(1e-12));
        }
}

TEST_CASE("coincidence scan over the singlet") {
    auto reg = ModeRegistry::make({"2", "5"}, {});
    Ket singlet = make_bell(reg, BellKind::PsiMinus, "2", "5");

    std::vector<DetectorSpec> dets;
    dets.push_back({"d2", "2", AnalysisBasis::HV, 0.0, std::nullopt, 'p'});
    dets.push_back({"d5", "5", AnalysisBasis::Polarizer, 45.0, std::nullopt, 'p'});
    ScanSpec scan{"2", 0.0, 180.0, 37};

    auto results = coincidence_scan(singlet, dets, scan);
    REQUIRE(results.size() == 37);
    std::vector<double> curve;
    for (const auto& r : results) {
        REQUIRE(r.patterns.size() == 1);
        curve.push_back(r.patterns[0].probability);
    }
    CHECK(visibility(curve) == doctest::Approx(1.0).epsilon(1e-12));
    // minimum sits exactly on the 45 degree grid point
    const auto it = std::min_element(curve.begin(), curve.end());
    CHECK(results[it - curve.begin()].angle_deg == doctest::Approx(45.0));
    CHECK(*it == doctest::Approx(0.0).epsilon(1e-15));
    // ideal fringe: (1/2) sin^2(theta - 45)
    for (size_t i = 0; i < curve.size(); ++i) {
        const double th = *results[i].angle_deg;
        CHECK(curve[i] == doctest::Approx(0.5 * std::pow(std::sin((th - 45.0) * std::numbers::pi /
                                                                  180.0),
                                                         2))
                              .epsilon(1e-10));
    }
}

TEST_CASE("coincidence scan validates coverage") {
    auto reg = ModeRegistry::make({"2", "5"}, {});
    Ket singlet = make_bell(reg, BellKind::PsiMinus, "2", "5");
    std::vector<DetectorSpec> only2;
    only2.push_back({"d2", "2", AnalysisBasis::HV, 0.0, std::nullopt, 'p'});
    CHECK_THROWS_AS(coincidence_scan(singlet, only2, std::nullopt), std::invalid_argument);
}

TEST_CASE("csv serialization of scan results") {
    auto reg = ModeRegistry::make({"2", "5"}, {});
    Ket singlet = make_bell(reg, BellKind::PsiMinus, "2", "5");
    std::vector<DetectorSpec> dets;
    dets.push_back({"d2", "2", AnalysisBasis::HV, 0.0, std::nullopt, 'p'});
    dets.push_back({"d5", "5", AnalysisBasis::HV, 0.0, std::nullopt, 'p'});
    auto results = coincidence_scan(singlet, dets, std::nullopt);
    const std::string csv = to_csv(results);
    CHECK(csv.substr(0, 30) == "angle_deg,pattern,probability\n");
    CHECK(csv.find(",HV,") != std::string::npos);
    CHECK(csv.find(",VH,") != std::string::npos);
}

TEST_CASE("visibility formula") {
    std::vector<double> sin2;
    for (int i = 0; i < 36; ++i)
        sin2.push_back(std::pow(std::sin(i * 5.0 * std::numbers::pi / 180.0), 2));
    CHECK(visibility(sin2) == doctest::Approx(1.0));

    std::vector<double> flat(10, 0.4);
    CHECK(visibility(flat) == doctest::Approx(0.0));

    std::vector<double> cosy;
    for (int i = 0; i < 360; ++i)
        cosy.push_back(0.5 + 0.3 * std::cos(i * std::numbers::pi / 180.0));
    CHECK(visibility(cosy) == doctest::Approx(0.6).epsilon(1e-9));

    CHECK_THROWS_AS(visibility(std::vector<double>{}), std::domain_error);
    CHECK_THROWS_AS(visibility(std::vector<double>{0.0, 0.0}), std::domain_error);
}
