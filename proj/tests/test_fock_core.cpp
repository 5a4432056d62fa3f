#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "loqsim/ket.hpp"
#include "support/oracles.hpp"

using namespace loqsim;
using oracles::cplx;

namespace {

RegistryPtr two_lines(const char* a, const char* b) {
    return ModeRegistry::make({a, b}, RegistryConfig{.bins = 1});
}

FockBasisState occ(std::initializer_list<int> values) {
    FockBasisState s;
    for (int v : values) s.occ.push_back(static_cast<std::uint8_t>(v));
    return s;
}

}  // namespace

TEST_CASE("bell state constructors") {
    // modes in canonical order: (3,H) (3,V) (4,H) (4,V)
    Ket psi = make_bell(BellKind::PsiMinus, "3", "4");
    const double s = 1.0 / std::numbers::sqrt2;
    CHECK(psi.amplitude(occ({1, 0, 0, 1})).real() == doctest::Approx(s).epsilon(1e-12));
    CHECK(psi.amplitude(occ({0, 1, 1, 0})).real() == doctest::Approx(-s).epsilon(1e-12));
    CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    Ket phi = make_bell(BellKind::PhiPlus, "1", "2");
    CHECK(phi.amplitude(occ({1, 0, 1, 0})).real() == doctest::Approx(s));
    CHECK(phi.amplitude(occ({0, 1, 0, 1})).real() == doctest::Approx(s));

    auto reg = two_lines("1", "2");
    CHECK(std::abs(inner_product(make_bell(reg, BellKind::PsiMinus, "1", "2"),
                                 make_bell(reg, BellKind::PsiPlus, "1", "2"))) < 1e-14);

    CHECK_THROWS_AS(make_bell(BellKind::PsiMinus, "1", "1"), std::invalid_argument);
    CHECK_THROWS_AS(make_bell(reg, BellKind::PsiPlus, "1", "7"), std::invalid_argument);
}

TEST_CASE("canonical dump is ordered and 12-digit") {
    Ket psi = make_bell(BellKind::PsiMinus, "3", "4");
    CHECK(dump_canonical(psi) ==
          "0,1,1,0 -0.707106781187 0\n"
          "1,0,0,1 0.707106781187 0\n");
}

TEST_CASE("tensor products") {
    auto reg2 = ModeRegistry::make({"2"}, {});
    auto reg5 = ModeRegistry::make({"5"}, {});
    Ket h2 = Ket::single(reg2, {"2", Pol::H, 0});
    Ket h5 = Ket::single(reg5, {"5", Pol::H, 0});
    Ket both = tensor(h2, h5);
    CHECK(both.amplitude(occ({1, 0, 1, 0})) == cplx(1.0));
    CHECK(both.norm_sq() == doctest::Approx(1.0));

    // vacuum identity
    auto regv = ModeRegistry::make({"9"}, {});
    Ket ext = tensor(Ket::vacuum(regv), h2);
    CHECK(ext.registry().size() == 4);
    CHECK(ext.norm_sq() == doctest::Approx(1.0));

    // norm multiplicativity on a 4-photon product
    Ket pair1 = make_bell(BellKind::PsiMinus, "1", "2");
    Ket pair2 = make_bell(BellKind::PsiMinus, "3", "4");
    CHECK(tensor(pair1, pair2).norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

    // overlapping registries rejected
    CHECK_THROWS_AS(tensor(h2, Ket::single(reg2, {"2", Pol::V, 0})), std::invalid_argument);
}

TEST_CASE("identity and hom bunching under mode unitaries") {
    auto reg = two_lines("a", "b");
    Ket in = Ket::basis(reg, occ({1, 0, 1, 0}));  // one H photon in each line

    std::vector<ModeLabel> modes{{"a", Pol::H, 0}, {"b", Pol::H, 0}};
    Ket same = apply_mode_unitary(in, modes, Eigen::Matrix2cd::Identity());
    CHECK(fidelity(same, in) == doctest::Approx(1.0));

    Eigen::Matrix2cd mixer;
    const double s = 1.0 / std::numbers::sqrt2;
    mixer << s, s, s, -s;
    Ket out = apply_mode_unitary(in, modes, mixer);
    CHECK(std::abs(out.amplitude(occ({1, 0, 1, 0}))) < 1e-14);
    CHECK(out.amplitude(occ({2, 0, 0, 0})).real() == doctest::Approx(s));
    CHECK(out.amplitude(occ({0, 0, 2, 0})).real() == doctest::Approx(-s));
    CHECK(out.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mode unitary errors") {
    auto reg = two_lines("a", "b");
    Ket in = Ket::basis(reg, occ({1, 0, 0, 0}));
    std::vector<ModeLabel> modes{{"a", Pol::H, 0}, {"b", Pol::H, 0}};

    Eigen::Matrix2cd bad;
    bad << 1, 0, 0, 2;
    CHECK_THROWS_AS(apply_mode_unitary(in, modes, bad), std::invalid_argument);

    std::vector<ModeLabel> unknown{{"a", Pol::H, 0}, {"z", Pol::H, 0}};
    CHECK_THROWS_AS(apply_mode_unitary(in, unknown, Eigen::Matrix2cd::Identity()),
                    std::invalid_argument);
}

TEST_CASE("sequential substitution matches the permanent oracle") {
    std::mt19937_64 rng(2024);
    auto cfg = RegistryConfig{.bins = 1, .max_total_photons = 6};
    auto reg = ModeRegistry::make({"a", "b", "c"}, cfg);  // 6 modes
    std::vector<ModeLabel> modes;
    for (int i = 0; i < reg->size(); ++i) modes.push_back(reg->label(i));

    std::uniform_int_distribution<int> photon_count(1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = photon_count(rng);
        auto inputs = oracles::enumerate_basis(reg->size(), n);
        std::uniform_int_distribution<size_t> pick(0, inputs.size() - 1);
        const auto& in_occ = inputs[pick(rng)];

        FockBasisState in_state;
        for (int v : in_occ) in_state.occ.push_back(static_cast<std::uint8_t>(v));
        const Eigen::MatrixXcd u = oracles::random_unitary(reg->size(), rng);
        Ket out = apply_mode_unitary(Ket::basis(reg, in_state), modes, u);

        double worst = 0.0;
        for (const auto& out_occ : oracles::enumerate_basis(reg->size(), n)) {
            FockBasisState s;
            for (int v : out_occ) s.occ.push_back(static_cast<std::uint8_t>(v));
            const cplx expect = oracles::transition_amplitude(u, in_occ, out_occ);
            worst = std::max(worst, std::abs(out.amplitude(s) - expect));
        }
        CHECK(worst < 1e-9);
        CHECK(out.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("photon number is conserved termwise") {
    std::mt19937_64 rng(7);
    auto reg = ModeRegistry::make({"a", "b"}, RegistryConfig{.bins = 2});
    std::vector<ModeLabel> modes;
    for (int i = 0; i < reg->size(); ++i) modes.push_back(reg->label(i));

    Ket in(reg);
    in.add(occ({1, 0, 0, 1, 0, 0, 2, 0}), 0.5);
    in.add(occ({0, 1, 0, 0, 1, 0, 0, 1}), std::sqrt(0.75));
    const Eigen::MatrixXcd u = oracles::random_unitary(reg->size(), rng);
    Ket out = apply_mode_unitary(in, modes, u);
    for (const auto& [s, v] : out.terms()) CHECK((s.total() == 4 || s.total() == 3));
    CHECK(out.norm_sq() == doctest::Approx(in.norm_sq()).epsilon(1e-10));
}

TEST_CASE("projections") {
    auto reg = ModeRegistry::make({"x"}, {});
    Ket plus(reg);
    const double s = 1.0 / std::numbers::sqrt2;
    plus.add(occ({1, 0}), s);
    plus.add(occ({0, 1}), s);

    SUBCASE("plus onto H") {
        auto res = project_line_polarization(plus, "x", QubitState::named('H'));
        CHECK(res.probability == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(res.state.amplitude(occ({1, 0}))) == doctest::Approx(1.0));
        CHECK(res.state.norm_tracked() == doctest::Approx(0.5));
    }

    SUBCASE("singlet is rotation invariant") {
        auto reg25 = two_lines("2", "5");
        Ket singlet = make_bell(reg25, BellKind::PsiMinus, "2", "5");
        auto after5 = project_line_polarization(singlet, "5", QubitState::linear(45.0));
        CHECK(after5.probability == doctest::Approx(0.5).epsilon(1e-12));
        auto partner = project_line_polarization(after5.state, "2", QubitState::linear(-45.0));
        CHECK(partner.probability == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("vacuum has empty support") {
        auto res = project(Ket::vacuum(reg), [](const FockBasisState& st) { return st.total() == 1; });
        CHECK(res.probability == 0.0);
        CHECK(res.state.empty());
    }

    SUBCASE("completeness over a basis") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> g;
        Ket any(reg);
        any.add(occ({1, 0}), cplx(g(rng), g(rng)));
        any.add(occ({0, 1}), cplx(g(rng), g(rng)));
        any.add(occ({1, 1}), cplx(g(rng), g(rng)));
        any = any.normalized();
        double total = 0.0;
        for (int h = 0; h <= 2; ++h)
            for (int v = 0; v <= 2; ++v) {
                auto res = project(any, [&](const FockBasisState& st) {
                    return st.occ[0] == h && st.occ[1] == v;
                });
                total += res.probability;
            }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("inner products and fidelity") {
    auto reg = ModeRegistry::make({"x"}, {});
    Ket h(reg), plus(reg);
    h.add(occ({1, 0}), 1.0);
    const double s = 1.0 / std::numbers::sqrt2;
    plus.add(occ({1, 0}), s);
    plus.add(occ({0, 1}), s);

    CHECK(fidelity(h, h) == doctest::Approx(1.0));
    CHECK(fidelity(h, plus) == doctest::Approx(0.5).epsilon(1e-12));

    auto reg12 = two_lines("1", "2");
    CHECK(fidelity(make_bell(reg12, BellKind::PsiPlus, "1", "2"),
                   make_bell(reg12, BellKind::PsiMinus, "1", "2")) == doctest::Approx(0.0));

    CHECK_THROWS_AS(fidelity(h, make_bell(BellKind::PsiPlus, "1", "2")), std::invalid_argument);
}

TEST_CASE("normalize and prune") {
    auto reg = ModeRegistry::make({"x"}, {});
    Ket k(reg);
    k.add(occ({1, 0}), 3.0);
    k.add(occ({0, 1}), 4.0);
    Ket n = k.normalized();
    CHECK(n.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(n.amplitude(occ({1, 0}))) == doctest::Approx(0.6));

    Ket tiny(reg);
    tiny.add(occ({1, 0}), 1.0);
    tiny.add(occ({0, 1}), 1e-15);
    CHECK(tiny.pruned().terms().size() == 1);

    CHECK_THROWS_AS(Ket(reg).normalized(), std::domain_error);
}

TEST_CASE("truncation bounds basis states") {
    auto reg = ModeRegistry::make({"x"}, RegistryConfig{.bins = 1, .max_total_photons = 2});
    CHECK_THROWS_AS(Ket::basis(reg, occ({2, 1})), std::invalid_argument);
    Ket k(reg);
    k.add(occ({2, 1}), 1.0);  // silently dropped by the truncation
    CHECK(k.empty());
}

TEST_CASE("relabel keeps occupations and canonical order") {
    Ket psi = make_bell(BellKind::PsiMinus, "2", "3");
    Ket renamed = relabel_line(psi, "2", "2p");
    CHECK(renamed.registry().has_line("2p"));
    CHECK(!renamed.registry().has_line("2"));
    // "2p" sorts after "2" but the state is the same singlet
    Ket ref = make_bell(BellKind::PsiMinus, "2p", "3");
    CHECK(fidelity(renamed, ref) == doctest::Approx(1.0).epsilon(1e-12));
}
