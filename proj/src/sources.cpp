#include "loqsim/sources.hpp"

#include <cmath>
#include <numbers>

namespace loqsim::sources {

namespace {

// Integer power; std::pow(0+0i, 0) is NaN territory.
std::complex<double> cpow(std::complex<double> z, int n) {
    std::complex<double> r = 1.0;
    for (int t = 0; t < n; ++t) r *= z;
    return r;
}

// Applies the pair-creation operator S = (a_iP b_jQ - a_iR b_jS)/sqrt2 of the
// configured Bell kind to every term of psi (bin 0 operators).
Ket apply_pair_creation(const Ket& psi, const std::string& i, const std::string& j,
                        BellKind bell) {
    const auto& reg = psi.registry();
    struct Piece {
        Pol pi, pj;
        double c;
    };
    const double s = 1.0 / std::numbers::sqrt2;
    const double sign = (bell == BellKind::PhiPlus || bell == BellKind::PsiPlus) ? 1.0 : -1.0;
    std::vector<Piece> pieces;
    if (bell == BellKind::PhiPlus || bell == BellKind::PhiMinus) {
        pieces = {{Pol::H, Pol::H, s}, {Pol::V, Pol::V, sign * s}};
    } else {
        pieces = {{Pol::H, Pol::V, s}, {Pol::V, Pol::H, sign * s}};
    }

    Ket out(psi.registry_ptr());
    for (const auto& [state, amp] : psi.terms()) {
        for (const auto& piece : pieces) {
            const int mi = reg.index_of(i, piece.pi, 0);
            const int mj = reg.index_of(j, piece.pj, 0);
            FockBasisState t = state;
            // a^dag |n> = sqrt(n+1) |n+1>
            const double f = std::sqrt(double(t.occ[mi]) + 1.0) * std::sqrt(double(t.occ[mj]) + 1.0);
            ++t.occ[mi];
            ++t.occ[mj];
            out.add(t, amp * piece.c * f);
        }
    }
    return out;
}

}  // namespace

Ket spdc_pair(RegistryPtr reg, const std::string& i, const std::string& j, double pair_prob,
              int order, BellKind bell) {
    if (i == j) throw std::invalid_argument("spdc_pair needs two distinct lines");
    if (!reg->has_line(i) || !reg->has_line(j))
        throw std::invalid_argument("spdc_pair on unregistered line");
    if (pair_prob < 0.0 || pair_prob > 0.1)
        throw std::invalid_argument("pair probability must lie in [0, 0.1]");
    if (order != 1 && order != 2) throw std::invalid_argument("emission order must be 1 or 2");

    const Ket vac = Ket::vacuum(reg);
    Ket out = vac;
    if (pair_prob > 0.0) {
        const Ket one = apply_pair_creation(vac, i, j, bell);
        out = add(out, scaled(one, std::sqrt(pair_prob)));
        if (order == 2) {
            const Ket two = apply_pair_creation(one, i, j, bell);
            out = add(out, scaled(two, pair_prob / 2.0));
        }
    }
    return out.normalized();
}

Ket weak_coherent(RegistryPtr reg, const std::string& line, const QubitState& pol, double mu,
                  int n_max) {
    if (!reg->has_line(line)) throw std::invalid_argument("unregistered line: " + line);
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mean photon number must lie in [0, 1]");
    if (n_max < 0) throw std::invalid_argument("negative photon cutoff");

    Ket out(reg);
    for (int n = 0; n <= n_max; ++n) {
        const double coeff = std::exp(-mu / 2.0) * std::pow(mu, n / 2.0) / sqrt_factorial(n);
        // |n> in the polarization mode alpha a_H + beta a_V, split binomially.
        for (int k = 0; k <= n; ++k) {
            const std::complex<double> c =
                coeff * std::sqrt(factorial(n) / (factorial(k) * factorial(n - k))) *
                cpow(pol.alpha, k) * cpow(pol.beta, n - k);
            if (c == std::complex<double>(0.0)) continue;
            FockBasisState s(reg->size());
            s.occ[reg->index_of(line, Pol::H, 0)] = static_cast<std::uint8_t>(k);
            s.occ[reg->index_of(line, Pol::V, 0)] = static_cast<std::uint8_t>(n - k);
            out.add(s, c);
        }
    }
    return out.normalized();
}

Ket single_photon(RegistryPtr reg, const std::string& line, const QubitState& pol) {
    if (!reg->has_line(line)) throw std::invalid_argument("unregistered line: " + line);
    Ket out(reg);
    FockBasisState h(reg->size());
    h.occ[reg->index_of(line, Pol::H, 0)] = 1;
    FockBasisState v(reg->size());
    v.occ[reg->index_of(line, Pol::V, 0)] = 1;
    out.add(h, pol.alpha);
    out.add(v, pol.beta);
    return out.pruned();
}

Ket vacuum_source(RegistryPtr reg) { return Ket::vacuum(reg); }

Ket make_source(RegistryPtr reg, const SourceSpec& spec) {
    switch (spec.kind) {
        case SourceKind::SpdcPair:
            return spdc_pair(reg, spec.lines.at(0), spec.lines.at(1), spec.pair_prob, spec.order,
                             spec.bell);
        case SourceKind::WeakCoherent:
            return weak_coherent(reg, spec.lines.at(0), spec.pol, spec.mu, spec.n_max);
        case SourceKind::SinglePhoton:
            return single_photon(reg, spec.lines.at(0), spec.pol);
        case SourceKind::Vacuum:
            return vacuum_source(reg);
    }
    throw std::logic_error("unreachable source kind");
}

}  // namespace loqsim::sources
