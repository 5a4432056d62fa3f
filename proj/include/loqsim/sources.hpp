#pragma once

#include <string>

#include "loqsim/ket.hpp"

namespace loqsim::sources {

enum class SourceKind { SpdcPair, WeakCoherent, SinglePhoton, Vacuum };

struct SourceSpec {
    SourceKind kind{SourceKind::SinglePhoton};
    std::vector<std::string> lines;  // 1 or 2
    double pair_prob = 0.05;         // SPDC, in [0, 0.1]
    double mu = 0.05;                // weak coherent mean photon number, in [0, 1]
    int order = 2;                   // SPDC emission truncation, 1 or 2
    int n_max = 2;                   // weak coherent photon-number cutoff
    BellKind bell = BellKind::PsiMinus;
    QubitState pol;                  // single photon / weak coherent polarization
};

/// Truncated type-II down-conversion on lines (i, j), photons in bin 0:
///   N [ |vac> + sqrt(p) S |vac> + (p/2) S^2 |vac> ]   (order 2; order 1 drops
/// the last term), where S = (a_iH b_jV - a_iV b_jH)/sqrt2 in creation
/// operators for the configured Bell kind.
Ket spdc_pair(RegistryPtr reg, const std::string& i, const std::string& j,
              double pair_prob, int order, BellKind bell = BellKind::PsiMinus);

/// Coherent state of mean photon number mu in one polarization mode,
/// truncated at n_max photons and renormalized.
Ket weak_coherent(RegistryPtr reg, const std::string& line, const QubitState& pol,
                  double mu, int n_max = 2);

/// alpha|H> + beta|V> in bin 0. The input must be normalized.
Ket single_photon(RegistryPtr reg, const std::string& line, const QubitState& pol);

Ket vacuum_source(RegistryPtr reg);

Ket make_source(RegistryPtr reg, const SourceSpec& spec);

}  // namespace loqsim::sources
