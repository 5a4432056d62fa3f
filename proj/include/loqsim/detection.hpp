#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "loqsim/ket.hpp"

namespace loqsim::detection {

enum class AnalysisBasis { HV, PM, Circ, Polarizer };

/// A threshold (non-number-resolving) detector behind a polarization
/// analyzer on one output line. Polarizer-type detectors pass a single fixed
/// state; the basis types enumerate two outcomes.
struct DetectorSpec {
    std::string name;
    std::string line;
    AnalysisBasis basis{AnalysisBasis::HV};
    double angle_deg = 0.0;                   // Polarizer only
    std::optional<QubitState> fixed_state;    // overrides basis/angle when set
    char fixed_letter = 'p';                  // pattern letter for fixed_state
    bool exclusive = false;                   // herald rule: exactly one photon in the line
};

/// Required detection pattern on ancilla lines: exactly one photon per
/// heralded line (summed over temporal bins), found in the stated outcome.
struct HeraldRule {
    std::vector<std::pair<std::string, QubitState>> required;
};

struct HeraldResult {
    Ket state;                             // conditional state, outcome photons kept
    double probability;                    // P(outcomes | one photon per heralded line)
    double exclusivity_probability;        // P(one photon per heralded line)
    double joint_probability;              // product of the two
};

/// Projects onto: exactly one photon in each heralded line AND the stated
/// outcome for that photon. The detected photon's temporal bin is not
/// resolved; bins stay in the ket and downstream observables sum over them.
/// A zero-probability herald is reported as probability 0 with an empty state.
HeraldResult herald(const Ket& psi, const HeraldRule& rule);

/// (max - min) / (max + min). Throws std::domain_error on an empty or
/// all-zero curve.
double visibility(std::span<const double> curve);

/// Measurement basis of one line: outcomes are `first` and its orthogonal.
struct LineBasis {
    std::string line;
    QubitState first;
};

/// Joint threshold-click statistics of a state for fixed per-line analysis
/// bases. A detector behind an analyzer clicks when at least one photon
/// (any bin) occupies the passed polarization slot; orthogonal photons are
/// absorbed silently. Cells are indexed by which slots clicked per line and
/// whether the line carried exactly one photon, so both plain clicks and
/// herald-style exclusive outcomes can be read off one table.
class ClickTable {
public:
    ClickTable(const Ket& psi, std::vector<LineBasis> bases);

    enum class Slot {
        First,             // >= 1 photon in the first outcome slot
        Second,            // >= 1 photon in the second outcome slot
        ExactlyOneFirst,   // line holds exactly one photon and it is in slot 1
        ExactlyOneSecond,  // line holds exactly one photon and it is in slot 2
    };

    /// Probability that every listed line meets its requirement (other lines
    /// unconstrained).
    double probability(std::span<const std::pair<std::string, Slot>> req) const;

    const std::vector<LineBasis>& bases() const { return bases_; }

private:
    int line_pos(const std::string& line) const;
    std::vector<LineBasis> bases_;
    std::unordered_map<std::uint32_t, double> cells_;
};

/// Conditions on a click in the `first` slot of every listed line
/// (projective realization of the click POVM), renormalized.
Ket conditioned_on_clicks(const Ket& psi, std::span<const LineBasis> bases);

struct ScanSpec {
    std::string line;
    double start_deg = 0.0;
    double stop_deg = 180.0;  // end-inclusive
    int steps = 37;           // number of grid points, >= 2
    std::vector<double> angles() const;
};

struct PatternEntry {
    std::string pattern;     // one outcome letter per detector, declared order
    double probability;      // raw joint click probability
    double fraction;         // probability / sum over patterns at this angle
    std::optional<Ket> state;
};

struct CoincidenceResult {
    std::optional<double> angle_deg;  // empty when there is no scan
    std::vector<PatternEntry> patterns;
    double total_probability = 0.0;   // sum of raw pattern probabilities
};

/// Full-coincidence probabilities (every detector sees >= 1 photon behind
/// its analyzer, summed over temporal bins) for every outcome pattern, per
/// scan angle. The scanned line's detector takes the grid angle.
std::vector<CoincidenceResult> coincidence_scan(const Ket& psi,
                                                const std::vector<DetectorSpec>& detectors,
                                                const std::optional<ScanSpec>& scan,
                                                bool want_states = false);

/// CSV with header `angle_deg,pattern,probability`.
std::string to_csv(std::span<const CoincidenceResult> results);

/// Outcome letters per basis, e.g. HV -> {'H','V'}; polarizer -> {'p'}.
std::vector<std::pair<char, QubitState>> basis_outcomes(const DetectorSpec& det);

}  // namespace loqsim::detection
