#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loqsim/detection.hpp"
#include "loqsim/ket.hpp"

namespace loqsim::experiments {

/// Noise knobs of the five-photon bench. mu == 0 selects an ideal
/// single-photon target instead of a weak coherent pulse, so the default
/// configuration reproduces the clean gate exactly.
struct NoiseConfig {
    double lambda23 = 1.0;   // mode overlap at the parity-check junction
    double lambda45 = 1.0;   // mode overlap at the target-side junction
    double pair_prob = 0.05; // SPDC pair probability per pulse
    double mu = 0.0;         // weak coherent mean photon number (0 = single photon)
    int spdc_order = 1;      // 1 or 2
    double prune_epsilon = 1e-14;  // numerics, not physics

    bool ideal_target() const { return mu == 0.0; }
};

/// Overlaps calibrated to the measured junction visibilities
/// (lambda23^2 = 0.82, lambda45^2 = 0.68), mu = 0.05, p = 0.05, order 2.
NoiseConfig nominal_noise();

struct AngleGrid {
    double start_deg = 0.0;
    double stop_deg = 180.0;  // end-inclusive
    int steps = 37;
    std::vector<double> angles() const;
};

struct ZeroHeraldProbability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed local unitary on the two output lines that maps the raw heralded
/// circuit output onto the gate's logic table. Derived once by solving on
/// the four basis inputs plus two superposition probes; input-independent
/// by construction.
struct HeraldCorrection {
    Eigen::Matrix2cd control;  // applied to line 2p
    Eigen::Matrix2cd target;   // applied to line 5p
    std::string name;          // e.g. "I x I"
};
const HeraldCorrection& herald_correction();

struct TruthTableRow {
    std::string input;                 // "HH", "HV", "VH", "VV" (control, target)
    std::string expected;              // correct output pattern
    std::array<double, 4> outputs{};   // P(HH), P(HV), P(VH), P(VV) given herald
    double herald_prob = 0.0;          // herald pattern share of all-setting clicks
    double correct_prob = 0.0;
};

struct TruthTableResult {
    NoiseConfig noise;
    std::array<TruthTableRow, 4> rows;
    double fidelity_mean = 0.0;   // mean of the four correct-output probabilities
    double fidelity_worst = 0.0;  // worst row
};

/// Four basis inputs through the heralded CNOT (ancilla Bell pair, parity
/// check on 2&3, +-basis beamsplitter on 4&5, herald 3p = -, 4p = H),
/// outputs measured in H/V.
TruthTableResult run_cnot_truth_table(const NoiseConfig& noise);

struct EntangleResult {
    NoiseConfig noise;
    double state_fidelity = 0.0;           // heralded output vs the singlet
    std::array<double, 4> hv_patterns{};   // P(HH), P(HV), P(VH), P(VV)
    double unwanted_probability = 0.0;     // P(HH) + P(VV)
    double desired_unwanted_ratio = 0.0;   // inf reported as 0 unwanted
    std::vector<double> angles_deg;
    std::vector<double> fringe;            // P2 scan, P5 fixed at +45
    double visibility = 0.0;
    double herald_prob = 0.0;
};

/// Control |->, target |H>: the heralded output is the singlet. Reports the
/// H/V pattern shares and the polarizer fringe with P5 fixed at +45 degrees.
EntangleResult run_entangling_fringe(const NoiseConfig& noise, const AngleGrid& grid);

struct TeleportBranch {
    std::string outcome;       // "psi-", "psi+", "phi+", "phi-"
    std::string pattern;       // analyzer pattern on (2p, 5p), e.g. "-H"
    QubitState target;         // analytic conditional state of photon 1
    double probability = 0.0;  // share among the four outcomes
    double fidelity = 0.0;             // vs target
    double fidelity_corrected = 0.0;   // vs input, after the branch Pauli
    std::vector<double> fringe;        // P1 scan (through a 45-degree QWP)
};

struct TeleportResult {
    QubitState input;
    NoiseConfig noise;
    std::vector<double> angles_deg;
    std::array<TeleportBranch, 4> branches;
    double average_fidelity = 0.0;            // probability-weighted over branches
    double average_fidelity_corrected = 0.0;  // filled by apply_feedforward
    double psi_offset_deg = 0.0;              // fringe phase gap, psi+ vs psi-
    double herald_prob = 0.0;
};

/// Teleports the input from photon 5 to photon 1 through the gate acting as
/// a complete Bell-state analyzer on (2, 5): herald (3p = -, 4p = H), then
/// 2p read in the +- basis and 5p in H/V.
TeleportResult run_teleportation(const QubitState& input, const NoiseConfig& noise,
                                 const AngleGrid& grid);

/// Applies the outcome-indexed Pauli (I, Z, XZ, X for psi-, psi+, phi+,
/// phi-) so every conditional state is compared against the input.
TeleportResult apply_feedforward(const TeleportResult& result);

/// Measure-in-a-random-basis-and-resend strategy, averaged over uniform
/// pure inputs. The analytic average is exactly 2/3.
double classical_baseline_analytic();
double classical_baseline_monte_carlo(int samples, std::uint64_t seed);

/// Phase of an a + b cos(2 theta - phi) fringe, least squares on the grid.
double fringe_phase_deg(std::span<const double> angles_deg, std::span<const double> probs);

}  // namespace loqsim::experiments
