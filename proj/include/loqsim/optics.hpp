#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "loqsim/ket.hpp"

namespace loqsim::optics {

// Polarization (H,V) matrices. Conventions are fixed so amplitudes are
// reproducible; observables in the experiments layer do not depend on them.

/// Half-wave plate at fast-axis angle theta: [[cos2t, sin2t], [sin2t, -cos2t]].
Eigen::Matrix2cd hwp_matrix(double theta_deg);

/// Quarter-wave plate: [[c^2 + i s^2, (1-i) s c], [(1-i) s c, s^2 + i c^2]].
Eigen::Matrix2cd qwp_matrix(double theta_deg);

enum class PauliKind { X, Y, Z };
Eigen::Matrix2cd pauli_matrix(PauliKind k);

/// Unitary mapping the given polarization state to |H> (its orthogonal to |V>).
Eigen::Matrix2cd rotation_to_h(const QubitState& q);

/// Applies a 2x2 polarization matrix to one line, identically in every bin.
Ket apply_polarization_unitary(const Ket& psi, const std::string& line,
                               const Eigen::Matrix2cd& u);

Ket apply_hwp(const Ket& psi, const std::string& line, double theta_deg);
Ket apply_qwp(const Ket& psi, const std::string& line, double theta_deg);
Ket apply_pauli(const Ket& psi, const std::string& line, PauliKind k);

/// Polarizing beamsplitter: H transmits (a->out_a, b->out_b), V reflects
/// (a->out_b, b->out_a) with unit phase; applied per temporal bin. The input
/// lines are renamed to the output lines.
Ket apply_pbs(const Ket& psi, const std::string& a, const std::string& b,
              const std::string& out_a, const std::string& out_b);

/// PBS in the +-45 basis: hwp(22.5) on both inputs, pbs, hwp(22.5) on both
/// outputs. |+> transmits, |-> reflects.
Ket apply_pbs45(const Ket& psi, const std::string& a, const std::string& b,
                const std::string& out_a, const std::string& out_b);

/// Partial temporal-mode overlap: a^dag(bin0) -> lambda a^dag(bin0)
/// + sqrt(1-lambda^2) a^dag(bin1) on the line, both polarizations.
Ket apply_mismatch(const Ket& psi, const std::string& line, double lambda);

/// Lossy polarizer at a linear angle; see project_line_polarization.
Projection apply_polarizer(const Ket& psi, const std::string& line, double theta_deg);

/// The 4x4 matrix of a two-line element on basis (a_H, a_V, b_H, b_V),
/// for matrix-level checks.
Eigen::Matrix4cd pbs_two_line_matrix();
Eigen::Matrix4cd pbs45_two_line_matrix();

enum class ElementKind { Hwp, Qwp, Pbs, Pbs45, Polarizer, Mismatch, Pauli };

/// An optical element bound to specific lines, as produced by the netlist
/// compiler.
struct ElementSpec {
    ElementKind kind{ElementKind::Hwp};
    std::vector<std::string> in_lines;   // 1 or 2
    std::vector<std::string> out_lines;  // empty when acting in place
    double angle_deg = 0.0;              // hwp/qwp/polarizer
    double lambda = 1.0;                 // mismatch, in [0, 1]
    PauliKind pauli = PauliKind::X;
};

/// Applies an element; polarizers return their pass probability, unitary
/// elements report probability 1.
Projection apply_element(const Ket& psi, const ElementSpec& e);

}  // namespace loqsim::optics
