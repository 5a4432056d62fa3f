#include "loqsim/optics.hpp"

#include <cmath>
#include <numbers>

namespace loqsim::optics {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
double rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

Eigen::Matrix2cd hwp_matrix(double theta_deg) {
    const double t = 2.0 * rad(theta_deg);
    Eigen::Matrix2cd m;
    m << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    return m;
}

Eigen::Matrix2cd qwp_matrix(double theta_deg) {
    const double c = std::cos(rad(theta_deg));
    const double s = std::sin(rad(theta_deg));
    Eigen::Matrix2cd m;
    m << c * c + kI * s * s, (1.0 - kI) * s * c, (1.0 - kI) * s * c, s * s + kI * c * c;
    return m;
}

Eigen::Matrix2cd pauli_matrix(PauliKind k) {
    Eigen::Matrix2cd m;
    switch (k) {
        case PauliKind::X: m << 0, 1, 1, 0; break;
        case PauliKind::Y: m << 0, -kI, kI, 0; break;
        case PauliKind::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::Matrix2cd rotation_to_h(const QubitState& q) {
    Eigen::Matrix2cd m;
    m << std::conj(q.alpha), std::conj(q.beta), -q.beta, q.alpha;
    return m;
}

Ket apply_polarization_unitary(const Ket& psi, const std::string& line,
                               const Eigen::Matrix2cd& u) {
    const auto& reg = psi.registry();
    if (!reg.has_line(line)) throw std::invalid_argument("unregistered line: " + line);
    Ket out = psi;
    for (int b = 0; b < reg.bins(); ++b) {
        std::vector<ModeLabel> modes{{line, Pol::H, b}, {line, Pol::V, b}};
        out = apply_mode_unitary(out, modes, u);
    }
    return out;
}

Ket apply_hwp(const Ket& psi, const std::string& line, double theta_deg) {
    return apply_polarization_unitary(psi, line, hwp_matrix(theta_deg));
}

Ket apply_qwp(const Ket& psi, const std::string& line, double theta_deg) {
    return apply_polarization_unitary(psi, line, qwp_matrix(theta_deg));
}

Ket apply_pauli(const Ket& psi, const std::string& line, PauliKind k) {
    return apply_polarization_unitary(psi, line, pauli_matrix(k));
}

Ket apply_pbs(const Ket& psi, const std::string& a, const std::string& b,
              const std::string& out_a, const std::string& out_b) {
    if (a == b) throw std::invalid_argument("pbs needs two distinct lines");
    const auto& reg = psi.registry();
    // H transmits, V swaps lines; then the ports are renamed.
    Eigen::Matrix2cd swap;
    swap << 0, 1, 1, 0;
    Ket out = psi;
    for (int bin = 0; bin < reg.bins(); ++bin) {
        std::vector<ModeLabel> v_modes{{a, Pol::V, bin}, {b, Pol::V, bin}};
        out = apply_mode_unitary(out, v_modes, swap);
    }
    out = relabel_line(out, a, out_a);
    out = relabel_line(out, b, out_b);
    return out;
}

Ket apply_pbs45(const Ket& psi, const std::string& a, const std::string& b,
                const std::string& out_a, const std::string& out_b) {
    Ket out = apply_hwp(psi, a, 22.5);
    out = apply_hwp(out, b, 22.5);
    out = apply_pbs(out, a, b, out_a, out_b);
    out = apply_hwp(out, out_a, 22.5);
    out = apply_hwp(out, out_b, 22.5);
    return out;
}

Ket apply_mismatch(const Ket& psi, const std::string& line, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("mismatch overlap must lie in [0, 1]");
    const auto& reg = psi.registry();
    if (reg.bins() < 2) throw std::invalid_argument("mismatch needs at least two temporal bins");
    Eigen::Matrix2cd m;
    const double r = std::sqrt(1.0 - lambda * lambda);
    m << lambda, -r, r, lambda;
    Ket out = psi;
    for (Pol pol : {Pol::H, Pol::V}) {
        std::vector<ModeLabel> modes{{line, pol, 0}, {line, pol, 1}};
        out = apply_mode_unitary(out, modes, m);
    }
    return out;
}

Projection apply_polarizer(const Ket& psi, const std::string& line, double theta_deg) {
    return project_line_polarization(psi, line, QubitState::linear(theta_deg));
}

Eigen::Matrix4cd pbs_two_line_matrix() {
    // Basis (a_H, a_V, b_H, b_V) -> (c_H, c_V, d_H, d_V).
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 1;  // a_H -> c_H
    m(3, 1) = 1;  // a_V -> d_V
    m(2, 2) = 1;  // b_H -> d_H
    m(1, 3) = 1;  // b_V -> c_V
    return m;
}

Eigen::Matrix4cd pbs45_two_line_matrix() {
    Eigen::Matrix4cd h2 = Eigen::Matrix4cd::Zero();
    h2.block<2, 2>(0, 0) = hwp_matrix(22.5);
    h2.block<2, 2>(2, 2) = hwp_matrix(22.5);
    return h2 * pbs_two_line_matrix() * h2;
}

Projection apply_element(const Ket& psi, const ElementSpec& e) {
    switch (e.kind) {
        case ElementKind::Hwp:
            return {apply_hwp(psi, e.in_lines.at(0), e.angle_deg), 1.0};
        case ElementKind::Qwp:
            return {apply_qwp(psi, e.in_lines.at(0), e.angle_deg), 1.0};
        case ElementKind::Pauli:
            return {apply_pauli(psi, e.in_lines.at(0), e.pauli), 1.0};
        case ElementKind::Mismatch:
            return {apply_mismatch(psi, e.in_lines.at(0), e.lambda), 1.0};
        case ElementKind::Polarizer:
            return apply_polarizer(psi, e.in_lines.at(0), e.angle_deg);
        case ElementKind::Pbs:
            return {apply_pbs(psi, e.in_lines.at(0), e.in_lines.at(1), e.out_lines.at(0),
                              e.out_lines.at(1)),
                    1.0};
        case ElementKind::Pbs45:
            return {apply_pbs45(psi, e.in_lines.at(0), e.in_lines.at(1), e.out_lines.at(0),
                                e.out_lines.at(1)),
                    1.0};
    }
    throw std::logic_error("unreachable element kind");
}

}  // namespace loqsim::optics
