#pragma once

#include <compare>
#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace loqsim {

enum class Pol : int { H = 0, V = 1 };

/// One bosonic mode: a (spatial line, polarization, temporal bin) triple.
struct ModeLabel {
    std::string line;
    Pol pol{Pol::H};
    int bin{0};

    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
    friend auto operator<=>(const ModeLabel& a, const ModeLabel& b) {
        if (auto c = a.line <=> b.line; c != 0) return c;
        if (auto c = static_cast<int>(a.pol) <=> static_cast<int>(b.pol); c != 0) return c;
        return a.bin <=> b.bin;
    }
};

std::string to_string(const ModeLabel& m);

/// Pure polarization qubit (coefficients of |H>, |V>). Must be normalized.
struct QubitState {
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};

    QubitState() = default;
    QubitState(std::complex<double> a, std::complex<double> b);

    /// cos(theta)|H> + sin(theta)|V>
    static QubitState linear(double angle_deg);
    /// One of H, V, P (+45), M (-45), L ((|H>-i|V>)/sqrt2), R ((|H>+i|V>)/sqrt2).
    static QubitState named(char c);

    QubitState orthogonal() const;  // (-conj(beta), conj(alpha))
};

struct RegistryConfig {
    int bins = 1;                    // temporal bins per (line, polarization)
    int max_total_photons = 6;       // basis truncation
    double prune_epsilon = 1e-14;    // amplitudes below this are dropped

    friend bool operator==(const RegistryConfig&, const RegistryConfig&) = default;
};

/// Immutable ordered set of modes. Modes are sorted lexicographically by
/// (line, polarization, bin), so serialized states are comparable.
class ModeRegistry {
public:
    static std::shared_ptr<const ModeRegistry> make(std::vector<std::string> lines,
                                                    RegistryConfig cfg = {});

    int size() const { return static_cast<int>(labels_.size()); }
    const RegistryConfig& config() const { return cfg_; }
    int bins() const { return cfg_.bins; }

    const ModeLabel& label(int idx) const { return labels_.at(idx); }
    const std::vector<std::string>& lines() const { return lines_; }

    bool has_line(const std::string& line) const;
    /// Index of the first mode of a line; modes of one line are contiguous,
    /// ordered (H, bin 0..B-1, V, bin 0..B-1).
    int line_base(const std::string& line) const;  // -1 if absent
    int index_of(const std::string& line, Pol pol, int bin) const;  // -1 if absent
    int index_of(const ModeLabel& m) const;

    bool same_as(const ModeRegistry& other) const;

private:
    ModeRegistry() = default;
    std::vector<std::string> lines_;   // sorted
    std::vector<ModeLabel> labels_;
    std::map<std::string, int> base_;
    RegistryConfig cfg_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

}  // namespace loqsim
