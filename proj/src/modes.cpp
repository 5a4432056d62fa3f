#include "loqsim/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loqsim {

std::string to_string(const ModeLabel& m) {
    return m.line + (m.pol == Pol::H ? "H" : "V") + ":" + std::to_string(m.bin);
}

QubitState::QubitState(std::complex<double> a, std::complex<double> b) : alpha(a), beta(b) {
    const double n = std::norm(a) + std::norm(b);
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("QubitState: coefficients are not normalized");
}

QubitState QubitState::linear(double angle_deg) {
    const double t = angle_deg * std::numbers::pi / 180.0;
    return QubitState(std::cos(t), std::sin(t));
}

QubitState QubitState::named(char c) {
    const double s = 1.0 / std::numbers::sqrt2;
    switch (c) {
        case 'H': return QubitState(1.0, 0.0);
        case 'V': return QubitState(0.0, 1.0);
        case 'P': return QubitState(s, s);
        case 'M': return QubitState(s, -s);
        case 'L': return QubitState(s, std::complex<double>(0.0, -s));
        case 'R': return QubitState(s, std::complex<double>(0.0, s));
        default: throw std::invalid_argument(std::string("unknown polarization letter: ") + c);
    }
}

QubitState QubitState::orthogonal() const {
    return QubitState(-std::conj(beta), std::conj(alpha));
}

std::shared_ptr<const ModeRegistry> ModeRegistry::make(std::vector<std::string> lines,
                                                       RegistryConfig cfg) {
    if (cfg.bins < 1) throw std::invalid_argument("registry needs at least one temporal bin");
    if (cfg.max_total_photons < 1) throw std::invalid_argument("photon truncation must be positive");
    std::sort(lines.begin(), lines.end());
    if (std::adjacent_find(lines.begin(), lines.end()) != lines.end())
        throw std::invalid_argument("duplicate spatial line in registry");

    auto reg = std::shared_ptr<ModeRegistry>(new ModeRegistry());
    reg->cfg_ = cfg;
    reg->lines_ = std::move(lines);
    for (const auto& line : reg->lines_) {
        reg->base_[line] = static_cast<int>(reg->labels_.size());
        for (Pol pol : {Pol::H, Pol::V})
            for (int b = 0; b < cfg.bins; ++b) reg->labels_.push_back({line, pol, b});
    }
    return reg;
}

bool ModeRegistry::has_line(const std::string& line) const { return base_.count(line) != 0; }

int ModeRegistry::line_base(const std::string& line) const {
    auto it = base_.find(line);
    return it == base_.end() ? -1 : it->second;
}

int ModeRegistry::index_of(const std::string& line, Pol pol, int bin) const {
    if (bin < 0 || bin >= cfg_.bins) return -1;
    const int base = line_base(line);
    if (base < 0) return -1;
    return base + static_cast<int>(pol) * cfg_.bins + bin;
}

int ModeRegistry::index_of(const ModeLabel& m) const { return index_of(m.line, m.pol, m.bin); }

bool ModeRegistry::same_as(const ModeRegistry& other) const {
    return labels_ == other.labels_ && cfg_ == other.cfg_;
}

}  // namespace loqsim
