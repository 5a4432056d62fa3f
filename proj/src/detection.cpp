#include "loqsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "loqsim/optics.hpp"

namespace loqsim::detection {

namespace {

// Rotates each listed line into its analysis frame (first outcome -> H slot).
Ket rotate_to_bases(const Ket& psi, std::span<const LineBasis> bases) {
    Ket out = psi;
    for (const auto& b : bases)
        out = optics::apply_polarization_unitary(out, b.line, optics::rotation_to_h(b.first));
    return out;
}

int line_total(const FockBasisState& s, const ModeRegistry& reg, const std::string& line) {
    const int base = reg.line_base(line);
    int t = 0;
    for (int k = 0; k < 2 * reg.bins(); ++k) t += s.occ[base + k];
    return t;
}

int slot_total(const FockBasisState& s, const ModeRegistry& reg, const std::string& line, Pol pol) {
    int t = 0;
    for (int b = 0; b < reg.bins(); ++b) t += s.occ[reg.index_of(line, pol, b)];
    return t;
}

}  // namespace

HeraldResult herald(const Ket& psi, const HeraldRule& rule) {
    const auto& reg = psi.registry();
    std::set<std::string> seen;
    std::vector<LineBasis> bases;
    for (const auto& [line, outcome] : rule.required) {
        if (!reg.has_line(line)) throw std::invalid_argument("herald on unregistered line: " + line);
        if (!seen.insert(line).second)
            throw std::invalid_argument("herald lists line twice: " + line);
        bases.push_back({line, outcome});
    }

    const Ket rotated = rotate_to_bases(psi, bases);
    const double total = rotated.norm_sq();

    double excl_mass = 0.0;
    double joint_mass = 0.0;
    Ket kept(rotated.registry_ptr());
    for (const auto& [s, v] : rotated.terms()) {
        bool excl = true;
        bool pass = true;
        for (const auto& b : bases) {
            const int n = line_total(s, reg, b.line);
            if (n != 1) {
                excl = false;
                pass = false;
                break;
            }
            if (slot_total(s, reg, b.line, Pol::V) != 0) pass = false;
        }
        if (!excl) continue;
        const double m = std::norm(v);
        excl_mass += m;
        if (pass) {
            joint_mass += m;
            kept.add(s, v);
        }
    }

    HeraldResult res{Ket(psi.registry_ptr()), 0.0, 0.0, 0.0};
    if (total <= 0.0 || joint_mass <= 0.0) {
        res.exclusivity_probability = total > 0.0 ? excl_mass / total : 0.0;
        return res;  // zero-probability herald, reported not thrown
    }
    res.exclusivity_probability = excl_mass / total;
    res.joint_probability = joint_mass / total;
    res.probability = joint_mass / excl_mass;

    Ket state = kept.normalized();
    // Undo the analysis rotations; the detected photons stay in the ket in
    // their outcome states, purification bins included.
    for (const auto& b : bases)
        state = optics::apply_polarization_unitary(state, b.line,
                                                   optics::rotation_to_h(b.first).adjoint());
    res.state = state.with_norm_tracked(psi.norm_tracked() * res.joint_probability);
    return res;
}

double visibility(std::span<const double> curve) {
    if (curve.empty()) throw std::domain_error("visibility of an empty curve");
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    if (*hi + *lo <= 0.0) throw std::domain_error("visibility of an all-zero curve");
    return (*hi - *lo) / (*hi + *lo);
}

ClickTable::ClickTable(const Ket& psi, std::vector<LineBasis> bases) : bases_(std::move(bases)) {
    if (bases_.size() > 10) throw std::invalid_argument("too many analyzed lines");
    const auto& reg = psi.registry();
    for (const auto& b : bases_)
        if (!reg.has_line(b.line)) throw std::invalid_argument("unregistered line: " + b.line);

    const Ket rotated = rotate_to_bases(psi, bases_);
    const double total = rotated.norm_sq();
    if (total <= 0.0) return;

    for (const auto& [s, v] : rotated.terms()) {
        std::uint32_t key = 0;
        for (size_t i = 0; i < bases_.size(); ++i) {
            const int first = slot_total(s, reg, bases_[i].line, Pol::H);
            const int second = slot_total(s, reg, bases_[i].line, Pol::V);
            if (first > 0) key |= 1u << (3 * i);
            if (second > 0) key |= 1u << (3 * i + 1);
            if (first + second == 1) key |= 1u << (3 * i + 2);
        }
        cells_[key] += std::norm(v) / total;
    }
}

int ClickTable::line_pos(const std::string& line) const {
    for (size_t i = 0; i < bases_.size(); ++i)
        if (bases_[i].line == line) return static_cast<int>(i);
    throw std::invalid_argument("line not analyzed: " + line);
}

double ClickTable::probability(std::span<const std::pair<std::string, Slot>> req) const {
    std::uint32_t need = 0;
    for (const auto& [line, slot] : req) {
        const int pos = line_pos(line);
        switch (slot) {
            case Slot::First: need |= 1u << (3 * pos); break;
            case Slot::Second: need |= 1u << (3 * pos + 1); break;
            case Slot::ExactlyOneFirst: need |= (1u << (3 * pos)) | (1u << (3 * pos + 2)); break;
            case Slot::ExactlyOneSecond:
                need |= (1u << (3 * pos + 1)) | (1u << (3 * pos + 2));
                break;
        }
    }
    double p = 0.0;
    for (const auto& [key, mass] : cells_)
        if ((key & need) == need) p += mass;
    return p;
}

Ket conditioned_on_clicks(const Ket& psi, std::span<const LineBasis> bases) {
    const auto& reg = psi.registry();
    const Ket rotated = rotate_to_bases(psi, bases);
    auto res = project(rotated, [&](const FockBasisState& s) {
        for (const auto& b : bases)
            if (slot_total(s, reg, b.line, Pol::H) == 0) return false;
        return true;
    });
    if (res.probability == 0.0) return res.state;
    Ket out = res.state;
    for (const auto& b : bases)
        out = optics::apply_polarization_unitary(out, b.line,
                                                 optics::rotation_to_h(b.first).adjoint());
    return out;
}

std::vector<double> ScanSpec::angles() const {
    if (steps < 2) throw std::invalid_argument("scan needs at least two grid points");
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i)
        out[i] = start_deg + (stop_deg - start_deg) * double(i) / double(steps - 1);
    return out;
}

std::vector<std::pair<char, QubitState>> basis_outcomes(const DetectorSpec& det) {
    if (det.fixed_state) return {{det.fixed_letter, *det.fixed_state}};
    switch (det.basis) {
        case AnalysisBasis::HV:
            return {{'H', QubitState::named('H')}, {'V', QubitState::named('V')}};
        case AnalysisBasis::PM:
            return {{'P', QubitState::named('P')}, {'M', QubitState::named('M')}};
        case AnalysisBasis::Circ:
            return {{'L', QubitState::named('L')}, {'R', QubitState::named('R')}};
        case AnalysisBasis::Polarizer:
            return {{'p', QubitState::linear(det.angle_deg)}};
    }
    throw std::logic_error("unreachable basis");
}

std::vector<CoincidenceResult> coincidence_scan(const Ket& psi,
                                                const std::vector<DetectorSpec>& detectors,
                                                const std::optional<ScanSpec>& scan,
                                                bool want_states) {
    const auto& reg = psi.registry();
    std::set<std::string> covered;
    for (const auto& d : detectors) {
        if (!reg.has_line(d.line)) throw std::invalid_argument("detector on unregistered line: " + d.line);
        if (!covered.insert(d.line).second)
            throw std::invalid_argument("two detectors on line " + d.line);
    }
    // Every occupied output line must be watched.
    for (const auto& line : reg.lines()) {
        bool occupied = false;
        for (const auto& [s, v] : psi.terms())
            if (line_total(s, reg, line) > 0) {
                occupied = true;
                break;
            }
        if (occupied && covered.count(line) == 0)
            throw std::invalid_argument("occupied line without a detector: " + line);
    }

    std::vector<std::optional<double>> grid;
    if (scan) {
        for (double a : scan->angles()) grid.emplace_back(a);
    } else {
        grid.emplace_back(std::nullopt);
    }

    std::vector<CoincidenceResult> results;
    for (const auto& angle : grid) {
        std::vector<std::vector<std::pair<char, QubitState>>> outcome_sets;
        for (const auto& d : detectors) {
            DetectorSpec eff = d;
            if (angle && scan->line == d.line) {
                eff.basis = AnalysisBasis::Polarizer;
                eff.angle_deg = *angle;
                eff.fixed_state.reset();
            }
            outcome_sets.push_back(basis_outcomes(eff));
        }

        CoincidenceResult res;
        res.angle_deg = angle;
        // One table per angle: both outcomes of a detector live in one basis.
        std::vector<LineBasis> bases;
        for (size_t i = 0; i < detectors.size(); ++i)
            bases.push_back({detectors[i].line, outcome_sets[i][0].second});
        ClickTable table(psi, bases);

        std::vector<size_t> pick(detectors.size(), 0);
        for (;;) {
            std::string pattern;
            std::vector<std::pair<std::string, ClickTable::Slot>> req;
            for (size_t i = 0; i < detectors.size(); ++i) {
                pattern += outcome_sets[i][pick[i]].first;
                const bool first = pick[i] == 0;
                req.emplace_back(detectors[i].line,
                                 detectors[i].exclusive
                                     ? (first ? ClickTable::Slot::ExactlyOneFirst
                                              : ClickTable::Slot::ExactlyOneSecond)
                                     : (first ? ClickTable::Slot::First
                                              : ClickTable::Slot::Second));
            }
            PatternEntry entry;
            entry.pattern = pattern;
            entry.probability = table.probability(req);
            if (want_states) {
                std::vector<LineBasis> outcome_bases;
                for (size_t i = 0; i < detectors.size(); ++i)
                    outcome_bases.push_back({detectors[i].line, outcome_sets[i][pick[i]].second});
                entry.state = conditioned_on_clicks(psi, outcome_bases);
            }
            res.total_probability += entry.probability;
            res.patterns.push_back(std::move(entry));

            size_t i = 0;
            while (i < pick.size() && ++pick[i] == outcome_sets[i].size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
        for (auto& e : res.patterns)
            e.fraction = res.total_probability > 0.0 ? e.probability / res.total_probability : 0.0;
        results.push_back(std::move(res));
    }
    return results;
}

std::string to_csv(std::span<const CoincidenceResult> results) {
    std::string out = "angle_deg,pattern,probability\n";
    char buf[96];
    for (const auto& r : results) {
        for (const auto& e : r.patterns) {
            if (r.angle_deg)
                std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g\n", *r.angle_deg,
                              e.pattern.c_str(), e.probability);
            else
                std::snprintf(buf, sizeof buf, ",%s,%.17g\n", e.pattern.c_str(), e.probability);
            out += buf;
        }
    }
    return out;
}

}  // namespace loqsim::detection
