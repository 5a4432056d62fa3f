#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "loqsim/modes.hpp"

namespace loqsim {

/// Occupation-number assignment over a registry, one entry per mode.
struct FockBasisState {
    std::vector<std::uint8_t> occ;

    FockBasisState() = default;
    explicit FockBasisState(int n_modes) : occ(n_modes, 0) {}

    int total() const;
    friend bool operator==(const FockBasisState&, const FockBasisState&) = default;
};

struct FockBasisHash {
    std::size_t operator()(const FockBasisState& s) const {
        std::size_t h = 1469598103934665603ull;
        for (auto b : s.occ) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Sparse multi-mode photonic state: FockBasisState -> complex amplitude.
/// Values are treated as immutable once built; every operation below is a
/// pure function returning a new Ket. norm_tracked accumulates the success
/// probability of prior projective steps.
class Ket {
public:
    using Terms = std::unordered_map<FockBasisState, std::complex<double>, FockBasisHash>;

    explicit Ket(RegistryPtr reg) : reg_(std::move(reg)) {}

    static Ket vacuum(RegistryPtr reg);
    static Ket basis(RegistryPtr reg, FockBasisState state);
    /// One photon in the given mode.
    static Ket single(RegistryPtr reg, const ModeLabel& mode);

    const ModeRegistry& registry() const { return *reg_; }
    const RegistryPtr& registry_ptr() const { return reg_; }
    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    double norm_tracked() const { return norm_tracked_; }
    Ket with_norm_tracked(double p) const;

    std::complex<double> amplitude(const FockBasisState& s) const;
    double norm_sq() const;

    Ket normalized() const;  // throws std::domain_error on zero norm
    Ket pruned() const;      // drops |amp| < registry prune_epsilon

    /// Accumulate a term (used while building states). Respects the photon
    /// number truncation of the registry: over-full terms are ignored.
    void add(const FockBasisState& s, std::complex<double> amp);
    void add(std::span<const ModeLabel> photons, std::complex<double> amp);

private:
    RegistryPtr reg_;
    Terms terms_;
    double norm_tracked_ = 1.0;
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// Two-photon Bell state on lines i and j (temporal bin 0):
///   Phi+- = (|H>i|H>j +- |V>i|V>j)/sqrt2, Psi+- = (|H>i|V>j +- |V>i|H>j)/sqrt2
Ket make_bell(RegistryPtr reg, BellKind kind, const std::string& i, const std::string& j);
Ket make_bell(BellKind kind, const std::string& i, const std::string& j, RegistryConfig cfg = {});

/// Product state on disjoint registries; amplitudes and norm_tracked multiply.
/// Terms above the photon truncation of the merged registry are dropped.
Ket tensor(const Ket& a, const Ket& b);

Ket add(const Ket& a, const Ket& b);  // same registry
Ket scaled(const Ket& a, std::complex<double> c);

std::complex<double> inner_product(const Ket& a, const Ket& b);
double fidelity(const Ket& a, const Ket& b);  // |<a|b>|^2, pure states

/// Substitutes a_i^dag -> sum_j U(j,i) a_j^dag on the listed modes and
/// re-expands. Photon number and norm are preserved; U must be unitary
/// within 1e-10.
Ket apply_mode_unitary(const Ket& psi, const std::vector<ModeLabel>& modes,
                       const Eigen::MatrixXcd& u);

struct Projection {
    Ket state;           // renormalized conditional state (empty when p == 0)
    double probability;  // outcome probability; zero-probability is a value,
                         // not an exception, so sweeps can continue
};

/// Keeps basis terms satisfying the predicate, renormalizes.
Projection project(const Ket& psi, const std::function<bool(const FockBasisState&)>& keep);

/// Projects every photon in the line onto the given polarization state
/// (identically in each temporal bin). Multi-photon terms pass only if all
/// photons in the line pass.
Projection project_line_polarization(const Ket& psi, const std::string& line,
                                     const QubitState& q);

/// Renames a spatial line; occupations are carried over, ordering stays canonical.
Ket relabel_line(const Ket& psi, const std::string& from, const std::string& to);

/// One line per term: "<occ,...> <re> <im>", 12 significant digits, terms in
/// ascending lexicographic occupation order.
std::string dump_canonical(const Ket& psi);

double factorial(int n);
double sqrt_factorial(int n);

}  // namespace loqsim
