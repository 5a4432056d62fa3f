#include "loqsim/ket.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace loqsim {

namespace {

constexpr int kMaxFactorial = 24;

const std::array<double, kMaxFactorial + 1>& factorial_table() {
    static const auto table = [] {
        std::array<double, kMaxFactorial + 1> t{};
        t[0] = 1.0;
        for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
        return t;
    }();
    return table;
}

}  // namespace

double factorial(int n) { return factorial_table().at(n); }
double sqrt_factorial(int n) { return std::sqrt(factorial_table().at(n)); }

int FockBasisState::total() const {
    int t = 0;
    for (auto b : occ) t += b;
    return t;
}

Ket Ket::vacuum(RegistryPtr reg) {
    Ket k(reg);
    k.add(FockBasisState(reg->size()), 1.0);
    return k;
}

Ket Ket::basis(RegistryPtr reg, FockBasisState state) {
    if (static_cast<int>(state.occ.size()) != reg->size())
        throw std::invalid_argument("basis state length does not match registry");
    if (state.total() > reg->config().max_total_photons)
        throw std::invalid_argument("basis state exceeds the photon truncation");
    Ket k(reg);
    k.add(state, 1.0);
    return k;
}

Ket Ket::single(RegistryPtr reg, const ModeLabel& mode) {
    const int idx = reg->index_of(mode);
    if (idx < 0) throw std::invalid_argument("mode not registered: " + to_string(mode));
    FockBasisState s(reg->size());
    s.occ[idx] = 1;
    return basis(reg, s);
}

Ket Ket::with_norm_tracked(double p) const {
    if (p < 0.0 || p > 1.0 + 1e-12) throw std::invalid_argument("norm_tracked outside [0, 1]");
    Ket k = *this;
    k.norm_tracked_ = std::min(p, 1.0);
    return k;
}

std::complex<double> Ket::amplitude(const FockBasisState& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? std::complex<double>(0.0) : it->second;
}

double Ket::norm_sq() const {
    double n = 0.0;
    for (const auto& [state, amp] : terms_) n += std::norm(amp);
    return n;
}

Ket Ket::normalized() const {
    const double n = norm_sq();
    if (n <= 0.0) throw std::domain_error("cannot normalize a zero state");
    const double inv = 1.0 / std::sqrt(n);
    Ket k(reg_);
    k.norm_tracked_ = norm_tracked_;
    for (const auto& [state, amp] : terms_) k.terms_.emplace(state, amp * inv);
    return k;
}

Ket Ket::pruned() const {
    const double eps = reg_->config().prune_epsilon;
    Ket k(reg_);
    k.norm_tracked_ = norm_tracked_;
    for (const auto& [state, amp] : terms_)
        if (std::abs(amp) >= eps) k.terms_.emplace(state, amp);
    return k;
}

void Ket::add(const FockBasisState& s, std::complex<double> amp) {
    if (s.total() > reg_->config().max_total_photons) return;
    auto [it, inserted] = terms_.try_emplace(s, amp);
    if (!inserted) it->second += amp;
}

void Ket::add(std::span<const ModeLabel> photons, std::complex<double> amp) {
    FockBasisState s(reg_->size());
    for (const auto& m : photons) {
        const int idx = reg_->index_of(m);
        if (idx < 0) throw std::invalid_argument("mode not registered: " + to_string(m));
        ++s.occ[idx];
    }
    add(s, amp);
}

Ket make_bell(RegistryPtr reg, BellKind kind, const std::string& i, const std::string& j) {
    if (i == j) throw std::invalid_argument("Bell state needs two distinct lines");
    if (!reg->has_line(i) || !reg->has_line(j))
        throw std::invalid_argument("Bell state on unregistered line");

    const double s = 1.0 / std::numbers::sqrt2;
    const bool phi = (kind == BellKind::PhiPlus || kind == BellKind::PhiMinus);
    const double sign = (kind == BellKind::PhiPlus || kind == BellKind::PsiPlus) ? 1.0 : -1.0;

    Ket k(reg);
    if (phi) {
        k.add(std::array{ModeLabel{i, Pol::H, 0}, ModeLabel{j, Pol::H, 0}}, s);
        k.add(std::array{ModeLabel{i, Pol::V, 0}, ModeLabel{j, Pol::V, 0}}, sign * s);
    } else {
        k.add(std::array{ModeLabel{i, Pol::H, 0}, ModeLabel{j, Pol::V, 0}}, s);
        k.add(std::array{ModeLabel{i, Pol::V, 0}, ModeLabel{j, Pol::H, 0}}, sign * s);
    }
    return k;
}

Ket make_bell(BellKind kind, const std::string& i, const std::string& j, RegistryConfig cfg) {
    return make_bell(ModeRegistry::make({i, j}, cfg), kind, i, j);
}

Ket tensor(const Ket& a, const Ket& b) {
    const auto& ra = a.registry();
    const auto& rb = b.registry();
    if (!(ra.config() == rb.config()))
        throw std::invalid_argument("tensor: registry configurations differ");
    for (const auto& line : rb.lines())
        if (ra.has_line(line)) throw std::invalid_argument("tensor: registries overlap on line " + line);

    std::vector<std::string> lines = ra.lines();
    lines.insert(lines.end(), rb.lines().begin(), rb.lines().end());
    auto merged = ModeRegistry::make(std::move(lines), ra.config());

    // Mode index maps into the merged registry.
    std::vector<int> map_a(ra.size()), map_b(rb.size());
    for (int i = 0; i < ra.size(); ++i) map_a[i] = merged->index_of(ra.label(i));
    for (int i = 0; i < rb.size(); ++i) map_b[i] = merged->index_of(rb.label(i));

    const int n_max = merged->config().max_total_photons;
    Ket out(merged);
    out = out.with_norm_tracked(std::min(1.0, a.norm_tracked() * b.norm_tracked()));
    for (const auto& [sa, va] : a.terms()) {
        const int ta = sa.total();
        for (const auto& [sb, vb] : b.terms()) {
            if (ta + sb.total() > n_max) continue;  // truncation drops the tail
            FockBasisState s(merged->size());
            for (size_t i = 0; i < sa.occ.size(); ++i) s.occ[map_a[i]] = sa.occ[i];
            for (size_t i = 0; i < sb.occ.size(); ++i) s.occ[map_b[i]] = sb.occ[i];
            out.add(s, va * vb);
        }
    }
    return out.pruned();
}

Ket add(const Ket& a, const Ket& b) {
    if (!a.registry().same_as(b.registry()))
        throw std::invalid_argument("add: registries differ");
    Ket out = a;
    for (const auto& [s, v] : b.terms()) out.add(s, v);
    return out.pruned();
}

Ket scaled(const Ket& a, std::complex<double> c) {
    Ket out(a.registry_ptr());
    out = out.with_norm_tracked(a.norm_tracked());
    for (const auto& [s, v] : a.terms()) out.add(s, v * c);
    return out;
}

std::complex<double> inner_product(const Ket& a, const Ket& b) {
    if (!a.registry().same_as(b.registry()))
        throw std::invalid_argument("inner_product: registries differ");
    // Iterate the smaller map.
    const Ket& small = a.terms().size() <= b.terms().size() ? a : b;
    const Ket& large = a.terms().size() <= b.terms().size() ? b : a;
    std::complex<double> acc = 0.0;
    for (const auto& [s, v] : small.terms()) {
        const auto w = large.amplitude(s);
        acc += (&small == &a) ? std::conj(v) * w : std::conj(w) * v;
    }
    return acc;
}

double fidelity(const Ket& a, const Ket& b) { return std::norm(inner_product(a, b)); }

namespace {

// Enumerates e in N^k with sum(e) = n, calling f(e, multinomial(n; e) * prod
// col[j]^e[j]) for every composition with a non-vanishing coefficient.
void for_each_composition(const std::vector<std::complex<double>>& col, int n,
                          std::vector<int>& e, int pos, std::complex<double> coeff, int left,
                          const std::function<void(const std::vector<int>&, std::complex<double>)>& f) {
    const int k = static_cast<int>(col.size());
    if (pos == k - 1) {
        if (left > 0 && col[pos] == std::complex<double>(0.0)) return;
        std::complex<double> c = coeff;
        for (int t = 0; t < left; ++t) c *= col[pos];
        e[pos] = left;
        f(e, c / factorial(left));
        e[pos] = 0;
        return;
    }
    const bool zero = col[pos] == std::complex<double>(0.0);
    std::complex<double> powed = coeff;
    for (int take = 0; take <= left; ++take) {
        if (take > 0) {
            if (zero) break;
            powed *= col[pos];
        }
        e[pos] = take;
        for_each_composition(col, n, e, pos + 1, powed / factorial(take), left - take, f);
    }
    e[pos] = 0;
}

}  // namespace

Ket apply_mode_unitary(const Ket& psi, const std::vector<ModeLabel>& modes,
                       const Eigen::MatrixXcd& u) {
    const int k = static_cast<int>(modes.size());
    if (u.rows() != k || u.cols() != k)
        throw std::invalid_argument("unitary size does not match the mode list");
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("matrix is not unitary within 1e-10");

    const auto& reg = psi.registry();
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) {
        idx[i] = reg.index_of(modes[i]);
        if (idx[i] < 0) throw std::invalid_argument("mode not registered: " + to_string(modes[i]));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (idx[i] == idx[j]) throw std::invalid_argument("duplicate mode in unitary application");
    if ((u - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() == 0.0) return psi;

    std::vector<std::vector<std::complex<double>>> cols(k);
    for (int i = 0; i < k; ++i) {
        cols[i].resize(k);
        for (int j = 0; j < k; ++j) cols[i][j] = u(j, i);
    }

    Ket out(psi.registry_ptr());
    out = out.with_norm_tracked(psi.norm_tracked());

    std::vector<int> n(k);
    for (const auto& [state, amp] : psi.terms()) {
        bool touched = false;
        for (int i = 0; i < k; ++i) {
            n[i] = state.occ[idx[i]];
            touched |= n[i] != 0;
        }
        if (!touched) {
            out.add(state, amp);
            continue;
        }

        FockBasisState base = state;
        double in_norm = 1.0;
        for (int i = 0; i < k; ++i) {
            base.occ[idx[i]] = 0;
            in_norm *= sqrt_factorial(n[i]);
        }

        // Polynomial in the output creation operators, restricted to the k
        // touched modes; coefficients are true polynomial coefficients.
        std::unordered_map<FockBasisState, std::complex<double>, FockBasisHash> poly;
        poly.emplace(FockBasisState(k), amp / in_norm);
        std::vector<int> e(k, 0);
        for (int i = 0; i < k; ++i) {
            if (n[i] == 0) continue;
            std::unordered_map<FockBasisState, std::complex<double>, FockBasisHash> next;
            for_each_composition(
                cols[i], n[i], e, 0, std::complex<double>(factorial(n[i])), n[i],
                [&](const std::vector<int>& exp, std::complex<double> c) {
                    for (const auto& [mono, mc] : poly) {
                        FockBasisState m = mono;
                        for (int j = 0; j < k; ++j) m.occ[j] = static_cast<std::uint8_t>(m.occ[j] + exp[j]);
                        auto [it, inserted] = next.try_emplace(m, mc * c);
                        if (!inserted) it->second += mc * c;
                    }
                });
            poly = std::move(next);
        }

        for (const auto& [mono, c] : poly) {
            FockBasisState s = base;
            double out_norm = 1.0;  // prod a_j^dag^(m_j) |0> = sqrt(prod m_j!) |m>
            for (int j = 0; j < k; ++j) {
                s.occ[idx[j]] = mono.occ[j];
                out_norm *= sqrt_factorial(mono.occ[j]);
            }
            out.add(s, c * out_norm);
        }
    }
    return out.pruned();
}

Projection project(const Ket& psi, const std::function<bool(const FockBasisState&)>& keep) {
    const double total = psi.norm_sq();
    Ket kept(psi.registry_ptr());
    double mass = 0.0;
    for (const auto& [s, v] : psi.terms()) {
        if (keep(s)) {
            kept.add(s, v);
            mass += std::norm(v);
        }
    }
    if (total <= 0.0 || mass <= 0.0) return {Ket(psi.registry_ptr()), 0.0};
    const double p = mass / total;
    Ket state = kept.normalized();
    state = state.with_norm_tracked(psi.norm_tracked() * p);
    return {std::move(state), p};
}

Projection project_line_polarization(const Ket& psi, const std::string& line,
                                     const QubitState& q) {
    const auto& reg = psi.registry();
    if (!reg.has_line(line)) throw std::invalid_argument("unregistered line: " + line);

    Eigen::Matrix2cd rot;
    rot << std::conj(q.alpha), std::conj(q.beta), -q.beta, q.alpha;

    Ket rotated = psi;
    for (int b = 0; b < reg.bins(); ++b) {
        std::vector<ModeLabel> modes{{line, Pol::H, b}, {line, Pol::V, b}};
        rotated = apply_mode_unitary(rotated, modes, rot);
    }
    std::vector<int> v_slots;
    for (int b = 0; b < reg.bins(); ++b) v_slots.push_back(reg.index_of(line, Pol::V, b));

    auto res = project(rotated, [&](const FockBasisState& s) {
        for (int i : v_slots)
            if (s.occ[i] != 0) return false;
        return true;
    });
    if (res.probability == 0.0) return res;

    Ket back = res.state;
    for (int b = 0; b < reg.bins(); ++b) {
        std::vector<ModeLabel> modes{{line, Pol::H, b}, {line, Pol::V, b}};
        back = apply_mode_unitary(back, modes, rot.adjoint());
    }
    back = back.with_norm_tracked(res.state.norm_tracked());
    return {std::move(back), res.probability};
}

Ket relabel_line(const Ket& psi, const std::string& from, const std::string& to) {
    const auto& reg = psi.registry();
    if (!reg.has_line(from)) throw std::invalid_argument("unregistered line: " + from);
    if (reg.has_line(to)) throw std::invalid_argument("line already exists: " + to);

    std::vector<std::string> lines;
    for (const auto& l : reg.lines()) lines.push_back(l == from ? to : l);
    auto renamed = ModeRegistry::make(std::move(lines), reg.config());

    std::vector<int> map(reg.size());
    for (int i = 0; i < reg.size(); ++i) {
        ModeLabel m = reg.label(i);
        if (m.line == from) m.line = to;
        map[i] = renamed->index_of(m);
    }

    Ket out(renamed);
    out = out.with_norm_tracked(psi.norm_tracked());
    for (const auto& [s, v] : psi.terms()) {
        FockBasisState t(renamed->size());
        for (size_t i = 0; i < s.occ.size(); ++i) t.occ[map[i]] = s.occ[i];
        out.add(t, v);
    }
    return out;
}

std::string dump_canonical(const Ket& psi) {
    std::vector<const FockBasisState*> order;
    order.reserve(psi.terms().size());
    for (const auto& [s, v] : psi.terms()) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const FockBasisState* a, const FockBasisState* b) { return a->occ < b->occ; });

    std::string out;
    char buf[64];
    for (const auto* s : order) {
        for (size_t i = 0; i < s->occ.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(int(s->occ[i]));
        }
        const auto amp = psi.amplitude(*s);
        std::snprintf(buf, sizeof buf, " %.12g %.12g\n", amp.real(), amp.imag());
        out += buf;
    }
    return out;
}

}  // namespace loqsim
