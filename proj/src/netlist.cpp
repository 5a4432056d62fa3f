#include "loqsim/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace loqsim::netlist {

const char* diag_code_name(DiagCode c) {
    switch (c) {
        case DiagCode::SyntaxError: return "SyntaxError";
        case DiagCode::UnknownKeyword: return "UnknownKeyword";
        case DiagCode::UnknownKey: return "UnknownKey";
        case DiagCode::MissingKey: return "MissingKey";
        case DiagCode::DuplicateKey: return "DuplicateKey";
        case DiagCode::BadValue: return "BadValue";
        case DiagCode::UndeclaredLine: return "UndeclaredLine";
        case DiagCode::LineNeverDetected: return "LineNeverDetected";
        case DiagCode::DuplicateDetector: return "DuplicateDetector";
        case DiagCode::ParamOutOfRange: return "ParamOutOfRange";
        case DiagCode::DuplicateLine: return "DuplicateLine";
        case DiagCode::MultipleScan: return "MultipleScan";
        case DiagCode::DuplicateSet: return "DuplicateSet";
    }
    return "Unknown";
}

std::string Diagnostic::render(const std::string& filename) const {
    std::ostringstream os;
    os << filename << ":" << pos.line << ":" << pos.col << ": error[" << diag_code_name(code)
       << "]: " << message;
    return os.str();
}

namespace {

struct Token {
    std::string text;
    SourcePos pos;
};

bool word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '+' || c == '-';
}

// Splits one physical line into tokens; '=' and '->' are their own tokens.
bool lex_line(const std::string& text, int line_no, std::vector<Token>& out,
              std::vector<Diagnostic>& diags) {
    size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') break;  // comment to end of line
        const SourcePos pos{line_no, static_cast<int>(i) + 1};
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.push_back({"->", pos});
            i += 2;
            continue;
        }
        if (c == '=') {
            out.push_back({"=", pos});
            ++i;
            continue;
        }
        if (!word_char(c)) {
            diags.push_back({DiagCode::SyntaxError, pos,
                             std::string("invalid character '") + char(c) + "'"});
            return false;
        }
        size_t j = i;
        while (j < text.size() && word_char(text[j])) {
            if (text[j] == '-' && j + 1 < text.size() && text[j + 1] == '>') break;
            ++j;
        }
        out.push_back({text.substr(i, j - i), pos});
        i = j;
    }
    return true;
}

struct LineParser {
    const std::vector<Token>& toks;
    size_t at = 0;
    std::vector<Diagnostic>& diags;

    bool done() const { return at >= toks.size(); }
    const Token& peek() const { return toks[at]; }
    const Token& take() { return toks[at++]; }
    SourcePos here() const {
        if (!done()) return toks[at].pos;
        const auto& last = toks.back();
        return {last.pos.line, last.pos.col + static_cast<int>(last.text.size())};
    }

    bool fail(DiagCode code, SourcePos pos, std::string msg) {
        diags.push_back({code, pos, std::move(msg)});
        return false;
    }

    bool expect_word(std::string& out, const char* what) {
        if (done() || peek().text == "=" || peek().text == "->")
            return fail(DiagCode::SyntaxError, here(), std::string("expected ") + what);
        out = take().text;
        return true;
    }

    bool parse_kvs(std::vector<KeyValue>& out) {
        while (!done()) {
            const Token key = take();
            if (key.text == "=" || key.text == "->")
                return fail(DiagCode::SyntaxError, key.pos, "expected key=value");
            if (done() || peek().text != "=")
                return fail(DiagCode::SyntaxError, key.pos,
                            "expected key=value or end of line, got '" + key.text + "'");
            const Token eq = take();
            if (done() || peek().text == "=" || peek().text == "->")
                return fail(DiagCode::SyntaxError, eq.pos, "missing value after '='");
            const Token val = take();
            for (const auto& kv : out)
                if (kv.key == key.text)
                    return fail(DiagCode::DuplicateKey, key.pos, "key given twice: " + key.text);
            out.push_back({key.text, val.text, key.pos, val.pos});
        }
        return true;
    }
};

int source_arity(const std::string& kind) {
    if (kind == "spdc") return 2;
    if (kind == "single" || kind == "wcp" || kind == "vacuum") return 1;
    return -1;
}

int elem_arity(const std::string& kind) {
    if (kind == "pbs" || kind == "pbs45") return 2;
    if (kind == "hwp" || kind == "qwp" || kind == "polarizer" || kind == "mismatch" ||
        kind == "pauli")
        return 1;
    return -1;
}

bool is_outcome_letter(const std::string& t) {
    return t.size() == 1 && std::string("HVPMLR").find(t[0]) != std::string::npos;
}

}  // namespace

ParseResult parse(std::string_view text) {
    ParseResult result;
    NetlistAst ast;
    std::set<std::string> set_keys;

    std::string buf(text);
    std::istringstream in(buf);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::vector<Token> toks;
        if (!lex_line(raw, line_no, toks, result.diagnostics)) continue;
        if (toks.empty()) continue;

        LineParser p{toks, 0, result.diagnostics};
        const Token head = p.take();
        const SourcePos stmt_pos = head.pos;

        if (head.text == "source") {
            SourceStmt s;
            if (!p.expect_word(s.kind, "source kind")) continue;
            const int arity = source_arity(s.kind);
            if (arity < 0) {
                p.fail(DiagCode::UnknownKeyword, toks[p.at - 1].pos,
                       "unknown source kind: " + s.kind);
                continue;
            }
            bool ok = true;
            for (int k = 0; k < arity && ok; ++k) {
                std::string l;
                ok = p.expect_word(l, "line id");
                if (ok) s.lines.push_back(l);
            }
            if (!ok || !p.parse_kvs(s.kvs)) continue;
            ast.statements.push_back({std::move(s), stmt_pos});
        } else if (head.text == "elem") {
            ElemStmt e;
            if (!p.expect_word(e.kind, "element kind")) continue;
            const int arity = elem_arity(e.kind);
            if (arity < 0) {
                p.fail(DiagCode::UnknownKeyword, toks[p.at - 1].pos,
                       "unknown element kind: " + e.kind);
                continue;
            }
            bool ok = true;
            for (int k = 0; k < arity && ok; ++k) {
                std::string l;
                ok = p.expect_word(l, "line id");
                if (ok) e.in_lines.push_back(l);
            }
            if (!ok) continue;
            if (!p.done() && p.peek().text == "->") {
                p.take();
                for (int k = 0; k < arity && ok; ++k) {
                    std::string l;
                    ok = p.expect_word(l, "output line id");
                    if (ok) e.out_lines.push_back(l);
                }
                if (!ok) continue;
            }
            if (!p.parse_kvs(e.kvs)) continue;
            ast.statements.push_back({std::move(e), stmt_pos});
        } else if (head.text == "det") {
            DetStmt d;
            if (!p.expect_word(d.name, "detector name")) continue;
            if (!p.expect_word(d.line, "line id")) continue;
            if (!p.parse_kvs(d.kvs)) continue;
            ast.statements.push_back({std::move(d), stmt_pos});
        } else if (head.text == "herald") {
            HeraldStmt h;
            if (!p.expect_word(h.line, "line id")) continue;
            if (p.done()) {
                p.fail(DiagCode::SyntaxError, p.here(), "expected outcome letter (H V P M L R)");
                continue;
            }
            const Token out = p.take();
            if (!is_outcome_letter(out.text)) {
                p.fail(DiagCode::SyntaxError, out.pos,
                       "expected outcome letter (H V P M L R), got '" + out.text + "'");
                continue;
            }
            h.outcome = out.text[0];
            if (!p.done()) {
                p.fail(DiagCode::SyntaxError, p.peek().pos, "trailing tokens after herald");
                continue;
            }
            ast.statements.push_back({h, stmt_pos});
        } else if (head.text == "scan") {
            ScanStmt s;
            auto keyword = [&](const char* word) {
                if (p.done() || p.peek().text != word)
                    return p.fail(DiagCode::SyntaxError, p.here(),
                                  std::string("expected '") + word + "'");
                p.take();
                return true;
            };
            auto number = [&](double& out) {
                if (p.done()) return p.fail(DiagCode::SyntaxError, p.here(), "expected number");
                const Token t = p.take();
                const char* b = t.text.data();
                const char* e = b + t.text.size();
                auto [ptr, ec] = std::from_chars(b, e, out);
                if (ec != std::errc() || ptr != e)
                    return p.fail(DiagCode::BadValue, t.pos, "not a number: " + t.text);
                return true;
            };
            bool ok = p.expect_word(s.var, "scan variable") && keyword("on") &&
                      p.expect_word(s.line, "line id") && keyword("from") && number(s.from) &&
                      keyword("to") && number(s.to) && keyword("steps");
            if (ok) {
                double steps = 0;
                ok = number(steps);
                if (ok && (steps != std::floor(steps)))
                    ok = p.fail(DiagCode::BadValue, toks[p.at - 1].pos, "steps must be an integer");
                s.steps = static_cast<int>(steps);
            }
            if (!ok) continue;
            if (!p.done()) {
                p.fail(DiagCode::SyntaxError, p.peek().pos, "trailing tokens after scan");
                continue;
            }
            ast.statements.push_back({s, stmt_pos});
        } else if (head.text == "set") {
            SetStmt s;
            if (!p.expect_word(s.key, "setting name")) continue;
            if (p.done() || p.peek().text != "=") {
                p.fail(DiagCode::SyntaxError, p.here(), "expected '='");
                continue;
            }
            p.take();
            if (!p.expect_word(s.value, "setting value")) continue;
            if (!p.done()) {
                p.fail(DiagCode::SyntaxError, p.peek().pos, "trailing tokens after set");
                continue;
            }
            if (!set_keys.insert(s.key).second) {
                p.fail(DiagCode::DuplicateSet, stmt_pos, "setting given twice: " + s.key);
                continue;
            }
            ast.statements.push_back({s, stmt_pos});
        } else {
            result.diagnostics.push_back(
                {DiagCode::UnknownKeyword, head.pos, "unknown keyword: " + head.text});
        }
    }

    if (result.diagnostics.empty()) result.ast = std::move(ast);
    return result;
}

namespace {

struct KvView {
    const std::vector<KeyValue>& kvs;
    std::vector<Diagnostic>& diags;
    SourcePos stmt_pos;
    bool ok = true;

    const KeyValue* find(const std::string& key) const {
        for (const auto& kv : kvs)
            if (kv.key == key) return &kv;
        return nullptr;
    }

    void check_known(std::initializer_list<const char*> known) {
        for (const auto& kv : kvs) {
            bool found = false;
            for (const char* k : known) found |= kv.key == k;
            if (!found) {
                diags.push_back({DiagCode::UnknownKey, kv.key_pos, "unknown key: " + kv.key});
                ok = false;
            }
        }
    }

    bool number(const std::string& key, double& out, bool required, double fallback) {
        const KeyValue* kv = find(key);
        if (!kv) {
            if (required) {
                diags.push_back({DiagCode::MissingKey, stmt_pos, "missing key: " + key});
                ok = false;
                return false;
            }
            out = fallback;
            return true;
        }
        const char* b = kv->value.data();
        const char* e = b + kv->value.size();
        auto [ptr, ec] = std::from_chars(b, e, out);
        if (ec != std::errc() || ptr != e) {
            diags.push_back({DiagCode::BadValue, kv->value_pos, "not a number: " + kv->value});
            ok = false;
            return false;
        }
        return true;
    }

    bool integer(const std::string& key, int& out, bool required, int fallback) {
        double d = fallback;
        if (!number(key, d, required, fallback)) return false;
        if (d != std::floor(d)) {
            diags.push_back({DiagCode::BadValue, find(key)->value_pos,
                             "expected an integer for " + key});
            ok = false;
            return false;
        }
        out = static_cast<int>(d);
        return true;
    }

    bool word(const std::string& key, std::string& out, bool required, std::string fallback) {
        const KeyValue* kv = find(key);
        if (!kv) {
            if (required) {
                diags.push_back({DiagCode::MissingKey, stmt_pos, "missing key: " + key});
                ok = false;
                return false;
            }
            out = std::move(fallback);
            return true;
        }
        out = kv->value;
        return true;
    }

    void range(const std::string& key, double v, double lo, double hi) {
        if (v < lo || v > hi) {
            const KeyValue* kv = find(key);
            diags.push_back({DiagCode::ParamOutOfRange,
                             kv ? kv->value_pos : stmt_pos,
                             key + " must lie in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]"});
            ok = false;
        }
    }
};

double normalize_angle(double deg) {
    double a = std::fmod(deg, 180.0);
    if (a < 0) a += 180.0;
    return a;
}

std::optional<BellKind> bell_from_word(const std::string& w) {
    if (w == "phip") return BellKind::PhiPlus;
    if (w == "phim") return BellKind::PhiMinus;
    if (w == "psip") return BellKind::PsiPlus;
    if (w == "psim") return BellKind::PsiMinus;
    return std::nullopt;
}

const char* bell_word(BellKind k) {
    switch (k) {
        case BellKind::PhiPlus: return "phip";
        case BellKind::PhiMinus: return "phim";
        case BellKind::PsiPlus: return "psip";
        case BellKind::PsiMinus: return "psim";
    }
    return "psim";
}

std::optional<char> pol_letter_from_word(const std::string& w) {
    if (w.size() == 1 && std::string("HVPMLR").find(w[0]) != std::string::npos) return w[0];
    return std::nullopt;
}

}  // namespace

CompileResult validate_and_compile(const NetlistAst& ast) {
    CompileResult result;
    auto& diags = result.diagnostics;
    CompiledCircuit c;
    c.cfg.bins = 2;
    c.cfg.max_total_photons = 6;

    // Settings first, wherever they appear.
    for (const auto& stmt : ast.statements) {
        if (const auto* s = std::get_if<SetStmt>(&stmt.node)) {
            double v = 0;
            auto num = [&](double lo, double hi, const char* what) {
                const char* b = s->value.data();
                auto [ptr, ec] = std::from_chars(b, b + s->value.size(), v);
                if (ec != std::errc() || ptr != b + s->value.size() || v != std::floor(v)) {
                    diags.push_back({DiagCode::BadValue, stmt.pos,
                                     std::string("expected an integer for ") + what});
                    return false;
                }
                if (v < lo || v > hi) {
                    diags.push_back({DiagCode::ParamOutOfRange, stmt.pos,
                                     std::string(what) + " out of range"});
                    return false;
                }
                return true;
            };
            if (s->key == "bins") {
                if (num(1, 4, "bins")) c.cfg.bins = static_cast<int>(v);
            } else if (s->key == "nmax") {
                if (num(1, 12, "nmax")) c.cfg.max_total_photons = static_cast<int>(v);
            } else {
                diags.push_back({DiagCode::UnknownKey, stmt.pos, "unknown setting: " + s->key});
            }
        }
    }

    std::map<std::string, SourcePos> live;       // live lines -> declaration position
    std::map<std::string, SourcePos> watched;    // line -> det/herald position
    std::optional<SourcePos> scan_pos;

    auto check_line = [&](const std::string& line, SourcePos pos) {
        if (live.count(line)) return true;
        diags.push_back({DiagCode::UndeclaredLine, pos, "line is not declared here: " + line});
        return false;
    };

    for (const auto& stmt : ast.statements) {
        if (const auto* s = std::get_if<SourceStmt>(&stmt.node)) {
            sources::SourceSpec spec;
            spec.lines = s->lines;
            KvView kv{s->kvs, diags, stmt.pos};
            if (s->kind == "spdc") {
                spec.kind = sources::SourceKind::SpdcPair;
                kv.check_known({"p", "bell", "order"});
                double p = 0.05;
                kv.number("p", p, false, 0.05);
                kv.range("p", p, 0.0, 0.1);
                spec.pair_prob = p;
                int order = 2;
                kv.integer("order", order, false, 2);
                if (order != 1 && order != 2) {
                    diags.push_back({DiagCode::ParamOutOfRange, stmt.pos, "order must be 1 or 2"});
                    kv.ok = false;
                }
                spec.order = order;
                std::string bell = "psim";
                kv.word("bell", bell, false, "psim");
                if (auto b = bell_from_word(bell)) {
                    spec.bell = *b;
                } else {
                    diags.push_back({DiagCode::BadValue, stmt.pos, "unknown bell kind: " + bell});
                    kv.ok = false;
                }
            } else if (s->kind == "single") {
                spec.kind = sources::SourceKind::SinglePhoton;
                kv.check_known({"pol"});
                std::string pol = "H";
                kv.word("pol", pol, false, "H");
                if (auto l = pol_letter_from_word(pol)) {
                    spec.pol = QubitState::named(*l);
                } else {
                    diags.push_back({DiagCode::BadValue, stmt.pos, "unknown polarization: " + pol});
                    kv.ok = false;
                }
            } else if (s->kind == "wcp") {
                spec.kind = sources::SourceKind::WeakCoherent;
                kv.check_known({"mu", "pol"});
                double mu = 0.05;
                kv.number("mu", mu, false, 0.05);
                kv.range("mu", mu, 0.0, 1.0);
                spec.mu = mu;
                std::string pol = "H";
                kv.word("pol", pol, false, "H");
                if (auto l = pol_letter_from_word(pol)) {
                    spec.pol = QubitState::named(*l);
                } else {
                    diags.push_back({DiagCode::BadValue, stmt.pos, "unknown polarization: " + pol});
                    kv.ok = false;
                }
            } else {  // vacuum
                spec.kind = sources::SourceKind::Vacuum;
                kv.check_known({});
            }
            bool dup = false;
            for (const auto& l : s->lines) {
                if (live.count(l)) {
                    diags.push_back({DiagCode::DuplicateLine, stmt.pos,
                                     "line already fed by a source: " + l});
                    dup = true;
                }
            }
            if (s->lines.size() == 2 && s->lines[0] == s->lines[1]) {
                diags.push_back({DiagCode::DuplicateLine, stmt.pos,
                                 "source lists the same line twice: " + s->lines[0]});
                dup = true;
            }
            if (!kv.ok || dup) continue;
            for (const auto& l : s->lines) {
                live.emplace(l, stmt.pos);
                c.initial_lines.push_back(l);
            }
            c.pipeline.emplace_back(std::move(spec));
        } else if (const auto* e = std::get_if<ElemStmt>(&stmt.node)) {
            optics::ElementSpec spec;
            spec.in_lines = e->in_lines;
            spec.out_lines = e->out_lines;
            KvView kv{e->kvs, diags, stmt.pos};
            if (e->kind == "hwp" || e->kind == "qwp" || e->kind == "polarizer") {
                spec.kind = e->kind == "hwp"   ? optics::ElementKind::Hwp
                            : e->kind == "qwp" ? optics::ElementKind::Qwp
                                               : optics::ElementKind::Polarizer;
                kv.check_known({"theta"});
                double theta = 0;
                kv.number("theta", theta, true, 0.0);
                spec.angle_deg = normalize_angle(theta);
            } else if (e->kind == "mismatch") {
                spec.kind = optics::ElementKind::Mismatch;
                kv.check_known({"lambda"});
                double lambda = 1.0;
                kv.number("lambda", lambda, true, 1.0);
                kv.range("lambda", lambda, 0.0, 1.0);
                spec.lambda = lambda;
            } else if (e->kind == "pauli") {
                spec.kind = optics::ElementKind::Pauli;
                kv.check_known({"kind"});
                std::string k = "x";
                kv.word("kind", k, true, "x");
                if (k == "x") spec.pauli = optics::PauliKind::X;
                else if (k == "y") spec.pauli = optics::PauliKind::Y;
                else if (k == "z") spec.pauli = optics::PauliKind::Z;
                else {
                    diags.push_back({DiagCode::BadValue, stmt.pos, "unknown pauli kind: " + k});
                    kv.ok = false;
                }
            } else {  // pbs / pbs45
                spec.kind = e->kind == "pbs" ? optics::ElementKind::Pbs : optics::ElementKind::Pbs45;
                kv.check_known({});
                if (e->in_lines.size() == 2 && e->in_lines[0] == e->in_lines[1]) {
                    diags.push_back({DiagCode::DuplicateLine, stmt.pos,
                                     "element lists the same line twice"});
                    kv.ok = false;
                }
                if (e->out_lines.size() == 2 && e->out_lines[0] == e->out_lines[1]) {
                    diags.push_back({DiagCode::DuplicateLine, stmt.pos,
                                     "element lists the same output line twice"});
                    kv.ok = false;
                }
            }
            bool lines_ok = kv.ok;
            for (const auto& l : e->in_lines) lines_ok &= check_line(l, stmt.pos);
            if (!e->out_lines.empty()) {
                for (const auto& l : e->out_lines) {
                    if (live.count(l) &&
                        std::find(e->in_lines.begin(), e->in_lines.end(), l) == e->in_lines.end()) {
                        diags.push_back({DiagCode::DuplicateLine, stmt.pos,
                                         "output line already exists: " + l});
                        lines_ok = false;
                    }
                }
            }
            if (!lines_ok) continue;
            if (!e->out_lines.empty()) {
                for (const auto& l : e->in_lines) live.erase(l);
                for (const auto& l : e->out_lines) live.emplace(l, stmt.pos);
            }
            c.pipeline.emplace_back(std::move(spec));
        } else if (const auto* d = std::get_if<DetStmt>(&stmt.node)) {
            detection::DetectorSpec spec;
            spec.name = d->name;
            spec.line = d->line;
            KvView kv{d->kvs, diags, stmt.pos};
            kv.check_known({"basis", "angle"});
            std::string basis = "HV";
            kv.word("basis", basis, false, "HV");
            if (basis == "HV") spec.basis = detection::AnalysisBasis::HV;
            else if (basis == "PM") spec.basis = detection::AnalysisBasis::PM;
            else if (basis == "CIRC") spec.basis = detection::AnalysisBasis::Circ;
            else if (basis == "POL") spec.basis = detection::AnalysisBasis::Polarizer;
            else {
                diags.push_back({DiagCode::BadValue, stmt.pos, "unknown basis: " + basis});
                kv.ok = false;
            }
            if (spec.basis == detection::AnalysisBasis::Polarizer && kv.ok) {
                double angle = 0;
                kv.number("angle", angle, true, 0.0);
                spec.angle_deg = normalize_angle(angle);
            } else if (kv.find("angle")) {
                diags.push_back({DiagCode::UnknownKey, kv.find("angle")->key_pos,
                                 "angle is only valid with basis=POL"});
                kv.ok = false;
            }
            if (!check_line(d->line, stmt.pos) || !kv.ok) continue;
            if (watched.count(d->line)) {
                diags.push_back({DiagCode::DuplicateDetector, stmt.pos,
                                 "line already watched: " + d->line});
                continue;
            }
            watched[d->line] = stmt.pos;
            c.detectors.push_back(std::move(spec));
        } else if (const auto* h = std::get_if<HeraldStmt>(&stmt.node)) {
            if (!check_line(h->line, stmt.pos)) continue;
            if (watched.count(h->line)) {
                diags.push_back({DiagCode::DuplicateDetector, stmt.pos,
                                 "line already watched: " + h->line});
                continue;
            }
            watched[h->line] = stmt.pos;
            c.pipeline.emplace_back(HeraldItem{h->line, h->outcome});
        } else if (const auto* s = std::get_if<ScanStmt>(&stmt.node)) {
            if (scan_pos) {
                diags.push_back({DiagCode::MultipleScan, stmt.pos, "only one scan is allowed"});
                continue;
            }
            if (!check_line(s->line, stmt.pos)) continue;
            if (s->steps < 2) {
                diags.push_back({DiagCode::ParamOutOfRange, stmt.pos,
                                 "scan needs at least 2 steps"});
                continue;
            }
            scan_pos = stmt.pos;
            c.scan = detection::ScanSpec{s->line, s->from, s->to, s->steps};
        }
        // SetStmt handled above.
    }

    // Every line still live at the end can carry photons and must be watched.
    for (const auto& [l, pos] : live) {
        if (!watched.count(l)) {
            diags.push_back({DiagCode::LineNeverDetected, pos,
                             "occupied line has no detector or herald: " + l});
        }
    }
    if (c.scan) {
        bool has_det = false;
        for (const auto& d : c.detectors) has_det |= d.line == c.scan->line;
        if (!has_det)
            diags.push_back({DiagCode::LineNeverDetected, *scan_pos,
                             "scan target has no detector: " + c.scan->line});
    }

    if (diags.empty()) result.circuit = std::move(c);
    return result;
}

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

char qubit_letter(const QubitState& q) {
    for (char c : std::string("HVPMLR")) {
        const QubitState ref = QubitState::named(c);
        if (std::abs(q.alpha - ref.alpha) < 1e-12 && std::abs(q.beta - ref.beta) < 1e-12) return c;
    }
    return '?';
}

}  // namespace

std::string render(const CompiledCircuit& c) {
    std::ostringstream os;
    if (c.pipeline.empty() && c.detectors.empty()) return "";
    os << "set bins = " << c.cfg.bins << "\n";
    os << "set nmax = " << c.cfg.max_total_photons << "\n";
    for (const auto& item : c.pipeline) {
        if (const auto* s = std::get_if<sources::SourceSpec>(&item)) {
            switch (s->kind) {
                case sources::SourceKind::SpdcPair:
                    os << "source spdc " << s->lines[0] << " " << s->lines[1]
                       << " p=" << fmt_num(s->pair_prob) << " bell=" << bell_word(s->bell)
                       << " order=" << s->order << "\n";
                    break;
                case sources::SourceKind::WeakCoherent:
                    os << "source wcp " << s->lines[0] << " mu=" << fmt_num(s->mu)
                       << " pol=" << qubit_letter(s->pol) << "\n";
                    break;
                case sources::SourceKind::SinglePhoton:
                    os << "source single " << s->lines[0] << " pol=" << qubit_letter(s->pol)
                       << "\n";
                    break;
                case sources::SourceKind::Vacuum:
                    os << "source vacuum " << s->lines[0] << "\n";
                    break;
            }
        } else if (const auto* e = std::get_if<optics::ElementSpec>(&item)) {
            auto lines = [&] {
                std::string t;
                for (const auto& l : e->in_lines) t += " " + l;
                if (!e->out_lines.empty()) {
                    t += " ->";
                    for (const auto& l : e->out_lines) t += " " + l;
                }
                return t;
            }();
            switch (e->kind) {
                case optics::ElementKind::Hwp:
                    os << "elem hwp" << lines << " theta=" << fmt_num(e->angle_deg) << "\n";
                    break;
                case optics::ElementKind::Qwp:
                    os << "elem qwp" << lines << " theta=" << fmt_num(e->angle_deg) << "\n";
                    break;
                case optics::ElementKind::Polarizer:
                    os << "elem polarizer" << lines << " theta=" << fmt_num(e->angle_deg) << "\n";
                    break;
                case optics::ElementKind::Mismatch:
                    os << "elem mismatch" << lines << " lambda=" << fmt_num(e->lambda) << "\n";
                    break;
                case optics::ElementKind::Pauli:
                    os << "elem pauli" << lines << " kind="
                       << (e->pauli == optics::PauliKind::X   ? "x"
                           : e->pauli == optics::PauliKind::Y ? "y"
                                                              : "z")
                       << "\n";
                    break;
                case optics::ElementKind::Pbs:
                    os << "elem pbs" << lines << "\n";
                    break;
                case optics::ElementKind::Pbs45:
                    os << "elem pbs45" << lines << "\n";
                    break;
            }
        } else if (const auto* h = std::get_if<HeraldItem>(&item)) {
            os << "herald " << h->line << " " << h->outcome << "\n";
        }
    }
    for (const auto& d : c.detectors) {
        os << "det " << d.name << " " << d.line;
        switch (d.basis) {
            case detection::AnalysisBasis::HV: os << " basis=HV"; break;
            case detection::AnalysisBasis::PM: os << " basis=PM"; break;
            case detection::AnalysisBasis::Circ: os << " basis=CIRC"; break;
            case detection::AnalysisBasis::Polarizer:
                os << " basis=POL angle=" << fmt_num(d.angle_deg);
                break;
        }
        os << "\n";
    }
    if (c.scan) {
        os << "scan theta on " << c.scan->line << " from " << fmt_num(c.scan->start_deg) << " to "
           << fmt_num(c.scan->stop_deg) << " steps " << c.scan->steps << "\n";
    }
    return os.str();
}

CompileResult compile_text(std::string_view text) {
    ParseResult pr = parse(text);
    if (!pr.ok()) return CompileResult{std::nullopt, std::move(pr.diagnostics)};
    return validate_and_compile(*pr.ast);
}

CompileResult compile_file(const std::string& path, std::string* error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (error) *error = "cannot open " + path;
        return CompileResult{std::nullopt, {}};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return compile_text(ss.str());
}

std::vector<detection::CoincidenceResult> run_circuit(const CompiledCircuit& c) {
    std::optional<Ket> acc;
    std::vector<detection::DetectorSpec> all_detectors;

    int temp_counter = 0;
    for (const auto& item : c.pipeline) {
        if (const auto* s = std::get_if<sources::SourceSpec>(&item)) {
            auto reg = ModeRegistry::make(s->lines, c.cfg);
            Ket k = sources::make_source(reg, *s);
            acc = acc ? tensor(*acc, k) : k;
        } else if (const auto* e = std::get_if<optics::ElementSpec>(&item)) {
            if (!acc) throw std::logic_error("element before any source");
            optics::ElementSpec eff = *e;
            if ((eff.kind == optics::ElementKind::Pbs ||
                 eff.kind == optics::ElementKind::Pbs45) &&
                eff.out_lines.empty()) {
                // keep the input names: route through temporaries
                std::vector<std::string> temps{"?tmp" + std::to_string(temp_counter++),
                                               "?tmp" + std::to_string(temp_counter++)};
                eff.out_lines = temps;
                Ket out = optics::apply_element(*acc, eff).state;
                out = relabel_line(out, temps[0], eff.in_lines[0]);
                out = relabel_line(out, temps[1], eff.in_lines[1]);
                acc = out;
            } else {
                acc = optics::apply_element(*acc, eff).state;
            }
        } else if (const auto* h = std::get_if<HeraldItem>(&item)) {
            detection::DetectorSpec spec;
            spec.name = "herald_" + h->line;
            spec.line = h->line;
            spec.fixed_state = QubitState::named(h->outcome);
            spec.fixed_letter = h->outcome;
            spec.exclusive = true;
            all_detectors.push_back(std::move(spec));
        }
    }
    if (!acc) return {};
    // A mid-pipeline polarizer can absorb everything; keep the zero state.
    Ket psi = acc->norm_sq() > 0.0 ? acc->normalized() : *acc;

    // Detector pattern order: heralds first (pipeline order), then detectors.
    for (const auto& d : c.detectors) all_detectors.push_back(d);
    return detection::coincidence_scan(psi, all_detectors, c.scan);
}

}  // namespace loqsim::netlist
