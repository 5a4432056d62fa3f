#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "loqsim/detection.hpp"
#include "loqsim/optics.hpp"
#include "loqsim/sources.hpp"

namespace loqsim::netlist {

struct SourcePos {
    int line = 0;  // 1-based
    int col = 0;   // 1-based
};

enum class DiagCode {
    SyntaxError,
    UnknownKeyword,
    UnknownKey,
    MissingKey,
    DuplicateKey,
    BadValue,
    UndeclaredLine,
    LineNeverDetected,
    DuplicateDetector,
    ParamOutOfRange,
    DuplicateLine,
    MultipleScan,
    DuplicateSet,
};

const char* diag_code_name(DiagCode c);

struct Diagnostic {
    DiagCode code{DiagCode::SyntaxError};
    SourcePos pos;
    std::string message;

    /// "<file>:<line>:<col>: error[<Code>]: <message>"
    std::string render(const std::string& filename) const;
};

struct KeyValue {
    std::string key;
    std::string value;   // raw token
    SourcePos key_pos;
    SourcePos value_pos;
};

struct SourceStmt {
    std::string kind;  // spdc | bell | single | wcp | vacuum
    std::vector<std::string> lines;
    std::vector<KeyValue> kvs;
};

struct ElemStmt {
    std::string kind;  // hwp | qwp | pbs | pbs45 | polarizer | mismatch | pauli
    std::vector<std::string> in_lines;
    std::vector<std::string> out_lines;  // empty unless "->" present
    std::vector<KeyValue> kvs;
};

struct DetStmt {
    std::string name;
    std::string line;
    std::vector<KeyValue> kvs;
};

struct HeraldStmt {
    std::string line;
    char outcome = 'H';  // H V P M L R
};

struct ScanStmt {
    std::string var;
    std::string line;
    double from = 0.0;
    double to = 180.0;
    int steps = 2;
};

struct SetStmt {
    std::string key;
    std::string value;
};

struct Stmt {
    std::variant<SourceStmt, ElemStmt, DetStmt, HeraldStmt, ScanStmt, SetStmt> node;
    SourcePos pos;  // start of the statement
};

struct NetlistAst {
    std::vector<Stmt> statements;
};

struct ParseResult {
    std::optional<NetlistAst> ast;  // present iff no diagnostics
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Parses the DSL. Comments run from '#' to end of line. Never throws on
/// malformed input; problems are reported as positioned diagnostics.
ParseResult parse(std::string_view text);

struct HeraldItem {
    std::string line;
    char outcome;
};

using PipelineItem = std::variant<sources::SourceSpec, optics::ElementSpec, HeraldItem>;

struct CompiledCircuit {
    RegistryConfig cfg;                      // bins / truncation settings
    std::vector<std::string> initial_lines;  // lines created by sources
    std::vector<PipelineItem> pipeline;      // sources, elements, heralds in order
    std::vector<detection::DetectorSpec> detectors;
    std::optional<detection::ScanSpec> scan;

    int pipeline_size() const { return static_cast<int>(pipeline.size()); }
};

struct CompileResult {
    std::optional<CompiledCircuit> circuit;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Semantic validation: lines must be declared before use, every occupied
/// terminal line needs a detector or herald, at most one scan, parameters in
/// range. Angles are normalized to [0, 180).
CompileResult validate_and_compile(const NetlistAst& ast);

/// Canonical text; parse(render(c)) compiles to an equivalent circuit.
std::string render(const CompiledCircuit& c);

/// Convenience: parse + compile, merging diagnostics.
CompileResult compile_text(std::string_view text);
CompileResult compile_file(const std::string& path, std::string* error = nullptr);

/// Evolves the sources through the pipeline and evaluates all detector
/// patterns (heralds are fixed single-outcome analyzers).
std::vector<detection::CoincidenceResult> run_circuit(const CompiledCircuit& c);

}  // namespace loqsim::netlist
