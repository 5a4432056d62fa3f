#include "loqsim/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace loqsim::serialize {

namespace {

json noise_json(const experiments::NoiseConfig& n) {
    json j;
    j["lambda23"] = n.lambda23;
    j["lambda45"] = n.lambda45;
    j["pair_prob"] = n.pair_prob;
    j["mu"] = n.mu;
    j["spdc_order"] = n.spdc_order;
    return j;
}

json curve_json(const std::vector<double>& angles, const std::vector<double>& probs) {
    json j;
    j["angles_deg"] = angles;
    j["probabilities"] = probs;
    return j;
}

json qubit_json(const QubitState& q) {
    return json::array({q.alpha.real(), q.alpha.imag(), q.beta.real(), q.beta.imag()});
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

json to_json(const experiments::TruthTableResult& r) {
    json j;
    j["experiment"] = "cnot-table";
    j["noise"] = noise_json(r.noise);
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr;
        jr["input"] = row.input;
        jr["expected"] = row.expected;
        json outs;
        const char* names[4] = {"HH", "HV", "VH", "VV"};
        for (int k = 0; k < 4; ++k) outs[names[k]] = row.outputs[k];
        jr["outputs"] = outs;
        jr["herald_prob"] = row.herald_prob;
        jr["correct_prob"] = row.correct_prob;
        rows.push_back(jr);
    }
    j["tables"] = json{{"truth_table", rows}};
    j["curves"] = json::object();
    j["summary"] = json{{"fidelity", r.fidelity_mean},
                        {"fidelity_worst", r.fidelity_worst},
                        {"visibility", nullptr},
                        {"herald_prob", r.rows[0].herald_prob}};
    return j;
}

json to_json(const experiments::EntangleResult& r) {
    json j;
    j["experiment"] = "entangle-fringe";
    j["noise"] = noise_json(r.noise);
    json patterns;
    const char* names[4] = {"HH", "HV", "VH", "VV"};
    for (int k = 0; k < 4; ++k) patterns[names[k]] = r.hv_patterns[k];
    j["tables"] = json{{"hv_patterns", patterns},
                       {"unwanted_probability", r.unwanted_probability},
                       {"desired_unwanted_ratio",
                        std::isfinite(r.desired_unwanted_ratio)
                            ? json(r.desired_unwanted_ratio)
                            : json(nullptr)},
                       {"state_fidelity", r.state_fidelity}};
    j["curves"] = json{{"p2_fringe", curve_json(r.angles_deg, r.fringe)}};
    j["summary"] = json{{"fidelity", r.state_fidelity},
                        {"visibility", r.visibility},
                        {"herald_prob", r.herald_prob}};
    return j;
}

json to_json(const experiments::TeleportResult& r) {
    json j;
    j["experiment"] = "teleport";
    j["noise"] = noise_json(r.noise);
    j["input"] = qubit_json(r.input);
    json branches = json::array();
    json curves;
    for (const auto& b : r.branches) {
        json jb;
        jb["outcome"] = b.outcome;
        jb["pattern"] = b.pattern;
        jb["target"] = qubit_json(b.target);
        jb["probability"] = b.probability;
        jb["fidelity"] = b.fidelity;
        jb["fidelity_corrected"] = b.fidelity_corrected;
        branches.push_back(jb);
        curves[b.outcome] = curve_json(r.angles_deg, b.fringe);
    }
    j["tables"] = json{{"branches", branches}};
    j["curves"] = curves;
    j["summary"] = json{{"fidelity", r.average_fidelity},
                        {"fidelity_corrected", r.average_fidelity_corrected},
                        {"psi_offset_deg", r.psi_offset_deg},
                        {"herald_prob", r.herald_prob}};
    return j;
}

json baseline_json(const std::string& mode, double value, int samples, std::uint64_t seed) {
    json j;
    j["experiment"] = "classical-baseline";
    j["tables"] = json{{"mode", mode}, {"samples", samples}, {"seed", seed}};
    j["summary"] = json{{"fidelity", value}};
    return j;
}

std::string to_csv(const experiments::TruthTableResult& r) {
    std::string out = "input,pattern,probability\n";
    const char* names[4] = {"HH", "HV", "VH", "VV"};
    for (const auto& row : r.rows)
        for (int k = 0; k < 4; ++k)
            out += row.input + "," + names[k] + "," + num(row.outputs[k]) + "\n";
    return out;
}

std::string to_csv(const experiments::EntangleResult& r) {
    std::string out = "angle_deg,pattern,probability\n";
    for (size_t i = 0; i < r.angles_deg.size(); ++i)
        out += num(r.angles_deg[i]) + ",p,"  + num(r.fringe[i]) + "\n";
    return out;
}

std::string to_csv(const experiments::TeleportResult& r) {
    std::string out = "angle_deg,pattern,probability\n";
    for (size_t i = 0; i < r.angles_deg.size(); ++i)
        for (const auto& b : r.branches)
            out += num(r.angles_deg[i]) + "," + b.pattern + "," + num(b.fringe[i]) + "\n";
    return out;
}

}  // namespace loqsim::serialize
