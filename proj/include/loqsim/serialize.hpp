#pragma once

#include <json.hpp>
#include <string>

#include "loqsim/experiments.hpp"

// Stable-key-order JSON and CSV encodings of experiment results.

namespace loqsim::serialize {

using json = nlohmann::ordered_json;

json to_json(const experiments::TruthTableResult& r);
json to_json(const experiments::EntangleResult& r);
json to_json(const experiments::TeleportResult& r);
json baseline_json(const std::string& mode, double value, int samples, std::uint64_t seed);

std::string to_csv(const experiments::TruthTableResult& r);
std::string to_csv(const experiments::EntangleResult& r);
std::string to_csv(const experiments::TeleportResult& r);

}  // namespace loqsim::serialize
