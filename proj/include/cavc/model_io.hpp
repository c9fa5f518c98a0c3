#pragma once

#include <string>

#include <json.hpp>

#include "cavc/capacity.hpp"
#include "cavc/channel.hpp"
#include "cavc/codec.hpp"
#include "cavc/symmetry.hpp"

namespace cavc {

using Json = nlohmann::ordered_json;

// Model documents carry input_alphabet, output_alphabet, states (label +
// family 1|2|"both") and the kernel as nested [x][s][y] arrays.
CavcModel model_from_json(const Json& j);
Json model_to_json(const CavcModel& model);
CavcModel load_model(const std::string& path);
void save_model(const CavcModel& model, const std::string& path);

Json codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const Json& j);

Json classification_to_json(const ClassificationReport& rep);
Json capacity_to_json(const CapacityResult& result, Task task, const GridBracket* bracket);

// Decimal with six significant digits (report values).
std::string format_sig6(double v);

}  // namespace cavc
