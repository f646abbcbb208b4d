#pragma once

#include <json.hpp>
#include <string>

#include "quatsylv/sylvester.hpp"

namespace quatsylv {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor wire format:
//   {"shape": {"rows": [..], "cols": [..]}, "data": [[w,x,y,z], ...]}
// with data flat in lexicographic order, first index most significant, row
// multi-index major.
Json tensor_to_json(const QTensor& t);
QTensor tensor_from_json(const Json& j, const std::string& context = "tensor");

// Spec file: {"variant": ..., ("eta": ...,) "<slot>": tensor, ...}.
Json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const Json& j);

// Solution file: {"<unknown>": tensor, ..., "free_params_used": {...}}.
Json solution_to_json(const Solution& sol);
Solution solution_from_json(const Json& j);

Json report_to_json(const ConsistencyReport& rep);
std::string report_to_text(const ConsistencyReport& rep);

// Canonical serialization used for every file this project writes; parse ->
// dump is a fixpoint of it.
std::string canonical_dump(const Json& j);

Json load_json_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace quatsylv
