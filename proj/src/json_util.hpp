#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmx/missingness.hpp"

namespace gmx::detail {

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                const std::string& where);
const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                              const std::string& where);
double as_number(const nlohmann::json& v, const std::string& where);
std::uint64_t as_uint(const nlohmann::json& v, const std::string& where);
std::string as_string(const nlohmann::json& v, const std::string& where);
std::vector<double> as_numbers(const nlohmann::json& v, const std::string& where);

LambdaLaw parse_lambda_law(const nlohmann::json& j, const std::string& where);
nlohmann::json lambda_law_json(const LambdaLaw& law);

}  // namespace gmx::detail
