#include "rosa/toolkit/registry.hpp"

#include "rosa/graphsim/graph.hpp"

#include <cmath>
#include <set>

namespace rosa::toolkit {

namespace {

const ParamSpec kBlacklistParam{
    "blacklist", ValueType::StringList, false, std::nullopt,
    "Names to exclude from the output. Entries ending in '*' exclude every name with that prefix."};

// Coerces a numeric string (or a list of them) where the target type is
// numeric. Returns nullopt when no unambiguous coercion exists.
std::optional<Json> coerce(const Json& value, ValueType type) {
    if (conforms(value, type)) {
        if (type == ValueType::Integer && value.is_number_float()) {
            return Json(static_cast<std::int64_t>(value.get<double>()));
        }
        return value;
    }
    if ((type == ValueType::Number || type == ValueType::Integer) && value.is_string()) {
        const auto parsed = parse_number(value.get<std::string>());
        if (!parsed) {
            return std::nullopt;
        }
        if (type == ValueType::Integer) {
            if (std::floor(*parsed) != *parsed) {
                return std::nullopt;
            }
            return Json(static_cast<std::int64_t>(*parsed));
        }
        return Json(*parsed);
    }
    if (type == ValueType::NumberList && value.is_array()) {
        Json out = Json::array();
        for (const auto& item : value) {
            auto c = coerce(item, ValueType::Number);
            if (!c) {
                return std::nullopt;
            }
            out.push_back(*c);
        }
        return out;
    }
    return std::nullopt;
}

}  // namespace

void ToolRegistry::register_tool(ToolSpec spec, ToolImpl impl) {
    if (sealed_) {
        throw RegistryError(RegistryError::Code::Sealed, "registry is sealed; cannot add '" + spec.name + "'");
    }
    if (spec.name.empty()) {
        throw RegistryError(RegistryError::Code::BadSpec, "tool name must not be empty");
    }
    if (spec.description.empty()) {
        throw RegistryError(RegistryError::Code::MissingDescription, "tool '" + spec.name + "' has no description");
    }
    if (tools_.count(spec.name) != 0) {
        throw RegistryError(RegistryError::Code::DuplicateTool, "tool '" + spec.name + "' is already registered");
    }
    if (!impl) {
        throw RegistryError(RegistryError::Code::BadSpec, "tool '" + spec.name + "' has no implementation");
    }
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.params.size(); ++j) {
            if (spec.params[i].name == spec.params[j].name) {
                throw RegistryError(RegistryError::Code::BadSpec,
                                    "tool '" + spec.name + "' declares '" + spec.params[i].name + "' twice");
            }
        }
    }
    if (spec.accepts_blacklist && spec.param("blacklist") == nullptr) {
        spec.params.push_back(kBlacklistParam);
    }
    order_.push_back(spec.name);
    auto name = spec.name;
    tools_.emplace(std::move(name), Entry{std::move(spec), std::move(impl)});
}

void ToolRegistry::retain(const std::vector<std::string>& names) {
    if (sealed_) {
        throw RegistryError(RegistryError::Code::Sealed, "registry is sealed");
    }
    std::set<std::string, std::less<>> keep;
    for (const auto& n : names) {
        if (!tools_.count(n)) {
            throw RegistryError(RegistryError::Code::BadSpec, "cannot enable unknown tool " + n);
        }
        keep.insert(n);
    }
    std::vector<std::string> order;
    for (auto& n : order_) {
        if (keep.count(n)) {
            order.push_back(n);
        } else {
            tools_.erase(n);
        }
    }
    order_ = std::move(order);
}

const ToolSpec* ToolRegistry::find(std::string_view name) const {
    auto it = tools_.find(name);
    return it == tools_.end() ? nullptr : &it->second.spec;
}

std::vector<ToolSpec> ToolRegistry::specs() const {
    std::vector<ToolSpec> out;
    out.reserve(order_.size());
    for (const auto& name : order_) {
        out.push_back(tools_.find(name)->second.spec);
    }
    return out;
}

Json ToolRegistry::catalog() const {
    Json entries = Json::array();
    for (const auto& name : order_) {
        const auto& spec = tools_.find(name)->second.spec;
        Json params = Json::array();
        for (const bool required_pass : {true, false}) {
            for (const auto& p : spec.params) {
                if (p.required != required_pass) {
                    continue;
                }
                Json param{{"name", p.name},
                           {"type", std::string(to_string(p.type))},
                           {"required", p.required},
                           {"description", p.description}};
                if (p.default_value) {
                    param["default"] = *p.default_value;
                }
                params.push_back(std::move(param));
            }
        }
        entries.push_back({{"name", spec.name},
                           {"description", spec.description},
                           {"direction", std::string(to_string(spec.direction))},
                           {"requires_confirmation", spec.requires_confirmation},
                           {"params", std::move(params)}});
    }
    return entries;
}

std::string ToolRegistry::render_catalog() const {
    return canonical(catalog());
}

std::variant<Json, ToolError> ToolRegistry::validate(const ToolSpec& spec, const Json& args) const {
    ToolError error{"ArgValidation", "", {}};
    Json normalized = Json::object();
    const Json input = args.is_null() ? Json::object() : args;
    if (!input.is_object()) {
        error.violations.push_back("arguments must be a JSON object");
    } else {
        for (const auto& [key, value] : input.items()) {
            if (spec.param(key) == nullptr) {
                error.violations.push_back("unknown argument '" + key + "'");
            }
        }
        for (const auto& p : spec.params) {
            auto it = input.find(p.name);
            if (it == input.end() || it->is_null()) {
                if (p.required) {
                    error.violations.push_back("missing required argument '" + p.name + "'");
                } else if (p.default_value) {
                    normalized[p.name] = *p.default_value;
                }
                continue;
            }
            auto coerced = coerce(*it, p.type);
            if (!coerced) {
                error.violations.push_back("argument '" + p.name + "' must be " + std::string(to_string(p.type)));
                continue;
            }
            normalized[p.name] = std::move(*coerced);
        }
    }
    if (!error.violations.empty()) {
        error.message = "invalid arguments for '" + spec.name + "': ";
        for (std::size_t i = 0; i < error.violations.size(); ++i) {
            error.message += (i == 0 ? "" : "; ") + error.violations[i];
        }
        return error;
    }
    return normalized;
}

InvokeResult ToolRegistry::invoke(std::string_view name, const Json& args) const {
    ToolContext ctx;
    return invoke(name, args, ctx);
}

InvokeResult ToolRegistry::invoke(std::string_view name, const Json& args, ToolContext& ctx) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) {
        return ToolError{"UnknownTool", "no tool named '" + std::string(name) + "'", {}};
    }
    const auto& entry = it->second;
    auto validated = validate(entry.spec, args);
    if (auto* err = std::get_if<ToolError>(&validated)) {
        return *err;
    }
    if (entry.spec.direction == Direction::Uplink && ctx.gate != nullptr) {
        if (auto refusal = ctx.gate->admit(entry.spec)) {
            return *refusal;
        }
    }
    try {
        return ToolResult::from(entry.impl(std::get<Json>(validated), ctx));
    } catch (const ToolFailure& e) {
        return ToolError{e.code(), e.what(), {}};
    } catch (const graphsim::GraphError& e) {
        return ToolError{std::string(graphsim::to_string(e.code())), e.what(), {}};
    } catch (const std::exception& e) {
        return ToolError{"Failed", e.what(), {}};
    } catch (...) {
        return ToolError{"Failed", "tool raised an unknown exception", {}};
    }
}

ToolRegistry inject_blacklist(ToolRegistry registry, const Blacklist& global) {
    registry.global_blacklist_ = Blacklist::merge(registry.global_blacklist_, global);
    for (auto& [name, entry] : registry.tools_) {
        if (!entry.spec.accepts_blacklist) {
            continue;
        }
        entry.impl = [inner = std::move(entry.impl), global](const Json& args, ToolContext& ctx) {
            Json effective = args;
            const auto agent = Blacklist::from_json(args.value("blacklist", Json::array()));
            effective["blacklist"] = Blacklist::merge(global, agent).entries();
            return inner(effective, ctx);
        };
    }
    return registry;
}

}  // namespace rosa::toolkit
