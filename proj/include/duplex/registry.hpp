#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "duplex/chunk.hpp"

namespace duplex {

struct RegistryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ToolSchema {
    std::string name;
    std::string family;
    std::string description;
};

// The tool function registry. Control labels (interrupt/backchannel/response)
// are not tools and never load here.
class ToolRegistry {
public:
    void add(ToolSchema schema) {
        if (is_control_name(schema.name))
            throw RegistryError("control label '" + schema.name + "' is not a tool");
        if (by_name_.count(schema.name))
            throw RegistryError("duplicate tool name: " + schema.name);
        by_name_[schema.name] = tools_.size();
        tools_.push_back(std::move(schema));
    }

    bool contains(const std::string& name) const { return by_name_.count(name) > 0; }

    std::optional<ToolSchema> lookup(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return tools_[it->second];
    }

    size_t size() const { return tools_.size(); }
    const std::vector<ToolSchema>& tools() const { return tools_; }

    // Valid action names: registered tools plus the control vocabulary.
    bool valid_action_name(const std::string& name) const {
        return contains(name) || is_control_name(name);
    }

private:
    std::vector<ToolSchema> tools_;
    std::map<std::string, size_t> by_name_;
};

inline ToolRegistry load_tool_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RegistryError("cannot open tool registry: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw RegistryError("bad registry JSON in " + path + ": " + e.what());
    }
    if (!j.is_array()) throw RegistryError("registry must be a JSON list");
    ToolRegistry reg;
    for (const auto& item : j) {
        reg.add({item.at("name").get<std::string>(),
                 item.at("family").get<std::string>(),
                 item.value("description", std::string())});
    }
    return reg;
}

}  // namespace duplex
