#include "rosa/scenarios/scenario.hpp"

#include "rosa/kv_file.hpp"

#include <fstream>
#include <sstream>

namespace rosa::scenarios {

namespace {

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

[[noreturn]] void fail_at(const std::filesystem::path& source, int line, const std::string& what) {
    throw ScenarioError(source.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ScenarioDef ScenarioDef::parse(std::string_view text, const std::filesystem::path& source) {
    const auto doc = KvDocument::parse(text, source.string());
    ScenarioDef def;
    def.source = source;

    auto fail = [&](const KvEntry& e, const std::string& what) { fail_at(source, e.line, what); };
    auto node_of = [&](const KvEntry& e, const std::string& name) -> NodeSeed& {
        for (auto& n : def.nodes) {
            if (n.name == name) {
                return n;
            }
        }
        fail_at(source, e.line, "node " + name + " must be declared before use");
    };
    auto number = [&](const KvEntry& e) {
        auto v = parse_number(e.value);
        if (!v) {
            fail_at(source, e.line, e.key + " must be a number");
        }
        return *v;
    };

    for (const auto& e : doc.entries()) {
        if (e.key == "name") {
            def.name = e.value;
        } else if (e.key == "robot") {
            def.robot = e.value;
        } else if (e.key == "rsp") {
            def.rsp.push_back(e.value);
        } else if (e.key == "tool") {
            def.tools.push_back(e.value);
        } else if (e.key == "blacklist") {
            def.blacklist.push_back(e.value);
        } else if (e.key == "node") {
            if (!graphsim::is_valid_name(e.value)) {
                fail(e, "invalid node name " + e.value);
            }
            def.nodes.push_back({e.value, {}, {}, {}});
        } else if (e.key == "pub" || e.key == "sub") {
            const auto w = words(e.value);
            if (w.size() != 3) {
                fail(e, e.key + " needs <node> <topic> <type>");
            }
            auto& n = node_of(e, w[0]);
            (e.key == "pub" ? n.publications : n.subscriptions).push_back({w[1], w[2]});
        } else if (e.key == "service") {
            const auto w = words(e.value);
            if (w.size() != 2) {
                fail(e, "service needs <node> <service>");
            }
            node_of(e, w[0]).services.push_back(w[1]);
        } else if (e.key == "param") {
            const auto space = e.value.find_first_of(" \t");
            if (space == std::string::npos) {
                fail(e, "param needs <key> <json value>");
            }
            try {
                def.params.emplace_back(e.value.substr(0, space), Json::parse(trim(e.value.substr(space))));
            } catch (const Json::parse_error& err) {
                fail(e, std::string("param value is not JSON: ") + err.what());
            }
        } else if (e.key == "heading_error_deg") {
            def.heading_error_deg = number(e);
        } else if (e.key == "obstacle_distance_m") {
            def.obstacle_distance_m = number(e);
            if (def.obstacle_distance_m < 0) {
                fail(e, "obstacle_distance_m must not be negative");
            }
        } else if (e.key == "fov_deg") {
            def.fov_deg = number(e);
            if (!(def.fov_deg > 0 && def.fov_deg <= 360)) {
                fail(e, "fov_deg must be in (0, 360]");
            }
        } else if (e.key == "camera_description") {
            def.camera_description = e.value;
        } else if (e.key == "script") {
            def.script = source.parent_path() / e.value;
        } else {
            fail(e, "unknown key " + e.key);
        }
    }
    if (def.name.empty()) {
        throw ScenarioError(source.string() + ": missing name");
    }
    if (def.robot != "spot" && def.robot != "eels" && def.robot != "carter" && def.robot != "ros_demo") {
        throw ScenarioError(source.string() + ": robot must be spot, eels, carter or ros_demo");
    }
    if (def.rsp.empty()) {
        throw ScenarioError(source.string() + ": a robot scenario needs at least one rsp line");
    }
    return def;
}

ScenarioDef ScenarioDef::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

void ScenarioDef::apply_override(const std::string& key, const Json& value) {
    if (key == "camera_description") {
        if (!value.is_string()) {
            throw ScenarioError("camera_description must be a string");
        }
        camera_description = value.get<std::string>();
        return;
    }
    if (!value.is_number()) {
        throw ScenarioError(key + " must be a number");
    }
    const double v = value.get<double>();
    if (key == "heading_error_deg") {
        heading_error_deg = v;
    } else if (key == "obstacle_distance_m" && v >= 0) {
        obstacle_distance_m = v;
    } else if (key == "fov_deg" && v > 0 && v <= 360) {
        fov_deg = v;
    } else {
        throw ScenarioError("cannot override " + key + " with " + value.dump());
    }
}

ScenarioCatalog::ScenarioCatalog(const std::filesystem::path& directory) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
        if (entry.path().extension() == ".scenario") {
            auto def = ScenarioDef::load(entry.path());
            auto name = def.name;
            if (!defs_.emplace(name, std::move(def)).second) {
                throw ScenarioError("duplicate scenario name " + name);
            }
        }
    }
    if (ec) {
        throw ScenarioError("cannot read scenario directory " + directory.string() + ": " + ec.message());
    }
}

std::vector<std::string> ScenarioCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [name, def] : defs_) {
        out.push_back(name);
    }
    return out;
}

const ScenarioDef& ScenarioCatalog::get(const std::string& name) const {
    auto it = defs_.find(name);
    if (it == defs_.end()) {
        throw UnknownScenario(name);
    }
    return it->second;
}

}  // namespace rosa::scenarios
