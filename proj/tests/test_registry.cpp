#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "duplex/registry.hpp"

using namespace duplex;

TEST_CASE("the shipped registry holds exactly 50 tool functions") {
    auto reg = load_tool_registry(DUPLEX_DATA_DIR "/tool_registry.json");
    CHECK(reg.size() == 50);

    auto schema = reg.lookup("set_car_setting");
    REQUIRE(schema.has_value());
    CHECK(schema->family == "cabin");

    CHECK(reg.lookup("navigate")->family == "navigation");
    CHECK(reg.lookup("play_media")->family == "media");

    // control labels are not tools
    CHECK_FALSE(reg.contains("interrupt"));
    CHECK_FALSE(reg.contains("backchannel"));
    CHECK_FALSE(reg.contains("response"));
    // but they are valid action names
    CHECK(reg.valid_action_name("interrupt"));
    CHECK(reg.valid_action_name("make_call"));
    CHECK_FALSE(reg.valid_action_name("self_destruct"));
}

TEST_CASE("duplicate names fail to load") {
    const char* path = "dup_registry_tmp.json";
    {
        std::ofstream out(path);
        out << R"([{"name":"navigate","family":"navigation"},{"name":"navigate","family":"media"}])";
    }
    CHECK_THROWS_AS(load_tool_registry(path), RegistryError);
    std::remove(path);
}

TEST_CASE("control labels cannot be registered as tools") {
    ToolRegistry reg;
    CHECK_THROWS_AS(reg.add({"interrupt", "control", ""}), RegistryError);
}

TEST_CASE("missing file is an error") {
    CHECK_THROWS_AS(load_tool_registry("no/such/file.json"), RegistryError);
}
